"""Tests for permsig."""
