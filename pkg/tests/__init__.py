"""Tests for tutte-atlas."""
