"""Test suite for lvsm."""
