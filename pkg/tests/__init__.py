"""Test suite for loopfinder."""
