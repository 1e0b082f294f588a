"""Test suite for the fuzzy limit toolkit."""
