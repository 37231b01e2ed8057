"""Test suite for heptainv."""
