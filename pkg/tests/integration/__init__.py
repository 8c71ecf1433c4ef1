"""Integration tests for hslab."""
