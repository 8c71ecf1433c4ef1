"""Unit tests for hslab."""
