"""Test package for hslab."""
