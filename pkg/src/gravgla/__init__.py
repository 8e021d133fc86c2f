"""Graded Lie algebroid gauge theory for gravity."""
