"""Bundled fixtures: the 3x3 CAT rubric, its two parameter sets, demo data."""
