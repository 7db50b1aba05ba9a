"""Exact multiple ergodic averages, seminorms and PET induction over Z, Z[i] and Q."""

__version__ = "0.1.0"
