"""Exact first-passage analysis of random-letter Markov chains through their finite semigroups."""

__version__ = "0.1.0"
