"""Chance-constrained open-pit mine scheduling with evolutionary algorithms."""
