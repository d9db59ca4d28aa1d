"""Predict self-consistency outcomes from the structure of agent reasoning traces."""

__version__ = "0.1.0"
