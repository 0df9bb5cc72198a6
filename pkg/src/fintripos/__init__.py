"""Finite regular hyperdoctrines and triposes over finite frames."""

__version__ = "0.1.0"
