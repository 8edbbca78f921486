"""Exact analysis of n x (n+1) determinantal matrix germs."""

__version__ = "0.1.0"
