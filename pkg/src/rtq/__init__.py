"""Thermodynamic performance of Bogoliubov-transformed bosonic cavity fields."""

__version__ = "0.1.0"
