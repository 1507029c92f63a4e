"""Semantic-masked visual feature matching, mapping and relocalization."""

__version__ = "0.1.0"
