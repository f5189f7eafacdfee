"""Λ-scheme condensate: EIT response and quantum probe statistics."""

__version__ = "0.1.0"
