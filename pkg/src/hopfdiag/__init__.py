"""Rewriting engine and exact model oracle for universal ribbon Hopf algebra categories."""
__version__ = "0.1.0"
