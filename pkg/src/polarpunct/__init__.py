"""Puncturing patterns for polar codes: equivalence, symmetric patterns,
density evolution and SC-decoder simulation."""

__version__ = "0.1.0"
