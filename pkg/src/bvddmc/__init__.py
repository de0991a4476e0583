"""Bounded model checking of BTOR2 models with bitvector decision diagrams."""

__version__ = "0.1.0"
