"""Exact computations on graded quotient rings: derivations, differentials, Ext and Frobenius twists."""

__version__ = "0.1.0"
