"""Exact computations around tournament limits.

Enumeration and canonical forms, the Lyndon word machinery, density
polynomials, homomorphism densities in step tournamentons, the block
construction, and a Newton solver for hitting prescribed densities.
"""

__version__ = "0.1.0"

from .construction import build, context
from .flagalg import dimension, express
from .solver import probe_ball, solve
from .tournamentons import density
from .tournaments import canonicalize, enumerate_exact, parse

__all__ = [
    "build",
    "canonicalize",
    "context",
    "density",
    "dimension",
    "enumerate_exact",
    "express",
    "parse",
    "probe_ball",
    "solve",
]
