"""Exact rational arithmetic.

Every exact number in this package is a ``Q``: gmpy2's mpq when gmpy2 is
installed, fractions.Fraction otherwise.  The two are interchangeable for
our purposes (arbitrary precision, hash-compatible, same operator surface);
mpq is roughly an order of magnitude faster on the determinant and density
workloads, which is why it is preferred.  Nothing else in the package may
construct rationals directly from floats: binary rounding artifacts must
stay out of exact pipelines, so float inputs go through an explicit,
clearly-labeled conversion at the boundary that needs one (the solver).
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)
HALF = Q(1, 2)


def as_q(x):
    """Coerce an int, Fraction, Q, or 'p/q' string to Q.

    Floats are refused on purpose; see the module docstring.
    """
    if isinstance(x, float):
        raise TypeError("refusing to coerce float %r to an exact rational" % (x,))
    if isinstance(x, str):
        return Q(x.strip())
    return Q(x)


def fmt_q(x):
    """Render as 'p/q' with the denominator always present ('3/1', '-1/3')."""
    q = Q(x)
    return "%d/%d" % (q.numerator, q.denominator)


def q_from_float(x, max_denominator=None):
    """Exact (or denominator-limited) rational from a float.

    The solver's single sanctioned float-to-exact crossing.
    """
    f = Fraction(x)
    if max_denominator is not None:
        f = f.limit_denominator(max_denominator)
    return Q(f)
