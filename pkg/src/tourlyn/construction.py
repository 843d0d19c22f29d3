"""The blow-up family W_k(s, t) and its Jacobian certification.

Let T_1, ..., T_ell be the non-trivial Lyndon tournaments on at most k
vertices in decreasing word order, n_i = |T_i|, N = sum n_i.  W_k(s, t)
blows vertex v_{i,j} of the host T_1 + ... + T_ell (direct sum) up to an
interval I_{i,j} of measure s_i * t_{i,j}, keeps a remainder interval I_0
that everything beats, and puts the transitive kernel on every diagonal
block.  The parameter domain is s, t > 0 with sum_i s_i sum_j t_{i,j} < 1.

Densities of the T_i in W_k(s, t) have closed forms as polynomials,
obtained by summing over the maps f: V(T_i) -> V(host) whose edge images
are forward (or collapsed) and whose fibers are acyclic:

    t(T_i, W_k) = sum_f prod_{j,j'} (s_j t_{j,j'})^{c_{j,j'}} / c_{j,j'}!

with c_{j,j'} the fiber size over v_{j,j'}.  Maps touching I_0 contribute
nothing because no T_i has a sink, which is why the host excludes I_0.
Each polynomial is homogeneous of degree n_i in s and in t, and its
unique monomial containing every t_{i,j} of row i once is
|Aut(T_i)| * s_i^{n_i} * prod_j t_{i,j} (the injective maps onto T_i).

The Jacobian d t(T_i, W_k) / d s_j is evaluated exactly at rational
points; a nonzero determinant at one point certifies det as a nonzero
polynomial, which is the computable content of the inverse-function step.
Two independent routes exist: the map-sum above (symbolic, k <= 4 by
default) and a per-point univariate restriction of the density with only
s_j left symbolic (fast, any k), and tests hold them equal.
"""

import random
import time
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, factorial

from .errors import BudgetError, DomainError, InconclusiveError
from .poly import Polynomial, det_rational, s_var, t_var
from .rational import ONE, ZERO, Q, as_q, fmt_q
from .tournaments import direct_sum, encode
from .tournamentons import (
    TRANSITIVE_KIND,
    acyclic_within,
    map_sum,
    step_tournamenton,
)
from .words import enumerate_lyndon, serialize_word, word_of

HOM_T_MAX = 5
HOM_HOST_MAX = 51
SYMBOLIC_TERM_CAP = 200000


@dataclass(frozen=True)
class WkContext:
    k: int
    lyndon_seq: tuple
    sizes: tuple
    N: int

    @property
    def ell(self):
        return len(self.lyndon_seq)


@dataclass(frozen=True)
class WkParams:
    s: tuple
    t: tuple


@lru_cache(maxsize=None)
def context(k):
    if not 3 <= k <= 5:
        raise DomainError("context is defined for 3 <= k <= 5")
    seq = tuple(enumerate_lyndon(k))
    sizes = tuple(T.n for T in seq)
    return WkContext(k=k, lyndon_seq=seq, sizes=sizes, N=sum(sizes))


def make_params(ctx, s, t):
    s = tuple(as_q(x) for x in s)
    t = tuple(tuple(as_q(x) for x in row) for row in t)
    p = WkParams(s=s, t=t)
    check_domain(ctx, p)
    return p


def check_domain(ctx, p):
    """Validate shapes and the open-domain condition; returns the remainder
    measure 1 - sum_i s_i sum_j t_{i,j} (the measure of I_0)."""
    if len(p.s) != ctx.ell:
        raise DomainError("expected %d s-values, got %d" % (ctx.ell, len(p.s)))
    if len(p.t) != ctx.ell or any(len(row) != n for row, n in zip(p.t, ctx.sizes)):
        raise DomainError("t rows must have lengths %s" % (ctx.sizes,))
    if any(x <= 0 for x in p.s) or any(x <= 0 for row in p.t for x in row):
        raise DomainError("all parameters must be strictly positive")
    used = sum((si * sum(row, ZERO) for si, row in zip(p.s, p.t)), ZERO)
    slack = ONE - used
    if slack <= 0:
        raise DomainError(
            "domain violated: sum_i s_i sum_j t_ij = %s >= 1" % fmt_q(used)
        )
    return slack


@lru_cache(maxsize=None)
def host_tournament(ctx):
    """The labeled direct sum T_1 + ... + T_ell; vertex order matches blocks."""
    return direct_sum(ctx.lyndon_seq)


@lru_cache(maxsize=None)
def _cross_matrix(ctx):
    # (N+1)x(N+1) with 0/1 entries: host edges among the first N, and every
    # interval beating the remainder I_0 at index N
    host = host_tournament(ctx)
    N = ctx.N
    rows = []
    for u in range(N + 1):
        row = []
        for v in range(N + 1):
            if u == v:
                row.append(ZERO)
            elif v == N:
                row.append(ONE)
            elif u == N:
                row.append(ZERO)
            else:
                row.append(ONE if host.out[u] >> v & 1 else ZERO)
        rows.append(tuple(row))
    return tuple(rows)


def block_labels(ctx):
    """Human block names in order: I_{i,j} with 1-based indices, then I_0."""
    labels = []
    for i, n in enumerate(ctx.sizes, start=1):
        for j in range(1, n + 1):
            labels.append("I_%d_%d" % (i, j))
    labels.append("I_0")
    return labels


def build(ctx, p):
    slack = check_domain(ctx, p)
    blocks = []
    for i, row in enumerate(p.t):
        for tij in row:
            blocks.append((p.s[i] * tij, TRANSITIVE_KIND))
    blocks.append((slack, TRANSITIVE_KIND))
    return step_tournamenton(blocks, _cross_matrix(ctx))


def homomorphism_set(T, host):
    """All maps V(T)->V(host) with forward-or-collapsed edges and acyclic
    fibers, as image tuples; DFS over vertices with incremental pruning."""
    if T.n > HOM_T_MAX:
        raise BudgetError("homomorphism_set is budgeted to |T| <= %d" % HOM_T_MAX)
    if host.n > HOM_HOST_MAX:
        raise BudgetError("homomorphism_set is budgeted to |host| <= %d" % HOM_HOST_MAX)
    n, m = T.n, host.n
    img = [0] * n
    fibers = [[] for _ in range(m)]
    found = []

    def rec(v):
        if v == n:
            found.append(tuple(img))
            return
        for w in range(m):
            ok = True
            for u in range(v):
                fu = img[u]
                if fu == w:
                    continue
                if T.out[u] >> v & 1:
                    if not host.out[fu] >> w & 1:
                        ok = False
                        break
                elif not host.out[w] >> fu & 1:
                    ok = False
                    break
            if not ok:
                continue
            if not acyclic_within(T.out, fibers[w] + [v]):
                continue
            img[v] = w
            fibers[w].append(v)
            rec(v + 1)
            fibers[w].pop()

    rec(0)
    return found


def _vertex_vars(ctx):
    # host vertex index -> (s-variable, t-variable)
    pairs = []
    for i, n in enumerate(ctx.sizes, start=1):
        for j in range(1, n + 1):
            pairs.append((s_var(i), t_var(i, j)))
    return pairs


_symbolic_cache = {}


def symbolic_density(ctx, i, budget_seconds=None, max_terms=SYMBOLIC_TERM_CAP):
    """t(T_i, W_k) as an exact polynomial in the s- and t-variables (i is
    1-based, matching the variable names).

    k = 5 hosts have 51 vertices, so the full map enumeration is gated
    behind an explicit time budget; k <= 4 runs unconditionally.
    """
    if not 1 <= i <= ctx.ell:
        raise DomainError("index i must be in 1..%d" % ctx.ell)
    key = (ctx, i)
    if key in _symbolic_cache:
        return _symbolic_cache[key]
    if ctx.k >= 5 and budget_seconds is None:
        raise BudgetError(
            "symbolic_density at k >= 5 requires an explicit budget_seconds"
        )
    deadline = None if budget_seconds is None else time.monotonic() + budget_seconds
    T = ctx.lyndon_seq[i - 1]
    host = host_tournament(ctx)
    vvars = _vertex_vars(ctx)
    terms = {}
    n, m = T.n, host.n
    img = [0] * n
    fibers = [[] for _ in range(m)]
    counter = 0
    nodes = 0

    def check_deadline():
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetError("symbolic_density budget exhausted")

    def emit():
        nonlocal counter
        counter += 1
        if counter % 512 == 0:
            check_deadline()
        exps = {}
        coeff = ONE
        for w in range(m):
            c = len(fibers[w])
            if not c:
                continue
            sv, tv = vvars[w]
            exps[sv] = exps.get(sv, 0) + c
            exps[tv] = c
            coeff /= factorial(c)
        mono = tuple(sorted(exps.items()))
        prev = terms.get(mono, ZERO)
        total = prev + coeff
        terms[mono] = total
        if len(terms) > max_terms:
            raise BudgetError("symbolic_density exceeded %d monomials" % max_terms)

    def rec(v):
        # prune-heavy regions emit rarely, so the walk itself must also
        # watch the clock
        nonlocal nodes
        nodes += 1
        if nodes % 1024 == 0:
            check_deadline()
        if v == n:
            emit()
            return
        for w in range(m):
            ok = True
            for u in range(v):
                fu = img[u]
                if fu == w:
                    continue
                if T.out[u] >> v & 1:
                    if not host.out[fu] >> w & 1:
                        ok = False
                        break
                elif not host.out[w] >> fu & 1:
                    ok = False
                    break
            if not ok:
                continue
            if not acyclic_within(T.out, fibers[w] + [v]):
                continue
            img[v] = w
            fibers[w].append(v)
            rec(v + 1)
            fibers[w].pop()

    rec(0)
    p = Polynomial(terms.items())
    _symbolic_cache[key] = p
    return p


_s_poly_cache = {}


def density_s_poly(ctx, i, t_values):
    """t(T_i, W_k) with t bound to rationals and every s_j left symbolic.

    This is the workhorse behind exact Jacobians: one map-sum per (i, t)
    yields a small polynomial in s_1..s_ell that all ell partial
    derivatives share.  The I_0 block participates with its remainder
    measure 1 - sum_j s_j * (row sum of t_j).
    """
    if not 1 <= i <= ctx.ell:
        raise DomainError("index i must be in 1..%d" % ctx.ell)
    t_values = tuple(tuple(as_q(x) for x in row) for row in t_values)
    key = (ctx, i, t_values)
    if key in _s_poly_cache:
        return _s_poly_cache[key]
    measures = []
    slack = Polynomial.const(1)
    for j, row in enumerate(t_values, start=1):
        sv = Polynomial.var(s_var(j))
        for tij in row:
            measures.append(sv * tij)
        slack = slack - sv * sum(row, ZERO)
    measures.append(slack)
    kinds = [TRANSITIVE_KIND] * len(measures)
    T = ctx.lyndon_seq[i - 1]
    p = map_sum(T, measures, kinds, _cross_matrix(ctx), Polynomial.zero())
    _s_poly_cache[key] = p
    return p


def jacobian_at(ctx, p):
    """Exact ell x ell matrix with entry (i, j) = d t(T_i, W_k)/d s_j at p."""
    check_domain(ctx, p)
    point = {s_var(j): p.s[j - 1] for j in range(1, ctx.ell + 1)}
    rows = []
    for i in range(1, ctx.ell + 1):
        poly = density_s_poly(ctx, i, p.t)
        row = []
        for j in range(1, ctx.ell + 1):
            v = s_var(j)
            others = {u: point[u] for u in point if u != v}
            coeffs = poly.restrict_univariate(v, others)
            uni = Polynomial([(((v, d),), c) for d, c in enumerate(coeffs) if d and c != 0])
            row.append(uni.partial_derivative(v).evaluate({v: point[v]}))
        rows.append(row)
    return rows


def jacobian_symbolic(ctx, budget_seconds=None):
    """Entry (i,j) = d symbolic_density(i) / d s_j; k <= 4 unless budgeted."""
    return [
        [symbolic_density(ctx, i, budget_seconds).partial_derivative(s_var(j))
         for j in range(1, ctx.ell + 1)]
        for i in range(1, ctx.ell + 1)
    ]


def _permutations(items):
    if len(items) <= 1:
        yield list(items), 1
        return
    first = items[0]
    for rest, sign in _permutations(items[1:]):
        for pos in range(len(rest) + 1):
            yield rest[:pos] + [first] + rest[pos:], sign * (-1) ** pos


def det_polynomial(M):
    """Symbolic determinant by permutation expansion; fine for ell <= 3."""
    n = len(M)
    total = Polynomial.zero()
    for perm, sign in _permutations(list(range(n))):
        prod = Polynomial.const(sign)
        for i in range(n):
            prod = prod * M[i][perm[i]]
        total = total + prod
    return total


def unique_full_t_monomial(ctx, budget_seconds=None):
    """The single monomial of det(J) containing every t-variable, with its
    coefficient.  Checks it is prod_i s_i^{n_i - 1} * prod t_{i,j}."""
    if ctx.k > 4 and budget_seconds is None:
        raise BudgetError("full symbolic determinant at k = 5 requires a budget")
    det = det_polynomial(jacobian_symbolic(ctx, budget_seconds))
    all_t = set()
    for i, n in enumerate(ctx.sizes, start=1):
        for j in range(1, n + 1):
            all_t.add(t_var(i, j))
    hits = []
    for mono, coeff in det.terms.items():
        present = {v for v, _ in mono if v[0] == "t"}
        if present == all_t:
            hits.append((mono, coeff))
    if len(hits) != 1:
        raise AssertionError(
            "expected exactly one full-t monomial in det(J), found %d" % len(hits)
        )
    mono, coeff = hits[0]
    expected = {}
    for i, n in enumerate(ctx.sizes, start=1):
        if n - 1:
            expected[s_var(i)] = n - 1
        for j in range(1, n + 1):
            expected[t_var(i, j)] = 1
    if dict(mono) != expected:
        raise AssertionError("full-t monomial has unexpected shape: %r" % (mono,))
    return mono, coeff


def leading_monomial_coefficient(ctx, budget_seconds=None):
    return unique_full_t_monomial(ctx, budget_seconds)[1]


def random_params(ctx, rng, max_denominator=16):
    """Random rational point in the open domain with small entries: t from
    (0,1] with denominator <= max_denominator, then s scaled so that
    sum s_i (row sum) <= 1/2 automatically."""
    t = []
    for n in ctx.sizes:
        row = []
        for _ in range(n):
            den = rng.randint(1, max_denominator)
            num = rng.randint(1, den)
            row.append(Q(num, den))
        t.append(tuple(row))
    s = []
    for row in t:
        den = rng.randint(1, max_denominator)
        num = rng.randint(1, den)
        u = Q(num, den)
        cap = int(ceil(sum(row, ZERO)))
        s.append(u / (2 * ctx.ell * cap))
    return make_params(ctx, s, t)


def certify_det_nonzero(ctx, trials, seed, max_denominator=16):
    """First random point where det(jacobian) is nonzero, as a certificate
    that det(J) is not the zero polynomial."""
    if trials < 1:
        raise DomainError("need trials >= 1")
    rng = random.Random(seed)
    zeros = 0
    for trial in range(1, trials + 1):
        p = random_params(ctx, rng, max_denominator)
        d = det_rational(jacobian_at(ctx, p))
        if d != 0:
            return {"point": p, "det": d, "trials_used": trial}
        zeros += 1
    raise InconclusiveError(
        "determinant was zero at all %d sampled points; inconclusive "
        "(this does not show the polynomial is zero)" % zeros
    )


def params_to_json(p):
    return {
        "s": [fmt_q(x) for x in p.s],
        "t": [[fmt_q(x) for x in row] for row in p.t],
    }


def params_from_json(ctx, data):
    try:
        s = data["s"]
        t = data["t"]
    except (KeyError, TypeError) as e:
        raise DomainError("malformed params JSON: %s" % e) from None
    return make_params(ctx, s, t)


def context_to_json(ctx):
    return {
        "k": ctx.k,
        "ell": ctx.ell,
        "N": ctx.N,
        "sizes": list(ctx.sizes),
        "words": [serialize_word(word_of(T)) for T in ctx.lyndon_seq],
        "tournaments": [encode(T) for T in ctx.lyndon_seq],
        "blocks": block_labels(ctx),
    }
