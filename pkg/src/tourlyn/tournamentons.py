"""Step tournamentons and exact densities.

A step tournamenton is a block-constant antisymmetric kernel on [0,1]:
an ordered list of blocks, each with a rational measure and a diagonal
kind (constant 1/2, or the transitive kernel that is 1 below the diagonal
within the block), plus a rational cross matrix F with F[b][c] + F[c][b]
= 1.  The density t(T, W) integrates the product of edge values over all
placements of T's vertices; with finitely many blocks this is a finite
sum over block assignments:

    t(T, W) = sum over f: V(T) -> blocks of
              prod over cross edges u->v of F[f(u)][f(v)]
            * prod over blocks b:  (transitive) m_b^p / p!  if the
              preimage induces an acyclic tournament, else 0
                                   (half)        m_b^p (1/2)^C(p,2)

where p = |preimage of b|.  The transitive factor is the volume of the
order-compatible region (each acyclic preimage has exactly one admissible
vertex order, hence the 1/p!); the half factor is the fair-coin mass over
all C(p,2) internal pairs.  Everything is exact rational arithmetic; the
DFS prunes on zero cross factors and on cyclic transitive preimages, so
the all-integer cross matrices of the blow-up construction stay cheap
even with dozens of blocks.
"""

import random
from dataclasses import dataclass
from math import factorial

from .errors import BudgetError, DomainError
from .rational import HALF, ONE, ZERO, Q, as_q, fmt_q
from .tournaments import Tournament, canonicalize, enumerate_exact, automorphism_count

DENSITY_MAX = 6
HALF_KIND = "half"
TRANSITIVE_KIND = "transitive"


@dataclass(frozen=True)
class Block:
    measure: object
    diagonal: str


@dataclass(frozen=True)
class StepTournamenton:
    blocks: tuple
    cross: tuple


def step_tournamenton(blocks, cross):
    """Build from (measure, kind) pairs and a cross matrix; diagonal cross
    entries are forced to zero so equal tournamentons hash equally."""
    blks = tuple(Block(as_q(m), kind) for m, kind in blocks)
    B = len(blks)
    rows = []
    for i in range(B):
        row = [as_q(cross[i][j]) if i != j else ZERO for j in range(B)]
        rows.append(tuple(row))
    return StepTournamenton(blks, tuple(rows))


def constant_half():
    return step_tournamenton([(1, HALF_KIND)], [[0]])


def single_transitive():
    return step_tournamenton([(1, TRANSITIVE_KIND)], [[0]])


def validate(W):
    """Check all invariants; the error message lists every violation."""
    problems = []
    B = len(W.blocks)
    if B == 0:
        problems.append("no blocks")
    total = ZERO
    for i, b in enumerate(W.blocks):
        if b.diagonal not in (HALF_KIND, TRANSITIVE_KIND):
            problems.append("block %d has unknown diagonal %r" % (i, b.diagonal))
        if not (0 < b.measure <= 1):
            problems.append("block %d measure %s outside (0,1]" % (i, fmt_q(b.measure)))
        total += b.measure
    if B and total != 1:
        problems.append("measures sum to %s, not 1" % fmt_q(total))
    if len(W.cross) != B or any(len(row) != B for row in W.cross):
        problems.append("cross matrix is not %dx%d" % (B, B))
    else:
        for i in range(B):
            for j in range(B):
                if i == j:
                    continue
                v = W.cross[i][j]
                if not (0 <= v <= 1):
                    problems.append("cross[%d][%d] = %s outside [0,1]" % (i, j, fmt_q(v)))
            for j in range(i + 1, B):
                if W.cross[i][j] + W.cross[j][i] != 1:
                    problems.append(
                        "cross[%d][%d] + cross[%d][%d] = %s, not 1"
                        % (i, j, j, i, fmt_q(W.cross[i][j] + W.cross[j][i]))
                    )
    if problems:
        raise DomainError("; ".join(problems))


_valid_cache = set()


def _ensure_valid(W):
    if W not in _valid_cache:
        validate(W)
        _valid_cache.add(W)


def acyclic_within(out, verts):
    # induced subtournament is transitive iff its out-degree multiset is 0..p-1
    degs = sorted(sum(1 for w in verts if w != u and out[u] >> w & 1) for u in verts)
    return degs == list(range(len(verts)))


def map_sum(T, measures, kinds, cross, zero):
    """Sum over block assignments shared by density() and the construction
    module's symbolic variant: `measures` may be rationals or polynomials.

    Cross factors are always rationals; they fold into a scalar prefactor,
    so measure polynomials only enter through the per-block diagonal
    factors at the leaves.
    """
    n = T.n
    B = len(measures)
    out = T.out
    assign = [0] * n
    preimage = [[] for _ in range(B)]
    total = zero

    def rec(v, acc):
        nonlocal total
        if v == n:
            term = acc
            for b in range(B):
                verts = preimage[b]
                if not verts:
                    continue
                p = len(verts)
                if kinds[b] == TRANSITIVE_KIND:
                    term = term * (measures[b] ** p) / factorial(p)
                else:
                    term = term * (measures[b] ** p) * HALF ** (p * (p - 1) // 2)
            total = total + term
            return
        for b in range(B):
            acc2 = acc
            ok = True
            for u in range(v):
                bu = assign[u]
                if bu == b:
                    continue
                f = cross[bu][b] if out[u] >> v & 1 else cross[b][bu]
                if f == 0:
                    ok = False
                    break
                if f != 1:
                    acc2 = acc2 * f
            if not ok:
                continue
            if kinds[b] == TRANSITIVE_KIND and not acyclic_within(out, preimage[b] + [v]):
                continue
            assign[v] = b
            preimage[b].append(v)
            rec(v + 1, acc2)
            preimage[b].pop()

    rec(0, ONE)
    return total


_density_cache = {}


def density(T, W):
    """Exact density t(T, W)."""
    if T.n > DENSITY_MAX:
        raise BudgetError("density is budgeted to |T| <= %d" % DENSITY_MAX)
    _ensure_valid(W)
    C = canonicalize(T)
    key = (C, W)
    if key not in _density_cache:
        measures = [b.measure for b in W.blocks]
        kinds = [b.diagonal for b in W.blocks]
        _density_cache[key] = map_sum(C, measures, kinds, W.cross, ZERO)
    return _density_cache[key]


def normalization_check(k, W):
    """Sum of (k!/|Aut(T)|) t(T,W) over all classes on k vertices; must be 1."""
    if k > 5:
        raise BudgetError("normalization_check is budgeted to k <= 5")
    total = ZERO
    for T in enumerate_exact(k):
        total += Q(factorial(k)) / automorphism_count(T) * density(T, W)
    return total


def sample(W, n, seed):
    """One random n-vertex tournament drawn from W; deterministic per seed.

    Each point draws a block (by measure) and a uniform position; the
    position only matters inside transitive blocks, but drawing it always
    keeps the randomness stream independent of block kinds.  Equal
    positions (a measure-zero event) fall back to a fair coin.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    _ensure_valid(W)
    rng = random.Random(seed)
    bounds = []
    acc = 0.0
    for b in W.blocks:
        acc += float(b.measure)
        bounds.append(acc)
    pts = []
    for _ in range(n):
        r = rng.random()
        blk = 0
        while blk < len(bounds) - 1 and r >= bounds[blk]:
            blk += 1
        pts.append((blk, rng.random()))
    out = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            bi, pi = pts[i]
            bj, pj = pts[j]
            if bi == bj:
                if W.blocks[bi].diagonal == TRANSITIVE_KIND and pi != pj:
                    i_beats = pi < pj
                else:
                    i_beats = rng.random() < 0.5
            else:
                i_beats = rng.random() < float(W.cross[bi][bj])
            if i_beats:
                out[i] |= 1 << j
            else:
                out[j] |= 1 << i
    return Tournament(n, out)


def random_step_tournamenton(rng, max_blocks=4, max_denominator=12):
    """Random valid tournamenton for property tests: 1..max_blocks blocks,
    integer-weight measures normalized to sum 1, rational cross entries."""
    B = rng.randint(1, max_blocks)
    weights = [rng.randint(1, 8) for _ in range(B)]
    tot = sum(weights)
    blocks = [
        (Q(w, tot), rng.choice((HALF_KIND, TRANSITIVE_KIND)))
        for w in weights
    ]
    cross = [[ZERO] * B for _ in range(B)]
    for i in range(B):
        for j in range(i + 1, B):
            den = rng.randint(1, max_denominator)
            num = rng.randint(0, den)
            cross[i][j] = Q(num, den)
            cross[j][i] = ONE - cross[i][j]
    return step_tournamenton(blocks, cross)


def to_json(W):
    B = len(W.blocks)
    return {
        "blocks": [
            {"measure": fmt_q(b.measure), "diagonal": b.diagonal} for b in W.blocks
        ],
        "cross": [[fmt_q(W.cross[i][j]) for j in range(B)] for i in range(B)],
    }


def from_json(data):
    try:
        blocks = [(b["measure"], b["diagonal"]) for b in data["blocks"]]
        cross = data["cross"]
    except (KeyError, TypeError) as e:
        raise DomainError("malformed tournamenton JSON: %s" % e) from None
    if len(cross) != len(blocks) or any(len(row) != len(blocks) for row in cross):
        raise DomainError("cross matrix shape does not match block count")
    return step_tournamenton(blocks, cross)
