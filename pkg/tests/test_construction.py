"""The blow-up family: contexts, exact densities two ways, Jacobians."""

import random

import pytest

from tourlyn.construction import (
    block_labels,
    build,
    certify_det_nonzero,
    check_domain,
    context,
    context_to_json,
    density_s_poly,
    det_polynomial,
    homomorphism_set,
    host_tournament,
    jacobian_at,
    jacobian_symbolic,
    leading_monomial_coefficient,
    make_params,
    params_from_json,
    params_to_json,
    random_params,
    symbolic_density,
    unique_full_t_monomial,
)
from tourlyn.errors import BudgetError, DomainError
from tourlyn.poly import Polynomial, det_rational, s_var, t_var, uniform_degrees
from tourlyn.rational import Q
from tourlyn.solver import default_params
from tourlyn.tournamentons import density, validate
from tourlyn.tournaments import parse, strongly_connected_components


def test_context_shapes():
    for k, ell, N in ((3, 1, 3), (4, 3, 11), (5, 11, 51)):
        ctx = context(k)
        assert (ctx.ell, ctx.N) == (ell, N)
        assert sum(ctx.sizes) == N
        assert all(3 <= n <= k for n in ctx.sizes)
    for bad in (2, 6):
        with pytest.raises(DomainError):
            context(bad)


def test_context_json():
    data = context_to_json(context(4))
    assert data["k"] == 4 and data["ell"] == 3 and data["N"] == 11
    assert len(data["words"]) == 3 and len(data["tournaments"]) == 3
    assert data["blocks"] == block_labels(context(4))
    assert data["blocks"][-1] == "I_0" and len(data["blocks"]) == 12


def test_host_tournament_is_the_laid_out_direct_sum():
    from tourlyn.tournaments import are_isomorphic, induced

    for k in (3, 4):
        ctx = context(k)
        host = host_tournament(ctx)
        assert host.n == ctx.N
        off = 0
        for T in ctx.lyndon_seq:
            block = induced(host, tuple(range(off, off + T.n)))
            assert are_isomorphic(block, T)
            off += T.n
        # every earlier block beats every later one
        parts = strongly_connected_components(host).parts
        flat = [v for part in parts for v in part]
        assert sorted(flat) == list(range(ctx.N))


def test_build_is_a_valid_tournamenton():
    for k in (3, 4):
        ctx = context(k)
        p = default_params(ctx)
        W = build(ctx, p)
        validate(W)
        assert len(W.blocks) == ctx.N + 1
        assert density(parse("1:"), W) == 1


def test_check_domain_returns_the_remainder():
    ctx = context(3)
    p = default_params(ctx)
    # s = 1/2, t = (1/3, 1/3, 1/3): used measure 1/2, remainder 1/2
    assert check_domain(ctx, p) == Q(1, 2)


def test_check_domain_rejections():
    ctx = context(3)
    with pytest.raises(DomainError, match="s-values"):
        make_params(ctx, [Q(1, 2), Q(1, 2)], [(Q(1, 3),) * 3])
    with pytest.raises(DomainError, match="lengths"):
        make_params(ctx, [Q(1, 2)], [(Q(1, 3),) * 2])
    with pytest.raises(DomainError, match="positive"):
        make_params(ctx, [Q(0)], [(Q(1, 3),) * 3])
    with pytest.raises(DomainError, match="positive"):
        make_params(ctx, [Q(1, 2)], [(Q(1, 3), Q(1, 3), Q(-1, 3))])
    with pytest.raises(DomainError, match="domain"):
        make_params(ctx, [Q(1)], [(Q(1, 3),) * 3])  # used measure exactly 1


def test_density_two_routes_agree():
    # the closed-form polynomial and the generic tournamenton integrator
    # compute the same exact rationals
    rng = random.Random(31)
    for k in (3, 4):
        ctx = context(k)
        for _ in range(3):
            p = random_params(ctx, rng)
            W = build(ctx, p)
            point = {s_var(j): p.s[j - 1] for j in range(1, ctx.ell + 1)}
            for i, T in enumerate(ctx.lyndon_seq, start=1):
                assert density_s_poly(ctx, i, p.t).evaluate(point) == density(T, W)


def test_symbolic_density_matches_bound_t_route():
    rng = random.Random(37)
    for k in (3, 4):
        ctx = context(k)
        p = random_params(ctx, rng)
        point = {s_var(j): p.s[j - 1] for j in range(1, ctx.ell + 1)}
        for i, row in enumerate(p.t, start=1):
            for j, v in enumerate(row, start=1):
                point[t_var(i, j)] = v
        spoint = {s_var(j): p.s[j - 1] for j in range(1, ctx.ell + 1)}
        for i, T in enumerate(ctx.lyndon_seq, start=1):
            full = symbolic_density(ctx, i).evaluate(point)
            bound = density_s_poly(ctx, i, p.t).evaluate(spoint)
            assert full == bound


def test_density_polys_are_posynomials():
    # no map reaches the remainder block (the targets have no sink), so the
    # slack polynomial never enters and every coefficient stays positive
    for k in (3, 4):
        ctx = context(k)
        t = default_params(ctx).t
        for i in range(1, ctx.ell + 1):
            p = density_s_poly(ctx, i, t)
            assert all(c > 0 for c in p.terms.values())
            assert uniform_degrees(p, kinds=("s",)) == (ctx.sizes[i - 1],)


def test_symbolic_density_is_bihomogeneous():
    for k in (3, 4):
        ctx = context(k)
        for i, n in enumerate(ctx.sizes, start=1):
            p = symbolic_density(ctx, i)
            assert uniform_degrees(p) == (n, n)
            assert all(c > 0 for c in p.terms.values())


def test_three_vertex_symbolic_closed_forms():
    ctx = context(3)
    s1 = Polynomial.var(s_var(1))
    t11, t12, t13 = (Polynomial.var(t_var(1, j)) for j in (1, 2, 3))
    assert symbolic_density(ctx, 1) == 3 * s1 ** 3 * t11 * t12 * t13
    det = det_polynomial(jacobian_symbolic(ctx))
    assert det == 9 * s1 ** 2 * t11 * t12 * t13


def test_full_t_monomial_shape_and_coefficients():
    # det(J) keeps exactly one monomial with every t present, of shape
    # prod_i s_i^(n_i - 1) prod_ij t_ij; its coefficient certifies det != 0
    mono3, coeff3 = unique_full_t_monomial(context(3))
    assert coeff3 == 9
    mono4, coeff4 = unique_full_t_monomial(context(4))
    assert coeff4 == 432
    assert leading_monomial_coefficient(context(4)) == 432
    with pytest.raises(BudgetError):
        unique_full_t_monomial(context(5))


def test_jacobian_two_routes_agree():
    rng = random.Random(41)
    for k in (3, 4):
        ctx = context(k)
        sym = jacobian_symbolic(ctx)
        for _ in range(2):
            p = random_params(ctx, rng)
            point = {s_var(j): p.s[j - 1] for j in range(1, ctx.ell + 1)}
            for i, row in enumerate(p.t, start=1):
                for j, v in enumerate(row, start=1):
                    point[t_var(i, j)] = v
            J = jacobian_at(ctx, p)
            for i in range(ctx.ell):
                for j in range(ctx.ell):
                    assert sym[i][j].evaluate(point) == J[i][j]


def test_jacobian_matches_finite_differences():
    rng = random.Random(43)
    h = 1e-6
    for k in (3, 4):
        ctx = context(k)
        p = random_params(ctx, rng)
        J = jacobian_at(ctx, p)
        polys = [density_s_poly(ctx, i, p.t) for i in range(1, ctx.ell + 1)]
        s0 = [float(x) for x in p.s]
        for i in range(ctx.ell):
            for j in range(ctx.ell):
                up = dict(enumerate(s0)); up[j] += h
                dn = dict(enumerate(s0)); dn[j] -= h
                f = lambda pt: polys[i].evaluate_float(
                    {s_var(m + 1): pt[m] for m in range(ctx.ell)}
                )
                fd = (f(up) - f(dn)) / (2 * h)
                assert abs(fd - float(J[i][j])) <= 1e-5 * max(1.0, abs(float(J[i][j])))


def test_certify_det_nonzero():
    for k in (3, 4):
        cert = certify_det_nonzero(context(k), trials=10, seed=5)
        assert cert["det"] != 0
        assert 1 <= cert["trials_used"] <= 10
        again = certify_det_nonzero(context(k), trials=10, seed=5)
        assert again["det"] == cert["det"] and again["point"] == cert["point"]
    with pytest.raises(DomainError):
        certify_det_nonzero(context(3), trials=0, seed=1)


def test_certified_points_have_nonsingular_jacobians():
    ctx = context(4)
    cert = certify_det_nonzero(ctx, trials=10, seed=9)
    assert det_rational(jacobian_at(ctx, cert["point"])) == cert["det"]


def test_random_params_stay_in_domain():
    rng = random.Random(47)
    for k in (3, 4, 5):
        ctx = context(k)
        for _ in range(5):
            p = random_params(ctx, rng)
            assert check_domain(ctx, p) > 0
    a = random_params(context(4), random.Random(8))
    b = random_params(context(4), random.Random(8))
    assert a == b


def test_params_json_round_trip():
    ctx = context(4)
    p = random_params(ctx, random.Random(53))
    assert params_from_json(ctx, params_to_json(p)) == p
    with pytest.raises(DomainError):
        params_from_json(ctx, {"s": ["1/2"]})
    with pytest.raises(DomainError):
        params_from_json(ctx, {"t": [["1/3"]]})


def test_homomorphism_set_on_the_smallest_host():
    ctx = context(3)
    T = ctx.lyndon_seq[0]
    host = host_tournament(ctx)
    maps = homomorphism_set(T, host)
    # only the three rotations survive: collapses force a forward-and-back
    # contradiction through the third vertex
    assert len(maps) == 3
    assert all(len(set(img)) == 3 for img in maps)


def test_homomorphism_set_budgets():
    from tourlyn.tournaments import transitive

    with pytest.raises(BudgetError):
        homomorphism_set(transitive(6), transitive(3))
    with pytest.raises(BudgetError):
        homomorphism_set(transitive(3), transitive(52))


def test_symbolic_density_budgets():
    ctx = context(5)
    with pytest.raises(BudgetError):
        symbolic_density(ctx, 1)
    with pytest.raises(BudgetError):
        symbolic_density(ctx, 1, budget_seconds=0.005)
    with pytest.raises(DomainError):
        symbolic_density(context(3), 2)
