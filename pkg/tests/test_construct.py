import numpy as np
import pytest

import oracles
from ccztwist import catalog, construct
from ccztwist.construct import (
    ConstructionError,
    ConstructionParams,
    InvalidParamsError,
    adjust,
    build_involution,
    check_params,
    complete_params,
    derive_lemma_identities,
    ea_hypotheses,
    enumerate_valid_tuples,
    epsilon_table,
    recipe_alpha,
    recipe_beta,
    twist,
    twist_nm,
    twist_via_trace,
)
from ccztwist.gfield import get_field, solve_trace_affine
from ccztwist.invariants import ddt, differential_uniformity, full_spectrum
from ccztwist.linstruct import _betas_for, find_structure_pair, lmap_table
from ccztwist.vfunc import DegreeError, UnivariatePoly, degree_of, evaluate, parse_poly

UNDETERMINED = "CCZ-equivalent; EA-status undetermined"


def random_quadratic(ctx, rng):
    """A random quadratic, redrawn until some component has a nonzero linear structure."""
    p, n = ctx.p, ctx.n
    exps = [p**i + p**j for i in range(n) for j in range(i, n)] + [p**i for i in range(n)]
    while True:
        F = evaluate(UnivariatePoly(ctx, {e: int(rng.integers(0, ctx.q)) for e in exps}))
        if find_structure_pair(F) is not None:
            return F


def random_tuple(F0, rng):
    """A uniformly chosen gamma with a structure, then random beta, alpha and c from the solution sets."""
    dom, cod, p = F0.dom, F0.cod, F0.p
    while True:
        gamma = dom.element(int(rng.integers(1, dom.q)))
        betas = _betas_for(F0, gamma.rank)
        if betas.size:
            break
    beta = cod.element(int(rng.choice(betas)))
    alphas = solve_trace_affine((-2) % p, gamma).ranks()
    dval = cod.sub(F0.table[gamma.rank], F0.table[0])
    target = (-(beta * cod.element(int(dval))).trace()) % p
    cs = solve_trace_affine(target, beta * gamma).ranks()
    return ConstructionParams(
        dom.element(int(rng.choice(alphas))), beta, gamma, dom.element(int(rng.choice(cs)))
    )


@pytest.mark.parametrize("n", [5, 7, 9])
def test_gold_odd_n_matches_reference(n):
    F0 = catalog.make_gold(2, n, 1)
    params = catalog.gold_params(F0)
    assert (params.alpha.rank, params.beta.rank, params.gamma.rank, params.c.rank) == (0, 1, 1, 1)
    res = twist(F0, params)
    assert res.FH == catalog.gold_closed_form(F0, 1)
    # Independent table from schoolbook arithmetic.
    mod = F0.dom.modulus
    want = []
    for x in range(F0.dom.q):
        x2 = oracles.mul(x, x, 2, mod)
        base = oracles.mul(x2, x, 2, mod) ^ x
        want.append(base ^ ((x2 ^ x) if oracles.abs_trace(base, 2, mod) else 0))
    assert res.FH.table.tolist() == want
    assert res.degree == 3 and res.witness_ok
    assert res.label == "CCZ-equivalent; EA-inequivalent"


def test_gold_involution_formula():
    F0 = catalog.make_gold(2, 7, 2)
    res = twist(F0, catalog.gold_params(F0))
    ctx = F0.dom
    want = ctx.add(ctx.all_ranks(), ctx.trace(ctx.add(F0.table, ctx.all_ranks())))
    assert np.array_equal(res.H.table, want)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_gold_even_n_both_c(n):
    F0 = catalog.make_gold(2, n, 1)
    assert catalog.gold_params(F0).c.rank == 0
    for c in (0, 1):
        res = twist(F0, catalog.gold_params(F0, c))
        assert res.FH == catalog.gold_closed_form(F0, c)
        assert res.degree == 3 and res.witness_ok


@pytest.mark.parametrize("p,n,i", [(3, 4, 1), (3, 4, 2), (5, 2, 1), (3, 6, 1)])
def test_odd_gold_quartic(p, n, i):
    F0 = catalog.make_gold(p, n, i)
    params = catalog.gold_params(F0)
    assert (params.alpha * params.gamma).trace() == p - 2
    d = int(np.gcd(i, n))
    assert params.beta ** (p**d) + params.beta == F0.dom.zero
    res = twist(F0, params)
    assert res.FH == catalog.gold_odd_closed_form(F0, params)
    assert res.fdo_gamma == F0.dom.one
    assert res.witness_ok
    if res.hypotheses.holds:
        assert res.degree == 4 == res.expected_degree
    else:
        # Delta = p^gcd(i,n) is too large here and the degree collapses.
        assert res.hypotheses.delta == p**d and res.degree == 2


def test_planar_gold_rejected():
    F0 = catalog.make_gold(3, 3, 1)
    with pytest.raises(catalog.FamilyConditionError):
        catalog.gold_params(F0)
    with pytest.raises(InvalidParamsError) as exc:
        complete_params(F0)
    assert exc.value.invariant == "linear_structure"


def test_epsilon_fixed_points_and_shape(rng):
    ctx = get_field(2, 6)
    F0 = random_quadratic(ctx, rng)
    params = random_tuple(F0, rng)
    F = adjust(F0, params.c)
    H, eps = build_involution(F, params)
    fixed = eps == 0
    assert np.array_equal(H.table[fixed], ctx.all_ranks()[fixed])
    assert np.array_equal(eps, epsilon_table(F, params.alpha, params.beta))
    # eps is a Boolean function of degree at most 2.
    lifted = F0.__class__(ctx, ctx, eps.astype(np.int64))
    assert degree_of(lifted) <= 2


def test_involution_all_tuples_n4():
    F0 = evaluate(parse_poly("x^3", get_field(2, 4)))
    tuples = enumerate_valid_tuples(F0)
    seen = 0
    for params in tuples:
        H, _ = build_involution(adjust(F0, params.c), params)
        assert np.array_equal(H.table[H.table], F0.dom.all_ranks())
        seen += 1
    assert seen == tuples.count == 960


@pytest.mark.parametrize("n", [5, 6, 7, 8, 9])
def test_involution_sampled(n, rng):
    ctx = get_field(2, n)
    F0 = random_quadratic(ctx, rng)
    for _ in range(200):
        params = random_tuple(F0, rng)
        check_params(F0, params)
        H, _ = build_involution(adjust(F0, params.c), params)
        assert np.array_equal(H.table[H.table], ctx.all_ranks())


@pytest.mark.parametrize("p,n,poly", [(2, 3, "x^3"), (2, 4, "x^3 + g*x^5"), (2, 5, "x^3"), (3, 3, "x^4 + g*x^10"), (3, 2, "x^4")])
def test_witness_for_every_tuple(p, n, poly):
    F0 = evaluate(parse_poly(poly, get_field(p, n)))
    tuples = enumerate_valid_tuples(F0)
    assert tuples.count
    seen = 0
    for params in tuples:
        assert twist(F0, params, hypotheses=False).witness_ok
        seen += 1
    assert seen == tuples.count


def test_ccz_invariants_agree_when_witnessed(rng):
    for p, n in [(2, 6), (3, 4)]:
        F0 = random_quadratic(get_field(p, n), rng)
        res = twist(F0, random_tuple(F0, rng), hypotheses=False)
        assert res.witness_ok
        assert full_spectrum(res.F) == full_spectrum(res.FH)
        assert ddt(res.F).spectrum == ddt(res.FH).spectrum


def test_closed_form_mismatch_raises(monkeypatch):
    F0 = catalog.make_gold(2, 5, 1)
    params = catalog.gold_params(F0)
    real = construct.closed_form

    def broken(F, gamma, eps, fdo):
        out = real(F, gamma, eps, fdo)
        t = out.table.copy()
        t[3] ^= 1
        return out.__class__(out.dom, out.cod, t)

    monkeypatch.setattr(construct, "closed_form", broken)
    with pytest.raises(ConstructionError):
        twist(F0, params)


def test_invalid_params_name_invariant():
    F0 = catalog.make_gold(3, 4, 1)
    good = catalog.gold_params(F0)
    ctx = F0.dom
    cases = {
        "trace_alpha_gamma": ConstructionParams(ctx.zero, good.beta, good.gamma, good.c),
        "linear_structure": ConstructionParams(good.alpha, ctx.one, good.gamma, good.c),
        "nonzero": ConstructionParams(good.alpha, good.beta, ctx.zero, good.c),
    }
    for name, params in cases.items():
        with pytest.raises(InvalidParamsError) as exc:
            twist(F0, params)
        assert exc.value.invariant == name
        assert str(exc.value).startswith(name)
    bad_c = next(
        ConstructionParams(good.alpha, good.beta, good.gamma, ctx.element(r))
        for r in range(ctx.q)
        if (ctx.element(r) * good.beta * good.gamma).trace() != 0
    )
    with pytest.raises(InvalidParamsError) as exc:
        check_params(F0, bad_c)
    assert exc.value.invariant == "trace_c"


def test_non_quadratic_rejected():
    F0 = evaluate(parse_poly("x^7", get_field(2, 5)))
    with pytest.raises(DegreeError):
        complete_params(F0)
    with pytest.raises(ValueError):
        complete_params(catalog.make_gold(2, 5, 1), strategy="nope")


def test_complete_params_fills_gaps():
    F0 = evaluate(parse_poly("x^3", get_field(2, 6)))
    ctx = F0.dom
    p1 = complete_params(F0)
    assert p1.gamma == ctx.one and p1.beta == ctx.one
    p2 = complete_params(F0, gamma=ctx.gen)
    assert p2.gamma == ctx.gen
    p3 = complete_params(F0, beta=p2.beta)
    assert p3.beta == p2.beta
    for p in (p1, p2, p3):
        check_params(F0, p)
    with pytest.raises(InvalidParamsError):
        complete_params(F0, gamma=ctx.one, beta=ctx.gen)
    # x -> beta is not onto for x^3, so some beta has no gamma at all.
    hit = {int(b.rank) for _, b in enumerate_valid_tuples(F0).pairs}
    lonely = next(r for r in range(1, ctx.q) if r not in hit)
    with pytest.raises(InvalidParamsError):
        complete_params(F0, beta=ctx.element(lonely))


def test_recipes():
    for p, n in [(3, 4), (3, 5), (5, 2), (3, 3), (3, 6), (5, 5), (7, 7)]:
        ctx = get_field(p, n)
        assert recipe_alpha(ctx).trace() == p - 2
    assert recipe_alpha(get_field(2, 5)).rank == 0
    ctx = get_field(3, 4)
    b = recipe_beta(ctx, 1)
    assert b.rank and b**3 + b == ctx.zero
    b2 = recipe_beta(ctx, 2)
    assert b2 ** 9 + b2 == ctx.zero
    with pytest.raises(ValueError):
        recipe_beta(get_field(3, 3), 1)


def test_recipe_strategy_on_random_odd_quadratic(rng):
    ctx = get_field(3, 4)
    F0 = random_quadratic(ctx, rng)
    params = complete_params(F0, strategy="recipe")
    assert params.c == -ctx.element(int(ctx.sub(F0.table[params.gamma.rank], F0.table[0]))) / params.gamma
    assert twist(F0, params, hypotheses=False).witness_ok


def test_params_json_round_trip():
    F0 = catalog.make_gold(3, 4, 1)
    params = catalog.gold_params(F0)
    back = ConstructionParams.from_json(params.to_json(), F0.dom)
    assert back == params


def test_twist_nm_gold2():
    F = catalog.make_nm_family("gold2", 8, 4)
    assert differential_uniformity(F) == 32
    ctx = F.dom
    ref = catalog.nm_gold2_reference(8, 4)
    # alpha = 1, c = 0 and alpha = 0, c = 1 give the same eps; they differ by Tr^8_4(x) in F.
    exact = twist_nm(F, complete_params(F, ctx.one, F.cod.one, alpha=ctx.one, c=ctx.zero))
    assert exact.FH == ref
    shifted = twist_nm(F, complete_params(F, ctx.one, F.cod.one, "recipe", alpha=ctx.zero, c=ctx.one))
    assert np.array_equal(shifted.epsilon, exact.epsilon)
    assert (shifted.FH - ref).lift().table.tolist() == ctx.rel_trace(ctx.all_ranks(), 4).tolist()
    for res in (exact, shifted):
        assert res.degree == 3 and res.witness_ok
    with pytest.raises(ValueError):
        twist_nm(catalog.make_gold(2, 5, 1), catalog.gold_params(catalog.make_gold(2, 5, 1)))


@pytest.mark.parametrize("n,m", [(4, 2), (6, 2), (6, 3)])
def test_twist_nm_goldp_degree_rule(n, m):
    F = catalog.make_nm_family("goldp", n, m)
    ctx = F.dom
    params = complete_params(F, ctx.one, F.cod.one, "recipe", alpha=recipe_alpha(ctx))
    res = twist_nm(F, params, hypotheses=False)
    assert res.FH == catalog.nm_goldp_reference(res.F, params.alpha)
    assert res.degree == F.meta["twist_degree"]


def test_twist_via_trace_projects_pointwise():
    F0 = catalog.make_gold(2, 8, 1)
    params = catalog.gold_params(F0, 1)
    full = twist(F0, params, hypotheses=False)
    proj = twist_via_trace(F0, params, 4, hypotheses=False)
    ctx = F0.dom
    want = ctx.rel_trace(ctx.mul(full.FH.table, params.beta.rank), 4)
    assert np.array_equal(proj.FH.lift().table, want)
    assert np.array_equal(proj.H.table, full.H.table)
    with pytest.raises(ValueError):
        twist_via_trace(catalog.make_nm_family("gold2", 8, 4), params, 4)


def test_derivative_identities_zero_gamma():
    F = catalog.make_gold(2, 6, 1)
    z, one = F.dom.zero, F.dom.one
    assert derive_lemma_identities(F, one, one, z, one, one)["cubic"] == 0


@pytest.mark.parametrize("p,n", [(2, 6), (3, 4)])
def test_derivative_identities_random_tuples(p, n, rng):
    ctx = get_field(p, n)
    funcs = [random_quadratic(ctx, rng) for _ in range(5)]
    if p == 2:
        funcs.append(catalog.make_apn_family(3, 6)[0])
    else:
        funcs.append(catalog.make_gold(3, 4, 1))
    total = 0
    for F in funcs:
        for _ in range(20):
            g1, g2, g3 = (ctx.element(int(r)) for r in rng.integers(0, ctx.q, 3))
            params = random_tuple(F, rng)
            out = derive_lemma_identities(adjust(F, params.c), params.beta, params.gamma, g1, g2, g3)
            assert out["cubic"] == 0
            assert out["quartic"] == (None if p == 2 else 0)
            total += 1
    assert total >= 100


def test_trace_beta_preserved_under_twist():
    F0 = catalog.make_gold(2, 7, 1)
    res = twist(F0, catalog.gold_params(F0))
    b = res.params.beta
    assert np.array_equal(res.FH.component(b), res.F.component(b))


@pytest.mark.parametrize("n,count", [(4, 960), (5, 7936)])
def test_apn_tuple_counts(n, count):
    assert enumerate_valid_tuples(evaluate(parse_poly("x^3", get_field(2, n)))).count == count


def test_odd_tuple_count_lower_bound():
    e = enumerate_valid_tuples(catalog.make_gold(3, 4, 1))
    assert e.count >= 3**6 * 2
    assert e.count == len(e.pairs) * 3**6


def test_non_apn_count_bound():
    F0 = evaluate(parse_poly("x^5 + x^3", get_field(2, 6)))
    assert differential_uniformity(F0) > 2
    assert enumerate_valid_tuples(F0).count >= 2**10 * 63


def test_hypothesis_labels():
    # x^3 at n = 3 has Delta = 2 > 2^(n-3).
    F0 = evaluate(parse_poly("x^3", get_field(2, 3)))
    hyp = ea_hypotheses(F0)
    assert not hyp.holds and not hyp.checks["delta_bound"]
    res = twist(F0, complete_params(F0))
    assert res.label == UNDETERMINED
    assert twist(F0, complete_params(F0), hypotheses=False).label == UNDETERMINED
    ok = ea_hypotheses(catalog.make_gold(3, 4, 1))
    assert ok.holds and ok.linearity_sq == 729 and ok.delta == 3


def test_degree_claim_on_catalog_constructions():
    cases = [catalog.make_gold(2, n, 1) for n in (5, 6, 7)] + [catalog.make_apn_family(r, n)[0] for r, n in [(3, 6), (7, 8)]]
    for F0 in cases:
        params = catalog.gold_params(F0) if F0.meta["family"] == "gold" else catalog.apn_params(F0)
        res = twist(F0, params)
        assert res.hypotheses.holds
        assert res.degree == res.expected_degree == 3
        assert res.ea_by_degree == "inequivalent-by-degree"


def test_linear_structure_invariant_exhaustive(rng):
    for p, n in [(2, 5), (3, 3)]:
        F0 = random_quadratic(get_field(p, n), rng)
        for params in list(enumerate_valid_tuples(F0))[:: 97]:
            F = adjust(F0, params.c)
            d = F.cod.sub(F.table[F.dom.add(F.dom.all_ranks(), params.gamma.rank)], F.table)
            assert not np.any(F.cod.trace(F.cod.mul(d, params.beta.rank)))
            assert not np.any(F.cod.trace(F.cod.mul(lmap_table(F0, params.gamma), params.beta.rank)))
