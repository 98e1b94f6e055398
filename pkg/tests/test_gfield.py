import numpy as np
import pytest

import oracles
from ccztwist._moduli import DEFAULT_MODULI
from ccztwist.gfield import (
    FieldMismatchError,
    ParseError,
    embedding,
    find_roots,
    get_field,
    is_irreducible,
    parse_element,
    parse_field_spec,
    solve_trace_affine,
)

SMALL = [(2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (5, 2), (7, 2)]


def test_worked_values_in_f8(f8):
    u = f8.element(2)
    assert (u + u * u).rank == 0b110
    assert u * u * u == u + 1
    assert u * (u * u) == f8.element(0b011)
    assert (u**5).coeffs == (1, 1, 1)


def test_identities(f8):
    for x in f8.elements():
        assert x + f8.zero == x
        assert x * f8.one == x
        assert x + f8.constant(f8.p - 1) * x == f8.zero


@pytest.mark.parametrize("p,n", SMALL)
def test_mul_matches_schoolbook_exhaustively(p, n):
    ctx = get_field(p, n)
    xs = ctx.all_ranks()
    got = ctx.mul(xs[:, None], xs[None, :])
    for a in range(ctx.q):
        for b in range(a, ctx.q):
            assert got[a, b] == oracles.mul(a, b, p, ctx.modulus)


def test_mul_without_log_tables(rng):
    # 2^21 is above the table limit, so multiplication takes the polynomial path.
    big = get_field(2, 21)
    assert big.log is None
    for a, b in rng.integers(0, big.q, (50, 2)):
        assert big.mul(int(a), int(b)) == oracles.mul(int(a), int(b), 2, big.modulus)


@pytest.mark.parametrize("p,n", [(2, 6), (3, 4), (5, 3)])
def test_ring_axioms_exhaustive(p, n):
    ctx = get_field(p, n)
    x = ctx.all_ranks()
    rng = np.random.default_rng(p * 100 + n)
    y = rng.permutation(x)
    z = rng.permutation(x)
    assert np.array_equal(ctx.mul(x, y), ctx.mul(y, x))
    assert np.array_equal(ctx.mul(ctx.mul(x, y), z), ctx.mul(x, ctx.mul(y, z)))
    assert np.array_equal(ctx.add(ctx.add(x, y), z), ctx.add(x, ctx.add(y, z)))
    assert np.array_equal(ctx.mul(x, ctx.add(y, z)), ctx.add(ctx.mul(x, y), ctx.mul(x, z)))
    assert np.array_equal(ctx.frob(ctx.add(x, y)), ctx.add(ctx.frob(x), ctx.frob(y)))


@pytest.mark.parametrize("p,n", SMALL)
def test_powers(p, n):
    ctx = get_field(p, n)
    nz = ctx.all_ranks()[1:]
    assert np.all(ctx.power(nz, 0) == 1)
    assert np.all(ctx.power(nz, ctx.q - 1) == 1)
    if p > 2:
        assert ctx.gen ** ((ctx.q - 1) // 2) == ctx.constant(-1)
    g = ctx.gen
    # The generator really has full order.
    orders = {k for k in range(1, ctx.q) if (ctx.q - 1) % k == 0 and g**k == ctx.one}
    assert min(orders) == ctx.q - 1
    with pytest.raises(ZeroDivisionError):
        ctx.zero ** -1


def test_inverse(rng):
    ctx = get_field(3, 5)
    for r in rng.integers(1, ctx.q, 40):
        a = ctx.element(int(r))
        assert a * a.inverse() == ctx.one
        assert a.inverse().rank == oracles.power(int(r), ctx.q - 2, 3, ctx.modulus)


@pytest.mark.parametrize("p,n", [(2, 4), (2, 6), (3, 4), (5, 2)])
def test_trace_matches_oracle(p, n):
    ctx = get_field(p, n)
    tr = ctx.trace(ctx.all_ranks())
    for a in range(ctx.q):
        assert tr[a] == oracles.trace(a, p, ctx.modulus)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_trace_of_one(n):
    assert get_field(2, n).one.trace() == n % 2


@pytest.mark.parametrize("p,n", [(2, 12), (3, 6), (2, 8)])
def test_trace_tower(p, n):
    ctx = get_field(p, n)
    xs = ctx.all_ranks()
    divs = [d for d in range(1, n + 1) if n % d == 0]
    for d in divs:
        for m in divs:
            if m % d:
                continue
            lhs = ctx.rel_trace(xs, d)
            # Tr^m_d on F_{p^m} viewed inside F_{p^n}: sum of (p^d)-powers over m/d steps.
            inner = ctx.rel_trace(xs, m)
            acc = np.zeros_like(inner)
            t = inner
            for _ in range(m // d):
                acc = ctx.add(acc, t)
                t = ctx.frob(t, d)
            assert np.array_equal(lhs, acc), (d, m)


@pytest.mark.parametrize("p,n,m", [(2, 6, 2), (2, 6, 3), (3, 4, 2), (2, 8, 4)])
def test_rel_trace_lands_in_subfield_and_is_linear(p, n, m, rng):
    ctx = get_field(p, n)
    xs = ctx.all_ranks()
    t = ctx.rel_trace(xs, m)
    assert np.array_equal(ctx.frob(t, m), t)
    assert np.all(ctx.in_subfield(t, m))
    sub = ctx.subfield_ranks(m)
    assert sub.size == p**m
    for s in rng.choice(sub, 5):
        for x, y in rng.integers(0, ctx.q, (10, 2)):
            lhs = ctx.rel_trace(ctx.add(ctx.mul(int(s), int(x)), int(y)), m)
            rhs = ctx.add(ctx.mul(int(s), ctx.rel_trace(int(x), m)), ctx.rel_trace(int(y), m))
            assert lhs == rhs


def test_rel_trace_rejects_non_divisor():
    with pytest.raises(ValueError):
        get_field(2, 6).rel_trace(3, 4)


def test_beta_recipe_trace_vanishes():
    # beta = zeta - zeta^p with zeta in F_9 minus F_3: beta + beta^p = 0, so Tr(beta) = 0
    # in F_81, while Tr^4_2(beta) = 2 beta is not zero.
    ctx = get_field(3, 4)
    for zeta in ctx.subfield_ranks(2):
        z = ctx.element(int(zeta))
        if z.in_subfield(1):
            continue
        beta = z - z.frobenius()
        assert beta + beta.frobenius() == ctx.zero
        assert beta.trace() == 0
        assert beta.rel_trace(2) == ctx.constant(2) * beta


@pytest.mark.parametrize("p,n", [(2, 4), (2, 5), (3, 3), (5, 2)])
def test_solve_trace_affine_exhaustive(p, n):
    ctx = get_field(p, n)
    for w in range(1, ctx.q):
        weight = ctx.element(w)
        for target in range(p):
            sol = solve_trace_affine(target, weight)
            assert (weight * sol.solution).trace() == target
            members = sol.ranks()
            assert members.size == p ** (n - 1) == sol.size
            assert sol.solution.rank == members.min()
            for h in sol.hyperplane_basis:
                assert (weight * h).trace() == 0


def test_solve_trace_affine_examples():
    ctx = get_field(2, 4)
    assert solve_trace_affine(0, ctx.gen).solution == ctx.zero
    assert len(solve_trace_affine(1, ctx.one)) == 8
    odd = get_field(2, 5)
    assert odd.one in solve_trace_affine(odd.one.trace(), odd.one)
    with pytest.raises(ValueError):
        solve_trace_affine(1, ctx.zero)


@pytest.mark.parametrize("p,n", sorted(k for k in DEFAULT_MODULI if k[0] ** k[1] <= 3**7))
def test_default_moduli_rederived(p, n):
    assert DEFAULT_MODULI[(p, n)] == oracles.smallest_irreducible(p, n)


def test_default_f512_modulus():
    assert get_field(2, 9).modulus == (1, 1, 0, 0, 0, 0, 0, 0, 0, 1)


def test_irreducibility_cross_check():
    for r in range(2**6):
        c = oracles.digits(r, 2, 6) + [1]
        assert is_irreducible(c, 2) == oracles.is_irreducible(c, 2)
    for r in range(3**4):
        c = oracles.digits(r, 3, 4) + [1]
        assert is_irreducible(c, 3) == oracles.is_irreducible(c, 3)


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        get_field(2, 4, (1, 0, 1, 0, 1))


def test_context_mismatch():
    a = get_field(2, 4).one
    b = get_field(2, 5).one
    with pytest.raises(FieldMismatchError):
        a + b
    with pytest.raises(FieldMismatchError):
        a * b


def test_log_tables_consistent():
    for p, n in SMALL:
        ctx = get_field(p, n)
        nz = ctx.all_ranks()[1:]
        assert np.array_equal(ctx.exp[ctx.log[nz]], nz)


def test_subfield_embedding_f8_in_f512():
    small, big = get_field(2, 3), get_field(2, 9)
    roots = find_roots([1, 1, 0, 1], big)
    assert len(roots) == 3
    assert all(r.in_subfield(3) for r in roots)
    for k in range(3):
        emb = embedding(small, big, k)
        assert emb.root == roots[k]
        xs = small.all_ranks()
        e = emb.embed(xs)
        assert np.array_equal(emb.restrict(e), xs)
        ys = np.random.default_rng(k).permutation(xs)
        assert np.array_equal(emb.embed(small.mul(xs, ys)), big.mul(e, emb.embed(ys)))
    # The three roots are Frobenius conjugates.
    r0 = roots[0]
    assert {r0, r0.frobenius(), r0.frobenius(2)} == set(roots)


def test_field_spec_round_trip():
    ctx = parse_field_spec("p=2,n=9,mod=x^9+x^4+1")
    assert ctx.modulus[4] == 1 and ctx.spec() == "p=2,n=9,mod=x^9+x^4+1"
    assert parse_field_spec(ctx.spec()) is ctx
    assert parse_field_spec("p=3,n=4") is get_field(3, 4)


@pytest.mark.parametrize("bad,col", [("p=2,n=x", 7), ("p=4,n=2", 3), ("p=2", 4), ("p=2,n=3,q=1", 9), ("p=2,n=4,mod=x^4+1", 13)])
def test_field_spec_errors_carry_columns(bad, col):
    with pytest.raises(ParseError) as exc:
        parse_field_spec(bad)
    assert exc.value.column == col


def test_element_parsing():
    ctx = get_field(2, 5)
    assert parse_element("0x1f", ctx).rank == 31
    assert parse_element("g^3", ctx) == ctx.gen**3
    assert parse_element("g^2 + 1", ctx) == ctx.gen**2 + ctx.one
    with pytest.raises(ParseError):
        parse_element("x + 1", ctx)
