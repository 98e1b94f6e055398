import numpy as np
import pytest

import oracles
from ccztwist.gfield import ParseError, get_field
from ccztwist.vfunc import (
    DegreeError,
    UnivariatePoly,
    VectorialFunction,
    algebraic_degree,
    compose,
    coordinate_degree,
    degree_of,
    derivative,
    do_decompose,
    evaluate,
    format_poly,
    interpolate,
    is_quadratic,
    parse_poly,
    trace_function,
)


def random_poly(ctx, rng, terms=4):
    exps = rng.integers(0, ctx.q, terms)
    coefs = rng.integers(1, ctx.q, terms)
    return UnivariatePoly(ctx, {int(e): int(c) for e, c in zip(exps, coefs)})


def test_evaluate_small_cases(f8):
    assert np.all(evaluate(UnivariatePoly(f8)).table == 0)
    cube = evaluate(parse_poly("x^3", f8))
    u = f8.element(2)
    assert cube(u) == u + 1
    for n in (3, 5, 7):
        ctx = get_field(2, n)
        assert evaluate(parse_poly("x^3 + x", ctx))(ctx.one) == ctx.zero


@pytest.mark.parametrize("p,n", [(2, 4), (2, 6), (3, 3), (5, 2)])
def test_interpolation_against_dft_oracle(p, n, rng):
    ctx = get_field(p, n)
    for _ in range(3):
        table = rng.integers(0, ctx.q, ctx.q)
        want = oracles.interpolate([int(v) for v in table], p, ctx.modulus)
        got = interpolate(VectorialFunction(ctx, ctx, table)).coeff_ranks()
        assert got == want


def test_identity_interpolates_to_x():
    for p, n in [(2, 5), (3, 4)]:
        ctx = get_field(p, n)
        assert interpolate(VectorialFunction.identity(ctx)) == UnivariatePoly.x(ctx)


def test_constant_and_point_functions():
    # A function that is nonzero only at 0 has c_0 = f(0) and c_{q-1} = -f(0).
    for p, n in [(2, 4), (3, 3)]:
        ctx = get_field(p, n)
        t = np.zeros(ctx.q, dtype=np.int64)
        t[0] = 1
        poly = interpolate(VectorialFunction(ctx, ctx, t))
        assert poly.coeff_ranks() == {0: 1, ctx.q - 1: int(ctx.neg(1))}
        const = VectorialFunction.constant(ctx, ctx.gen)
        assert interpolate(const).coeff_ranks() == {0: ctx.gen.rank}


@pytest.mark.parametrize("n", range(4, 10))
def test_round_trip_binary(n, rng):
    ctx = get_field(2, n)
    for _ in range(100 if n <= 6 else 15):
        P = random_poly(ctx, rng)
        assert interpolate(evaluate(P)) == P


@pytest.mark.parametrize("p,n", [(3, 4), (5, 3), (7, 2)])
def test_round_trip_odd(p, n, rng):
    ctx = get_field(p, n)
    for _ in range(20):
        P = random_poly(ctx, rng)
        assert interpolate(evaluate(P)) == P


def test_degrees():
    for n in (4, 7):
        ctx = get_field(2, n)
        assert algebraic_degree(parse_poly("x^3", ctx)) == 2
    for p in (3, 5):
        ctx = get_field(p, 3)
        assert algebraic_degree(parse_poly(f"x^{p + 1}", ctx)) == 2
        assert algebraic_degree(parse_poly(f"x^{p * p + 1}", ctx)) == 2
    ctx = get_field(2, 5)
    assert algebraic_degree(UnivariatePoly(ctx)) == 0
    assert degree_of(VectorialFunction(ctx, ctx, np.zeros(ctx.q, dtype=np.int64))) == 0


def test_gold_twist_table_has_degree_three():
    ctx = get_field(2, 5)
    F = evaluate(parse_poly("x^3 + x", ctx))
    tr = ctx.trace(F.table)
    lin = evaluate(parse_poly("x^2 + x", ctx)).table
    G = VectorialFunction(ctx, ctx, ctx.add(evaluate(parse_poly("x^3", ctx)).table, np.where(tr == 1, lin, 0)))
    poly = interpolate(G)
    assert max(oracles.p_weight(e, 2) for e in poly.terms) == 3


@pytest.mark.parametrize("p,n", [(2, 5), (2, 6), (3, 3), (5, 2)])
def test_coordinate_degree_matches_univariate(p, n, rng):
    ctx = get_field(p, n)
    for _ in range(10):
        f = VectorialFunction(ctx, ctx, evaluate(random_poly(ctx, rng, 3)).table)
        assert coordinate_degree(f) == degree_of(f)
        if p == 2:
            assert oracles.anf_degree_binary([int(v) for v in f.table], n) == degree_of(f)


def test_do_decompose():
    ctx = get_field(2, 6)
    P = parse_poly("x^5 + g*x + x^4 + g^3", ctx)
    do, lin, const = do_decompose(P)
    assert do == parse_poly("x^5", ctx)
    assert lin == parse_poly("g*x + x^4", ctx)
    assert const == ctx.gen**3
    assert do + lin + const == P
    with pytest.raises(DegreeError):
        do_decompose(parse_poly("x^7", ctx))
    odd = get_field(3, 4)
    do, _, _ = do_decompose(parse_poly("x^4", odd))
    assert do(odd.one) == odd.one


def test_square_is_linear_in_char_two():
    ctx = get_field(2, 5)
    do, lin, _ = do_decompose(parse_poly("x^4 + x^3", ctx))
    assert 4 in lin.terms and 4 not in do.terms


def test_do_part_exponents_have_weight_two(rng):
    for p, n in [(2, 6), (3, 4)]:
        ctx = get_field(p, n)
        exps = [p**i + p**j for i in range(n) for j in range(i, n)] + [p**i for i in range(n)] + [0]
        P = UnivariatePoly(ctx, {e: int(rng.integers(1, ctx.q)) for e in exps})
        do, lin, const = do_decompose(P)
        assert all(oracles.p_weight(e, p) == 2 for e in do.terms)
        assert do + lin + const == P


def test_compose_and_derivative(f8):
    F = evaluate(parse_poly("x^3 + g*x^5", f8))
    ident = VectorialFunction.identity(f8)
    assert compose(F, ident) == F
    zero = derivative(F, f8.zero)
    assert np.all(zero.table == 0)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_derivative_of_cube(n):
    ctx = get_field(2, n)
    d = derivative(evaluate(parse_poly("x^3", ctx)), ctx.one)
    assert d == evaluate(parse_poly("x^2 + x + 1", ctx))


def test_derivatives_commute_and_are_linear(rng):
    ctx = get_field(3, 3)
    F = evaluate(random_poly(ctx, rng, 5))
    G = evaluate(random_poly(ctx, rng, 5))
    for a, b in rng.integers(0, ctx.q, (10, 2)):
        a, b = ctx.element(int(a)), ctx.element(int(b))
        assert derivative(derivative(F, a), b) == derivative(derivative(F, b), a)
        assert derivative(F + G, a) == derivative(F, a) + derivative(G, a)


@pytest.mark.parametrize("p,n", [(2, 4), (2, 5), (3, 3)])
def test_quadratic_L_is_additive_in_gamma(p, n, rng):
    ctx = get_field(p, n)
    exps = [p**i + p**j for i in range(n) for j in range(i, n)]
    F = evaluate(UnivariatePoly(ctx, {e: int(rng.integers(0, ctx.q)) for e in exps}))

    def L(g):
        d = derivative(F, g)
        return ctx.sub(d.table, d.table[0])

    for g1 in range(ctx.q):
        for g2 in range(ctx.q):
            lhs = L(ctx.element(int(ctx.add(g1, g2))))
            assert np.array_equal(lhs, ctx.add(L(ctx.element(g1)), L(ctx.element(g2))))


def test_is_quadratic():
    ctx = get_field(2, 6)
    assert is_quadratic(evaluate(parse_poly("x^3 + x^10 + g", ctx)))
    assert not is_quadratic(evaluate(parse_poly("x^7", ctx)))
    odd = get_field(3, 3)
    assert is_quadratic(evaluate(parse_poly("x^4 + x^2", odd)))
    assert not is_quadratic(evaluate(parse_poly("x^5", odd)))


def test_trace_function_values():
    ctx = get_field(2, 8)
    F = evaluate(parse_poly("x^3", ctx))
    T = trace_function(F, 4)
    assert T.cod.n == 4 and T.dom is ctx
    lifted = T.lift().table
    assert np.array_equal(lifted, ctx.rel_trace(F.table, 4))


def test_poly_string_round_trip(rng):
    ctx = get_field(2, 7)
    for _ in range(20):
        P = random_poly(ctx, rng)
        assert parse_poly(format_poly(P), ctx) == P


def test_parenthesised_exponents():
    ctx = get_field(2, 9)
    assert parse_poly("x^(2^3+2)", ctx) == parse_poly("x^10", ctx)
    assert parse_poly("x^(2*3+1)", ctx) == parse_poly("x^7", ctx)


def test_parse_errors():
    ctx = get_field(2, 5)
    with pytest.raises(ParseError) as exc:
        parse_poly("x^3 + + x", ctx)
    assert exc.value.column > 1
    with pytest.raises(ParseError):
        parse_poly("x^3 + y", ctx)


def test_value_table_file_round_trip(tmp_path):
    ctx = get_field(3, 3)
    F = evaluate(parse_poly("x^4 + g*x", ctx))
    path = tmp_path / "f.txt"
    F.write(path)
    assert VectorialFunction.read(path, ctx) == F
    path.write_text("0\n" * (ctx.q - 1) + "zz\n")
    with pytest.raises(ParseError) as exc:
        VectorialFunction.read(path, ctx)
    assert f"line {ctx.q}" in str(exc.value)


def test_table_validation():
    ctx = get_field(2, 4)
    with pytest.raises(ValueError):
        VectorialFunction(ctx, ctx, np.zeros(15))
    with pytest.raises(ValueError):
        VectorialFunction(ctx, ctx, np.full(16, 16))


def test_ea_transform_preserves_degree(rng):
    from ccztwist.fplinalg import random_invertible

    for p, n in [(2, 5), (2, 6), (3, 3)]:
        ctx = get_field(p, n)
        F = evaluate(random_poly(ctx, rng, 4))
        A1, A2 = random_invertible(n, p, rng), random_invertible(n, p, rng)
        b1, b2 = int(rng.integers(ctx.q)), int(rng.integers(ctx.q))
        dig = ctx.to_digits(ctx.all_ranks())
        inner = ctx.add(ctx.from_digits(dig @ A2.T % p), b2)
        outer = ctx.from_digits(ctx.to_digits(F.table[inner]) @ A1.T % p)
        A3 = evaluate(UnivariatePoly(ctx, {p**i: int(rng.integers(ctx.q)) for i in range(n)}))
        G = VectorialFunction(ctx, ctx, ctx.add(ctx.add(outer, b1), A3.table))
        assert degree_of(G) == degree_of(F) or degree_of(F) <= 1
