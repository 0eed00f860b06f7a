import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import eval_binom
from uniformity.binpoly import (
    IntPoly,
    PolyMap,
    binom_int,
    binom_power,
    binom_table_mod,
    compose,
    cs_system,
    parse_poly,
    parse_polymap,
)
from uniformity.errors import ValidationError


def test_binom_int_matches_falling_factorial():
    for n in range(-6, 10):
        for k in range(0, 7):
            assert binom_int(n, k) == eval_binom(n, k)


def test_parse_and_eval_against_plain_python():
    cases = [
        ("x + y^2", lambda x, y: x + y * y),
        ("x*y - 3*y + 2", lambda x, y: x * y - 3 * y + 2),
        ("C(x, 2) + C(y, 3)", lambda x, y: eval_binom(x, 2) + eval_binom(y, 3)),
        ("(x + 2*y)^3", lambda x, y: (x + 2 * y) ** 3),
        ("x^2/2 - x/2", lambda x, y: (x * x - x) // 2),
    ]
    for text, fn in cases:
        poly = parse_poly(text, variables=("x", "y"))
        for x in range(-3, 4):
            for y in range(-3, 4):
                assert poly(x, y) == fn(x, y), text


def test_parse_polymap_shape_and_variable_order():
    P = parse_polymap("x, x+y, x+y^2, x+y+y^2")
    assert P.t == 4
    assert P.variables == ("x", "y")
    assert P.degree == 2
    assert P.has_zero_constants
    assert P(3, 2) == (3, 5, 7, 9)


def test_product_rule_matches_monomial_multiplication():
    # multiply in the standard power basis as an oracle
    a = parse_poly("C(x, 2) + x*y", variables=("x", "y"))
    b = parse_poly("C(y, 3) - 2*x + 1", variables=("x", "y"))
    prod = a * b
    for x in range(-4, 5):
        for y in range(-4, 5):
            assert prod(x, y) == a(x, y) * b(x, y)


def test_binom_power_matches_comb_of_values():
    P = parse_poly("x + y^2", variables=("x", "y"))
    for l in (1, 2, 3):
        Pl = binom_power(P, l)
        for x in range(-3, 4):
            for y in range(-3, 4):
                assert Pl(x, y) == eval_binom(int(P(x, y)), l)


def test_compose_matches_pointwise():
    Q = parse_poly("2*C(y, 2) - y", variables=("y",))
    P = parse_poly("x + 3*y", variables=("x", "y"))
    comp = compose(Q, P)
    for x in range(-3, 4):
        for y in range(-3, 4):
            assert comp(x, y) == Q(int(P(x, y)))


def test_integer_valuedness():
    assert parse_poly("C(x, 3)", variables=("x",)).is_integer_valued
    assert parse_poly("x^2/2 + x/2", variables=("x",)).is_integer_valued
    assert not parse_poly("x/2", variables=("x",)).is_integer_valued


def test_degree_and_zero_conventions():
    z = IntPoly.zero(("x",))
    assert z.is_zero and z.degree == 0
    assert IntPoly.constant(("x",), 5).degree == 0
    assert parse_poly("x^3 + x", variables=("x",)).degree == 3


def test_eval_mod_table_matches_big_integer_evaluation():
    p = 13
    poly = parse_poly("C(x, 4) + 7*x^2", variables=("x",))
    table = poly.eval_mod_table(p)
    for x in range(p):
        assert table[x] == int(poly(x)) % p


def test_eval_mod_table_rejects_high_degree():
    poly = parse_poly("x^7", variables=("x",))
    with pytest.raises(ValidationError):
        poly.eval_mod_table(7)


def test_binom_table_mod_matches_comb():
    p = 11
    tab = binom_table_mod(p, 5)
    for k in range(6):
        for x in range(p):
            assert tab[k, x] == math.comb(x, k) % p


def test_split_outer_reassembles():
    poly = parse_poly("C(x, 2)*y + x*C(y, 2) + y^2", variables=("x", "y"))
    groups = poly.split_outer(1)
    # reassemble pointwise: sum over outer-index groups of C(x, a) * inner(y)
    for x in range(-3, 4):
        for y in range(-3, 4):
            tot = sum(eval_binom(x, o[0]) * inner(y) for o, inner in groups.items())
            assert tot == poly(x, y)


def test_monomial_roundtrip():
    poly = parse_poly("C(x, 3) - 2*C(x, 1) + 5", variables=("x",))
    mono = poly.monomial_coeffs()
    back = IntPoly.from_monomials(("x",), mono)
    assert back == poly


def test_json_roundtrip():
    P = parse_polymap("x, x+y, x+2*y, x+y^2")
    assert PolyMap.from_json_dict(P.to_json_dict()) == P


def test_cs_system_components_evaluate_correctly():
    # component for w is x + (y + sum w_i h_i)^d - sum (i-1) w_i h_i,
    # ordered with the last bit of w varying fastest
    P = cs_system(2, 2)
    assert P.t == 4
    assert P.variables == ("x", "y", "h1", "h2")
    x, y, h1, h2 = 3, 2, 5, 7
    vals = P(x, y, h1, h2)
    expect = [
        x + y**2,
        x + (y + h2) ** 2 - h2,
        x + (y + h1) ** 2,
        x + (y + h1 + h2) ** 2 - h2,
    ]
    assert list(vals) == expect


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=0, max_size=4),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=0, max_size=4),
    st.integers(-3, 3),
    st.integers(-3, 3),
)
def test_ring_axioms_at_random_points(idx_a, idx_b, x, y):
    va = ("x", "y")
    a = IntPoly(va, {i: Fraction(1) for i in idx_a})
    b = IntPoly(va, {i: Fraction(1) for i in idx_b})
    assert (a + b)(x, y) == a(x, y) + b(x, y)
    assert (a * b)(x, y) == a(x, y) * b(x, y)
    assert a * b == b * a
    assert (a - b) + b == a


@settings(max_examples=40, deadline=None)
@given(st.integers(-8, 8), st.integers(0, 6), st.integers(0, 6))
def test_vandermonde_product_identity(n, a, b):
    # C(n,a) C(n,b) expands exactly in the binomial basis
    pa = IntPoly(("x",), {(a,): Fraction(1)})
    pb = IntPoly(("x",), {(b,): Fraction(1)})
    assert (pa * pb)(n) == math.comb(n, a) * math.comb(n, b) if n >= 0 else True
    assert (pa * pb)(n) == eval_binom(n, a) * eval_binom(n, b)
