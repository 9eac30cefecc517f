from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptflab.concepts import Conjunction, Literal
from ptflab.poly import (
    IntPoly,
    SparsePoly,
    UniPoly,
    add,
    chebyshev,
    clear_denominators,
    compose_univariate,
    conjunction_interpolator,
    cube_values,
    degree,
    eval_poly,
    from_text,
    from_values,
    literal_poly,
    moebius_transform,
    mul,
    pow_,
    scale,
    substitute,
    substitute_literals,
    to_text,
    weight,
    zeta_transform,
)

from oracles import chebyshev_value, cube, eval_terms, interpolate, point_mask


def x(n, *vs):
    m = 0
    for v in vs:
        m |= 1 << v
    return IntPoly(n, {m: 1})


def polys(n, integral=False):
    coeff = st.integers(-9, 9) if integral else st.fractions(min_value=-5, max_value=5, max_denominator=6)
    return st.dictionaries(st.integers(0, (1 << n) - 1), coeff, max_size=6).map(
        lambda t: (IntPoly if integral else SparsePoly)(n, t))


def test_multilinear_reduction():
    assert mul(x(1, 0), x(1, 0)) == x(1, 0)
    p = SparsePoly(2, {1: 3, 2: Fraction(1, 2)})
    assert pow_(p, 0) == IntPoly.constant(2, 1)


def test_eval_examples():
    p = IntPoly(1, {1: 2, 0: -1})
    assert eval_poly(p, (1,)) == 1
    assert eval_poly(p, (0,)) == -1
    c = SparsePoly.constant(3, Fraction(7, 3))
    assert all(eval_poly(c, pt) == Fraction(7, 3) for pt in cube(3))


def test_chebyshev_small():
    assert chebyshev(2) == UniPoly([-1, 0, 2])
    assert chebyshev(4) == UniPoly([1, 0, -8, 0, 8])


@pytest.mark.parametrize("d", range(0, 12))
def test_chebyshev_against_closed_form(d):
    C = chebyshev(d)
    assert C.degree == d
    for y in [Fraction(-1), Fraction(-1, 3), Fraction(0), Fraction(2, 7), Fraction(1), Fraction(5, 4)]:
        assert C(y) == chebyshev_value(d, y)
    assert C(1) == 1
    assert C.derivative()(1) == d * d


def test_compose_examples():
    A = IntPoly(2, {1: 1, 2: 1})
    assert compose_univariate(UniPoly([0, 0, 1]), A) == IntPoly(2, {1: 1, 2: 1, 3: 2})
    B = SparsePoly(3, {0: Fraction(1, 2), 5: -2})
    assert compose_univariate(UniPoly([0, 1]), B) == B


def test_clear_denominators_examples():
    p = SparsePoly(1, {1: Fraction(1, 2), 0: Fraction(1, 3)})
    assert clear_denominators(p) == (IntPoly(1, {1: 3, 0: 2}), 6)
    q = IntPoly(2, {3: 4, 0: -1})
    assert clear_denominators(q) == (q, 1)


def test_literal_and_conjunction_examples():
    assert literal_poly(Literal(1, True), 2) == IntPoly(2, {0: 1, 2: -1})
    c = conjunction_interpolator(Conjunction((Literal(0), Literal(1, True))), 2)
    assert c == IntPoly(2, {1: 1, 3: -1})
    assert c.weight() == 2 <= 2 ** 2
    assert conjunction_interpolator(Conjunction(()), 3) == IntPoly.constant(3, 1)


def test_weight_degree_examples():
    p = IntPoly(2, {3: 3, 0: -2})
    assert (weight(p), degree(p)) == (5, 2)
    z = IntPoly.zero(4)
    assert (weight(z), degree(z)) == (0, 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(polys(n), polys(n), polys(n))))
def test_ring_laws(ps):
    p, q, r = ps
    assert add(p, q) == add(q, p)
    assert mul(p, q) == mul(q, p)
    assert mul(mul(p, q), r) == mul(p, mul(q, r))
    assert mul(p, add(q, r)) == add(mul(p, q), mul(p, r))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(polys(n), polys(n))))
def test_products_agree_pointwise(ps):
    p, q = ps
    prod = mul(p, q)
    for pt in cube(p.n):
        assert eval_poly(prod, pt) == eval_terms(p.terms, pt) * eval_terms(q.terms, pt)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: polys(n)))
def test_dense_transforms(p):
    vals = cube_values(p)
    for pt in cube(p.n):
        assert vals[point_mask(pt)] == eval_terms(p.terms, pt)
    assert from_values(vals, p.n) == p
    assert interpolate(list(vals), p.n) == {m: c for m, c in p.terms.items()}


def test_int64_transforms_invert():
    rng = np.random.default_rng(0)
    arr = rng.integers(-1000, 1000, size=1 << 10)
    assert (moebius_transform(zeta_transform(arr)) == arr).all()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: polys(n)))
def test_clear_denominators_minimal(p):
    pt, C = clear_denominators(p)
    assert isinstance(pt, IntPoly)
    assert scale(p, C) == pt
    # no smaller positive multiplier makes every coefficient integral
    for c in range(1, C):
        assert not scale(p, c).is_integral


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_compose_against_pointwise(n, deg, data):
    coeffs = data.draw(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=deg + 1, max_size=deg + 1))
    A = data.draw(polys(n))
    q = UniPoly(coeffs)
    got = compose_univariate(q, A)
    for pt in cube(n):
        assert eval_poly(got, pt) == q(eval_terms(A.terms, pt))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_literal_substitution_routes_agree(data):
    h = data.draw(st.integers(1, 4))
    n_out = data.draw(st.integers(h, 6))
    vars_ = data.draw(st.permutations(range(n_out)))[:h]
    negs = data.draw(st.lists(st.booleans(), min_size=h, max_size=h))
    lits = [Literal(v, g) for v, g in zip(vars_, negs)]
    p = data.draw(polys(h, integral=True))
    fast = substitute_literals(p, lits, n_out)
    slow = substitute(p, [literal_poly(l, n_out) for l in lits])
    assert fast == slow
    for pt in cube(n_out):
        inner = tuple(int(bool(pt[l.var]) != l.negated) for l in lits)
        assert eval_poly(fast, pt) == eval_terms(p.terms, inner)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.one_of(polys(n), polys(n, integral=True))))
def test_text_round_trip(p):
    assert from_text(to_text(p), p.n) == p


def test_text_format():
    p = IntPoly(3, {0: -2, 1: 3, 6: -1})
    assert to_text(p) == "-2\n+3 * x_1\n-1 * x_2 * x_3"
    with pytest.raises(ValueError):
        from_text("3 x_1", 2)


def test_int_poly_stays_integral():
    p = IntPoly(2, {1: 2})
    assert isinstance(p * 3 + 1, IntPoly)
    assert not isinstance(p + Fraction(1, 2), IntPoly)
    with pytest.raises(ValueError):
        IntPoly(1, {4: 1})
