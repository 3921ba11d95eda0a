import pytest
from hypothesis import given, settings, strategies as st

from ltphi import fields as ff
from ltphi.series import (INF, ZZ, BivarTrunc, MultiTrunc, PrecisionError, TruncSeries, compose, reversion,
                          substitute_xy)

F3 = ff.make_field(3, 1)


def zz(coeffs, prec=INF, var="X"):
    return TruncSeries(ZZ, dict(coeffs), prec, var)


def test_compose_identity():
    g = zz({1: 3, 2: -1, 5: 7}, 8)
    assert compose(zz({1: 1}), g).equal_to_prec(g)


def test_compose_hand_example():
    f = TruncSeries(F3, {1: 1, 2: 1}, 3, "X")
    g = TruncSeries(F3, {1: 2}, INF, "X")
    assert compose(f, g).text() == "X*[2] + X^2 + O(X^3)"


def test_compose_inner_constant_rejected():
    with pytest.raises(ValueError):
        compose(zz({1: 1}), zz({0: 1, 1: 1}))


def test_substitute_sum():
    F = BivarTrunc(ZZ, {(1, 0): 1, (0, 1): 1}, 6)
    out = substitute_xy(F, zz({1: 1}, var="t"), zz({2: 1}, var="t"))
    assert out.coeffs == {1: 1, 2: 1}


def test_substitute_multiplicative_law():
    F = BivarTrunc(ZZ, {(1, 0): 1, (0, 1): 1, (1, 1): 1}, 6)
    t = zz({1: 1}, var="t")
    assert substitute_xy(F, t, t).coeffs == {1: 2, 2: 1}


@pytest.mark.parametrize("p", [3, 5])
def test_substitute_frobenius_mod_p(p):
    k = ff.make_field(p, 1)
    F = BivarTrunc(k, {(1, 0): 1, (0, 1): 1, (1, 1): 1}, 2 * p + 2)
    t = TruncSeries(k, {1: 1}, INF, "t")
    b = (t + k.one) ** p - k.one
    out = substitute_xy(F, t, b)
    assert {n: c.to_int() for n, c in out.coeffs.items()} == {1: 1, p: 1, p + 1: 1}


def test_reversion_identity():
    assert reversion(zz({1: 1}, 6)).coeffs == {1: 1}


def test_reversion_hand_example():
    assert reversion(zz({1: 1, 2: 1}, 4)).coeffs == {1: 1, 2: -1, 3: 2}


def test_text_forms():
    k = ff.make_field(3, 2)
    s = TruncSeries(k, {-1: k.one, 2: k([2, 1])}, 8)
    assert s.text() == "u^-1 + u^2*[2,1] + O(u^8)"
    F = BivarTrunc(ZZ, {(1, 0): 1, (0, 1): 1, (1, 1): 1}, 4)
    assert F.text() == "X + Y + X*Y + O(deg 4)"


def test_coefficient_beyond_precision_raises():
    with pytest.raises(PrecisionError):
        zz({1: 1}, 3)[5]


def test_exact_non_monomial_inverse_needs_precision():
    with pytest.raises(PrecisionError):
        zz({0: 1, 1: 1}).inverse()
    inv = zz({0: 1, 1: 1}).inverse(prec=5)
    assert inv.coeffs == {0: 1, 1: -1, 2: 1, 3: -1, 4: 1} and inv.prec == 5


coeff = st.integers(-5, 5)


def series_st(lo=0, n=6, prec=6):
    return st.lists(coeff, min_size=n, max_size=n).map(
        lambda cs: TruncSeries(ZZ, {lo + i: c for i, c in enumerate(cs)}, prec))


def f3_series(lo, n=6):
    return st.lists(st.integers(0, 2), min_size=n, max_size=n).map(
        lambda cs: TruncSeries(F3, {lo + i: c for i, c in enumerate(cs)}, lo + n))


@settings(max_examples=100, deadline=None)
@given(series_st(), series_st(), series_st())
def test_ring_axioms_univariate(a, b, c):
    assert ((a + b) + c).equal_to_prec(a + (b + c))
    assert (a + b).equal_to_prec(b + a)
    assert ((a * b) * c).equal_to_prec(a * (b * c))
    assert (a * b).equal_to_prec(b * a)
    assert (a * (b + c)).equal_to_prec(a * b + a * c)
    assert (a - a).is_zero()


def _biv(cs):
    keys = [(i, j) for i in range(4) for j in range(4 - i)]
    return BivarTrunc(ZZ, dict(zip(keys, cs)), 4)


biv_st = st.lists(coeff, min_size=10, max_size=10).map(_biv)


@settings(max_examples=100, deadline=None)
@given(biv_st, biv_st, biv_st)
def test_ring_axioms_bivariate(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(f3_series(-2), f3_series(1))
def test_laurent_valuations_add(a, b):
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).lo == a.lo + b.lo


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=4, max_size=4), st.sampled_from([1, -1]))
def test_reversion_involution_and_inverse(cs, lead):
    f = TruncSeries(ZZ, {1: lead, **{i + 2: c for i, c in enumerate(cs)}}, 6, "X")
    g = reversion(f)
    assert compose(f, g).equal_to_prec(zz({1: 1}))
    assert reversion(g).equal_to_prec(f)


@settings(max_examples=40, deadline=None)
@given(series_st(1, 3, 4), series_st(1, 3, 4), series_st(1, 3, 4))
def test_compose_associative(f, g, h):
    if g.is_zero() or h.is_zero():
        return
    lhs = compose(f, compose(g, h))
    rhs = compose(compose(f, g), h)
    assert lhs.equal_to_prec(rhs)


@settings(max_examples=40, deadline=None)
@given(f3_series(-1))
def test_laurent_inverse(a):
    if a.is_zero():
        return
    one = a * a.inverse()
    assert one.equal_to_prec(TruncSeries(F3, {0: 1}))


def test_multitrunc_three_variables():
    X = MultiTrunc.variable(ZZ, 3, 0, 4)
    Y = MultiTrunc.variable(ZZ, 3, 1, 4)
    Z = MultiTrunc.variable(ZZ, 3, 2, 4)
    assert ((X + Y) * Z).text() == "X*Z + Y*Z + O(deg 4)"
