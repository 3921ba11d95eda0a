import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltphi import fields as ff
from ltphi import localnum as ln


def test_norm_of_base_element_unramified():
    ext = ln.make_extension(3, 1, 3, None, 6)
    pi = ext.top.coerce(3)
    assert ln.norm(pi, ext.base) == ext.base.coerce(27)


@pytest.mark.parametrize("p", [3, 5])
def test_norm_of_sqrt_minus_p(p):
    ext = ln.make_extension(p, 1, 1, (p, 0), 6)
    assert ln.norm(ext.top.uniformizer, ext.base) == ext.base.coerce(p)


@pytest.mark.parametrize("p", [3, 5])
def test_norm_of_sqrt_p(p):
    ext = ln.make_extension(p, 1, 1, (-p, 0), 6)
    assert ln.norm(ext.top.uniformizer, ext.base) == ext.base.coerce(-p)


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_examples(p):
    unr = ln.make_extension(p, 1, 2, None, 6)
    assert ln.lt_extension_criterion(unr.base.coerce(p), unr.top.coerce(p), unr)
    good = ln.make_extension(p, 1, 1, (p, 0), 6)
    assert ln.lt_extension_criterion(good.base.coerce(p), good.top.uniformizer, good)
    bad = ln.make_extension(p, 1, 1, (-p, 0), 6)
    assert not ln.lt_extension_criterion(bad.base.coerce(p), bad.top.uniformizer, bad)


def test_non_eisenstein_rejected():
    with pytest.raises(ValueError):
        ln.make_local_ring(3, 1, (1, 0), 4)
    with pytest.raises(ValueError):
        ln.make_local_ring(3, 1, (9, 0), 4)


def test_teichmuller_is_multiplicative_root_of_unity():
    O = ln.unramified(3, 2, 6)
    k = O.residue
    for x in k.units():
        t = O.teichmuller(x)
        assert t.residue() == x
        assert t ** (k.order - 1) == O.one
        assert t.frobenius(1) == O.teichmuller(x.frobenius(1))


def test_teichmuller_digits_round_trip():
    O = ln.make_local_ring(3, 2, (3, 0), 6)
    x = O.random(np.random.default_rng(4))
    assert O.from_digits(x.teichmuller_digits(), x.prec) == x


def _random_pair(seed, ring):
    rng = np.random.default_rng(seed)
    return ring.random(rng), ring.random(rng)


RINGS = [((3, 1, 2, None), 6), ((3, 1, 1, (3, 0)), 6), ((2, 1, 2, (2, 0)), 5), ((5, 2, 1, None), 4)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(RINGS))
def test_norm_multiplicative(seed, case):
    (p, fb, s, eis), M = case
    ext = ln.make_extension(p, fb, s, eis, M)
    x, y = _random_pair(seed, ext.top)
    if x.is_zero() or y.is_zero():
        return
    try:
        lhs = ln.norm(x * y, ext.base)
        rhs = ln.norm(x, ext.base) * ln.norm(y, ext.base)
    except ln.PrecisionError:
        return
    prec = min(lhs.prec, rhs.prec)
    assert (lhs - rhs).with_prec(prec).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(RINGS))
def test_norm_valuation(seed, case):
    (p, fb, s, eis), M = case
    ext = ln.make_extension(p, fb, s, eis, M)
    x = ext.top.random(np.random.default_rng(seed))
    if x.valuation >= 2 * ext.top.e:
        return
    n = ln.norm(x, ext.base)
    # valuations normalized on each ring: v_F(N x) = f(K/F) * v_K(x)
    assert n.valuation == s * x.valuation


@pytest.mark.parametrize("seed", range(5))
def test_criterion_invariant_under_norm_one_units(seed):
    ext = ln.make_extension(3, 1, 2, None, 6)
    K = ext.top
    rng = np.random.default_rng(seed)
    w = K.random_unit(rng)
    v = w.frobenius(1) * w.inverse()
    assert ln.norm(v, ext.base) == ext.base.one
    pi = ext.base.coerce(3)
    assert ln.lt_extension_criterion(pi, K.coerce(3), ext) == ln.lt_extension_criterion(pi, K.coerce(3) * v, ext)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_field_axioms_ramified(seed):
    O = ln.make_local_ring(3, 2, (3, 0), 5)
    rng = np.random.default_rng(seed)
    a, b, c = O.random(rng), O.random(rng), O.random(rng)
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    if a.is_unit():
        assert a * a.inverse() == O.one
