import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltphi import charp
from ltphi import fields as ff
from ltphi import lift0
from ltphi import localnum as ln
from ltphi.ltgroup import make_lt
from ltphi.series import INF, TruncSeries


@pytest.fixture(scope="module")
def ring3():
    lt = make_lt(3, 1, "standard", 13, 4)
    return lift0.make_coeff_ring(lt, 1, None, 4, 12)


@pytest.mark.parametrize("p", [2, 3])
def test_phi_of_u_multiplicative(p):
    lt = make_lt(p, 1, "multiplicative", 13, 4)
    A = lift0.make_coeff_ring(lt, 1, None, 4, 12)
    u = A.variable()
    expect = (u + A.base.one) ** p - A.base.one
    assert lift0.phi_lift(u, A).equal_to_prec(expect)


def test_phi_fixes_constants(ring3):
    c = ring3.base.coerce(7)
    assert lift0.phi_lift(ring3.coerce(c), ring3).equal_to_prec(ring3.coerce(c))


def test_gamma_one_is_identity(ring3):
    x = ring3.random(np.random.default_rng(0))
    assert lift0.gamma_lift(1, x, ring3).equal_to_prec(x)


def test_phi_rs_is_iterate_of_phi_r():
    lt = make_lt(2, 1, "standard", 13, 3)
    A = lift0.make_coeff_ring(lt, 2, None, 3, 10)
    k = A.residue
    u = A.variable()
    g = A.base.teichmuller(k.gen)
    for x in (u, A.coerce(g), u * g + u**2):
        assert lift0.phi_r(lift0.phi_r(x, A), A).equal_to_prec(lift0.phi_lift(x, A))


def test_unramified_base_change_matches_base_ring():
    lt = make_lt(3, 1, "standard", 13, 3)
    A1 = lift0.make_coeff_ring(lt, 1, None, 3, 10)
    A2 = lift0.make_coeff_ring(lt, 2, None, 3, 10)
    assert A2.base.uniformizer == A2.base.coerce(3)
    u1, u2 = A1.variable(), A2.variable()
    # on generators: phi^{r} of K over F_9 restricted to u agrees with the base ring
    lhs = lift0.phi_r(u2, A2)
    rhs = lift0.phi_r(u1, A1)
    assert {n: c.c[0] for n, c in lhs.coeffs.items()} == {n: c.c[0] + (0,) for n, c in rhs.coeffs.items()}


CASES = [("multiplicative", 3, 1, None), ("standard", 3, 1, None), ("standard", 2, 2, None),
         ("standard", 3, 2, None), ("standard", 5, 1, None), ("standard", 3, 1, (3, 0))]


def _ring(case):
    f, p, s, eis = case
    r = 1
    lt = make_lt(p, r, f, 13, 4)
    return lift0.make_coeff_ring(lt, s, eis, 4, 12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(CASES))
def test_reduction_intertwines(seed, case):
    A = _ring(case)
    E = charp.make_norm_field(A.lt, A.s, N=14)
    rng = np.random.default_rng(seed)
    x = A.random(rng, lo=-1)
    y = lift0.phi_lift(x, A)
    assert y.prec == A.N
    assert lift0.reduce(y).equal_to_prec(charp.frobenius_series(lift0.reduce(x), A.e))
    for idx, c in enumerate(A.gamma_values):
        g = lift0.gamma_lift(c, x, A)
        assert lift0.reduce(g).equal_to_prec(E.gamma(idx, lift0.reduce(x)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(CASES[:3]))
def test_phi_gamma_commute_and_gamma_multiplicative(seed, case):
    A = _ring(case)
    rng = np.random.default_rng(seed)
    x = A.random(rng, lo=-1)
    c1 = A.lt.work.coerce(1 + A.p)
    c2 = A.gamma_values[0]
    g = lift0.gamma_lift(c1, x, A)
    assert lift0.gamma_lift(c1, lift0.phi_lift(x, A), A).equal_to_prec(lift0.phi_lift(g, A))
    assert lift0.gamma_lift(c2, g, A).equal_to_prec(lift0.gamma_lift(c1 * c2, x, A))


def _exact_mod(matPhi, sol, e, M):
    # independent check: sigma^e(x) - A x vanishes to valuation M in every coordinate
    for v in sol.basis:
        for i in range(len(v)):
            acc = v[i].frobenius(e)
            for j in range(len(v)):
                acc = acc - lift0.embed_local(matPhi[i][j], v[j].desc) * v[j]
            assert acc.valuation >= M


def test_V_lift_identity():
    O = ln.unramified(3, 1, 4)
    sol = lift0.functor_V_lift([[O.one]], O, 1)
    assert len(sol.basis) == 1 and sol.basis[0][0] == sol.ring.one


def test_V_lift_teichmuller():
    O = ln.unramified(3, 2, 4)
    g = ff.primitive_element(O.residue)
    mat = [[O.teichmuller(g)]]
    sol = lift0.functor_V_lift(mat, O, 2)
    _exact_mod(mat, sol, 2, 4)
    assert lift0.check_V_lift(mat, sol, 2)
    x = sol.basis[0][0]
    assert x == sol.ring.teichmuller(x.residue())


@pytest.mark.parametrize("a", [1, 2])
def test_V_lift_one_plus_uniformizer(a):
    O = ln.unramified(3, 1, 3)
    mat = [[O.one + O.uniformizer * a]]
    sol = lift0.functor_V_lift(mat, O, 1)
    _exact_mod(mat, sol, 1, 3)
    # reduction: phi-fixed vector mod varpi
    assert sol.basis[0][0].residue().frobenius(1) == sol.basis[0][0].residue()


def test_V_lift_reduction_matches_charp():
    O = ln.unramified(3, 2, 4)
    g = ff.primitive_element(O.residue)
    for mat in ([[O.one]], [[O.teichmuller(g)]], [[O.one + O.uniformizer * O.teichmuller(g)]]):
        sol = lift0.functor_V_lift(mat, O, 2)
        Abar = [[a.residue() for a in row] for row in mat]
        assert lift0.same_V_span(lift0.reduce_basis(sol), charp.functor_V(Abar, 2).basis, Abar, 2)


def test_V_lift_singular_rejected():
    O = ln.unramified(3, 1, 3)
    with pytest.raises(ff.NotEtaleError):
        lift0.functor_V_lift([[O.uniformizer]], O, 1)


def test_V_lift_beyond_tower_reports_digit():
    O = ln.unramified(3, 2, 3)
    g = ff.primitive_element(O.residue)
    mat = [[O.teichmuller(g), O.zero], [O.one, O.one + O.uniformizer]]
    with pytest.raises(lift0.LiftError, match="digit"):
        lift0.functor_V_lift(mat, O, 2)
