from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltphi import charp
from ltphi import fields as ff
from ltphi import glclasses
from ltphi.ltgroup import make_lt
from ltphi.series import INF, TruncSeries


def series(k, coeffs, prec):
    return TruncSeries(k, dict(coeffs), prec)


def test_gamma_identity():
    lt = make_lt(3, 1, "standard", 8, 1)
    k = ff.make_field(3, 1)
    x = series(k, {-1: 1, 0: 2, 3: 1}, 6)
    assert charp.gamma_action(1, x, lt).equal_to_prec(x)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_gamma_multiplicative_binomial(p):
    lt = make_lt(p, 1, "multiplicative", 2 * p + 3, 1)
    k = ff.make_field(p, 1)
    u = series(k, {1: 1}, INF)
    out = charp.gamma_action(1 + p, u, lt)
    assert {n: c.to_int() for n, c in out.coeffs.items()} == {1: 1, p: 1, p + 1: 1}


def test_gamma_commutes_with_q_power():
    lt = make_lt(3, 1, "standard", 12, 1)
    k = ff.make_field(3, 1)
    x = series(k, {0: 1, 1: 2, 2: 1}, 4)
    lhs = charp.gamma_action(4, charp.frobenius_series(x, 1), lt)
    rhs = charp.frobenius_series(charp.gamma_action(4, x, lt), 1)
    assert lhs.equal_to_prec(rhs)


def _module(entries, gammas=()):
    lt = make_lt(3, 1, "standard", 8, 1)
    E = charp.make_norm_field(lt, 1, gamma_values=[4] if gammas else [])
    return charp.PhiGammaModule(E, [[E.coerce(a) for a in row] for row in entries],
                                [[[E.coerce(a) for a in row] for row in G] for G in gammas])


def test_etale_trivial_rank_one():
    assert charp.check_etale_phigamma(_module([[1]], [[[1]]])).ok


def test_etale_uniformizer_unit_in_laurent_field():
    lt = make_lt(3, 1, "standard", 8, 1)
    E = charp.make_norm_field(lt, 1, gamma_values=[])
    M = charp.PhiGammaModule(E, [[E.variable()]], [])
    assert charp.check_etale_phigamma(M).ok


def test_not_etale():
    rep = charp.check_etale_phigamma(_module([[0]]))
    assert not rep.ok
    assert rep.first_violation()[1].startswith("not étale")


def test_V_identity_f3():
    k = ff.make_field(3, 1)
    sol = charp.functor_V([[k.one]], 1)
    assert sol.field == k and sol.dimension == 1


def test_V_two_over_f3_lives_in_f9():
    k = ff.make_field(3, 1)
    sol = charp.functor_V([[k(2)]], 1)
    assert sol.field.m == 2 and sol.dimension == 1
    x = sol.basis[0][0]
    assert x * x == sol.field.coerce(2)
    assert sol.fp_dimension == 1  # 3 solutions


def test_V_swap_over_f2():
    k = ff.make_field(2, 1)
    A = [[k.zero, k.one], [k.one, k.zero]]
    sol = charp.functor_V(A, 1)
    assert sol.dimension == 2
    assert sol.field.m == 2
    sols = ff.brute_force_solutions(A, 1, sol.field)
    assert len(sols) == 4
    assert charp.check_V_solution(A, sol)


def test_D_trivial_action():
    k = ff.make_field(3, 1)
    I = [[k.one, k.zero], [k.zero, k.one]]
    D = charp.functor_D_unramified(I, 1, 2)
    assert D.matPhi == I


def test_hilbert90_f4():
    k4 = ff.make_field(2, 2)
    w = k4.gen
    B = charp.hilbert90([[w]], 1, 2)
    b = B[0][0]
    assert b.frobenius(1) * b.inverse() == w
    # brute-force oracle: exactly the nonzero multiples of one solution over F_2
    assert [x for x in k4.units() if x.frobenius(1) == w * x] == [b]


def test_hilbert90_norm_not_one_rejected():
    k9 = ff.make_field(3, 2)
    bad = next(x for x in k9.units() if x * x.frobenius(1) != k9.one)
    with pytest.raises(charp.NotARepresentationError):
        charp.hilbert90([[bad]], 1, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_round_trip_rank_one(q):
    p, m = ff.prime_power(q)
    k = ff.make_field(p, m)
    for c in (k.one, -k.one):
        ok, _ = charp.round_trip_VD([[c]], m, 2)
        assert ok


@pytest.mark.parametrize("p,m,n", [(2, 1, 2), (3, 1, 2), (2, 1, 4), (2, 2, 2)])
def test_round_trip_rank_two_all_representations(p, m, n):
    k = ff.make_field(p, m)
    count = 0
    for entries in product(list(k.elements()), repeat=4):
        C = [list(entries[:2]), list(entries[2:])]
        try:
            D = charp.functor_D_unramified(C, m, n)
        except (charp.NotARepresentationError, ArithmeticError):
            continue
        count += 1
        ok, _ = charp.round_trip_VD(C, m, n)
        assert ok
    assert count > 0


@pytest.mark.parametrize("p,m,d", glclasses.dimension_law_cases(81)[:8])
def test_dimension_law_on_class_reps(p, m, d):
    for rep in glclasses.class_representatives(p, m, d):
        ok, dim = charp.dimension_law_holds(rep.matrix, m)
        assert ok and dim == d


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_gamma_is_an_action(seed):
    lt = make_lt(3, 1, "standard", 10, 1)
    k = ff.make_field(3, 1)
    rng = np.random.default_rng(seed)
    x = series(k, {n: int(rng.integers(3)) for n in range(-1, 5)}, 5)
    c1, c2 = (lt.work.random_unit(rng) for _ in range(2))
    lhs = charp.gamma_action(c1, charp.gamma_action(c2, x, lt, 10), lt, 10)
    rhs = charp.gamma_action(c1 * c2, x, lt, 10)
    assert lhs.equal_to_prec(rhs)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 2), (3, 1), (3, 2), (5, 1)]))
def test_V_solutions_independent(seed, pm):
    p, m = pm
    k = ff.make_field(p, m)
    rng = np.random.default_rng(seed)
    A = [[k.random(rng) for _ in range(2)] for _ in range(2)]
    try:
        sol = charp.functor_V(A, m)
    except ff.NotEtaleError:
        return
    assert charp.check_V_solution(A, sol)
    from ltphi import linalg
    assert linalg.rank(linalg.from_columns(sol.basis)) == 2
