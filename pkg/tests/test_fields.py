import math
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from ltphi import fields as ff
from ltphi import glclasses


def test_prime_field_modulus():
    k = ff.make_field(2, 1)
    assert k.order == 2
    assert k.modulus == (0, 1)


def test_f9_has_nine_elements():
    k = ff.make_field(3, 2)
    assert len(set(k.elements())) == 9


def test_text_form():
    k = ff.make_field(3, 2)
    assert repr(k.gen) == "ff(3,2):[0,1]"


def test_f4_into_f16_is_ring_map():
    k4, k16 = ff.make_field(2, 2), ff.make_field(2, 4)
    for a, b in product(k4.elements(), repeat=2):
        assert ff.embed(a + b, k16) == ff.embed(a, k16) + ff.embed(b, k16)
        assert ff.embed(a * b, k16) == ff.embed(a, k16) * ff.embed(b, k16)
    assert ff.embed(k4.one, k16) == k16.one


def test_frobenius_fixes_prime_field():
    k = ff.make_field(5, 1)
    for x in k.elements():
        for e in range(1, 4):
            assert x.frobenius(e) == x


def test_frobenius_full_cycle_is_identity():
    g = ff.make_field(3, 2).gen
    assert g.frobenius(2) == g


def test_frobenius_of_sqrt2_in_f9():
    k = ff.make_field(3, 2)
    g = k.gen
    assert g * g == k(2)
    assert g.frobenius(1) == k(2) * g


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (2, 6), (3, 4)])
def test_fixed_set_of_frobenius_iterate(p, m):
    k = ff.make_field(p, m)
    for e in range(1, m + 1):
        fixed = sum(1 for x in k.elements() if x.frobenius(e) == x)
        assert fixed == p ** math.gcd(e, m)


@pytest.mark.parametrize("p,chain", [(2, (1, 2, 4)), (3, (1, 2)), (2, (1, 3)), (2, (2, 4))])
def test_embedding_chain_compatible(p, chain):
    fields = [ff.make_field(p, m) for m in chain]
    src, top = fields[0], fields[-1]
    for x in src.elements():
        step = x
        for f in fields[1:]:
            step = ff.embed(step, f)
        assert step == ff.embed(x, top)


def test_semilinear_identity_scalar():
    k = ff.make_field(3, 1)
    sol = ff.solve_semilinear_const([[k.one]], 1)
    assert sol.dimension == 1 and sol.count == 3


def test_semilinear_two_needs_f9():
    k = ff.make_field(3, 1)
    sol = ff.solve_semilinear_const([[k(2)]], 1)
    assert sol.field.m == 2
    assert sol.count == 3
    assert sol.dimension == 1
    assert ff.check_solutions([[k(2)]], 1, sol.basis)


def test_semilinear_identity_rank_two():
    k = ff.make_field(2, 1)
    A = [[k.one, k.zero], [k.zero, k.one]]
    sol = ff.solve_semilinear_const(A, 1)
    assert sol.dimension == 2 and sol.count == 4


def test_singular_matrix_rejected():
    k = ff.make_field(3, 1)
    with pytest.raises(ff.NotEtaleError):
        ff.solve_semilinear_const([[k.zero]], 1)


def _matrices(p, m, d):
    # the solution count is a conjugacy invariant, so one matrix per class suffices
    if d == 1:
        return [[[x]] for x in ff.make_field(p, m).elements()]
    reps = glclasses.class_representatives(p, m, d)
    assert glclasses.class_equation_holds(reps, p**m, d)
    return [r.matrix for r in reps]


@pytest.mark.parametrize("p,m,e,d", [(2, 1, 1, 1), (3, 1, 1, 1), (2, 2, 2, 1), (2, 1, 1, 2), (3, 1, 1, 2)])
def test_solution_count_matches_brute_force(p, m, e, d):
    for A in _matrices(p, m, d):
        try:
            sol = ff.solve_semilinear_const(A, e, method="linear")
        except ff.NotEtaleError:
            continue
        assert sol.count == p ** (e * d)
        assert ff.brute_force_count(A, e, sol.field) == p ** (e * d)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(1, 4))
def test_frobenius_is_ring_map(a, b, e):
    k = ff.make_field(3, 4)
    x, y = k.from_int(a), k.from_int(b)
    assert (x + y).frobenius(e) == x.frobenius(e) + y.frobenius(e)
    assert (x * y).frobenius(e) == x.frobenius(e) * y.frobenius(e)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 15), st.integers(0, 15))
def test_restrict_inverts_embed(a, b):
    k4, k16 = ff.make_field(2, 2), ff.make_field(2, 4)
    x = k4.from_int(a % 4)
    assert ff.restrict(ff.embed(x, k16), k4) == x
    y = k16.from_int(b)
    assert (y.frobenius(2) == y) == y.in_subfield(2)


@pytest.mark.parametrize("p,m,d", [(2, 1, 3), (3, 1, 2), (2, 2, 2), (5, 1, 2)])
def test_order_matches_iteration(p, m, d):
    for rep in glclasses.class_representatives(p, m, d):
        base = rep.matrix[0][0].desc
        assert ff._order_over_fp(rep.matrix, base, base.order) == ff.linalg.matrix_order(rep.matrix)


def _enumerate(A, e, L):
    A = [[L.coerce(a) for a in row] for row in A]
    out = []
    for x in product(L.elements(), repeat=len(A)):
        if all(xi.frobenius(e) == ff._dot(A[i], list(x)) for i, xi in enumerate(x)):
            out.append(list(x))
    return out


@pytest.mark.parametrize("p,m,e", [(2, 2, 1), (3, 2, 1), (2, 4, 2), (5, 2, 1)])
def test_brute_force_solutions_in_code_order(p, m, e):
    k = ff.make_field(p, m)
    A = [[k.gen, k.one], [k.zero, k.one]]
    L = ff.make_field(p, ff.splitting_degree(A, e))
    if L.order**2 > 4096:
        L = k
    assert ff.brute_force_solutions(A, e, L) == _enumerate(A, e, L)


def test_float_matmul_is_exact():
    import numpy as np

    rng = np.random.default_rng(0)
    A, B = rng.integers(0, 79, (60, 60)), rng.integers(0, 79, (60, 60))
    assert np.array_equal(ff._matmul_mod(A, B, 79), (A @ B) % 79)
