import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltphi import _kernels as K
from ltphi import fields as ff

pytestmark = pytest.mark.skipif(not K._HAVE_NUMBA, reason="numba not installed")

moduli = st.sampled_from([2, 3, 5, 7, 9, 27, 3**20])
arrays = st.lists(st.integers(0, 10**6), min_size=1, max_size=12)


@settings(max_examples=60, deadline=None)
@given(arrays, arrays, moduli)
def test_polymul_paths_agree(a, b, n):
    a, b = np.array(a, dtype=np.int64) % n, np.array(b, dtype=np.int64) % n
    assert np.array_equal(K._nb_polymul(a, b, np.int64(n)), K._np_polymul(a, b, n))


@settings(max_examples=60, deadline=None)
@given(arrays, st.lists(st.integers(0, 50), min_size=1, max_size=5), moduli)
def test_polyrem_paths_agree(a, low, n):
    a = np.array(a, dtype=np.int64) % n
    mod = np.array(low + [1], dtype=np.int64) % n
    if len(a) < len(mod) - 1:
        return
    assert np.array_equal(K._nb_polyrem(a.copy(), mod, np.int64(n)), K._np_polyrem(a.copy(), mod, n))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 7), st.sampled_from([2, 3, 5]), st.integers(0, 10**6))
def test_rref_paths_agree(rows, cols, p, seed):
    mat = np.random.default_rng(seed).integers(0, p, size=(rows, cols)).astype(np.int64)
    r1, p1 = K._nb_rref(mat.copy(), np.int64(p))
    r2, p2 = K._np_rref(mat.copy(), p)
    assert np.array_equal(r1 % p, r2 % p)
    assert list(p1) == list(p2)


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (2, 3)])
def test_count_solutions_paths_agree(p, m):
    L = ff.make_field(p, m)
    log, exp, digits, _ = L.tables()
    frob = np.array([L.from_int(c).frobenius(1).to_int() for c in range(L.order)], dtype=np.int64)
    rng = np.random.default_rng(p * 10 + m)
    for _ in range(5):
        A = rng.integers(0, L.order, size=(2, 2)).astype(np.int64)
        args = (A, frob, log, exp, digits, p, L.order, 2)
        assert int(K._nb_count_solutions(*args)) == K._np_count_solutions(*args)


def test_environment_switch_selects_numpy():
    code = ("from ltphi import _kernels as K, charp, fields as ff;"
            "k=ff.make_field(3,1);"
            "print(K.USE_NUMBA, charp.functor_V([[k(2)]],1).basis[0][0])")
    env = dict(os.environ, LTPHI_NUMBA="0")
    out0 = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    env["LTPHI_NUMBA"] = "1"
    out1 = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out0.split()[0] == "False" and out1.split()[0] == "True"
    assert out0.split()[1] == out1.split()[1]
