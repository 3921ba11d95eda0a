"""Acceptance criteria, one test each; a summary line per criterion is printed
at the end of the pytest run."""
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from ltphi import charp
from ltphi import fields as ff
from ltphi import glclasses
from ltphi import lift0
from ltphi import linalg
from ltphi import localnum as ln
from ltphi import twotower as tt
from ltphi.ltgroup import check_endomorphisms, check_group_axioms, group_law, make_lt, torsion_polynomial
from ltphi.series import TruncSeries


def record(n, name, ok, detail=""):
    ACCEPTANCE[n] = (name, bool(ok), detail)
    print(f"criterion {n} {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def test_01_group_law_axioms():
    t0 = time.perf_counter()
    results = {}
    for f in ("standard", "multiplicative"):
        for p, r in ((2, 1), (3, 1), (2, 2)):
            if f == "multiplicative" and r > 1:
                continue  # (1+X)^p - 1 is only Lubin-Tate for q = p
            results[(f, p, r)] = all(check_group_axioms(make_lt(p, r, f, 8, 4), 8).values())
    dt = time.perf_counter() - t0
    record(1, "group-law axioms", all(results.values()) and dt < 2.0,
           f"{sum(results.values())}/{len(results)} laws, {dt:.2f}s (limit 2s)")


def test_02_multiplicative_oracle():
    bad = []
    for p in (2, 3, 5):
        for N in range(2, 13):
            expect = "X + Y + O(deg 2)" if N == 2 else f"X + Y + X*Y + O(deg {N})"
            lt = make_lt(p, 1, "multiplicative", N, 4)
            if group_law(lt).text() != expect or not check_group_axioms(lt, N)["f-endomorphism"]:
                bad.append((p, N))
    record(2, "multiplicative oracle", not bad, f"p in 2,3,5 and N = 2..12, failures {bad}")


def test_03_endomorphism_ring():
    rng = np.random.default_rng(3)
    lt = make_lt(3, 1, "standard", 8, 4)
    fails = 0
    for _ in range(50):
        a, b = lt.work.random(rng), lt.work.random(rng)
        fails += not all(check_endomorphisms(lt, a, b, 8).values())
    record(3, "endomorphism ring", fails == 0, f"50 random pairs at N=8, {fails} failures")


def test_04_torsion_certificate():
    rows = []
    for p, r in ((2, 1), (3, 1), (2, 2), (5, 1)):
        lt = make_lt(p, r, "standard", 8, 4)
        q = p**r
        for n in (1, 2):
            T = torsion_polynomial(lt, n)
            rows.append(T.eisenstein and T.degree == q**n - q ** (n - 1))
    record(4, "torsion certificate", all(rows), f"{sum(rows)}/{len(rows)} Eisenstein of degree q^n - q^(n-1)")


def test_05_norm_criterion():
    rows = []
    for p in (3, 5):
        unr = ln.make_extension(p, 1, 2, None, 6)
        rows.append(ln.lt_extension_criterion(unr.base.coerce(p), unr.top.coerce(p), unr) is True)
        good = ln.make_extension(p, 1, 1, (p, 0), 6)
        rows.append(ln.lt_extension_criterion(good.base.coerce(p), good.top.uniformizer, good) is True)
        bad = ln.make_extension(p, 1, 1, (-p, 0), 6)
        rows.append(ln.lt_extension_criterion(bad.base.coerce(p), bad.top.uniformizer, bad) is False)
    record(5, "norm criterion", all(rows), f"{sum(rows)}/{len(rows)} examples at M=6")


def test_06_dimension_law():
    k2 = ff.make_field(2, 1)
    charp.dimension_law_holds([[k2.one, k2.one], [k2.zero, k2.one]], 1)  # JIT warm-up, not timed
    t0 = time.perf_counter()
    classes = matrices = 0
    ok = True
    for p, m, d in glclasses.dimension_law_cases(81):
        reps = glclasses.class_representatives(p, m, d)
        ok &= glclasses.class_equation_holds(reps, p**m, d)
        for rep in reps:
            good, _ = charp.dimension_law_holds(rep.matrix, m)
            ok &= good
        classes += len(reps)
        matrices += glclasses.gl_order(p**m, d)
    dt = time.perf_counter() - t0
    record(6, "dimension law", ok and dt < 30.0,
           f"{classes} conjugacy classes covering all {matrices} invertible matrices, {dt:.1f}s (limit 30s)")


def _involution(k, rng):
    while True:
        T = [[k.random(rng) for _ in range(2)] for _ in range(2)]
        try:
            Ti = linalg.mat_inv(T)
            break
        except linalg.SingularMatrixError:
            pass
    J = [[k.one, k.one], [k.zero, k.one]] if k.p == 2 else [[k.one, k.zero], [k.zero, -k.one]]
    return linalg.mat_mul(linalg.mat_mul(T, J), Ti)


def test_07_hilbert90_round_trip():
    rank1 = []
    for q in (2, 3, 4, 5, 7, 8, 9):
        p, m = ff.prime_power(q)
        k = ff.make_field(p, m)
        # a character of Gal(F_{q^2}/F_q) with values in F_q sends the generator to c with c^2 = 1
        for c in {k.one, -k.one}:
            rank1.append(charp.round_trip_VD([[c]], m, 2)[0])
    rng = np.random.default_rng(7)
    rank2 = []
    for _ in range(20):
        q = int(rng.choice([2, 3, 4, 5, 7, 8, 9]))
        p, m = ff.prime_power(q)
        C = _involution(ff.make_field(p, m), rng)
        rank2.append(charp.round_trip_VD(C, m, 2)[0])
    record(7, "V o D round trip", all(rank1) and all(rank2),
           f"rank 1 {sum(rank1)}/{len(rank1)}, random rank 2 {sum(rank2)}/{len(rank2)}")


LIFT_CASES = [("multiplicative", 3, 1, None), ("standard", 3, 1, None), ("standard", 2, 2, None),
              ("standard", 3, 2, None), ("standard", 5, 1, None)]


def test_08_lifting_fidelity():
    rng = np.random.default_rng(8)
    total = fails = 0
    for idx in range(100):
        f, p, s, eis = LIFT_CASES[idx % len(LIFT_CASES)]
        lt = make_lt(p, 1, f, 13, 4)
        A = lift0.make_coeff_ring(lt, s, eis, 4, 12)
        E = charp.make_norm_field(lt, s, N=14)
        x = A.random(rng, lo=-2)
        y = lift0.phi_lift(x, A)
        ok = y.prec == 12 and lift0.reduce(y).equal_to_prec(charp.frobenius_series(lift0.reduce(x), A.e))
        for j, c in enumerate(A.gamma_values):
            g = lift0.gamma_lift(c, x, A)
            ok &= g.prec == 12 and lift0.reduce(g).equal_to_prec(E.gamma(j, lift0.reduce(x)))
        total += 1
        fails += not ok
    record(8, "lifting fidelity", fails == 0, f"{total} random elements at (M,N)=(4,12), {fails} failures")


def test_09_devissage():
    O = ln.unramified(3, 2, 4)
    g = ff.primitive_element(O.residue)
    examples = [[[O.one]], [[O.teichmuller(g)]], [[O.one + O.uniformizer * O.teichmuller(g)]]]
    rows = []
    for mat in examples:
        sol = lift0.functor_V_lift(mat, O, 2)
        Abar = [[a.residue() for a in row] for row in mat]
        same = lift0.same_V_span(lift0.reduce_basis(sol), charp.functor_V(Abar, 2).basis, Abar, 2)
        rows.append(sol.precision == 4 and lift0.check_V_lift(mat, sol, 2) and same)
    record(9, "V lift devissage", all(rows), f"{sum(rows)}/3 examples exact mod varpi^4 with matching reduction")


def test_10_reconstruction():
    D = tt.make_tower(3, 1, 1, 2, "0", M=3, nx=6, ny=6)
    R = D.consts
    rng = np.random.default_rng(10)
    trips = 0
    for j in range(50):
        direction = "pi" if j % 2 == 0 else "varpi"
        w = TruncSeries(R, {n: R.random(rng) for n in range(-1, 5)}, 5, "y" if direction == "pi" else "x")
        res = tt.projlim_reconstruct(tt.diagonal_sequence(w, D, (0, 3), direction))
        trips += res.exact and res.value.equal_to_prec(w)
    faults = 0
    for direction in ("pi", "varpi"):
        for digit in range(3):
            w = TruncSeries(R, {n: R.random(rng) for n in range(0, 4)}, 4, "y" if direction == "pi" else "x")
            seq = tt.inject_fault(tt.diagonal_sequence(w, D, (0, 3), direction), digit)
            try:
                tt.projlim_reconstruct(seq)
            except tt.NoLimitError as err:
                faults += err.digit == digit
    record(10, "projective-limit reconstruction", trips == 50 and faults == 6,
           f"round trips {trips}/50 mod varpi^3, faults caught at the right digit {faults}/6")


def test_11_phi_psi_quasi_inverse():
    iso = []
    for q in (2, 3, 4, 5, 7, 8, 9):
        p, m = ff.prime_power(q)
        k = ff.make_field(p, m)
        for g in k.units():  # includes the identity module
            iso.append(tt.compare(tt.module_over("E", "pi", [[g]], m)).isomorphic)
    rng = np.random.default_rng(11)
    kept = []
    for _ in range(20):
        q = int(rng.choice([2, 3, 4, 5]))
        p, m = ff.prime_power(q)
        k = ff.make_field(p, m)
        while True:
            A = [[k.random(rng) for _ in range(2)] for _ in range(2)]
            try:
                linalg.mat_inv(A)
                break
            except linalg.SingularMatrixError:
                pass
        a = tt.functor_Phi(tt.module_over("E", "pi", A, m))
        b = tt.functor_Psi(a.module)
        kept.append(all(M.rank == 2 and charp.check_etale_phigamma(M).ok for M in (a.module, b.module)))
    record(11, "Phi/Psi quasi-inverse", all(iso) and all(kept),
           f"Teichmuller characters isomorphic {sum(iso)}/{len(iso)}, rank-2 rank and etale kept {sum(kept)}/20")


def test_12_determinism():
    cmd = [sys.executable, "-m", "ltphi.cli", "verify", "--suite", "all", "--seed", "12"]
    runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode == 0
    record(12, "determinism", same and len(runs[0].stdout) > 0,
           f"two runs of verify --suite all: {len(runs[0].stdout)} bytes, identical={runs[0].stdout == runs[1].stdout}")
