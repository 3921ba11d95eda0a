"""Characteristic-p layer: the norm field k_K((u)), etale (phi, Gamma)-modules
and the functors V and D at finite level.

Matrix conventions.  ``matPhi`` is the matrix A for which the V-functor
solves phi(x) = A x, and ``matGamma`` the matrix G with gamma(x) = G x on the
same solutions.  In these terms the Frobenius and Gamma operators on the
module are x -> A^{-1} phi(x) and x -> G^{-1} gamma(x); they commute iff

    phi(G) A = gamma(A) G,

and two Gamma generators commute iff gamma_1(G_2) G_1 = gamma_2(G_1) G_2.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import fields as ff
from . import linalg
from . import localnum as ln
from .ltgroup import LTData, lt_mul_work
from .series import INF, PrecisionError, TruncSeries


class NotARepresentationError(ValueError):
    pass


class SeriesModeError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# bases: objects with phi / gamma on their elements


@dataclass
class ConstantBase:
    """Finite-field constants k with phi = p^e-power and trivial Gamma."""

    field: ff.FieldDesc
    e: int
    gamma_values: list = field(default_factory=list)

    @property
    def residue(self) -> ff.FieldDesc:
        return self.field

    def coerce(self, x):
        return self.field.coerce(x)

    def phi(self, x):
        return x.frobenius(self.e)

    def gamma(self, index: int, x):
        return x

    @property
    def ngammas(self) -> int:
        return len(self.gamma_values)

    def describe(self) -> str:
        return f"constants {self.field!r}, phi = p^{self.e}-power"


@dataclass
class NormFieldDesc:
    """k_K((u)) with phi: x -> x^(p^e) and Gamma acting through u -> [c](u) mod pi."""

    residue: ff.FieldDesc
    e: int  # Frobenius iterate rs
    lt: LTData | None
    gamma_values: list  # LocalInt units of O_F
    gamma_series: list  # [c](u) mod pi over the residue field
    N: int
    default_generators: bool = False

    @property
    def q_act(self) -> int:
        return self.residue.p**self.e

    def coerce(self, x) -> TruncSeries:
        if isinstance(x, TruncSeries):
            return x
        return TruncSeries(self.residue, {0: self.residue.coerce(x)}, INF)

    def phi(self, x):
        if isinstance(x, ff.FieldElem):
            return x.frobenius(self.e)
        return frobenius_series(x, self.e)

    def gamma(self, index: int, x):
        if isinstance(x, ff.FieldElem):
            return x
        return x.compose(_embed_series(self.gamma_series[index], x.ring))

    @property
    def ngammas(self) -> int:
        return len(self.gamma_values)

    def variable(self, prec=None) -> TruncSeries:
        return TruncSeries.monomial(self.residue, 1, prec=INF if prec is None else prec)

    def describe(self) -> str:
        gens = ", ".join(str(_short_local(c)) for c in self.gamma_values)
        tag = " (default generators)" if self.default_generators else ""
        return f"{self.residue!r}((u)), phi = p^{self.e}-power, Gamma generators [{gens}]{tag}"


def _short_local(c: ln.LocalInt) -> str:
    return c.short()


def _embed_series(s: TruncSeries, ring) -> TruncSeries:
    if s.ring == ring:
        return s
    return s.map_coeffs(ring.coerce, ring)


def frobenius_series(x: TruncSeries, e: int) -> TruncSeries:
    """x^(p^e) in characteristic p: Frobenius on coefficients and u -> u^(p^e)."""
    q = x.ring.p**e
    coeffs = {n * q: c.frobenius(e) for n, c in x.coeffs.items()}
    return TruncSeries(x.ring, coeffs, x.prec * q if x.prec != INF else INF, x.var)


def default_gamma_values(O_F: ln.LocalRingDesc) -> list:
    """Teichmuller lift of a generator of k_F^x, and 1 + pi."""
    g = ff.primitive_element(O_F.residue)
    vals = []
    if O_F.residue.order > 2:
        vals.append(O_F.teichmuller(g))
    vals.append(O_F.one + O_F.uniformizer)
    return vals


def gamma_series_mod_pi(c: ln.LocalInt, lt: LTData, residue: ff.FieldDesc, N: int) -> TruncSeries:
    """[c](u) reduced mod pi, with coefficients in ``residue``."""
    if not c.is_unit():
        raise ValueError("gamma needs a unit of O_F")
    s = lt_mul_work(c, lt, N)
    coeffs = {n: residue.coerce(a.residue()) for n, a in s.coeffs.items()}
    return TruncSeries(residue, coeffs, s.prec, "u")


def make_norm_field(lt: LTData, s: int = 1, gamma_values=None, N: int | None = None) -> NormFieldDesc:
    """k_K((u)) for K/F unramified of degree s over the Lubin-Tate data."""
    N = lt.N if N is None else N
    residue = ff.make_field(lt.p, lt.r * s)
    default = gamma_values is None
    if default:
        gamma_values = default_gamma_values(lt.work)
    else:
        gamma_values = [lt.work.coerce(c) for c in gamma_values]
    series = [gamma_series_mod_pi(c, lt, residue, N) for c in gamma_values]
    return NormFieldDesc(residue, lt.r * s, lt, gamma_values, series, N, default)


def gamma_action(c, x: TruncSeries, lt: LTData, N: int | None = None) -> TruncSeries:
    """Substitute u -> [c](u) mod pi into x."""
    N = lt.N if N is None else N
    c = lt.work.coerce(c)
    if not c.is_unit():
        raise ValueError("gamma needs a unit of O_F")
    cs = gamma_series_mod_pi(c, lt, x.ring, N)
    return x.compose(cs)


# ---------------------------------------------------------------------------


@dataclass
class PhiGammaModule:
    """Free module of rank d: phi-matrix and one matrix per Gamma generator."""

    base: object
    matPhi: list
    matGamma: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.matPhi)

    def text(self) -> str:
        lines = [f"rank {self.rank} over {self.base.describe()}", "phi:"]
        lines += ["  " + " ; ".join(_elem_text(a) for a in row) for row in self.matPhi]
        for k, G in enumerate(self.matGamma):
            lines.append(f"gamma {k}:")
            lines += ["  " + " ; ".join(_elem_text(a) for a in row) for row in G]
        return "\n".join(lines)


def _elem_text(a) -> str:
    if isinstance(a, ff.FieldElem):
        return a.short()
    if hasattr(a, "text"):
        return a.text()
    return str(a)


@dataclass
class Report:
    ok: bool
    checks: list  # (name, passed, detail)

    @property
    def violations(self):
        return [(n, d) for n, ok, d in self.checks if not ok]

    def first_violation(self):
        v = self.violations
        return v[0] if v else None

    def text(self) -> str:
        return "\n".join(f"{n}: {'ok' if ok else 'FAIL ' + d}" for n, ok, d in self.checks)


def _is_zero(x) -> bool:
    return x.is_zero()


def _mat_is_invertible(A) -> bool:
    try:
        det = linalg.det(A) if len(A) > 1 else A[0][0]
    except PrecisionError:
        return False
    return det.is_unit()


def check_etale_phigamma(M: PhiGammaModule) -> Report:
    base = M.base
    checks = []
    checks.append(("etale", _mat_is_invertible(M.matPhi), "not étale: matPhi is not invertible"))
    A = M.matPhi
    for k, G in enumerate(M.matGamma):
        lhs = linalg.mat_mul(linalg.mat_map(base.phi, G), A)
        rhs = linalg.mat_mul(linalg.mat_map(lambda x: base.gamma(k, x), A), G)
        checks.append((f"phi-gamma commutation [{k}]", linalg.mat_eq(lhs, rhs), f"phi(G_{k}) A != gamma_{k}(A) G_{k}"))
        checks.append((f"gamma invertible [{k}]", _mat_is_invertible(G), f"G_{k} is not invertible"))
    for i, j in itertools.combinations(range(len(M.matGamma)), 2):
        Gi, Gj = M.matGamma[i], M.matGamma[j]
        lhs = linalg.mat_mul(linalg.mat_map(lambda x: base.gamma(i, x), Gj), Gi)
        rhs = linalg.mat_mul(linalg.mat_map(lambda x: base.gamma(j, x), Gi), Gj)
        checks.append((f"gamma commutation [{i},{j}]", linalg.mat_eq(lhs, rhs), f"gamma_{i}, gamma_{j} do not commute"))
    return Report(all(ok for _, ok, _ in checks), checks)


# ---------------------------------------------------------------------------
# functor V


@dataclass
class VSolution:
    """Basis of V: columns of ``basis`` solve phi(x) = A x; ``galois`` is X^{-1} sigma(X)."""

    field: ff.FieldDesc
    e: int
    basis: list  # list of solution vectors
    galois: list | None
    mode: str
    fp_dimension: int | None = None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def matrix(self):
        return linalg.from_columns(self.basis)


def _frob_mat(X, e):
    return [[x.frobenius(e) for x in row] for row in X]


def galois_matrix(basis, e: int):
    X = linalg.from_columns(basis)
    return linalg.mat_mul(linalg.mat_inv(X), _frob_mat(X, e))


def functor_V(M, e: int | None = None, N: int | None = None) -> VSolution:
    """V(M) in constant mode (finite-field matPhi) or series mode (entries in k[[u]])."""
    if isinstance(M, PhiGammaModule):
        A = M.matPhi
        e = M.base.e if e is None else e
    else:
        A = M
    if e is None:
        raise ValueError("Frobenius iterate e is required")
    first = A[0][0]
    if isinstance(first, ff.FieldElem):
        sol = ff.solve_semilinear_const(A, e)
        R = galois_matrix(sol.basis, e)
        R = [[_restrict_to_fixed(x, e) for x in row] for row in R]
        return VSolution(sol.field, e, sol.basis, R, "constant", sol.fp_dimension)
    return _functor_V_series(A, e, N)


def _restrict_to_fixed(x: ff.FieldElem, e: int) -> ff.FieldElem:
    if x.frobenius(e) != x:
        raise ArithmeticError("Galois matrix is not defined over the fixed field")
    sub = ff.make_field(x.desc.p, math.gcd(e, x.desc.m))
    return ff.restrict(x, sub)


def _functor_V_series(A, e: int, N: int | None):
    d = len(A)
    ring = A[0][0].ring
    for row in A:
        for a in row:
            if a.coeffs and a.lo < 0:
                raise SeriesModeError("series mode needs entries in k[[u]] (obstruction at u-degree %d)" % a.lo)
    prec = min(a.prec for row in A for a in row)
    N = int(prec if N is None else min(N, prec))
    if N == INF:
        raise PrecisionError("series mode needs a finite u-precision")
    A0 = [[a[0] for a in row] for row in A]
    try:
        A0inv = linalg.mat_inv(A0)
    except linalg.SingularMatrixError:
        raise SeriesModeError("no degree-by-degree solution: constant term of matPhi is singular at u-degree 0") from None
    base_sol = ff.solve_semilinear_const(A0, e)
    L = base_sol.field
    q = L.p**e
    A0inv = [[L.coerce(x) for x in row] for row in A0inv]
    Acoef = {}
    for j in range(1, N):
        Acoef[j] = [[L.coerce(A[r][c][j]) for c in range(d)] for r in range(d)]
    basis = []
    for x0 in base_sol.basis:
        xs = [x0]
        for n in range(1, N):
            lhs = [L.zero] * d
            if n % q == 0:
                lhs = [t.frobenius(e) for t in xs[n // q]]
            for j in range(1, n + 1):
                Aj = Acoef[j]
                xv = xs[n - j]
                lhs = [lhs[r] - _dot(Aj[r], xv) for r in range(d)]
            xs.append([_dot(A0inv[r], lhs) for r in range(d)])
        vec = [TruncSeries(L, {n: xs[n][r] for n in range(N)}, N) for r in range(d)]
        basis.append(vec)
    X0 = linalg.from_columns(base_sol.basis)
    R = linalg.mat_mul(linalg.mat_inv(X0), _frob_mat(X0, e))
    R = [[_restrict_to_fixed(x, e) for x in row] for row in R]
    return VSolution(L, e, basis, R, "series", base_sol.fp_dimension)


def _dot(row, v):
    acc = row[0] * v[0]
    for a, b in zip(row[1:], v[1:]):
        acc = acc + a * b
    return acc


def check_V_solution(A, sol: VSolution) -> bool:
    """phi(x) = A x for every basis vector, and the vectors are independent."""
    e = sol.e
    for x in sol.basis:
        if isinstance(x[0], TruncSeries):
            L = x[0].ring
            AL = [[a.map_coeffs(L.coerce, L) for a in row] for row in A]
            lhs = [frobenius_series(t, e) for t in x]
            rhs = [_dot(row, x) for row in AL]
            if not all(l.equal_to_prec(r) for l, r in zip(lhs, rhs)):
                return False
        else:
            if not ff.check_solutions(A, e, [x]):
                return False
    if isinstance(sol.basis[0][0], TruncSeries):
        X0 = [[t[0] for t in col] for col in sol.basis]
    else:
        X0 = sol.basis
    return linalg.rank(linalg.transpose(X0)) == len(A)


# ---------------------------------------------------------------------------
# Hilbert 90 and functor D


def cocycle_product(C, e: int, n: int):
    """C sigma(C) ... sigma^(n-1)(C) for sigma the p^e-power map."""
    acc = C
    cur = C
    for _ in range(1, n):
        cur = _frob_mat(cur, e)
        acc = linalg.mat_mul(acc, cur)
    return acc


def hilbert90(C, e: int, n: int):
    """B in GL_d(k') with B^{-1} sigma(B) = C, for a cocycle C over k' = F_{p^(e n)}."""
    d = len(C)
    kprime = ff.make_field(C[0][0].desc.p, e * n)
    C = [[kprime.coerce(x) for x in row] for row in C]
    if not linalg.is_identity(cocycle_product(C, e, n)):
        raise NotARepresentationError("not a representation: cocycle product is not the identity")
    # rows b of B satisfy sigma(b) = b C, i.e. sigma(b^T) = C^T b^T
    CT = linalg.transpose(C)
    sol = ff.solve_semilinear_const(CT, e)
    if sol.field.m != kprime.m:
        raise NotARepresentationError("not a representation: solutions leave k'")
    B = [[kprime.coerce(x) for x in vec] for vec in sol.basis]
    if len(B) != d:
        raise ArithmeticError("Hilbert 90 produced a rank-deficient basis")
    return B


def functor_D_unramified(C, base_degree: int, n: int, base=None) -> PhiGammaModule:
    """D(W) for the representation of Gal(k'/k_K) sending the generator to C.

    k_K = F_{p^base_degree} and k' is its degree-n extension; C must have
    entries in k_K.  Returns matPhi = P^{-1} C P where the columns of P span
    the invariants {v : C sigma(v) = v}.
    """
    e = base_degree
    p = C[0][0].desc.p
    kK = ff.make_field(p, e)
    kprime = ff.make_field(p, e * n)
    Cp = [[kprime.coerce(x) for x in row] for row in C]
    if not linalg.is_identity(cocycle_product(Cp, e, n)):
        raise NotARepresentationError("not a representation: C sigma(C) ... sigma^(n-1)(C) != I")
    if any(x.frobenius(e) != x for row in Cp for x in row):
        raise NotARepresentationError("not a representation: generator matrix is not defined over k_K")
    Q = hilbert90(Cp, e, n)
    P = linalg.mat_inv(Q)
    A = linalg.mat_mul(linalg.mat_mul(Q, Cp), P)
    if any(x.frobenius(e) != x for row in A for x in row):
        raise ArithmeticError("descended Frobenius matrix is not defined over k_K")
    A = [[ff.restrict(x, kK) for x in row] for row in A]
    if base is None:
        base = ConstantBase(kK, e)
    one, zero = kK.one, kK.zero
    gammas = [linalg.identity(len(C), one, zero) for _ in range(getattr(base, "ngammas", 0))]
    if not isinstance(base, ConstantBase):
        A = [[base.coerce(x) for x in row] for row in A]
        gammas = [[[base.coerce(x) for x in row] for row in G] for G in gammas]
    return PhiGammaModule(base, A, gammas)


def are_conjugate(R, C, field: ff.FieldDesc) -> bool:
    """Whether T R = C T for some T in GL_d(field), by enumerating the solution space."""
    d = len(R)
    R = [[field.coerce(x) for x in row] for row in R]
    C = [[field.coerce(x) for x in row] for row in C]
    import numpy as np

    from . import _kernels as K

    m, p = field.m, field.p
    # F_p-linear map T -> T R - C T on d*d*m coordinates
    n = d * d * m
    cols = []
    for idx in range(n):
        vec = np.zeros(n, dtype=np.int64)
        vec[idx] = 1
        T = _unflatten(vec, d, field)
        img = linalg.mat_sub(linalg.mat_mul(T, R), linalg.mat_mul(C, T))
        cols.append(_flatten(img))
    Mx = np.array(cols, dtype=np.int64).T % p
    ker = K.nullspace(Mx, p)
    k = ker.shape[0]
    if k == 0:
        return False
    if p**k > 200000:
        raise ValueError("conjugacy search space too large")
    for coeffs in itertools.product(range(p), repeat=k):
        if not any(coeffs):
            continue
        v = (np.array(coeffs, dtype=np.int64) @ ker) % p
        T = _unflatten(v, d, field)
        if _mat_is_invertible(T):
            return True
    return False


def _unflatten(vec, d, field):
    m = field.m
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            k = (i * d + j) * m
            row.append(field.from_vector(vec[k:k + m]))
        out.append(row)
    return out


def _flatten(T):
    import numpy as np

    return np.concatenate([x.to_vector() for row in T for x in row])


def round_trip_VD(C, base_degree: int, n: int) -> tuple[bool, list]:
    """V(D(W)) recovers a Galois matrix conjugate to C over k_K."""
    D = functor_D_unramified(C, base_degree, n)
    sol = functor_V(D)
    kK = ff.make_field(C[0][0].desc.p, base_degree)
    R = [[kK.coerce(x) for x in row] for row in sol.galois]
    return are_conjugate(R, C, kK), R


# ---------------------------------------------------------------------------
# dimension law


def dimension_law_holds(A, e: int) -> tuple[bool, int]:
    """dim V = rank for a constant etale A; returns (holds, dimension)."""
    sol = ff.solve_semilinear_const(A, e)
    d = len(A)
    ok = sol.dimension == d and sol.fp_dimension == e * d and ff.check_solutions(A, e, sol.basis)
    return ok, sol.dimension
