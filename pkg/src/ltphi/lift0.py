"""Characteristic-0 coefficient rings A_{K,pi} = O_K((u))^ mod varpi^M.

Elements are Laurent series in u with LocalInt coefficients, carried on a
window [lo, N).  The Frobenius that is linear over O_K is phi^{rs}: it fixes
O_K (the rs-th power of the Frobenius is trivial on W(k_K) and the
uniformizer is fixed) and sends u to [pi^s](u).  Gamma sends u to [c](u).

K is presented as W(k_K)[T]/(E) with E over Z_p; the residue extension
k_K / k_F is a constants extension.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import charp
from . import fields as ff
from . import linalg
from . import localnum as ln
from .ltgroup import LTData, lt_mul_work, make_lt
from .series import INF, PrecisionError, TruncSeries


class LiftError(ArithmeticError):
    pass


# largest residue degree over F_p the digit lifting will grow into
MAX_LEVEL = 64


def embed_local(x: ln.LocalInt, target: ln.LocalRingDesc) -> ln.LocalInt:
    """Map x into a ring with larger residue field and the same Eisenstein polynomial,
    or from an unramified ring into any ring over it.

    Each unramified coefficient is rebuilt from its Teichmuller digits, which
    commute with the canonical residue-field embedding.
    """
    src = x.desc
    if src.same_ring(target):
        return target.coerce(x)
    if target.f % src.f or (src.e != target.e and src.e != 1):
        raise ValueError(f"no embedding {src!r} -> {target!r}")
    U = ln.unramified(src.p, src.f, src.K)
    parts = []
    for cj in x.c:
        w = U.from_w(cj)
        acc = target.zero
        ppow = target.one
        pt = target.coerce(src.p)
        for d in w.teichmuller_digits():
            if not d.is_zero():
                acc = acc + target.teichmuller(ff.embed(d, target.residue)) * ppow
            ppow = ppow * pt
        parts.append(acc)
    out = target.zero
    upow = target.one
    for part in parts:
        out = out + part * upow
        upow = upow * target.uniformizer
    return out.with_prec(min(x.prec * (target.e // src.e), target.M))


@dataclass
class CoeffRingDesc:
    """A_{K,pi} at precision (varpi^M, u-window N)."""

    base: ln.LocalRingDesc  # O_K at precision M
    lt: LTData
    s: int
    M: int
    N: int
    gamma_values: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def e(self) -> int:
        return self.lt.r * self.s

    @property
    def residue(self) -> ff.FieldDesc:
        return self.base.residue

    @property
    def ngammas(self) -> int:
        return len(self.gamma_values)

    def describe(self) -> str:
        return f"A_K((u)) over {self.base!r}, phi = u -> [pi^{self.s}](u), M={self.M}, N={self.N}"

    # -- elements
    def coerce(self, x) -> TruncSeries:
        if isinstance(x, TruncSeries):
            return x
        return TruncSeries(self.base, {0: self.base.coerce(x)}, INF)

    def from_OF(self, c: ln.LocalInt) -> ln.LocalInt:
        return embed_local(c.with_prec(min(c.prec, self.M)), self.base) if not c.desc.same_ring(self.base) else self.base.coerce(c)

    def variable(self) -> TruncSeries:
        return TruncSeries.monomial(self.base, 1, prec=INF)

    def random(self, rng, lo: int = -2) -> TruncSeries:
        coeffs = {n: self.base.random(rng) for n in range(lo, self.N)}
        return TruncSeries(self.base, coeffs, self.N)

    def _series_over_base(self, key, build) -> TruncSeries:
        if key not in self._cache:
            s = build()
            self._cache[key] = TruncSeries(self.base, {n: self.from_OF(c) for n, c in s.coeffs.items()}, s.prec, "u")
        return self._cache[key]

    def _pi_iterate(self, k: int) -> TruncSeries:
        # [pi] = f, so [pi^k] is the k-fold iterate; exact when f is a polynomial
        lt = self.lt
        if lt.f.is_polynomial():
            out = TruncSeries.monomial(lt.work, 1, var="X")
            for _ in range(k):
                out = lt.f.compose(out)
            return out
        return lt_mul_work(lt.pi**k, lt, self.N + 1)

    def pi_power_series(self) -> TruncSeries:
        """[pi^s](u) over O_K."""
        return self._series_over_base(("pis",), lambda: self._pi_iterate(self.s))

    def pi_series(self) -> TruncSeries:
        return self._series_over_base(("pi",), lambda: self._pi_iterate(1))

    def _lt_to_degree(self, deg: int) -> LTData:
        lt = self.lt
        if deg <= lt.N or lt.name not in ("standard", "multiplicative"):
            return lt
        key = ("lt", deg)
        if key not in self._cache:
            self._cache[key] = make_lt(lt.p, lt.r, lt.name, deg, self.M)
        return self._cache[key]

    def gamma_series(self, c, degree: int | None = None) -> TruncSeries:
        """[c](u) over O_K, to u-degree below ``degree`` when the LT data allows it."""
        degree = self.N + 1 if degree is None else degree
        lt = self._lt_to_degree(degree)
        c = self._raise_precision(self.lt.work.coerce(c), lt)
        if not c.is_unit():
            raise ValueError("gamma needs a unit of O_F")
        return self._series_over_base(("gamma", c.c, degree), lambda: lt_mul_work(c, lt, min(degree, lt.N)))

    def _raise_precision(self, c: ln.LocalInt, lt: LTData) -> ln.LocalInt:
        # default generators are rebuilt at the finer precision; others are read as exact
        if lt is self.lt:
            return c
        for old, new in zip(charp.default_gamma_values(self.lt.work), charp.default_gamma_values(lt.work)):
            if (old - c).is_zero():
                return new
        return lt.work.from_w(c.c[0])

    # -- actions
    def phi(self, x):
        if isinstance(x, ln.LocalInt):
            return x
        return phi_lift(x, self)

    def gamma(self, index: int, x):
        if isinstance(x, ln.LocalInt):
            return x
        return gamma_lift(self.gamma_values[index], x, self)


def make_coeff_ring(lt: LTData, s: int = 1, eis=None, M: int = 4, N: int = 12, gamma_values=None) -> CoeffRingDesc:
    """A_{K,pi} for K = W(F_{p^(rs)})[T]/(E) (E None: K unramified, varpi = p)."""
    base = ln.make_local_ring(lt.p, lt.r * s, eis, M)
    if base.e > 1 and not base.eis_fixed_by_frobenius():
        raise ValueError("the Eisenstein polynomial must have coefficients fixed by Frobenius")
    if gamma_values is None:
        gamma_values = charp.default_gamma_values(lt.work)
    return CoeffRingDesc(base, lt, s, M, N, [lt.work.coerce(c) for c in gamma_values])


def reduce(x: TruncSeries, A: CoeffRingDesc | None = None) -> TruncSeries:
    """Reduction modulo the uniformizer: a series over k_K."""
    ring = x.ring
    res = ring.residue
    coeffs = {n: c.residue() for n, c in x.coeffs.items() if c.prec >= 1}
    return TruncSeries(res, coeffs, x.prec, x.var)


def phi_lift(x: TruncSeries, A: CoeffRingDesc) -> TruncSeries:
    """phi^{rs}: u -> [pi^s](u), identity on O_K coefficients."""
    g = A.pi_power_series()
    return x.compose(g)


def phi_r(x: TruncSeries, A: CoeffRingDesc) -> TruncSeries:
    """phi^r: u -> [pi](u) with the r-th Frobenius on the unramified constants."""
    r = A.lt.r
    tw = x.map_coeffs(lambda c: c.frobenius(r), A.base)
    return tw.compose(A.pi_series())


def gamma_lift(c, x: TruncSeries, A: CoeffRingDesc) -> TruncSeries:
    """u -> [c](u)."""
    pole = max(0, -x.lo) if x.coeffs else 0
    target = min(x.prec, A.N) if x.prec != INF else A.N
    return x.compose(A.gamma_series(c, target + pole + 2))


# ---------------------------------------------------------------------------
# V in constant mode, by digit lifting


@dataclass
class VLiftSolution:
    ring: ln.LocalRingDesc  # O_{K'}: same Eisenstein layer, residue field k'
    basis: list  # solution vectors over ring
    residual_basis: list  # mod-varpi solutions the lift started from
    precision: int
    extension_degree: int


def _apply_sigma(v, e):
    return [x.frobenius(e) for x in v]


def _matvec(A, v):
    return [linalg._sum(a * x for a, x in zip(row, v)) for row in A]


def functor_V_lift(matPhi, A: CoeffRingDesc | ln.LocalRingDesc, e: int | None = None, M: int | None = None,
                   max_extension: int | None = None) -> VLiftSolution:
    """Solve sigma(x) = matPhi x in (O_{K'})^d mod varpi^M for constant matPhi over O_K."""
    base = A.base if isinstance(A, CoeffRingDesc) else A
    e = (A.e if isinstance(A, CoeffRingDesc) else base.f) if e is None else e
    M = base.M if M is None else M
    d = len(matPhi)
    mat = [[base.coerce(a) for a in row] for row in matPhi]
    if base.e > 1 and not base.eis_fixed_by_frobenius():
        raise ValueError("the Eisenstein polynomial must have coefficients fixed by Frobenius")
    res = [[a.residue() for a in row] for row in mat]
    try:
        linalg.mat_inv(res)
    except linalg.SingularMatrixError:
        raise ff.NotEtaleError("not étale: residual Frobenius matrix is singular") from None
    sol0 = charp.functor_V(res, e)
    n0 = sol0.field.m
    max_extension = base.p ** (M - 1) if max_extension is None else max_extension
    ext = 1
    while True:
        try:
            return _lift_in(mat, base, sol0, n0 * ext, e, M, ext)
        except LiftError as err:
            if ext * base.p > max_extension or n0 * ext * base.p > MAX_LEVEL:
                raise LiftError(f"{err}; the needed unramified extension exceeds the working tower") from None
            ext *= base.p


def _lift_in(mat, base, sol0, m, e, M, ext):
    p = base.p
    L = ff.make_field(p, m)
    R = ln.make_local_ring(p, m, base.eis, M)
    A = [[embed_local(a, R) for a in row] for row in mat]
    Abar = [[a.residue() for a in row] for row in A]
    if L.m == sol0.field.m:
        start = sol0.basis
    else:
        # solve the residual problem directly in the larger field; no embedding needed
        start = ff.solve_semilinear_linear(Abar, e, L).basis
    lifted = []
    for x0 in start:
        x = [R.teichmuller(L.coerce(t)) for t in x0]
        for t in range(1, M):
            diff = [a - b for a, b in zip(_apply_sigma(x, e), _matvec(A, x))]
            if all(c.valuation >= M for c in diff):
                break
            if any(c.valuation < t for c in diff):
                raise ArithmeticError("digit-lifting invariant broken")
            r = [c.div_uniformizer(t) if c.valuation >= t else c for c in diff]
            rbar = [(-c).residue() for c in r]
            y = ff.solve_semilinear_affine(Abar, rbar, e, L)
            if y is None:
                raise LiftError(f"digit {t}: semilinear equation has no solution over F_{p}^{m}")
            ut = R.uniformizer**t
            x = [xi + R.teichmuller(yi) * ut for xi, yi in zip(x, y)]
        lifted.append([xi.with_prec(M) for xi in x])
    return VLiftSolution(R, lifted, start, M, ext)


def check_V_lift(matPhi, sol: VLiftSolution, e: int) -> bool:
    R = sol.ring
    A = [[embed_local(R.coerce(a) if a.desc.same_ring(R) else a, R) for a in row] for row in matPhi]
    for x in sol.basis:
        diff = [a - b for a, b in zip(_apply_sigma(x, e), _matvec(A, x))]
        if not all(c.valuation >= sol.precision for c in diff):
            return False
    return True


def reduce_basis(sol: VLiftSolution):
    return [[x.residue() for x in v] for v in sol.basis]


def same_V_span(basis1, basis2, A, e: int) -> bool:
    """Whether two families are both bases of V(A) over F_{p^e}.

    All solutions in an algebraic closure lie in the splitting field, so a
    family of rank(A) solutions that is independent over its own field spans
    the whole of V; two such families span the same space wherever they live.
    """
    d = len(A)

    def is_basis(basis):
        if len(basis) != d:
            return False
        if not ff.check_solutions(A, e, basis):
            return False
        return linalg.rank(linalg.from_columns(basis)) == d

    return is_basis(basis1) and is_basis(basis2)
