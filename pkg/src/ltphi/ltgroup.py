"""Lubin-Tate formal group laws, endomorphisms and torsion polynomials.

Given a Frobenius series f over O_F (f = pi X mod degree 2, f = X^q mod pi)
the group law F and the endomorphisms [a] are solved degree by degree from
the commutation identities.  In degree n both reduce to

    (pi - pi^n) * G_n = (known terms of degree n),

so each step divides once by pi and at most N - 2 digits of precision are
lost; the working ring carries M + N digits and results are cut back to M.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import localnum as ln
from .series import INF, BivarTrunc, MultiTrunc, PrecisionError, TruncSeries, series_to_multi, substitute


class NotLubinTateError(ValueError):
    pass


class InconsistencyError(ArithmeticError):
    """A degree-n coefficient equation had no solution: the uniqueness argument failed."""


@dataclass
class LTData:
    """Lubin-Tate data: O_F, q = p^r, uniformizer pi and Frobenius series f."""

    ring: ln.LocalRingDesc  # O_F at output precision M
    work: ln.LocalRingDesc  # same ring carrying M + N digits
    q: int
    pi: ln.LocalInt
    f: TruncSeries  # over ``work``
    N: int
    name: str = "custom"
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def r(self) -> int:
        return self.ring.f

    @property
    def M(self) -> int:
        return self.ring.M

    def cached(self, key, build):
        # write-once per key; readers see either nothing or the final value
        if key in self._cache:
            return self._cache[key]
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    def to_output(self, c: ln.LocalInt) -> ln.LocalInt:
        return self.ring.coerce(c)


def frobenius_series(choice, work: ln.LocalRingDesc, q: int, pi=None) -> tuple[TruncSeries, str]:
    """Named Frobenius series: standard pi X + X^q, multiplicative (1+X)^p - 1, or explicit coefficients."""
    p = work.p
    pi = work.uniformizer if pi is None else work.coerce(pi)
    X = TruncSeries.monomial(work, 1, var="X")
    if choice == "standard":
        return pi * X + X**q, "standard"
    if choice == "multiplicative":
        if q != p or not work.is_unramified or not (pi - p).is_zero():
            raise NotLubinTateError("the multiplicative series needs r = 1 (q = p) and pi = p")
        return (X + work.one) ** p - work.one, "multiplicative"
    if isinstance(choice, TruncSeries):
        return choice.map_coeffs(work.coerce, work), "custom"
    coeffs = list(choice)
    return TruncSeries(work, {i + 1: work.coerce(int(c)) for i, c in enumerate(coeffs)}, INF, "X"), "custom"


def check_lt_series(f: TruncSeries, pi: ln.LocalInt, q: int) -> None:
    if f.coeffs and f.lo < 1:
        raise NotLubinTateError("not a Lubin-Tate series: nonzero constant term")
    if f.prec <= q:
        raise NotLubinTateError("not a Lubin-Tate series: precision too small to see X^q")
    if not (f[1] - pi).is_zero():
        raise NotLubinTateError("not a Lubin-Tate series: linear coefficient differs from pi")
    for n, c in f.coeffs.items():
        target = 1 if n == q else 0
        d = c - target
        if d.valuation < 1:
            raise NotLubinTateError(f"not a Lubin-Tate series: coefficient of X^{n} is wrong mod pi")
    if q not in f.coeffs:
        raise NotLubinTateError("not a Lubin-Tate series: X^q coefficient missing")


def make_lt(p: int, r: int = 1, f="standard", N: int = 8, M: int = 4, pi=None) -> LTData:
    """Lubin-Tate data over O_F = W(F_{p^r}); pi defaults to p."""
    if N < 2:
        raise ValueError("degree cutoff N must be at least 2")
    ring = ln.unramified(p, r, M)
    work = ln.unramified(p, r, M + N)
    q = p**r
    if pi is None:
        pi = work.uniformizer
    else:
        pi = work.from_w(pi.c[0]) if isinstance(pi, ln.LocalInt) else work.coerce(pi)
        if pi.valuation != 1:
            raise NotLubinTateError("pi must be a uniformizer (valuation 1)")
    series, name = frobenius_series(f, work, q, pi)
    check_lt_series(series, pi, q)
    return LTData(ring, work, q, pi, series, N, name)


def _divide_step(D, lt: LTData, n: int, what: str):
    """Solve (pi - pi^n) G = D coefficientwise."""
    # pi = (ring uniformizer) * w with w a unit
    w = lt.pi.div_uniformizer(1)
    denom_unit = (w * (lt.work.one - lt.pi ** (n - 1))).inverse()
    out = {}
    for key, c in D.items():
        if c.valuation < 1:
            raise InconsistencyError(f"{what}: degree-{n} equation has no solution (coefficient {key})")
        out[key] = c.div_uniformizer(1) * denom_unit
    return out


def group_law(lt: LTData, N: int | None = None) -> BivarTrunc:
    """The formal group law F with f(F(X,Y)) = F(f(X), f(Y)), to total degree < N."""
    N = lt.N if N is None else N

    def build():
        work = lt.work
        f = lt.f
        fX = series_to_multi(f, BivarTrunc.X(work, N))
        fY = series_to_multi(f, BivarTrunc.Y(work, N))
        f_hi = TruncSeries(work, {n: c for n, c in f.coeffs.items() if n >= 2}, f.prec, f.var)
        F = BivarTrunc(work, {(1, 0): 1, (0, 1): 1}, N)
        for n in range(2, N):
            cur = F.truncate(n + 1).below(n)
            cur = BivarTrunc(work, cur.coeffs, n + 1)
            lhs = substitute(cur, [fX.truncate(n + 1), fY.truncate(n + 1)]).homogeneous(n)
            rhs = series_to_multi(f_hi, cur).homogeneous(n)
            D = (lhs - rhs).coeffs
            Fn = _divide_step(D, lt, n, "group law")
            F = BivarTrunc(work, {**F.coeffs, **Fn}, N)
        return F

    F = lt.cached(("F", N), build)
    return BivarTrunc(lt.ring, {k: lt.to_output(c) for k, c in F.coeffs.items()}, N)


def group_law_work(lt: LTData, N: int | None = None) -> BivarTrunc:
    """Group law with coefficients left in the high-precision working ring."""
    N = lt.N if N is None else N
    group_law(lt, N)
    return lt._cache[("F", N)]


def lt_mul(a, lt: LTData, N: int | None = None) -> TruncSeries:
    """[a](X): the endomorphism with derivative a at 0 commuting with f, to degree < N."""
    N = lt.N if N is None else N
    return lt_mul_work(a, lt, N).map_coeffs(lt.to_output, lt.ring)


def lt_mul_work(a, lt: LTData, N: int | None = None) -> TruncSeries:
    N = lt.N if N is None else N
    work = lt.work
    if isinstance(a, int):
        a = work.coerce(a)
    a = work.coerce(a)
    if a.prec - (N - 2) < min(lt.M, a.prec) and a.prec < lt.M + N - 2:
        if a.prec - (N - 2) < 1:
            raise PrecisionError(f"precision {a.prec} of a is too small for degree cutoff {N}")

    def build():
        f = lt.f
        f_hi = TruncSeries(work, {n: c for n, c in f.coeffs.items() if n >= 2}, f.prec, "X")
        A = {1: a}
        for n in range(2, N):
            cur = TruncSeries(work, A, INF, "X")
            lhs = cur.compose(f.truncate(n + 1), prec=n + 1)[n]
            rhs = f_hi.truncate(n + 1).compose(cur, prec=n + 1)[n]
            sol = _divide_step({n: lhs - rhs}, lt, n, "endomorphism")
            A.update(sol)
        return TruncSeries(work, A, N, "X")

    key = ("mul", a.c, a.prec, N)
    return lt.cached(key, build)


def formal_add(F: BivarTrunc, a: TruncSeries, b: TruncSeries) -> TruncSeries:
    from .series import substitute_xy

    return substitute_xy(F, a, b)


@dataclass
class TorsionPolynomial:
    poly: TruncSeries
    level: int
    degree: int
    eisenstein: bool

    def text(self) -> str:
        return self.poly.text()


def _poly_divmod(num: dict, den: dict, ring):
    """Quotient and remainder of polynomials given as exponent dicts; den monic."""
    dd = max(den)
    if not ring.is_one(den[dd]):
        raise ValueError("division needs a monic divisor")
    rem = dict(num)
    quo = {}
    while rem and max(rem) >= dd:
        top = max(rem)
        c = rem.pop(top)
        if c.is_zero():
            continue
        k = top - dd
        quo[k] = c
        for e, d in den.items():
            if e == dd:
                continue
            rem[e + k] = rem.get(e + k, ring.zero) - c * d
        rem = {e: v for e, v in rem.items() if not v.is_zero()}
    return quo, rem


def torsion_polynomial(lt: LTData, n: int) -> TorsionPolynomial:
    """f^(n) / f^(n-1) for polynomial f, with an Eisenstein certificate."""
    if n < 1:
        raise ValueError("torsion level must be >= 1")
    f = lt.f
    if not f.is_polynomial():
        raise ValueError("torsion polynomials are only offered for polynomial f")
    top = max(f.coeffs)
    if not lt.work.is_one(f.coeffs[top]):
        raise ValueError("torsion polynomials need a monic Frobenius polynomial")
    work = lt.work
    X = TruncSeries.monomial(work, 1, var="X")
    prev = X
    cur = X
    for _ in range(n):
        prev = cur
        cur = f.compose(cur)
    quo, rem = _poly_divmod(dict(cur.coeffs), dict(prev.coeffs), work)
    if rem:
        raise InconsistencyError("iterate of f is not divisible by the previous iterate")
    poly = TruncSeries(lt.ring, {k: lt.to_output(c) for k, c in quo.items()}, INF, "X")
    deg = max(poly.coeffs)
    eis = lt.ring.is_one(poly.coeffs[deg]) and all(
        c.valuation >= 1 for k, c in poly.coeffs.items() if k < deg
    ) and 0 in poly.coeffs and poly.coeffs[0].valuation == 1
    return TorsionPolynomial(poly, n, deg, bool(eis))


def reduce_mod_pi(s: TruncSeries, residue) -> TruncSeries:
    """Coefficientwise reduction of a series over O_F to its residue field."""
    return TruncSeries(residue, {n: c.residue() for n, c in s.coeffs.items() if c.prec >= 1}, s.prec, s.var)


def check_group_axioms(lt: LTData, N: int | None = None) -> dict:
    """Commutativity, identity, associativity and f-equivariance of F, exact to degree N."""
    N = lt.N if N is None else N
    F = group_law(lt, N)
    ring = lt.ring
    out = {"commutativity": F.swap() == F}
    # F(X, 0) = X and F(0, Y) = Y: the only pure monomials are X and Y
    out["identity"] = all(not (b == 0 and a != 1) and not (a == 0 and b != 1) for a, b in F.coeffs) and (
        F.coeffs.get((1, 0)) is not None and ring.is_one(F.coeffs[(1, 0)])
    )
    X, Y, Z = (MultiTrunc.variable(ring, 3, k, N, ("X", "Y", "Z")) for k in range(3))
    left = substitute(F, [substitute(F, [X, Y]), Z])
    right = substitute(F, [X, substitute(F, [Y, Z])])
    out["associativity"] = left == right
    Fw = group_law_work(lt, N)
    fX = series_to_multi(lt.f, BivarTrunc.X(lt.work, N))
    fY = series_to_multi(lt.f, BivarTrunc.Y(lt.work, N))
    diff = series_to_multi(lt.f, Fw) - substitute(Fw, [fX, fY])
    out["f-endomorphism"] = all(c.valuation >= lt.M for c in diff.coeffs.values())
    return out


def check_endomorphisms(lt: LTData, a, b, N: int | None = None) -> dict:
    """[a+b] = F([a],[b]) and [ab] = [a] o [b] at output precision."""
    N = lt.N if N is None else N
    F = group_law(lt, N)
    A, B = lt_mul(a, lt, N), lt_mul(b, lt, N)
    work = lt.work
    s = lt_mul(work.coerce(a) + work.coerce(b), lt, N)
    pr = lt_mul(work.coerce(a) * work.coerce(b), lt, N)
    return {
        "additive": formal_add(F, A, B).equal_to_prec(s),
        "multiplicative": A.compose(B).equal_to_prec(pr),
    }
