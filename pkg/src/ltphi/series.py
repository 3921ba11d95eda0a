"""Truncated Laurent series and total-degree-truncated multivariate polynomials.

Coefficients live in an abstract ring handle offering ``zero``, ``one``,
``coerce``, ``is_zero``, ``is_unit``, ``inv`` and ``text``.  Precision is
always carried by the value: a univariate series is known exactly on the
exponent window below ``prec`` (``INF`` for exact polynomials), a
multivariate one on total degrees below ``N``.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Mapping

INF = math.inf


class PrecisionError(ArithmeticError):
    """An operation would need more precision than its inputs carry."""


class IntegerRing:
    """Exact integers as a coefficient ring."""

    zero = 0
    one = 1

    def coerce(self, x) -> int:
        return int(x)

    def is_zero(self, x) -> bool:
        return x == 0

    def is_unit(self, x) -> bool:
        return x in (1, -1)

    def inv(self, x) -> int:
        if x not in (1, -1):
            raise ZeroDivisionError(f"{x} is not a unit of ZZ")
        return x

    def is_one(self, x) -> bool:
        return x == 1

    def text(self, x) -> str:
        return f"[{x}]"

    def __repr__(self):
        return "ZZ"

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("ZZ")


ZZ = IntegerRing()


def _fmt_exp(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def _monomial_text(ring, c, factors: list[str]) -> str:
    if not factors:
        return "1" if ring.is_one(c) else ring.text(c)
    head = "*".join(factors)
    return head if ring.is_one(c) else f"{head}*{ring.text(c)}"


def _prec_text(prec) -> str:
    return "inf" if prec == INF else str(int(prec))


# ---------------------------------------------------------------------------


class TruncSeries:
    """sum c_n u^n for n < prec, with finitely many terms below zero."""

    __slots__ = ("ring", "coeffs", "prec", "var")

    def __init__(self, ring, coeffs: Mapping[int, object] | None = None, prec=INF, var: str = "u"):
        self.ring = ring
        self.prec = prec
        self.var = var
        clean = {}
        if coeffs:
            for n, c in coeffs.items():
                if n < prec:
                    c = ring.coerce(c)
                    if not ring.is_zero(c):
                        clean[int(n)] = c
        self.coeffs = dict(sorted(clean.items()))

    # -- constructors
    @classmethod
    def monomial(cls, ring, n: int = 1, c=None, prec=INF, var="u"):
        return cls(ring, {n: ring.one if c is None else c}, prec, var)

    @classmethod
    def constant(cls, ring, c, prec=INF, var="u"):
        return cls(ring, {0: c}, prec, var)

    @classmethod
    def from_list(cls, ring, values: Iterable, prec=INF, var="u", start: int = 0):
        return cls(ring, {start + i: v for i, v in enumerate(values)}, prec, var)

    def _new(self, coeffs, prec):
        return TruncSeries(self.ring, coeffs, prec, self.var)

    # -- inspection
    @property
    def lo(self):
        """Lowest exponent with a nonzero coefficient (prec for zero)."""
        return next(iter(self.coeffs), self.prec)

    valuation = lo

    @property
    def degree(self):
        return max(self.coeffs) if self.coeffs else -1

    def __getitem__(self, n: int):
        if n >= self.prec:
            raise PrecisionError(f"coefficient of {self.var}^{n} unknown (precision {self.prec})")
        return self.coeffs.get(n, self.ring.zero)

    def items(self):
        return self.coeffs.items()

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.prec == INF

    def is_polynomial(self) -> bool:
        return self.prec == INF and all(n >= 0 for n in self.coeffs)

    def truncate(self, prec) -> "TruncSeries":
        return self._new(self.coeffs, min(prec, self.prec))

    def with_prec(self, prec) -> "TruncSeries":
        """Declare a new precision (no larger than what is exactly known)."""
        return self.truncate(prec)

    def map_coeffs(self, fn: Callable, ring=None) -> "TruncSeries":
        ring = ring or self.ring
        return TruncSeries(ring, {n: fn(c) for n, c in self.coeffs.items()}, self.prec, self.var)

    def shift(self, k: int) -> "TruncSeries":
        """u^k * self."""
        return self._new({n + k: c for n, c in self.coeffs.items()}, self.prec + k)

    def _coerce_other(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries(self.ring, {0: self.ring.coerce(other)}, INF, self.var)

    # -- ring operations
    def __add__(self, other):
        other = self._coerce_other(other)
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return self._new(out, prec)

    __radd__ = __add__

    def __neg__(self):
        return self._new({n: -c for n, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce_other(other))

    def __rsub__(self, other):
        return self._coerce_other(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            c = self.ring.coerce(other)
            return self._new({n: a * c for n, a in self.coeffs.items()}, self.prec)
        vf, vg = self.lo, other.lo
        prec = min(self.prec + vg, other.prec + vf)
        out: dict = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k >= prec:
                    break
                out[k] = out[k] + a * b if k in out else a * b
        return self._new(out, prec)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = TruncSeries(self.ring, {0: self.ring.one}, INF, self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            other = self._coerce_other(other)
        return self.equal_to_prec(other)

    def __hash__(self):
        raise TypeError("TruncSeries is unhashable")

    def equal_to_prec(self, other, prec=None) -> bool:
        """Equality on the window where both are known (and below ``prec``)."""
        bound = min(self.prec, other.prec)
        if prec is not None:
            bound = min(bound, prec)
        keys = set(self.coeffs) | set(other.coeffs)
        for n in keys:
            if n < bound:
                d = self.coeffs.get(n, self.ring.zero) - other.coeffs.get(n, self.ring.zero)
                if not self.ring.is_zero(d):
                    return False
        return True

    # -- element protocol for linalg
    def is_unit(self) -> bool:
        """Unit of the coefficient-ring power series layer, or nonzero Laurent element over a field."""
        if not self.coeffs:
            return False
        return any(self.ring.is_unit(c) for c in self.coeffs.values())

    def parent_one(self):
        return TruncSeries(self.ring, {0: self.ring.one}, INF, self.var)

    def inverse(self, prec=None) -> "TruncSeries":
        """Inverse in the Laurent ring.

        The series splits as x = x_hi + x_lo where x_hi starts with the first
        unit coefficient (exponent v) and x_lo collects the non-unit terms
        below it.  x_hi^{-1} is computed to absolute precision prec - 2v; the
        correction (1 + x_lo/x_hi)^{-1} is a geometric series that terminates
        because x_lo/x_hi is nilpotent in the coefficient ring.
        """
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a zero series")
        v = next((n for n, c in self.coeffs.items() if self.ring.is_unit(c)), None)
        if v is None:
            raise ZeroDivisionError("series has no unit coefficient")
        P = self.prec
        if P == INF:
            if prec is None:
                if len(self.coeffs) == 1:
                    c = self.ring.inv(self.coeffs[v])
                    return self._new({-v: c}, INF)
                raise PrecisionError("inverse of an exact non-monomial series needs a target precision")
            out = self._inverse_from(v, prec + 2 * v)
            if out.prec < prec:
                # the nilpotent correction costs a fixed amount; pay it up front
                out = self._inverse_from(v, prec + 2 * v + (prec - out.prec))
            return out.truncate(prec)
        out = self._inverse_from(v, P)
        if prec is not None:
            out = out.truncate(prec)
        return out

    def _inverse_from(self, v, P) -> "TruncSeries":
        hi = self._new({n: c for n, c in self.coeffs.items() if n >= v}, P)
        lo_part = self._new({n: c for n, c in self.coeffs.items() if n < v}, INF)
        inv_hi = _unit_inverse(hi, v, P)
        if lo_part.is_zero():
            out = inv_hi
        else:
            t = lo_part * inv_hi
            out = inv_hi
            term = inv_hi
            for _ in range(4096):
                term = -(term * t)
                if term.is_zero():
                    break
                out = out + term
            else:
                raise PrecisionError("non-unit part of the series is not nilpotent")
        return out

    def __truediv__(self, other):
        if not isinstance(other, TruncSeries):
            return self * self.ring.inv(self.ring.coerce(other))
        return self * other.inverse()

    # -- composition
    def compose(self, g: "TruncSeries", prec=None) -> "TruncSeries":
        return compose(self, g, prec)

    __call__ = compose

    def derivative(self) -> "TruncSeries":
        return self._new({n - 1: c * n for n, c in self.coeffs.items() if n != 0}, self.prec - 1)

    # -- text
    def text(self) -> str:
        terms = []
        for n, c in self.coeffs.items():
            factors = [] if n == 0 else [_fmt_exp(self.var, n)]
            terms.append(_monomial_text(self.ring, c, factors))
        body = " + ".join(terms) if terms else "0"
        if self.prec != INF:
            body += f" + O({self.var}^{_prec_text(self.prec)})"
        return body

    def __repr__(self):
        return self.text()

    __str__ = text


def _unit_inverse(hi: TruncSeries, v: int, P) -> TruncSeries:
    """Inverse of a series whose lowest coefficient (at v) is a unit."""
    ring = hi.ring
    rel = P - v  # relative precision
    if rel <= 0:
        raise PrecisionError("no significant terms left to invert")
    a0inv = ring.inv(hi.coeffs[v])
    norm = {n - v: c * a0inv for n, c in hi.coeffs.items()}
    # b = 1/(1 + h) by the recurrence b_n = -sum_{k>=1} h_k b_{n-k}
    if rel == INF:
        raise PrecisionError("exact inverse requires a finite precision")
    rel = int(rel)
    b = [ring.zero] * rel
    b[0] = ring.one
    hk = [(k, c) for k, c in norm.items() if k >= 1]
    for n in range(1, rel):
        acc = ring.zero
        for k, c in hk:
            if k > n:
                break
            acc = acc + c * b[n - k]
        b[n] = -acc
    coeffs = {n - v: b[n] * a0inv for n in range(rel)}
    return TruncSeries(ring, coeffs, rel - v, hi.var)


def compose(f: TruncSeries, g: TruncSeries, prec=None) -> TruncSeries:
    """f(g) for g with positive valuation.

    Output precision is min(prec_f * v_g, prec_g + (v_f - 1) * v_g) for
    power series f; negative exponents of f use the Laurent inverse of g.
    """
    if not g.is_zero() and g.lo < 1:
        raise ValueError("inner series must have zero constant term")
    if g.is_zero():
        if f.lo < 0:
            raise ZeroDivisionError("substituting zero into a Laurent series")
        c = f.coeffs.get(0, f.ring.zero)
        return TruncSeries(f.ring, {0: c}, g.prec if f.prec > 1 else 0, g.var)
    vg = g.lo
    target = f.prec * vg if f.prec != INF else INF
    pos = [n for n in f.coeffs if n > 0]
    if pos:
        target = min(target, g.prec + (min(pos) - 1) * vg)
    if prec is not None:
        target = min(target, prec)
    out = TruncSeries(f.ring, {0: f.coeffs[0]} if 0 in f.coeffs else {}, INF, g.var)
    if pos:
        gt = g
        power = gt
        last = 1
        for n in sorted(pos):
            if n * vg >= target:
                break
            while last < n:
                power = (power * gt).truncate(target)
                last += 1
            out = out + power * f.coeffs[n]
    neg = sorted((n for n in f.coeffs if n < 0), reverse=True)
    if neg:
        if target == INF:
            raise PrecisionError("Laurent composition needs a finite target precision")
        k = -min(neg)
        if g.prec == INF:
            # g^{-k} loses (k-1) times the pole order of g^{-1}; size the inverse for that
            ginv = g.inverse(prec=target + k * vg)
            if k > 1 and ginv.coeffs:
                ginv = g.inverse(prec=target + k * vg - (k - 1) * min(ginv.lo, -vg))
        else:
            ginv = g.inverse()
        power = ginv
        last = -1
        for n in neg:
            while last > n:
                power = power * ginv
                last -= 1
            out = out + power * f.coeffs[n]
    return out.truncate(target)


def reversion(f: TruncSeries) -> TruncSeries:
    """Compositional inverse of f = cX + ..., c a unit, to f's precision."""
    if f.lo != 1 or not f.ring.is_unit(f.coeffs[1]):
        raise ValueError("reversion needs a unit linear coefficient and no constant term")
    P = f.prec
    if P == INF:
        P = max(f.coeffs) + 1
    ring = f.ring
    cinv = ring.inv(f.coeffs[1])
    g = {1: cinv}
    # degree n of f(g) depends on g_n only through c * g_n
    for n in range(2, int(P)):
        trial = TruncSeries(ring, g, INF, f.var)
        err = compose(f.truncate(n + 1), trial)[n]
        if not ring.is_zero(err):
            g[n] = -(err * cinv)
    return TruncSeries(ring, g, P, f.var)


# ---------------------------------------------------------------------------


class MultiTrunc:
    """Polynomial in k variables truncated at total degree < N."""

    __slots__ = ("ring", "nvars", "coeffs", "N", "names")

    def __init__(self, ring, nvars: int, coeffs: Mapping[tuple, object] | None, N: int, names=None):
        self.ring = ring
        self.nvars = nvars
        self.N = N
        self.names = tuple(names) if names else _default_names(nvars)
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                e = tuple(int(t) for t in e)
                if len(e) != nvars:
                    raise ValueError("exponent arity mismatch")
                if sum(e) < N:
                    c = ring.coerce(c)
                    if not ring.is_zero(c):
                        clean[e] = c
        self.coeffs = dict(sorted(clean.items(), key=lambda kv: _mono_key(kv[0])))

    def _new(self, coeffs, N=None):
        return type(self)._make(self.ring, self.nvars, coeffs, self.N if N is None else N, self.names)

    @classmethod
    def _make(cls, ring, nvars, coeffs, N, names):
        return MultiTrunc(ring, nvars, coeffs, N, names)

    @classmethod
    def variable(cls, ring, nvars: int, index: int, N: int, names=None):
        e = [0] * nvars
        e[index] = 1
        return MultiTrunc(ring, nvars, {tuple(e): ring.one}, N, names)

    @classmethod
    def constant(cls, ring, nvars: int, c, N: int, names=None):
        return MultiTrunc(ring, nvars, {(0,) * nvars: c}, N, names)

    def __getitem__(self, e):
        e = tuple(e)
        if sum(e) >= self.N:
            raise PrecisionError(f"total degree {sum(e)} beyond cutoff {self.N}")
        return self.coeffs.get(e, self.ring.zero)

    def items(self):
        return self.coeffs.items()

    def is_zero(self) -> bool:
        return not self.coeffs

    def homogeneous(self, n: int) -> "MultiTrunc":
        return self._new({e: c for e, c in self.coeffs.items() if sum(e) == n})

    def below(self, n: int) -> "MultiTrunc":
        return self._new({e: c for e, c in self.coeffs.items() if sum(e) < n})

    def truncate(self, N: int) -> "MultiTrunc":
        return self._new(self.coeffs, min(N, self.N))

    def const_term(self):
        return self.coeffs.get((0,) * self.nvars, self.ring.zero)

    def _coerce_other(self, other):
        if isinstance(other, MultiTrunc):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return MultiTrunc(self.ring, self.nvars, {(0,) * self.nvars: other}, self.N, self.names)

    def __add__(self, other):
        other = self._coerce_other(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return self._new(out, min(self.N, other.N))

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce_other(other))

    def __rsub__(self, other):
        return self._coerce_other(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiTrunc):
            c = self.ring.coerce(other)
            return self._new({e: a * c for e, a in self.coeffs.items()})
        N = min(self.N, other.N)
        out: dict = {}
        for e1, a in self.coeffs.items():
            d1 = sum(e1)
            for e2, b in other.coeffs.items():
                if d1 + sum(e2) >= N:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out[e] + a * b if e in out else a * b
        return self._new(out, N)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        result = MultiTrunc.constant(self.ring, self.nvars, self.ring.one, self.N, self.names)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiTrunc):
            other = self._coerce_other(other)
        N = min(self.N, other.N)
        for e in set(self.coeffs) | set(other.coeffs):
            if sum(e) < N:
                d = self.coeffs.get(e, self.ring.zero) - other.coeffs.get(e, self.ring.zero)
                if not self.ring.is_zero(d):
                    return False
        return True

    def __hash__(self):
        raise TypeError("MultiTrunc is unhashable")

    def map_coeffs(self, fn, ring=None):
        return MultiTrunc(ring or self.ring, self.nvars, {e: fn(c) for e, c in self.coeffs.items()}, self.N, self.names)

    def rename(self, names):
        return MultiTrunc(self.ring, self.nvars, self.coeffs, self.N, names)

    def text(self) -> str:
        terms = []
        for e, c in self.coeffs.items():
            factors = [_fmt_exp(nm, k) for nm, k in zip(self.names, e) if k]
            terms.append(_monomial_text(self.ring, c, factors))
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(deg {self.N})"

    def __repr__(self):
        return self.text()

    __str__ = text


def _default_names(k: int):
    if k <= 3:
        return ("X", "Y", "Z")[:k]
    return tuple(f"X{i}" for i in range(k))


def _mono_key(e):
    # total degree first, then larger leading exponents first
    return (sum(e), tuple(-t for t in e))


class BivarTrunc(MultiTrunc):
    """Two-variable MultiTrunc (X, Y)."""

    def __init__(self, ring, coeffs=None, N: int = 8, names=("X", "Y")):
        super().__init__(ring, 2, coeffs, N, names)

    @classmethod
    def _make(cls, ring, nvars, coeffs, N, names):
        return BivarTrunc(ring, coeffs, N, names)

    @classmethod
    def X(cls, ring, N):
        return BivarTrunc(ring, {(1, 0): ring.one}, N)

    @classmethod
    def Y(cls, ring, N):
        return BivarTrunc(ring, {(0, 1): ring.one}, N)

    def swap(self) -> "BivarTrunc":
        return BivarTrunc(self.ring, {(j, i): c for (i, j), c in self.coeffs.items()}, self.N, self.names)


def series_to_multi(f: TruncSeries, G: MultiTrunc) -> MultiTrunc:
    """f(G) for a multivariate G with zero constant term, truncated at G.N."""
    if not G.const_term() == G.ring.zero and not G.ring.is_zero(G.const_term()):
        raise ValueError("inner polynomial must have zero constant term")
    if any(n < 0 for n in f.coeffs):
        raise ValueError("Laurent series cannot be evaluated on a polynomial")
    if f.prec != INF and f.prec < G.N:
        # terms of degree >= prec_f in the variable are unknown; each G^n has degree >= n
        G = G.truncate(int(f.prec))
    out = MultiTrunc(G.ring, G.nvars, {}, G.N, G.names)
    power = MultiTrunc.constant(G.ring, G.nvars, G.ring.one, G.N, G.names)
    last = 0
    for n in sorted(f.coeffs):
        if n >= G.N:
            break
        while last < n:
            power = power * G
            last += 1
        out = out + power * f.coeffs[n]
    if isinstance(G, BivarTrunc):
        return BivarTrunc(out.ring, out.coeffs, out.N, out.names)
    return out


def substitute(F: MultiTrunc, subs: list[MultiTrunc]) -> MultiTrunc:
    """F(G_1, ..., G_k) where each G_i has zero constant term."""
    if len(subs) != F.nvars:
        raise ValueError("need one substitution per variable")
    G0 = subs[0]
    for G in subs:
        if not G.ring.is_zero(G.const_term()):
            raise ValueError("substituted polynomials must have zero constant term")
    N = min(min(G.N for G in subs), F.N if F.N else 10**9)
    # total-degree bound: a monomial of degree n in F maps to degree >= n
    powers = [[MultiTrunc.constant(G0.ring, G0.nvars, G0.ring.one, N, G0.names)] for _ in subs]
    out = MultiTrunc(G0.ring, G0.nvars, {}, N, G0.names)
    for e, c in F.coeffs.items():
        term = MultiTrunc.constant(G0.ring, G0.nvars, c, N, G0.names)
        for i, k in enumerate(e):
            while len(powers[i]) <= k:
                powers[i].append(powers[i][-1] * subs[i].truncate(N))
            if k:
                term = term * powers[i][k]
        out = out + term
    if isinstance(G0, BivarTrunc):
        return BivarTrunc(out.ring, out.coeffs, out.N, out.names)
    return out


def substitute_xy(F: MultiTrunc, a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """F(a(t), b(t)) for a two-variable F and series a, b of positive valuation.

    A monomial X^i Y^j of F with i + j >= N is unknown; its image has
    valuation >= (i + j) * min(v_a, v_b), which bounds the output precision.
    """
    if F.nvars != 2:
        raise ValueError("substitute_xy needs a two-variable polynomial")
    for s in (a, b):
        if not s.is_zero() and s.lo < 1:
            raise ValueError("substituted series must have zero constant term")
    va = a.lo if not a.is_zero() else a.prec
    vb = b.lo if not b.is_zero() else b.prec
    target = F.N * min(va, vb)
    for (i, j) in F.coeffs:
        if i:
            target = min(target, a.prec + (i - 1) * va + j * vb)
        if j:
            target = min(target, b.prec + i * va + (j - 1) * vb)
    pa = [TruncSeries(a.ring, {0: a.ring.one}, INF, a.var)]
    pb = [TruncSeries(b.ring, {0: b.ring.one}, INF, a.var)]
    out = TruncSeries(a.ring, {}, INF, a.var)
    for (i, j), c in F.coeffs.items():
        if i * va + j * vb >= target:
            continue
        while len(pa) <= i:
            pa.append((pa[-1] * a).truncate(target))
        while len(pb) <= j:
            pb.append((pb[-1] * b).truncate(target))
        out = out + pa[i] * pb[j] * c
    return out.truncate(target)
