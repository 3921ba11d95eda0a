"""Finite-precision arithmetic in local integer rings.

A ring O is presented as W[T]/(E) where W = W(F_{p^f}) is the unramified
layer and E is an Eisenstein polynomial over W of degree e (E = T - p gives
the unramified ring itself, with uniformizer p).  W is stored as
(Z/p^K)[T]/(g) where g is the integer lift of the residue modulus of
``fields.make_field(p, f)``; an element of O is the coefficient vector of a
polynomial of degree < e in the uniformizer.

Every LocalInt carries an absolute precision ``prec``: it is known modulo
the ``prec``-th power of the uniformizer.  Arithmetic propagates precision;
two elements compare equal when their difference vanishes at the smaller
precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels as K
from . import fields as ff
from . import linalg


class PrecisionError(ArithmeticError):
    """Result carries no significant digits at the requested precision."""


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# the unramified layer as tuples of integers mod p^K


# residue degree from which the compiled polynomial kernels take over
KERNEL_DEGREE = 8


class WLayer:
    """Arithmetic of (Z/p^K)[T]/(g) on length-f integer tuples."""

    def __init__(self, p: int, f: int, K: int):
        self.p, self.f, self.K = p, f, K
        self.mod = p**K
        self.residue = ff.make_field(p, f)
        self.g = tuple(self.residue.modulus)
        self._sigmaT = None
        # int64 kernels need products below 2^62
        self._gk = np.array(self.g, dtype=np.int64) if (self.mod - 1) ** 2 * f < 2**62 else None

    def zero(self):
        return (0,) * self.f

    def const(self, n: int):
        return (n % self.mod,) + (0,) * (self.f - 1)

    def add(self, a, b):
        m = self.mod
        return tuple((x + y) % m for x, y in zip(a, b))

    def sub(self, a, b):
        m = self.mod
        return tuple((x - y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.mod
        return tuple((-x) % m for x in a)

    def scale(self, a, n: int):
        m = self.mod
        return tuple((x * n) % m for x in a)

    def mul(self, a, b):
        f, m = self.f, self.mod
        if f == 1:
            return ((a[0] * b[0]) % m,)
        if f >= KERNEL_DEGREE and self._gk is not None:
            return tuple(int(x) for x in K.polymulmod(a, b, self._gk, m))
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        g = self.g
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k] % m
            if c:
                for t in range(f):
                    prod[k - f + t] -= c * g[t]
        return tuple(x % m for x in prod[:f])

    def pow(self, a, e: int):
        if self.f >= KERNEL_DEGREE and self._gk is not None:
            return tuple(int(x) for x in K.polypowmod(a, e, self._gk, self.mod))
        r = self.const(1)
        while e:
            if e & 1:
                r = self.mul(r, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return r

    def vp(self, a) -> int:
        return min(_vp(x, self.p) for x in a)

    def is_zero_mod(self, a, k: int) -> bool:
        pk = self.p**k
        return all(x % pk == 0 for x in a)

    def reduce(self, a, k: int):
        pk = self.p ** max(k, 0)
        return tuple(x % pk for x in a)

    def residue_of(self, a) -> ff.FieldElem:
        return self.residue.coerce([x % self.p for x in a])

    def lift(self, x: ff.FieldElem):
        return tuple(int(c) for c in x.c)

    def inverse(self, a):
        """Inverse of a p-adic unit by Newton iteration."""
        r = self.residue_of(a)
        if r.is_zero():
            raise ZeroDivisionError("not a unit of the unramified layer")
        y = self.lift(r.inverse())
        two = self.const(2)
        for _ in range(max(1, math.ceil(math.log2(self.K)) + 1)):
            y = self.mul(y, self.sub(two, self.mul(a, y)))
        return y

    def eval_g(self, t):
        acc = self.zero()
        for c in reversed(self.g):
            acc = self.add(self.mul(acc, t), self.const(c))
        return acc

    def sigma_T(self):
        """Image of T under the Frobenius automorphism: the root of g lifting T^p."""
        if self._sigmaT is None:
            if self.f == 1:
                self._sigmaT = self.const(-self.g[0])
            else:
                T = (0, 1) + (0,) * (self.f - 2)
                t = self.pow(T, self.p)
                dg = [(i * c) for i, c in enumerate(self.g)][1:]
                for _ in range(self.K + 1):
                    gd = self.zero()
                    for c in reversed(dg):
                        gd = self.add(self.mul(gd, t), self.const(c))
                    t = self.sub(t, self.mul(self.eval_g(t), self.inverse(gd)))
                self._sigmaT = t
        return self._sigmaT

    def frob(self, a, k: int = 1):
        for _ in range(k % self.f if self.f > 1 else 0):
            sT = self.sigma_T()
            acc = self.zero()
            for c in reversed(a):
                acc = self.add(self.mul(acc, sT), self.const(c))
            a = acc
        return a

    def teichmuller(self, x: ff.FieldElem):
        """Multiplicative lift: (any lift)^(q^(K-1)) is exact mod p^K."""
        a = self.lift(x)
        return self.pow(a, (self.p**self.f) ** (self.K - 1))


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LocalRingDesc:
    """O = W(F_{p^f})[T]/(E) at uniformizer-adic precision M."""

    p: int
    f: int
    eis: tuple
    M: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "K", math.ceil(self.M / self.e) + 1)
        object.__setattr__(self, "W", WLayer(self.p, self.f, self.K))
        self._validate()

    @property
    def e(self) -> int:
        return len(self.eis)

    @property
    def residue(self) -> ff.FieldDesc:
        return ff.make_field(self.p, self.f)

    @property
    def key(self):
        return (self.p, self.f, self.eis)

    @property
    def is_unramified(self) -> bool:
        return self.e == 1

    def _validate(self):
        W = self.W
        for j, c in enumerate(self.eis):
            if not W.is_zero_mod(c, 1):
                raise ValueError(f"not Eisenstein: coefficient of T^{j} is not divisible by p")
        if W.is_zero_mod(self.eis[0], 2):
            raise ValueError("not Eisenstein: constant term has valuation > 1")

    def __eq__(self, other):
        return isinstance(other, LocalRingDesc) and self.key == other.key and self.M == other.M

    def __hash__(self):
        return hash((self.key, self.M))

    def same_ring(self, other) -> bool:
        return isinstance(other, LocalRingDesc) and self.key == other.key

    def with_precision(self, M: int) -> "LocalRingDesc":
        return make_local_ring(self.p, self.f, self.eis, M)

    def eis_text(self) -> str:
        if self.e == 1 and self.eis[0] == _as_w(-self.p, self.f):
            return "T-p"
        terms = ["T^%d" % self.e]
        for j in range(self.e - 1, -1, -1):
            c = self.eis[j]
            if any(c):
                cs = str(c[0]) if self.f == 1 or not any(c[1:]) else "[" + ",".join(map(str, c)) + "]"
                terms.append(cs if j == 0 else f"{cs}*T" if j == 1 else f"{cs}*T^{j}")
        return "+".join(terms).replace("+-", "-")

    def __repr__(self):
        return f"loc({self.p},{self.f},{self.eis_text()})"

    # -- constructors
    def _make(self, c, prec):
        return LocalInt(self, c, prec)

    def coerce(self, value) -> "LocalInt":
        if isinstance(value, LocalInt):
            if value.desc is self:
                return value
            if not value.desc.same_ring(self):
                raise ValueError(f"cannot coerce {value.desc!r} into {self!r}")
            return LocalInt(self, value.c, min(value.prec, self.M))
        if isinstance(value, ff.FieldElem):
            return self.teichmuller(value)
        if isinstance(value, int) or hasattr(value, "__index__"):
            c = [self.W.zero()] * self.e
            c[0] = self.W.const(int(value))
            return LocalInt(self, tuple(c), self.M)
        raise TypeError(f"cannot coerce {type(value).__name__} into {self!r}")

    def __call__(self, value):
        return self.coerce(value)

    def from_w(self, w, prec=None) -> "LocalInt":
        """Element of the unramified layer given as an integer tuple."""
        c = [self.W.zero()] * self.e
        c[0] = tuple(int(x) % self.W.mod for x in w)
        return LocalInt(self, tuple(c), self.M if prec is None else prec)

    def from_coeffs(self, coeffs, prec=None) -> "LocalInt":
        """sum_j coeffs[j] * uniformizer^j with coeffs in the unramified layer."""
        c = [self.W.zero()] * self.e
        acc = LocalInt(self, tuple(c), self.M if prec is None else prec)
        upow = self.one
        for w in coeffs:
            acc = acc + self.from_w(_as_w(w, self.f)) * upow
            upow = upow * self.uniformizer
        return acc

    @property
    def zero(self) -> "LocalInt":
        return self.coerce(0)

    @property
    def one(self) -> "LocalInt":
        return self.coerce(1)

    @property
    def uniformizer(self) -> "LocalInt":
        if "unif" not in self._cache:
            if self.e == 1:
                self._cache["unif"] = self.from_w(self.W.neg(self.eis[0]))
            else:
                c = [self.W.zero()] * self.e
                c[1] = self.W.const(1)
                self._cache["unif"] = LocalInt(self, tuple(c), self.M)
        return self._cache["unif"]

    def teichmuller(self, x: ff.FieldElem) -> "LocalInt":
        x = self.residue.coerce(x)
        key = ("teich", x.c)
        if key not in self._cache:
            self._cache[key] = self.from_w(self.W.teichmuller(x))
        return self._cache[key]

    def random(self, rng, prec=None) -> "LocalInt":
        prec = self.M if prec is None else prec
        digits = [self.residue.random(rng) for _ in range(prec)]
        return self.from_digits(digits, prec)

    def random_unit(self, rng, prec=None) -> "LocalInt":
        while True:
            x = self.random(rng, prec)
            if x.is_unit():
                return x

    def from_digits(self, digits, prec=None) -> "LocalInt":
        """sum teichmuller(d_i) * uniformizer^i."""
        prec = len(digits) if prec is None else prec
        acc = self.zero
        upow = self.one
        for d in digits:
            if not self.residue.coerce(d).is_zero():
                acc = acc + self.teichmuller(d) * upow
            upow = upow * self.uniformizer
        return acc.with_prec(min(prec, self.M))

    # -- ring-handle protocol for series coefficients
    def is_zero(self, x) -> bool:
        return x.is_zero()

    def is_unit(self, x) -> bool:
        return x.is_unit()

    def inv(self, x):
        return x.inverse()

    def is_one(self, x) -> bool:
        return (x - self.one).is_zero()

    def text(self, x) -> str:
        return x.short()

    # -- Frobenius bookkeeping
    def eis_fixed_by_frobenius(self) -> bool:
        W = self.W
        return all(W.frob(W.reduce(c, W.K)) == W.reduce(c, W.K) for c in self.eis)


def _as_w(w, f):
    if isinstance(w, int):
        return (w,) + (0,) * (f - 1)
    w = tuple(int(t) for t in w)
    return w + (0,) * (f - len(w))


@lru_cache(maxsize=None)
def _cached_ring(p, f, eis, M):
    return LocalRingDesc(p, f, eis, M)


def make_local_ring(p: int, f: int = 1, eis=None, M: int = 8) -> LocalRingDesc:
    """O_F = W(F_{p^f}) (eis None) or W(F_{p^f})[T]/(E).

    ``eis`` lists the non-leading coefficients E_0, ..., E_{e-1} of the monic
    Eisenstein polynomial, each an integer or a tuple over the unramified
    layer.
    """
    if not ff.is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if f < 1 or M < 1:
        raise ValueError("residue degree and precision must be positive")
    if eis is None:
        eis = (-p,)
    eis_t = tuple(_as_w(c, f) for c in eis)
    return _cached_ring(p, f, eis_t, M)


def unramified(p: int, f: int = 1, M: int = 8) -> LocalRingDesc:
    return make_local_ring(p, f, None, M)


class LocalInt:
    """sum_{j<e} c_j * uniformizer^j, known modulo uniformizer^prec."""

    __slots__ = ("desc", "c", "prec")

    def __init__(self, desc: LocalRingDesc, c, prec: int):
        self.desc = desc
        prec = int(min(prec, desc.M))
        self.prec = prec
        e = desc.e
        W = desc.W
        self.c = tuple(W.reduce(cj, -(-(prec - j) // e)) for j, cj in enumerate(c))

    # -- inspection
    @property
    def valuation(self) -> int:
        e, W = self.desc.e, self.desc.W
        v = min(e * W.vp(cj) + j for j, cj in enumerate(self.c))
        return min(v, self.prec)

    def is_zero(self) -> bool:
        return self.valuation >= self.prec

    def is_unit(self) -> bool:
        return self.valuation == 0

    def parent_one(self):
        return self.desc.one

    def with_prec(self, prec: int) -> "LocalInt":
        return LocalInt(self.desc, self.c, min(prec, self.prec))

    def residue(self) -> ff.FieldElem:
        if self.prec < 1:
            raise PrecisionError("residue of an element with no known digits")
        return self.desc.W.residue_of(self.c[0])

    def _other(self, other) -> "LocalInt":
        if isinstance(other, LocalInt):
            if other.desc is self.desc:
                return other
            if other.desc.same_ring(self.desc):
                return other
            raise ValueError(f"mixing {self.desc!r} and {other.desc!r}")
        return self.desc.coerce(other)

    def _desc_for(self, other):
        return self.desc if self.desc.M >= other.desc.M else other.desc

    # -- arithmetic
    def __add__(self, other):
        if not isinstance(other, (LocalInt, int)):
            return NotImplemented
        other = self._other(other)
        W = self.desc.W if self.desc.M >= other.desc.M else other.desc.W
        c = tuple(W.add(a, b) for a, b in zip(self.c, other.c))
        return LocalInt(self._desc_for(other), c, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        W = self.desc.W
        return LocalInt(self.desc, tuple(W.neg(a) for a in self.c), self.prec)

    def __sub__(self, other):
        if not isinstance(other, (LocalInt, int)):
            return NotImplemented
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            W = self.desc.W
            return LocalInt(self.desc, tuple(W.scale(a, other) for a in self.c), self.prec)
        if not isinstance(other, LocalInt):
            return NotImplemented
        other = self._other(other)
        desc = self._desc_for(other)
        W, e = desc.W, desc.e
        prod = [W.zero() for _ in range(2 * e - 1)]
        for i, a in enumerate(self.c):
            if any(a):
                for j, b in enumerate(other.c):
                    if any(b):
                        prod[i + j] = W.add(prod[i + j], W.mul(a, b))
        for k in range(2 * e - 2, e - 1, -1):
            top = prod[k]
            if any(top):
                for t in range(e):
                    prod[k - e + t] = W.sub(prod[k - e + t], W.mul(top, desc.eis[t]))
        prec = min(self.prec + other.valuation, other.prec + self.valuation)
        return LocalInt(desc, tuple(prod[:e]), prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        r = self.desc.one
        b = self
        while n:
            if n & 1:
                r = r * b
            n >>= 1
            if n:
                b = b * b
        return r

    def inverse(self) -> "LocalInt":
        if not self.is_unit():
            raise ZeroDivisionError("inverse of a non-unit")
        y = self.desc.teichmuller(self.residue().inverse())
        two = self.desc.coerce(2)
        for _ in range(max(1, math.ceil(math.log2(max(self.prec, 2)))) + 1):
            y = y * (two - self * y)
        return y.with_prec(self.prec)

    def __truediv__(self, other):
        other = self._other(other)
        v = other.valuation
        if v == 0:
            return self * other.inverse()
        if v >= other.prec:
            raise ZeroDivisionError("division by zero")
        u = other.div_uniformizer(v)
        return self.div_uniformizer(v) * u.inverse()

    def div_uniformizer(self, k: int = 1) -> "LocalInt":
        """self / uniformizer^k; self must have valuation >= k."""
        if k == 0:
            return self
        if self.valuation < k:
            raise ArithmeticError(f"valuation {self.valuation} < {k}: not divisible")
        desc, W, e = self.desc, self.desc.W, self.desc.e
        x = self
        for _ in range(k):
            c0 = x.c[0]
            rest = list(x.c[1:]) + [W.zero()]
            shifted = LocalInt(desc, tuple(rest), desc.M)
            if any(c0):
                q = tuple(t // desc.p for t in c0)
                shifted = shifted + desc.from_w(q) * _p_over_uniformizer(desc)
            x = shifted.with_prec(x.prec - 1)
        return x

    def frobenius(self, k: int = 1) -> "LocalInt":
        """Apply the k-th power of the absolute Frobenius of the unramified layer."""
        desc = self.desc
        if desc.e > 1 and not desc.eis_fixed_by_frobenius():
            raise ValueError("Frobenius does not fix the uniformizer of this presentation")
        W = desc.W
        return LocalInt(desc, tuple(W.frob(a, k) for a in self.c), self.prec)

    def __eq__(self, other):
        if isinstance(other, (int, LocalInt)):
            return (self - self._other(other)).is_zero()
        return NotImplemented

    def __hash__(self):
        raise TypeError("LocalInt is unhashable")

    # -- digit view
    def teichmuller_digits(self) -> list[ff.FieldElem]:
        """d_0, ..., d_{prec-1} with self = sum teichmuller(d_i) uniformizer^i."""
        desc = self.desc
        out = []
        x = self
        for _ in range(self.prec):
            d = desc.W.residue_of(x.c[0])
            out.append(d)
            x = (x - desc.teichmuller(d)).div_uniformizer(1) if x.prec > 1 else x.with_prec(0)
        return out

    def short(self) -> str:
        desc = self.desc
        if desc.e == 1 and desc.f == 1:
            return f"[{self.c[0][0]}]"
        return "[" + ";".join(",".join(str(t) for t in ff._strip_zeros(cj)) for cj in self.c) + "]"

    def text(self) -> str:
        v = self.valuation
        if v >= self.prec:
            return f"{self.desc!r}:[] * π^{self.prec}"
        unit = self.div_uniformizer(v)
        digits = unit.teichmuller_digits()
        ds = ",".join(str(d.c[0]) if d.desc.m == 1 else d.short() for d in digits)
        return f"{self.desc!r}:[{ds}] * π^{v}"

    def __repr__(self):
        return self.text()

    __str__ = text


def _p_over_uniformizer(desc: LocalRingDesc) -> LocalInt:
    """p / uniformizer = -uniformizer^(e-1) / V where E_j = p V_j."""
    key = "p_over_unif"
    if key not in desc._cache:
        W, e = desc.W, desc.e
        V = desc.from_w(tuple(t // desc.p for t in desc.eis[0]))
        ppow = desc.one
        for j in range(1, e):
            ppow = ppow * desc.uniformizer
            V = V + desc.from_w(tuple(t // desc.p for t in desc.eis[j])) * ppow
        val = -(desc.uniformizer ** (e - 1)) * V.inverse()
        desc._cache[key] = val
    return desc._cache[key]


# ---------------------------------------------------------------------------
# norms


def _restrict_w(x: LocalInt, target: LocalRingDesc) -> LocalInt:
    """Element of an unramified ring fixed by Frobenius^(target.f), rewritten in target."""
    res = target.residue
    digits = x.teichmuller_digits()
    acc = target.zero
    ppow = target.one
    unif = target.coerce(target.p)
    for d in digits:
        dd = ff.restrict(d, res)
        acc = acc + target.teichmuller(dd) * ppow
        ppow = ppow * unif
    return acc.with_prec(x.prec)


def norm(x: LocalInt, base: LocalRingDesc) -> LocalInt:
    """Norm from the ring of x down to the unramified ring ``base``.

    The determinant of multiplication by x on the basis 1, .., uniformizer^(e-1)
    gives the norm to the maximal unramified subring; the product of its
    Frobenius conjugates descends it to ``base``.
    """
    K = x.desc
    if not base.is_unramified or base.eis[0] != _as_w(-base.p, base.f):
        raise ValueError("the base ring must be unramified with uniformizer p")
    if K.f % base.f:
        raise ValueError("residue field of the base is not a subfield")
    s = K.f // base.f
    e = K.e
    kprec = x.prec // e
    if kprec <= 0:
        raise PrecisionError("no significant p-adic digits in the norm")
    U = unramified(K.p, K.f, max(kprec, 1))
    cols = []
    unif = K.uniformizer
    power = x
    for j in range(e):
        cols.append([U.from_w(cj).with_prec(kprec) for cj in power.c])
        power = power * unif
    mat = linalg.transpose(cols)
    n0 = linalg.det(mat) if e > 1 else mat[0][0]
    n0 = n0.with_prec(kprec)
    acc = n0
    for j in range(1, s):
        acc = acc * n0.frobenius(base.f * j)
    if acc.is_zero():
        raise PrecisionError(f"norm vanishes at precision {kprec}: increase M")
    return _restrict_w(acc, base.with_precision(max(base.M, kprec)))


@dataclass(frozen=True)
class Extension:
    """K / F with F unramified of residue degree f_F, K = W(F_{p^(f_F s)})[T]/(E)."""

    base: LocalRingDesc
    top: LocalRingDesc

    @property
    def s(self) -> int:
        return self.top.f // self.base.f

    @property
    def degree(self) -> int:
        return self.s * self.top.e


def make_extension(p: int, f_base: int = 1, s: int = 1, eis=None, M: int = 6) -> Extension:
    """F = W(F_{p^f_base}) at precision M and K over it; K carries M*e digits."""
    F = unramified(p, f_base, M)
    e = 1 if eis is None else len(eis)
    Kd = make_local_ring(p, f_base * s, eis, M * e)
    return Extension(F, Kd)


def lt_extension_criterion(pi: LocalInt, varpi: LocalInt, ext: Extension) -> bool:
    """Whether norm(varpi) equals pi^s at the base precision."""
    if pi.valuation != 1 or pi.prec < 2:
        raise ValueError("pi is not a uniformizer of the base ring")
    if varpi.valuation != 1 or varpi.prec < 2:
        raise ValueError("varpi is not a uniformizer of the top ring")
    n = norm(varpi, ext.base)
    target = ext.base.coerce(pi) ** ext.s
    prec = min(n.prec, target.prec, ext.base.M)
    return (n - target).with_prec(prec).is_zero()
