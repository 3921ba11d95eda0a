"""Deterministic finite-field tower F_{p^m}.

Each F_{p^m} is F_p[T]/(g_m) where g_m is the least monic irreducible
polynomial of degree m, polynomials being ordered by the integer
sum(c_i p^i) of their non-leading coefficients.  For m | m' the canonical
embedding sends T to a root of g_m in F_{p^m'}; the root is the smallest (by
integer code) among those compatible with every embedding of a proper
divisor of m, which keeps the whole tower commutative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from . import linalg

BRUTE_FORCE_LIMIT = 4096


class NotEtaleError(ValueError):
    """Raised when a Frobenius matrix is not invertible."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, m) with q = p^m, or None."""
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            while q % p == 0:
                q //= p
                m += 1
            return (p, m) if q == 1 and is_prime(p) else None
    return None


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (numpy arrays, lowest degree first)


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    m = len(poly) - 1
    if m == 1:
        return True
    if poly[0] % p == 0:
        return False
    if p <= 64:
        for a in range(1, p):
            v = 0
            for c in reversed(poly):
                v = (v * a + c) % p
            if v == 0:
                return False
    mod = np.array(poly, dtype=np.int64)
    x = np.zeros(m, dtype=np.int64)
    x[1] = 1
    h = x.copy()
    # distinct-degree test; gcds are batched over blocks of x^(p^i) - x
    acc = None
    for i in range(1, m // 2 + 1):
        h = _polypow(h, p, mod, p)
        diff = h.copy()
        diff[1] = (diff[1] - 1) % p
        acc = diff if acc is None else K.polymulmod(acc, diff, mod, p)
        if i % 8 == 0 or i == m // 2:
            if len(K.polygcd(mod, acc, p)) > 1:
                return False
            acc = None
    return True


def _matmul_mod(A, B, p: int) -> np.ndarray:
    """A @ B mod p; goes through float64 BLAS while every sum is exactly representable."""
    if A.shape[1] * (p - 1) ** 2 < 2**52:
        return (A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p
    return (A @ B) % p


def _polypow(a, e, mod, n):
    result = np.zeros(len(mod) - 1, dtype=np.int64)
    result[0] = 1
    base = np.array(a, dtype=np.int64)
    while e:
        if e & 1:
            result = K.polymulmod(result, base, mod, n)
        e >>= 1
        if e:
            base = K.polymulmod(base, base, mod, n)
    return result


@lru_cache(maxsize=None)
def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Coefficients (c_0..c_{m-1}, 1) of the least monic irreducible of degree m."""
    if m == 1:
        return (0, 1)
    for code in range(p**m):
        coeffs = []
        c = code
        for _ in range(m):
            coeffs.append(c % p)
            c //= p
        poly = tuple(coeffs) + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise ArithmeticError(f"no irreducible polynomial of degree {m} over F_{p}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldDesc:
    p: int
    m: int
    modulus: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        return isinstance(other, FieldDesc) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self):
        return hash(("ff", self.p, self.m))

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    @property
    def order(self) -> int:
        return self.p**self.m

    @property
    def characteristic(self) -> int:
        return self.p

    # -- constructors
    def __call__(self, value) -> "FieldElem":
        return self.coerce(value)

    def coerce(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.desc == self:
                return value
            return embed(value, self)
        if isinstance(value, (int, np.integer)):
            c = [0] * self.m
            c[0] = int(value) % self.p
            return FieldElem(self, tuple(c))
        coeffs = [int(v) % self.p for v in value]
        if len(coeffs) > self.m:
            raise ValueError(f"too many coefficients for {self!r}")
        return FieldElem(self, tuple(coeffs + [0] * (self.m - len(coeffs))))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, (0,) * self.m)

    @property
    def one(self) -> "FieldElem":
        return self.coerce(1)

    @property
    def gen(self) -> "FieldElem":
        """The class of T (a root of the modulus)."""
        if self.m == 1:
            return self.coerce(-self.modulus[0])
        return self.coerce([0, 1])

    def from_int(self, code: int) -> "FieldElem":
        c = []
        for _ in range(self.m):
            c.append(code % self.p)
            code //= self.p
        return FieldElem(self, tuple(c))

    def elements(self) -> Iterator["FieldElem"]:
        for code in range(self.order):
            yield self.from_int(code)

    def units(self) -> Iterator["FieldElem"]:
        for code in range(1, self.order):
            yield self.from_int(code)

    def random(self, rng) -> "FieldElem":
        return self.coerce([int(rng.integers(self.p)) for _ in range(self.m)])

    # -- ring-handle protocol used by the series module
    def text(self, x: "FieldElem") -> str:
        return x.short()

    def is_zero(self, x: "FieldElem") -> bool:
        return x.is_zero()

    def is_unit(self, x: "FieldElem") -> bool:
        return not x.is_zero()

    def inv(self, x: "FieldElem") -> "FieldElem":
        return x.inverse()

    def is_one(self, x: "FieldElem") -> bool:
        return x.is_one()

    def parse_coeff(self, s: str) -> "FieldElem":
        s = s.strip()
        if s.startswith("[") and s.endswith("]"):
            body = s[1:-1].strip()
            return self.coerce([int(t) for t in body.split(",")] if body else [])
        return self.coerce(int(s))

    # -- F_p-linear structure
    def frobenius_matrix(self, e: int = 1) -> np.ndarray:
        """Matrix over F_p of x -> x^(p^e) in the power basis (columns)."""
        e %= self.m
        key = ("frob", e)
        if key not in self._cache:
            if e == 0:
                Q = np.eye(self.m, dtype=np.int64)
            elif e == 1:
                mod = np.array(self.modulus, dtype=np.int64)
                x = np.zeros(self.m, dtype=np.int64)
                if self.m > 1:
                    x[1] = 1
                else:
                    x[0] = (-self.modulus[0]) % self.p
                xp = _polypow(x, self.p, mod, self.p)
                cols = [np.eye(1, self.m, 0, dtype=np.int64)[0]]
                cur = cols[0]
                for _ in range(1, self.m):
                    cur = K.polymulmod(cur, xp, mod, self.p)
                    cols.append(cur)
                Q = np.array(cols, dtype=np.int64).T % self.p
            else:
                Q1 = self.frobenius_matrix(1)
                Q = np.eye(self.m, dtype=np.int64)
                for _ in range(e):
                    Q = _matmul_mod(Q1, Q, self.p)
            self._cache[key] = Q
        return self._cache[key]

    def mul_matrix(self, a: "FieldElem") -> np.ndarray:
        """Matrix over F_p of x -> a x in the power basis (columns)."""
        m, p = self.m, self.p
        low = np.array(self.modulus[:m], dtype=np.int64)  # modulus is monic of degree m
        out = np.zeros((m, m), dtype=np.int64)
        cur = np.zeros(m, dtype=np.int64)
        cur[: len(a.c)] = a.c
        for k in range(m):
            out[:, k] = cur
            top = cur[m - 1]
            cur = np.concatenate([[0], cur[:-1]])
            if top:
                cur = (cur - top * low) % p
        return out % p

    def from_vector(self, v) -> "FieldElem":
        return FieldElem(self, tuple(int(t) % self.p for t in v))

    # -- lookup tables for brute force (small fields only)
    def tables(self):
        """(log, exp, digits, frob1) arrays indexed by integer codes."""
        if "tables" not in self._cache:
            q = self.order
            if q > 1 << 16:
                raise ValueError(f"{self!r} too large for lookup tables")
            digits = np.zeros((q, self.m), dtype=np.int64)
            for code in range(q):
                c = code
                for t in range(self.m):
                    digits[code, t] = c % self.p
                    c //= self.p
            g = primitive_element(self)
            exp = np.zeros(max(q - 1, 1), dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            x = self.one
            for k in range(q - 1):
                code = x.to_int()
                exp[k] = code
                log[code] = k
                x = x * g
            frob = np.array([self.from_int(c).frobenius(1).to_int() for c in range(q)], dtype=np.int64)
            self._cache["tables"] = (log, exp, digits, frob)
        return self._cache["tables"]


@lru_cache(maxsize=None)
def make_field(p: int, m: int) -> FieldDesc:
    """Deterministic F_{p^m}; repeated calls return the same object."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"p={p!r} is not prime")
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"extension degree must be >= 1, got {m!r}")
    return FieldDesc(int(p), int(m), least_irreducible(int(p), int(m)))


class FieldElem:
    __slots__ = ("desc", "c")

    def __init__(self, desc: FieldDesc, c: tuple):
        self.desc = desc
        self.c = c

    @property
    def coeffs(self) -> tuple:
        return self.c

    # -- arithmetic
    def _lift(self, other):
        if isinstance(other, FieldElem):
            if other.desc is self.desc or other.desc == self.desc:
                return other
            return common_coerce(self, other)[1]
        return self.desc.coerce(other)

    def __add__(self, other):
        other = self._lift(other)
        p = self.desc.p
        return FieldElem(self.desc, tuple((a + b) % p for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        p = self.desc.p
        return FieldElem(self.desc, tuple((a - b) % p for a, b in zip(self.c, other.c)))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        p = self.desc.p
        return FieldElem(self.desc, tuple((-a) % p for a in self.c))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            p = self.desc.p
            return FieldElem(self.desc, tuple((a * int(other)) % p for a in self.c))
        other = self._lift(other)
        return FieldElem(self.desc, _mulmod(self.c, other.c, self.desc))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.desc.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.desc.coerce(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.desc != self.desc:
            a, b = common_coerce(self, other)
            return a.c == b.c
        return self.c == other.c

    def __hash__(self):
        return hash((self.desc.p, self.desc.m, self.c))

    def __repr__(self):
        return f"ff({self.desc.p},{self.desc.m}):[{','.join(str(a) for a in self.c)}]"

    def short(self) -> str:
        if self.desc.m == 1:
            return f"[{self.c[0]}]"
        return "[" + ",".join(str(a) for a in _strip_zeros(self.c)) + "]"

    # -- ring element protocol
    def is_zero(self) -> bool:
        return not any(self.c)

    def is_one(self) -> bool:
        return self.c[0] == 1 and not any(self.c[1:])

    def is_unit(self) -> bool:
        return not self.is_zero()

    def parent_one(self):
        return self.desc.one

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.desc.order <= 1 << 16 and "tables" in self.desc._cache:
            log, exp, _, _ = self.desc._cache["tables"]
            q = self.desc.order
            return self.desc.from_int(int(exp[(-log[self.to_int()]) % (q - 1)]))
        if self.desc.m <= 4:
            return self ** (self.desc.order - 2)
        return FieldElem(self.desc, tuple(int(x) for x in K.polyinvmod(self.c, self.desc.modulus, self.desc.p)))

    def to_int(self) -> int:
        code = 0
        for a in reversed(self.c):
            code = code * self.desc.p + a
        return code

    def to_vector(self) -> np.ndarray:
        return np.array(self.c, dtype=np.int64)

    def frobenius(self, e: int = 1) -> "FieldElem":
        """x^(p^e)."""
        if e < 0:
            raise ValueError("frobenius iterate must be >= 0")
        e %= self.desc.m
        if e == 0 or self.desc.m == 1:
            return self
        if self.desc.m <= 6:
            return self ** (self.desc.p**e)
        Q = self.desc.frobenius_matrix(e)
        return self.desc.from_vector((Q @ self.to_vector()) % self.desc.p)

    def in_subfield(self, d: int) -> bool:
        return self.frobenius(d) == self


def _strip_zeros(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _mulmod(a: tuple, b: tuple, desc: FieldDesc) -> tuple:
    p, m = desc.p, desc.m
    if m == 1:
        return ((a[0] * b[0]) % p,)
    if m <= 16:
        prod = [0] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        mod = desc.modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k] % p
            if c:
                for t in range(m):
                    prod[k - m + t] -= c * mod[t]
        return tuple(x % p for x in prod[:m])
    return tuple(int(x) for x in K.polymulmod(a, b, desc.modulus, p))


def frobenius(x: FieldElem, e: int) -> FieldElem:
    """x^(p^e); the order of this map on F_{p^m} is m."""
    return x.frobenius(e)


def primitive_element(desc: FieldDesc) -> FieldElem:
    if "prim" not in desc._cache:
        q = desc.order
        if q == 2:
            desc._cache["prim"] = desc.one
        else:
            facs = prime_factors(q - 1)
            for code in range(1, q):
                g = desc.from_int(code)
                if all(not (g ** ((q - 1) // f)).is_one() for f in facs):
                    desc._cache["prim"] = g
                    break
    return desc._cache["prim"]


# ---------------------------------------------------------------------------
# embeddings


def _subfield_basis(dst: FieldDesc, d: int) -> np.ndarray:
    """Columns spanning the copy of F_{p^d} inside dst (kernel of Frob^d - 1)."""
    key = ("subfield", d)
    if key not in dst._cache:
        Q = dst.frobenius_matrix(d)
        A = (Q - np.eye(dst.m, dtype=np.int64)) % dst.p
        dst._cache[key] = K.nullspace(A, dst.p).T
    return dst._cache[key]


def _roots_in(poly_coeffs: Sequence[FieldElem], dst: FieldDesc, d: int) -> list[FieldElem]:
    basis = _subfield_basis(dst, d)
    if dst.p**d > 10**6:
        raise ValueError("subfield too large for root enumeration")
    roots = []
    for digits in product(range(dst.p), repeat=basis.shape[1]):
        v = (basis @ np.array(digits, dtype=np.int64)) % dst.p if len(digits) else np.zeros(dst.m, dtype=np.int64)
        x = dst.from_vector(v)
        acc = dst.zero
        for c in reversed(poly_coeffs):
            acc = acc * x + c
        if acc.is_zero():
            roots.append(x)
    return roots


def embedding_image(src: FieldDesc, dst: FieldDesc) -> FieldElem:
    """Image in dst of the generator T of src under the canonical embedding."""
    if src.p != dst.p or dst.m % src.m:
        raise ValueError(f"no embedding {src!r} -> {dst!r}")
    key = ("emb", src.m)
    if key in dst._cache:
        return dst._cache[key]
    if src.m == 1:
        img = dst.coerce(src.gen.c[0])
    elif src.m == dst.m:
        img = dst.gen
    else:
        poly = [dst.coerce(c) for c in src.modulus]
        roots = _roots_in(poly, dst, src.m)
        constraints = []
        for dd in range(2, src.m):
            if src.m % dd == 0:
                mid = make_field(src.p, dd)
                via = embedding_image(mid, src)
                direct = embedding_image(mid, dst)
                constraints.append((via, direct))
        ok = []
        for r in roots:
            if all(_eval_poly_at(v.c, r) == direct for v, direct in constraints):
                ok.append(r)
        if not ok:
            raise ArithmeticError(f"incompatible tower at {src!r} -> {dst!r}")
        img = min(ok, key=lambda r: r.to_int())
    dst._cache[key] = img
    return img


def _eval_poly_at(coeffs: Sequence[int], alpha: FieldElem) -> FieldElem:
    acc = alpha.desc.zero
    for c in reversed(coeffs):
        acc = acc * alpha + c
    return acc


def embed(x: FieldElem, dst: FieldDesc) -> FieldElem:
    """Canonical embedding of x into dst (dst.m must be a multiple of x.desc.m)."""
    if x.desc == dst:
        return x
    alpha = embedding_image(x.desc, dst)
    return _eval_poly_at(x.c, alpha)


def common_coerce(a: FieldElem, b: FieldElem):
    if a.desc.p != b.desc.p:
        raise ValueError("different characteristics")
    m = math.lcm(a.desc.m, b.desc.m)
    L = make_field(a.desc.p, m)
    return embed(a, L), embed(b, L)


def restrict(x: FieldElem, src: FieldDesc) -> FieldElem:
    """Inverse of the canonical embedding src -> x.desc on its image."""
    dst = x.desc
    if dst == src:
        return x
    key = ("restrict", src.m)
    if key not in dst._cache:
        alpha = embedding_image(src, dst)
        cols = []
        pw = dst.one
        for _ in range(src.m):
            cols.append(pw.to_vector())
            pw = pw * alpha
        dst._cache[key] = np.array(cols, dtype=np.int64).T
    B = dst._cache[key]
    sol = K.solve_affine(B, x.to_vector(), dst.p)
    if sol is None:
        raise ValueError(f"{x!r} does not lie in the image of {src!r}")
    return src.from_vector(sol)


# ---------------------------------------------------------------------------
# semilinear equations x^(p^e) = A x


@dataclass
class SemilinearSolution:
    """Solutions of x^(p^e) = A x over a splitting field.

    ``basis`` holds d solution vectors, independent over the splitting
    field, hence a basis of the solution space over F_{p^e}.
    """

    field: FieldDesc
    e: int
    basis: list
    fp_dimension: int
    method: str

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def count(self) -> int:
        return self.field.p**self.fp_dimension


def _check_square(A):
    d = len(A)
    if d == 0 or any(len(row) != d for row in A):
        raise ValueError("matrix must be square and non-empty")
    return d


def _base_field(A) -> FieldDesc:
    desc = A[0][0].desc
    for row in A:
        for a in row:
            if a.desc.m > desc.m or desc.m % a.desc.m:
                desc = make_field(desc.p, math.lcm(desc.m, a.desc.m))
    return desc


def _frob_mat(A, e):
    return [[a.frobenius(e) for a in row] for row in A]


def splitting_degree(A, e: int) -> int:
    """Degree over F_p of the least field containing every solution of x^(p^e) = A x."""
    base = _base_field(A)
    A = [[base.coerce(a) for a in row] for row in A]
    ell = math.lcm(e, base.m)
    k = ell // e
    Aell = A
    for _ in range(k - 1):
        Aell = linalg.mat_mul(_frob_mat(Aell, e), A)
    return ell * _order_over_fp(Aell, base, base.p**ell)


def _order_over_fp(A, base: FieldDesc, Q: int) -> int:
    """Order of A in GL_d(F_Q), computed on its F_p-linear block form."""
    d, p = len(A), base.p
    B = np.block([[base.mul_matrix(a) for a in row] for row in A]) % p
    eye = np.eye(B.shape[0], dtype=np.int64)

    def power(n):
        R, X = eye, B
        while n:
            if n & 1:
                R = (R @ X) % p
            X = (X @ X) % p
            n >>= 1
        return R

    primes = {p} if d > 1 else set()
    for i in range(1, d + 1):
        fac = _prime_factors(Q**i - 1)
        if fac is None:
            break
        primes |= fac
    else:
        n = math.prod(Q**d - Q**i for i in range(d))
        for ell in sorted(primes):
            while n % ell == 0 and np.array_equal(power(n // ell), eye):
                n //= ell
        return n
    X, n = B, 1
    while not np.array_equal(X, eye):
        X, n = (X @ B) % p, n + 1
    return n


@lru_cache(maxsize=None)
def _prime_factors(n: int, bound: int = 1 << 20):
    """Prime factors of n by trial division, or None past the bound."""
    out = set()
    f = 2
    while f * f <= n:
        if f > bound:
            return None
        if n % f == 0:
            out.add(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.add(n)
    return frozenset(out)


def _check_etale(A):
    try:
        linalg.mat_inv(A)
    except linalg.SingularMatrixError:
        raise NotEtaleError("not étale: Frobenius matrix is singular") from None


def semilinear_operator(A, e: int, L: FieldDesc) -> np.ndarray:
    """F_p-matrix of x -> x^(p^e) - A x on L^d (coordinates blockwise)."""
    d = len(A)
    Q = L.frobenius_matrix(e)
    blocks = []
    for i in range(d):
        row = []
        for j in range(d):
            Mij = L.mul_matrix(L.coerce(A[i][j]))
            blk = (Q if i == j else 0) - Mij
            row.append(np.asarray(blk, dtype=np.int64) % L.p)
        blocks.append(row)
    return np.block(blocks) % L.p


def _vec_to_elems(v, L, d):
    return [L.from_vector(v[i * L.m:(i + 1) * L.m]) for i in range(d)]


def _greedy_independent(vectors, d, L):
    if d == 1:
        return [next(iter(v for v in vectors if not v[0].is_zero()))][:1]
    chosen = []
    for v in vectors:
        trial = chosen + [v]
        if linalg.rank(linalg.transpose(trial)) == len(trial):
            chosen = trial
            if len(chosen) == d:
                break
    return chosen


def solve_semilinear_linear(A, e: int, L: FieldDesc | None = None) -> SemilinearSolution:
    """Linearization route: kernel of x -> x^(p^e) - A x over F_p."""
    d = _check_square(A)
    base = _base_field(A)
    A = [[base.coerce(a) for a in row] for row in A]
    _check_etale(A)
    if L is None:
        L = make_field(base.p, splitting_degree(A, e))
    ker = K.nullspace(semilinear_operator(A, e, L), L.p)
    vecs = [_vec_to_elems(v, L, d) for v in ker]
    basis = _greedy_independent(vecs, d, L)
    return SemilinearSolution(L, e, basis, int(ker.shape[0]), "linear")


def brute_force_solutions(A, e: int, L: FieldDesc) -> list[list[FieldElem]]:
    """Every x in L^d with x^(p^e) = A x, in code order."""
    d = _check_square(A)
    log, exp, digits, frob1 = L.tables()
    frob = np.arange(L.order, dtype=np.int64)
    for _ in range(e % L.m):
        frob = frob1[frob]
    Acodes = np.array([[L.coerce(a).to_int() for a in row] for row in A], dtype=np.int64)
    codes = K.solution_codes(Acodes, frob, log, exp, digits, L.p, L.order, d)
    return [[L.from_int(int(c)) for c in row] for row in codes]


def brute_force_count(A, e: int, L: FieldDesc) -> int:
    """Table-driven brute-force count of solutions in L^d (hot kernel)."""
    d = _check_square(A)
    log, exp, digits, _ = L.tables()
    frob = np.array([L.from_int(c).frobenius(e).to_int() for c in range(L.order)], dtype=np.int64)
    Acodes = np.array([[L.coerce(a).to_int() for a in row] for row in A], dtype=np.int64)
    return K.count_solutions(Acodes, frob, log, exp, digits, L.p, L.order, d)


def _dot(row, x):
    acc = row[0] * x[0]
    for a, b in zip(row[1:], x[1:]):
        acc = acc + a * b
    return acc


def solve_semilinear_const(A, e: int, method: str = "auto") -> SemilinearSolution:
    """Solutions of x^(p^e) = A x for invertible A over a finite field.

    The result carries d vectors that are linearly independent over the
    splitting field; they form a basis over the fixed field F_{p^e}.
    """
    if e < 1:
        raise ValueError("Frobenius iterate must be >= 1")
    d = _check_square(A)
    base = _base_field(A)
    A = [[base.coerce(a) for a in row] for row in A]
    _check_etale(A)
    L = make_field(base.p, splitting_degree(A, e))
    if method == "auto":
        method = "brute" if L.order**d <= BRUTE_FORCE_LIMIT else "linear"
    if method == "linear":
        return solve_semilinear_linear(A, e, L)
    if method != "brute":
        raise ValueError(f"unknown method {method!r}")
    sols = brute_force_solutions(A, e, L)
    count = len(sols)
    fp_dim = round(math.log(count, L.p))
    basis = _greedy_independent(sols[1:], d, L)
    return SemilinearSolution(L, e, basis, fp_dim, "brute")


def solve_semilinear_affine(A, c, e: int, L: FieldDesc):
    """One y in L^d with y^(p^e) - A y = c, or None when L is too small."""
    d = len(A)
    op = semilinear_operator(A, e, L)
    rhs = np.concatenate([L.coerce(ci).to_vector() for ci in c])
    sol = K.solve_affine(op, rhs, L.p)
    if sol is None:
        return None
    return _vec_to_elems(sol, L, d)


def check_solutions(A, e: int, basis) -> bool:
    """Each vector satisfies x^(p^e) = A x exactly."""
    for x in basis:
        L = x[0].desc
        AA = [[L.coerce(a) for a in row] for row in A]
        if any(xi.frobenius(e) != _dot(AA[i], x) for i, xi in enumerate(x)):
            return False
    return True


def span_over_fixed_field(basis, e: int) -> list[list[FieldElem]]:
    """All F_{p^e}-combinations of the basis vectors (small cases only)."""
    L = basis[0][0].desc
    sub = make_field(L.p, e) if L.m % e == 0 else None
    if sub is None:
        raise ValueError("fixed field not inside the splitting field")
    scalars = [embed(s, L) for s in sub.elements()]
    out = []
    for combo in product(scalars, repeat=len(basis)):
        v = [L.zero] * len(basis[0])
        for s, b in zip(combo, basis):
            v = [vi + s * bi for vi, bi in zip(v, b)]
        out.append(v)
    return out
