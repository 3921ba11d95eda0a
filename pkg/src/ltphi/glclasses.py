"""Conjugacy-class representatives of GL_d(F_q) from primary rational canonical forms.

A class is a choice of partition lambda_phi for each monic irreducible phi != t
with sum deg(phi) |lambda_phi| = d; its representative is the block sum of
companion matrices of phi^k for the parts k.  Completeness is certified by
the class equation: the class sizes |GL_d| / |centralizer| must add up to
|GL_d|.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import fields as ff


def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def _conjugate(lam):
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0])) if lam else ()


def gl_order(q: int, d: int) -> int:
    out = 1
    for k in range(d):
        out *= q**d - q**k
    return out


def _poly_mul(a, b, F):
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return tuple(out)


def _key(poly):
    return tuple(c.to_int() for c in poly)


@lru_cache(maxsize=None)
def irreducibles(p: int, m: int, k: int) -> tuple:
    """Monic irreducible polynomials of degree k over F_{p^m} (lowest coefficient first)."""
    F = ff.make_field(p, m)
    elems = list(F.elements())
    monic = [tuple(c) + (F.one,) for c in product(elems, repeat=k)]
    reducible = set()
    for j in range(1, k // 2 + 1):
        for a in irreducibles(p, m, j):
            for b in _monic_polys(F, elems, k - j):
                reducible.add(_key(_poly_mul(a, b, F)))
    return tuple(f for f in monic if _key(f) not in reducible)


def _monic_polys(F, elems, k):
    for c in product(elems, repeat=k):
        yield tuple(c) + (F.one,)


def companion(poly, F):
    """Companion matrix of a monic polynomial (columns shift, last column -coeffs)."""
    n = len(poly) - 1
    M = [[F.zero] * n for _ in range(n)]
    for i in range(1, n):
        M[i][i - 1] = F.one
    for i in range(n):
        M[i][n - 1] = -poly[i]
    return M


def _block_sum(blocks, F):
    d = sum(len(b) for b in blocks)
    M = [[F.zero] * d for _ in range(d)]
    off = 0
    for b in blocks:
        n = len(b)
        for i in range(n):
            for j in range(n):
                M[off + i][off + j] = b[i][j]
        off += n
    return M


@dataclass
class ClassRep:
    matrix: list
    data: tuple  # ((poly, partition), ...)
    centralizer: int


def _centralizer(data, q) -> int:
    out = Fraction(1)
    for poly, lam in data:
        Q = q ** (len(poly) - 1)
        conj = _conjugate(lam)
        out *= Fraction(Q) ** sum(c * c for c in conj)
        for part in set(lam):
            mult = lam.count(part)
            for k in range(1, mult + 1):
                out *= 1 - Fraction(1, Q**k)
    assert out.denominator == 1
    return int(out)


def class_representatives(p: int, m: int, d: int) -> list[ClassRep]:
    F = ff.make_field(p, m)
    q = p**m
    polys = []
    for k in range(1, d + 1):
        for f in irreducibles(p, m, k):
            if k == 1 and f[0].is_zero():
                continue  # t itself: not invertible
            polys.append(f)
    out = []

    def rec(start, remaining, chosen):
        if remaining == 0:
            blocks = []
            for poly, lam in chosen:
                for part in lam:
                    pw = (F.one,)
                    for _ in range(part):
                        pw = _poly_mul(pw, poly, F)
                    blocks.append(companion(pw, F))
            data = tuple(chosen)
            out.append(ClassRep(_block_sum(blocks, F), data, _centralizer(data, q)))
            return
        for idx in range(start, len(polys)):
            deg = len(polys[idx]) - 1
            for size in range(1, remaining // deg + 1):
                for lam in partitions(size):
                    rec(idx + 1, remaining - deg * size, chosen + [(polys[idx], lam)])

    rec(0, d, [])
    return out


def class_equation_holds(reps: list[ClassRep], q: int, d: int) -> bool:
    G = gl_order(q, d)
    return sum(Fraction(G, r.centralizer) for r in reps) == G


def dimension_law_cases(limit: int = 81):
    """(p, m, d) with q = p^m and q^d <= limit."""
    cases = []
    for q in range(2, limit + 1):
        pm = ff.prime_power(q)
        if pm is None:
            continue
        d = 1
        while q**d <= limit:
            cases.append((pm[0], pm[1], d))
            d += 1
    return cases
