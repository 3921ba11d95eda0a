"""Hot integer kernels: truncated polynomial products, reduction modulo a monic
polynomial, row reduction over F_p and brute-force semilinear solution counts.

Every kernel has a numba ``@njit`` body and a pure-numpy twin with the same
signature.  ``LTPHI_NUMBA=0`` in the environment selects the numpy path; the
numba path is used otherwise when numba imports.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def numba_requested() -> bool:
    return os.environ.get("LTPHI_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = _HAVE_NUMBA and numba_requested()


# ---------------------------------------------------------------------------
# numpy implementations


def _np_polymul(a, b, n):
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    bound = (int(n) - 1) ** 2 * min(len(a), len(b))
    if bound < 2**62:
        return np.convolve(a, b) % n
    out = np.convolve(a.astype(object), b.astype(object)) % n
    return out.astype(np.int64)


def _np_polyrem(a, mod, n):
    a = np.array(a, dtype=np.int64) % n
    m = len(mod) - 1
    if len(a) <= m:
        return a
    lead = np.array(mod[:m], dtype=np.int64)
    big = (int(n) - 1) ** 2 < 2**62
    for k in range(len(a) - 1, m - 1, -1):
        c = a[k]
        if c:
            if big:
                a[k - m:k] = (a[k - m:k] - c * lead) % n
            else:
                a[k - m:k] = np.array(
                    [(int(x) - int(c) * int(y)) % n for x, y in zip(a[k - m:k], lead)], dtype=np.int64
                )
            a[k] = 0
    return a[:m].copy()


def _np_rref(mat, p):
    m = np.array(mat, dtype=np.int64) % p
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            m[nzr, c:] = (m[nzr, c:] - np.outer(col[nzr], m[r, c:])) % p
        pivots.append(c)
        r += 1
    return m, np.array(pivots, dtype=np.int64)


def _np_polygcd(a, b, p):
    a = [int(x) % p for x in a]
    b = [int(x) % p for x in b]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(a), trim(b)
    while b:
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b):
            c = (a[-1] * inv) % p
            k = len(a) - len(b)
            for t in range(len(b)):
                a[k + t] = (a[k + t] - c * b[t]) % p
            trim(a)
            if not a:
                break
        a, b = b, a
    return np.array(a, dtype=np.int64)


def _np_solution_mask(A, frob, log, exp, digits, p, q, d):
    """Mask over codes 0..q^d-1 (component j is digit j base q) of solutions."""
    total = q**d
    idx = np.arange(total, dtype=np.int64)
    comps = []
    for _ in range(d):
        comps.append(idx % q)
        idx = idx // q
    ok = np.ones(total, dtype=bool)
    weights = p ** np.arange(digits.shape[1], dtype=np.int64)
    for i in range(d):
        acc = np.zeros((total, digits.shape[1]), dtype=np.int64)
        for j in range(d):
            a = A[i, j]
            if a == 0:
                continue
            x = comps[j]
            prod = np.where(x == 0, 0, exp[(log[a] + log[np.maximum(x, 1)]) % (q - 1)])
            acc += digits[prod]
        rhs = (acc % p) @ weights
        ok &= frob[comps[i]] == rhs
    return ok, comps


def _np_count_solutions(A, frob, log, exp, digits, p, q, d):
    """Count x in L^d with frob(x_i) = sum_j A_ij x_j; codes index L."""
    return int(_np_solution_mask(A, frob, log, exp, digits, p, q, d)[0].sum())


def solution_codes(A, frob, log, exp, digits, p: int, q: int, d: int) -> np.ndarray:
    """Solutions as an (n, d) array of element codes, lexicographic in the components."""
    ok, comps = _np_solution_mask(A, frob, log, exp, digits, p, q, d)
    sols = np.stack([c[ok] for c in comps], axis=1)
    order = np.lexsort(sols.T[::-1])
    return sols[order]


# ---------------------------------------------------------------------------
# numba implementations

if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _nb_polymul(a, b, n):
        la = len(a)
        lb = len(b)
        if la == 0 or lb == 0:
            return np.zeros(0, dtype=np.int64)
        out = np.zeros(la + lb - 1, dtype=np.int64)
        bm = b % n
        lazy = (n - 1) * (n - 1) * min(la, lb) < 4611686018427387904
        for i in range(la):
            ai = a[i] % n
            if ai == 0:
                continue
            if lazy:
                for j in range(lb):
                    out[i + j] += ai * bm[j]
            else:
                for j in range(lb):
                    out[i + j] = (out[i + j] + ai * bm[j]) % n
        for k in range(la + lb - 1):
            out[k] %= n
        return out

    @numba.njit(cache=True)
    def _nb_polyrem(a, mod, n):
        out = a.copy() % n
        m = len(mod) - 1
        if len(out) <= m:
            return out
        modm = mod % n
        # deferred reduction: each entry changes by < n^2 per step
        lazy = (n - 1) * (n - 1) * len(out) < 4611686018427387904
        for k in range(len(out) - 1, m - 1, -1):
            c = out[k] % n
            if c != 0:
                if lazy:
                    for t in range(m):
                        out[k - m + t] -= c * modm[t]
                else:
                    for t in range(m):
                        out[k - m + t] = (out[k - m + t] - c * modm[t]) % n
            out[k] = 0
        res = out[:m].copy()
        for t in range(m):
            res[t] %= n
        return res

    @numba.njit(cache=True)
    def _nb_rref(mat, p):
        m = mat.copy() % p
        rows, cols = m.shape
        pivots = np.zeros(min(rows, cols), dtype=np.int64)
        npiv = 0
        r = 0
        for c in range(cols):
            if r >= rows:
                break
            piv = -1
            for i in range(r, rows):
                if m[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for t in range(cols):
                    tmp = m[r, t]
                    m[r, t] = m[piv, t]
                    m[piv, t] = tmp
            # modular inverse by exponentiation
            base = m[r, c]
            e = p - 2
            inv = 1
            while e > 0:
                if e & 1:
                    inv = (inv * base) % p
                base = (base * base) % p
                e >>= 1
            for t in range(cols):
                m[r, t] = (m[r, t] * inv) % p
            # rows >= r vanish left of c, so the pivot row does too
            for i in range(rows):
                if i != r and m[i, c] != 0:
                    f = p - m[i, c]
                    for t in range(c, cols):
                        if m[r, t] != 0:
                            m[i, t] = (m[i, t] + f * m[r, t]) % p
            pivots[npiv] = c
            npiv += 1
            r += 1
        return m, pivots[:npiv].copy()

    @numba.njit(cache=True)
    def _nb_polygcd(a, b, p):
        x = a.copy() % p
        y = b.copy() % p
        dx = len(x) - 1
        while dx >= 0 and x[dx] == 0:
            dx -= 1
        dy = len(y) - 1
        while dy >= 0 and y[dy] == 0:
            dy -= 1
        while dy >= 0:
            base = y[dy]
            e = p - 2
            inv = 1
            while e > 0:
                if e & 1:
                    inv = (inv * base) % p
                base = (base * base) % p
                e >>= 1
            while dx >= dy:
                c = (x[dx] * inv) % p
                k = dx - dy
                for t in range(dy + 1):
                    x[k + t] = (x[k + t] - c * y[t]) % p
                while dx >= 0 and x[dx] == 0:
                    dx -= 1
            tmp = x
            x = y
            y = tmp
            tmpd = dx
            dx = dy
            dy = tmpd
        return x[: dx + 1].copy()

    @numba.njit(cache=True)
    def _nb_count_solutions(A, frob, log, exp, digits, p, q, d):
        total = 1
        for _ in range(d):
            total *= q
        ndig = digits.shape[1]
        comps = np.zeros(d, dtype=np.int64)
        acc = np.zeros(ndig, dtype=np.int64)
        count = 0
        for code in range(total):
            c = code
            for j in range(d):
                comps[j] = c % q
                c //= q
            good = True
            for i in range(d):
                for t in range(ndig):
                    acc[t] = 0
                for j in range(d):
                    a = A[i, j]
                    x = comps[j]
                    if a == 0 or x == 0:
                        continue
                    prod = exp[(log[a] + log[x]) % (q - 1)]
                    for t in range(ndig):
                        acc[t] += digits[prod, t]
                rhs = 0
                w = 1
                for t in range(ndig):
                    rhs += (acc[t] % p) * w
                    w *= p
                if frob[comps[i]] != rhs:
                    good = False
                    break
            if good:
                count += 1
        return count


def _np_polyinvmod(a, mod, p):
    r0 = [int(x) % p for x in mod]
    r1 = [int(x) % p for x in a]
    s0, s1 = [0], [1]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    r0, r1 = trim(r0), trim(r1)
    if not r1:
        raise ZeroDivisionError("inverse of zero")
    while len(r1) > 1:
        # r0 = qt * r1 + rem
        rem = list(r0)
        inv = pow(r1[-1], p - 2, p)
        qt = [0] * (len(rem) - len(r1) + 1)
        while len(rem) >= len(r1):
            c = (rem[-1] * inv) % p
            k = len(rem) - len(r1)
            qt[k] = c
            for t in range(len(r1)):
                rem[k + t] = (rem[k + t] - c * r1[t]) % p
            trim(rem)
            if not rem:
                break
        prod = [0] * (len(qt) + len(s1) - 1)
        for i, x in enumerate(qt):
            if x:
                for j, y in enumerate(s1):
                    prod[i + j] += x * y
        ns = [0] * max(len(s0), len(prod))
        for i, x in enumerate(s0):
            ns[i] += x
        for i, x in enumerate(prod):
            ns[i] -= x
        ns = trim([x % p for x in ns])
        r0, r1, s0, s1 = r1, rem, s1, ns
        if not r1:
            raise ZeroDivisionError("element is not invertible modulo the polynomial")
    c = pow(r1[0], p - 2, p)
    out = np.zeros(len(mod) - 1, dtype=np.int64)
    for i, x in enumerate(s1):
        out[i] = (x * c) % p
    return out


def polygcd(a, b, p: int) -> np.ndarray:
    """A gcd (not normalized) of two polynomials over F_p."""
    a, b = _as_i64(a), _as_i64(b)
    if USE_NUMBA:
        return _nb_polygcd(a, b, np.int64(p))
    return _np_polygcd(a, b, p)


def polyinvmod(a, mod, p: int) -> np.ndarray:
    """Inverse of ``a`` modulo ``mod`` over F_p (extended Euclid)."""
    return _np_polyinvmod(np.asarray(a), np.asarray(mod), p)


def _as_i64(x):
    return np.ascontiguousarray(np.asarray(x, dtype=np.int64))


def polymul(a, b, n: int) -> np.ndarray:
    """Product of coefficient arrays (lowest degree first) with entries mod n."""
    a, b = _as_i64(a), _as_i64(b)
    if USE_NUMBA and (int(n) - 1) ** 2 < 2**62:
        return _nb_polymul(a, b, np.int64(n))
    return _np_polymul(a, b, n)


def polyrem(a, mod, n: int) -> np.ndarray:
    """Remainder of ``a`` modulo the monic polynomial ``mod``; length deg(mod)."""
    a, mod = _as_i64(a), _as_i64(mod)
    m = len(mod) - 1
    if len(a) < m:
        out = np.zeros(m, dtype=np.int64)
        out[: len(a)] = a % n
        return out
    if USE_NUMBA and (int(n) - 1) ** 2 < 2**62:
        return _nb_polyrem(a, mod, np.int64(n))
    return _np_polyrem(a, mod, n)


def polymulmod(a, b, mod, n: int) -> np.ndarray:
    return polyrem(polymul(a, b, n), mod, n)


def rref(mat, p: int):
    """Reduced row echelon form over F_p; returns (matrix, pivot columns)."""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.size == 0:
        return mat.copy(), np.zeros(0, dtype=np.int64)
    if USE_NUMBA:
        return _nb_rref(np.ascontiguousarray(mat), np.int64(p))
    return _np_rref(mat, p)


def nullspace(mat, p: int) -> np.ndarray:
    """Basis (as rows) of the right kernel of ``mat`` over F_p."""
    mat = np.asarray(mat, dtype=np.int64)
    rows, cols = mat.shape
    r, piv = rref(mat, p)
    piv = [int(c) for c in piv]
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = (-r[i, fc]) % p
    return basis


def solve_affine(mat, rhs, p: int):
    """One solution of mat @ x = rhs over F_p, or None."""
    mat = np.asarray(mat, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([mat, rhs])
    r, piv = rref(aug, p)
    cols = mat.shape[1]
    piv = [int(c) for c in piv]
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, cols]
    return x


def count_solutions(A, frob, log, exp, digits, p: int, q: int, d: int) -> int:
    """Brute-force count of x in L^d with frob(x) = A x, L given by code tables."""
    A = _as_i64(A)
    if USE_NUMBA:
        return int(
            _nb_count_solutions(A, _as_i64(frob), _as_i64(log), _as_i64(exp), _as_i64(digits), p, q, d)
        )
    return _np_count_solutions(A, np.asarray(frob), np.asarray(log), np.asarray(exp), np.asarray(digits), p, q, d)


def polypowmod(a, e: int, mod, n: int) -> np.ndarray:
    """a^e modulo the monic polynomial ``mod`` with entries mod n (e may exceed int64)."""
    m = len(mod) - 1
    result = np.zeros(m, dtype=np.int64)
    result[0] = 1 % n
    base = polyrem(_as_i64(a), mod, n)
    mod = _as_i64(mod)
    while e:
        if e & 1:
            result = polymulmod(result, base, mod, n)
        e >>= 1
        if e:
            base = polymulmod(base, base, mod, n)
    return result
