"""Doubly indexed towers E_{pi,varpi,i} and A_{pi,varpi,i} at finite level.

An element at index i is a bivariate Laurent polynomial in x (the pi side)
and y (the varpi side) with constants in a finite level k' (characteristic p)
or in W(k') mod varpi^M (characteristic 0).  The tensor product is twisted:
lambda (x) 1 = 1 (x) sigma^i(lambda), so constants are always stored on the
y side.  In that normal form

    phi_pi:    c x^a y^b  ->  c [pi^s](x)^a y^b          (index i -> i - 1)
    phi_varpi: c x^a y^b  ->  sigma(c) x^a [varpi](y)^b  (index i -> i + 1)

and their composite in either order is the total Frobenius.  x and y are
treated as independent variables; the two norm fields are algebraically
independent, so no relation between them is lost.

Precision is a box: the coefficient of x^a y^b is known for a < nx and
b < ny.  Elements of the localized ring B_{pi,varpi,i} carry one
denominator exponent t (the element is body / varpi^t).

K is taken unramified over F of degree s with varpi = p * (unit); then the
constants of both sides are W(k') and the twisted tensor product over W(k')
is modelled exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import charp
from . import fields as ff
from . import linalg
from . import localnum as ln
from .lift0 import embed_local, functor_V_lift
from .ltgroup import LTData, lt_mul_work, make_lt
from .series import INF, PrecisionError, TruncSeries


class NotCompatibleError(ValueError):
    pass


class NoLimitError(ArithmeticError):
    def __init__(self, digit: int, detail: str = ""):
        self.digit = digit
        super().__init__(f"no limit at digit {digit}" + (f": {detail}" if detail else ""))


class UnsupportedModeError(ValueError):
    pass


class WindowTooSmallError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# tower data


@dataclass
class TowerDesc:
    """Shared data of the system: constants, the two Frobenius series and sigma."""

    char: str  # "p" or "0"
    p: int
    r: int
    s: int
    level: int  # k' = F_{p^level}
    consts: object  # FieldDesc or LocalRingDesc
    g_pi: TruncSeries  # [pi^s](x) (char 0) or x^q' (char p)
    g_varpi: TruncSeries  # [varpi](y) or y^q'
    lt_pi: LTData
    lt_varpi: LTData
    M: int
    nx: int
    ny: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def e(self) -> int:
        return self.r * self.s

    @property
    def qprime(self) -> int:
        return self.p**self.e

    @property
    def residue(self) -> ff.FieldDesc:
        return self.consts if self.char == "p" else self.consts.residue

    def sigma(self, c, k: int = 1):
        """sigma^k = (p^{rs}-power)^k on constants; sigma has order level / rs."""
        k %= self.level // self.e
        return c.frobenius(self.e * k) if k else c

    def zero(self, i: int) -> "TwoTowerElem":
        return TwoTowerElem(self, i, {}, self.nx, self.ny)

    def one(self, i: int) -> "TwoTowerElem":
        return TwoTowerElem(self, i, {(0, 0): self.consts.one}, INF, INF)

    def x(self, i: int) -> "TwoTowerElem":
        return TwoTowerElem(self, i, {(1, 0): self.consts.one}, INF, INF)

    def y(self, i: int) -> "TwoTowerElem":
        return TwoTowerElem(self, i, {(0, 1): self.consts.one}, INF, INF)

    def constant(self, c, i: int, side: str = "varpi") -> "TwoTowerElem":
        """A constant coming from the given side, in normal form at index i."""
        c = self.consts.coerce(c)
        if side == "pi":
            c = self.sigma(c, i)
        return TwoTowerElem(self, i, {(0, 0): c}, INF, INF)

    def random(self, rng, i: int, lo: int = -1, hi: int = 3) -> "TwoTowerElem":
        body = {}
        for a in range(lo, hi):
            for b in range(lo, hi):
                body[(a, b)] = self.consts.random(rng)
        return TwoTowerElem(self, i, body, self.nx, self.ny)

    def gamma_series(self, side: str, c, degree: int) -> TruncSeries:
        """[c](x) on the pi side or [c](y) on the varpi side, over the constants."""
        lt = self.lt_pi if side == "pi" else self.lt_varpi
        key = ("gamma", side, tuple(c.c) if hasattr(c, "c") else c, degree)
        if key not in self._cache:
            cc = lt.work.coerce(c)
            if not cc.is_unit():
                raise ValueError("gamma needs a unit")
            s = lt_mul_work(cc, lt, min(degree, lt.N))
            self._cache[key] = _over_consts(self, s, "x" if side == "pi" else "y")
        return self._cache[key]


def _over_consts(desc: TowerDesc, s: TruncSeries, var: str) -> TruncSeries:
    if desc.char == "p":
        coeffs = {n: desc.consts.coerce(ff.embed(c.residue(), desc.consts)) for n, c in s.coeffs.items() if c.prec >= 1}
    else:
        coeffs = {n: embed_local(c.with_prec(min(c.prec, desc.M)), desc.consts) for n, c in s.coeffs.items()}
    return TruncSeries(desc.consts, coeffs, s.prec, var)


def _iterate(f: TruncSeries, k: int, var: str) -> TruncSeries:
    out = TruncSeries.monomial(f.ring, 1, var=var)
    for _ in range(k):
        out = f.compose(out)
    return out


def make_tower(p: int, r: int = 1, s: int = 1, level: int | None = None, char: str = "p", M: int = 3,
               nx: int = 8, ny: int = 8, f: str = "standard", varpi=None, lt_degree: int = 12) -> TowerDesc:
    """The system for F = W(F_{p^r})[1/p] with pi = p and K/F unramified of degree s.

    varpi defaults to -p.  ``level`` is the degree of k' over F_p (a multiple of rs).
    """
    e = r * s
    level = e if level is None else level
    if level % e:
        raise ValueError("the constants level must be a multiple of rs")
    Mlt = M if char == "0" else 1
    lt_pi = make_lt(p, r, f, lt_degree, Mlt)
    varpi = -p if varpi is None else varpi
    lt_varpi = make_lt(p, e, "standard", lt_degree, Mlt, pi=varpi)
    if char == "p":
        consts = ff.make_field(p, level)
        q = p**e
        g_pi = TruncSeries.monomial(consts, q, var="x")
        g_varpi = TruncSeries.monomial(consts, q, var="y")
        desc = TowerDesc(char, p, r, s, level, consts, g_pi, g_varpi, lt_pi, lt_varpi, 1, nx, ny)
        return desc
    if char != "0":
        raise ValueError("char must be 'p' or '0'")
    consts = ln.unramified(p, level, M)
    if not lt_pi.f.is_polynomial():
        raise UnsupportedModeError("unsupported mode: the pi-side Frobenius series must be a polynomial")
    desc = TowerDesc(char, p, r, s, level, consts, None, None, lt_pi, lt_varpi, M, nx, ny)
    desc.g_pi = _over_consts(desc, _iterate(lt_pi.f, s, "x"), "x")
    desc.g_varpi = _over_consts(desc, lt_varpi.f, "y")
    desc.g_pi.var, desc.g_varpi.var = "x", "y"
    return desc


# ---------------------------------------------------------------------------
# elements


class TwoTowerElem:
    """body / varpi^t at tower index i; body maps (a, b) to the constant of x^a y^b."""

    __slots__ = ("desc", "i", "body", "nx", "ny", "t")

    def __init__(self, desc: TowerDesc, i: int, body: dict, nx=INF, ny=INF, t: int = 0):
        self.desc = desc
        self.i = i
        self.nx = nx
        self.ny = ny
        self.t = t
        clean = {}
        for (a, b), c in body.items():
            if a < nx and b < ny:
                c = desc.consts.coerce(c)
                if not c.is_zero():
                    clean[(a, b)] = c
        self.body = dict(sorted(clean.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0])))

    def _new(self, body, nx, ny, i=None, t=None):
        return TwoTowerElem(self.desc, self.i if i is None else i, body, nx, ny, self.t if t is None else t)

    @property
    def lo_x(self):
        return min((a for a, _ in self.body), default=self.nx)

    @property
    def lo_y(self):
        return min((b for _, b in self.body), default=self.ny)

    def is_zero(self) -> bool:
        return not self.body

    def _check(self, other):
        if other.desc is not self.desc:
            raise ValueError("elements of different towers")
        if other.i != self.i:
            raise ValueError(f"index mismatch: {self.i} vs {other.i}")

    def _aligned(self, other):
        """Both operands over the same denominator varpi^t."""
        if self.t == other.t:
            return self, other
        t = max(self.t, other.t)
        return self.scale_denominator(t), other.scale_denominator(t)

    def scale_denominator(self, t: int) -> "TwoTowerElem":
        if t < self.t:
            raise ValueError("cannot lower the denominator exponent this way")
        k = t - self.t
        if k == 0:
            return self
        u = self.desc.consts.uniformizer**k
        return self._new({key: c * u for key, c in self.body.items()}, self.nx, self.ny, t=t)

    def __add__(self, other):
        if not isinstance(other, TwoTowerElem):
            other = self.desc.constant(other, self.i)
        self._check(other)
        a, b = self._aligned(other)
        out = dict(a.body)
        for k, c in b.body.items():
            out[k] = out[k] + c if k in out else c
        return a._new(out, min(a.nx, b.nx), min(a.ny, b.ny))

    def __neg__(self):
        return self._new({k: -c for k, c in self.body.items()}, self.nx, self.ny)

    def __sub__(self, other):
        if not isinstance(other, TwoTowerElem):
            other = self.desc.constant(other, self.i)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TwoTowerElem):
            c = self.desc.consts.coerce(other)
            return self._new({k: v * c for k, v in self.body.items()}, self.nx, self.ny)
        self._check(other)
        nx = min(self.nx + other.lo_x, other.nx + self.lo_x)
        ny = min(self.ny + other.lo_y, other.ny + self.lo_y)
        out: dict = {}
        for (a1, b1), c1 in self.body.items():
            for (a2, b2), c2 in other.body.items():
                k = (a1 + a2, b1 + b2)
                if k[0] >= nx or k[1] >= ny:
                    continue
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        return TwoTowerElem(self.desc, self.i, out, nx, ny, self.t + other.t)

    __rmul__ = __mul__

    def equal_to_prec(self, other: "TwoTowerElem") -> bool:
        self._check(other)
        a, b = self._aligned(other)
        nx, ny = min(a.nx, b.nx), min(a.ny, b.ny)
        for k in set(a.body) | set(b.body):
            if k[0] < nx and k[1] < ny:
                d = a.body.get(k, self.desc.consts.zero) - b.body.get(k, self.desc.consts.zero)
                if not d.is_zero():
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, TwoTowerElem) and self.i == other.i and self.equal_to_prec(other)

    __hash__ = None

    def map_constants(self, fn) -> "TwoTowerElem":
        return self._new({k: fn(c) for k, c in self.body.items()}, self.nx, self.ny)

    # -- slices
    def x_slices(self) -> dict:
        """b -> series in x (coefficient of y^b)."""
        out: dict = {}
        for (a, b), c in self.body.items():
            out.setdefault(b, {})[a] = c
        return {b: TruncSeries(self.desc.consts, d, self.nx, "x") for b, d in out.items()}

    def y_slices(self) -> dict:
        out: dict = {}
        for (a, b), c in self.body.items():
            out.setdefault(a, {})[b] = c
        return {a: TruncSeries(self.desc.consts, d, self.ny, "y") for a, d in out.items()}

    def residue(self) -> "TwoTowerElem":
        """Reduction mod varpi of the body (characteristic 0 only)."""
        if self.desc.char != "0":
            raise ValueError("residue is only defined in characteristic 0")
        pdesc = residue_tower(self.desc)
        body = {k: pdesc.consts.coerce(c.residue()) for k, c in self.body.items() if c.prec >= 1}
        return TwoTowerElem(pdesc, self.i, body, self.nx, self.ny)

    def text(self) -> str:
        terms = []
        for (a, b), c in self.body.items():
            factors = []
            if a:
                factors.append("x" if a == 1 else f"x^{a}")
            if b:
                factors.append("y" if b == 1 else f"y^{b}")
            cs = c.short()
            if factors:
                terms.append("*".join(factors) + ("" if self.desc.consts.is_one(c) else f"*{cs}"))
            else:
                terms.append("1" if self.desc.consts.is_one(c) else cs)
        body = " + ".join(terms) if terms else "0"
        if self.nx != INF:
            body += f" + O(x^{int(self.nx)})"
        if self.ny != INF:
            body += f" + O(y^{int(self.ny)})"
        head = f"idx={self.i}: "
        if self.t:
            return head + f"({body}) / varpi^{self.t}"
        return head + body

    __repr__ = text


def residue_tower(desc: TowerDesc) -> TowerDesc:
    """The characteristic-p system that A_{pi,varpi,*} reduces to."""
    key = ("residue",)
    if key not in desc._cache:
        pd = make_tower(desc.p, desc.r, desc.s, desc.level, "p", 1, desc.nx, desc.ny,
                        desc.lt_pi.name if desc.lt_pi.name != "custom" else "standard",
                        lt_degree=desc.lt_pi.N)
        desc._cache[key] = pd
    return desc._cache[key]


def _substitute(e: TwoTowerElem, g: TruncSeries, side: str) -> tuple[dict, int]:
    """Substitute x -> g (side 'pi') or y -> g (side 'varpi'); returns body and new window."""
    slices = e.x_slices() if side == "pi" else e.y_slices()
    win = e.nx if side == "pi" else e.ny
    if not slices:
        slices = {0: TruncSeries(e.desc.consts, {}, win, "x" if side == "pi" else "y")}
    body: dict = {}
    new_win = INF
    for other_exp, ser in slices.items():
        img = ser.compose(g)
        new_win = min(new_win, img.prec)
        for n, c in img.coeffs.items():
            key = (n, other_exp) if side == "pi" else (other_exp, n)
            body[key] = body[key] + c if key in body else c
    return body, new_win


def partial_frobenius_pi(e: TwoTowerElem) -> TwoTowerElem:
    """phi_pi: index i -> i-1, acting on the x side only."""
    body, nx = _substitute(e, e.desc.g_pi, "pi")
    return TwoTowerElem(e.desc, e.i - 1, body, nx, e.ny, e.t)


def partial_frobenius_varpi(e: TwoTowerElem) -> TwoTowerElem:
    """phi_varpi: index i -> i+1, acting on the y side and by sigma on constants."""
    tw = e.map_constants(e.desc.sigma)
    body, ny = _substitute(tw, e.desc.g_varpi, "varpi")
    return TwoTowerElem(e.desc, e.i + 1, body, e.nx, ny, e.t)


def total_frobenius(e: TwoTowerElem) -> TwoTowerElem:
    """phi^{rs} on both factors at once (index unchanged)."""
    tw = e.map_constants(e.desc.sigma)
    body, nx = _substitute(tw, e.desc.g_pi, "pi")
    mid = TwoTowerElem(e.desc, e.i, body, nx, e.ny, e.t)
    body, ny = _substitute(mid, e.desc.g_varpi, "varpi")
    return TwoTowerElem(e.desc, e.i, body, nx, ny, e.t)


def gamma_act(e: TwoTowerElem, c_pi, c_varpi) -> TwoTowerElem:
    """Diagonal Galois action: x -> [c_pi](x), y -> [c_varpi](y), constants fixed."""
    D = e.desc
    gx = D.gamma_series("pi", c_pi, (int(e.nx) if e.nx != INF else D.nx) + max(0, -e.lo_x) + 2)
    gy = D.gamma_series("varpi", c_varpi, (int(e.ny) if e.ny != INF else D.ny) + max(0, -e.lo_y) + 2)
    body, nx = _substitute(e, gx, "pi")
    mid = TwoTowerElem(D, e.i, body, nx, e.ny, e.t)
    body, ny = _substitute(mid, gy, "varpi")
    return TwoTowerElem(D, e.i, body, nx, ny, e.t)


# ---------------------------------------------------------------------------
# embeddings of the two sides


def embed_varpi_side(w: TruncSeries, i: int, desc: TowerDesc, t: int = 0) -> TwoTowerElem:
    """1 (x) w at index i."""
    body = {(0, n): desc.consts.coerce(c) for n, c in w.coeffs.items()}
    return TwoTowerElem(desc, i, body, INF, w.prec, t)


def embed_pi_side(g: TruncSeries, i: int, desc: TowerDesc, t: int = 0) -> TwoTowerElem:
    """g (x) 1 at index i: constants move across through sigma^i."""
    body = {(n, 0): desc.sigma(desc.consts.coerce(c), i) for n, c in g.coeffs.items()}
    return TwoTowerElem(desc, i, body, g.prec, INF, t)


# ---------------------------------------------------------------------------
# projective limits


@dataclass
class TowerSequence:
    """entries[i] for i in [i0, i1], chained by phi_pi (i -> i-1) or phi_varpi (i -> i+1)."""

    entries: dict
    direction: str  # "pi" or "varpi"

    @property
    def window(self) -> tuple[int, int]:
        return min(self.entries), max(self.entries)

    @property
    def desc(self) -> TowerDesc:
        return next(iter(self.entries.values())).desc


def diagonal_sequence(w: TruncSeries, desc: TowerDesc, window=(0, 3), direction: str = "pi", t: int = 0) -> TowerSequence:
    """The image of an element of the limit ring: 1 (x) w along phi_pi, w (x) 1 along phi_varpi."""
    i0, i1 = window
    if direction == "pi":
        ent = {i: embed_varpi_side(w, i, desc, t) for i in range(i0, i1 + 1)}
    else:
        ent = {i: embed_pi_side(w, i, desc, t) for i in range(i0, i1 + 1)}
    return TowerSequence(ent, direction)


def check_chain(seq: TowerSequence) -> list[tuple[int, bool]]:
    out = []
    i0, i1 = seq.window
    for i in range(i0 + 1, i1 + 1):
        if seq.direction == "pi":
            ok = partial_frobenius_pi(seq.entries[i]).equal_to_prec(seq.entries[i - 1])
            out.append((i, ok))
        else:
            ok = partial_frobenius_varpi(seq.entries[i - 1]).equal_to_prec(seq.entries[i])
            out.append((i - 1, ok))
    return out


def inject_fault(seq: TowerSequence, digit: int, z: TwoTowerElem | None = None) -> TowerSequence:
    """Add varpi^digit times a compatible non-constant sequence built from z.

    z sits at the top of the window (bottom for the varpi direction) and is
    pushed through the partial Frobenius, so the chain condition survives and
    only the limit test can see the fault.  The default z is x (resp. y).
    """
    D = seq.desc
    i0, i1 = seq.window
    start = i1 if seq.direction == "pi" else i0
    if z is None:
        z = D.x(start) if seq.direction == "pi" else D.y(start)
    if z.i != start:
        raise ValueError(f"fault seed must live at index {start}")
    u = D.consts.uniformizer**digit if D.char == "0" else None
    if D.char == "p" and digit:
        raise ValueError("characteristic p has no digits beyond 0")
    cur = z
    pert = {start: cur}
    rng = range(i1 - 1, i0 - 1, -1) if seq.direction == "pi" else range(i0 + 1, i1 + 1)
    for i in rng:
        cur = partial_frobenius_pi(cur) if seq.direction == "pi" else partial_frobenius_varpi(cur)
        pert[i] = cur
    out = {}
    for i, ent in seq.entries.items():
        d = pert[i] if u is None else pert[i] * u
        out[i] = ent + TwoTowerElem(D, i, d.body, d.nx, d.ny, ent.t)
    return TowerSequence(out, seq.direction)


@dataclass
class ProjlimResult:
    value: TruncSeries  # in y (direction pi) or x (direction varpi)
    t: int  # denominator exponent
    certificate: list  # (index, entry equals the embedded limit)
    window: tuple
    digits: int

    @property
    def exact(self) -> bool:
        return all(ok for _, ok in self.certificate)


def _common_residue(entries: dict, direction: str, desc: TowerDesc, digit: int):
    """Shared residue of all entries as a one-variable series, or NoLimitError."""
    other = 0 if direction == "pi" else 1
    ref = None
    var = "y" if direction == "pi" else "x"
    for i in sorted(entries):
        ent = entries[i]
        coeffs = {}
        for (a, b), c in ent.body.items():
            if (a, b)[other] != 0:
                raise NoLimitError(digit, f"entry {i} depends on {'x' if direction == 'pi' else 'y'}")
            n = b if direction == "pi" else a
            if direction == "varpi":
                c = desc.sigma(c, -i)
            coeffs[n] = c
        win = ent.ny if direction == "pi" else ent.nx
        ser = TruncSeries(desc.consts, coeffs, win, var)
        if ref is None:
            ref = ser
        elif not ref.equal_to_prec(ser):
            raise NoLimitError(digit, f"entries {min(entries)} and {i} disagree")
        else:
            ref = ref.truncate(ser.prec) if ser.prec < ref.prec else ref
    return ref


def projlim_reconstruct(seq: TowerSequence) -> ProjlimResult:
    """Digit-by-digit reconstruction of the limit of a compatible sequence."""
    desc = seq.desc
    if not all(ok for _, ok in check_chain(seq)):
        raise NotCompatibleError("not a compatible sequence")
    t = max(e.t for e in seq.entries.values())
    entries = {i: e.scale_denominator(t) for i, e in seq.entries.items()}
    if desc.char == "p":
        value = _common_residue(entries, seq.direction, desc, 0)
        digits = 1
    else:
        R = desc.consts
        value = None
        digits = desc.M
        for d in range(desc.M):
            # entries are now divisible by varpi^d
            res = {}
            for i, ent in entries.items():
                body = {}
                for k, c in ent.body.items():
                    if c.valuation < d:
                        raise NoLimitError(d, f"entry {i} not divisible by varpi^{d}")
                    body[k] = R.teichmuller(c.div_uniformizer(d).residue()) if c.prec > d else R.zero
                res[i] = TwoTowerElem(desc, i, body, ent.nx, ent.ny)
            digit_val = _common_residue(res, seq.direction, desc, d)
            term = digit_val.map_coeffs(lambda c, d=d: c * R.uniformizer**d)
            value = term if value is None else value + term
            for i in entries:
                emb = embed_varpi_side(term, i, desc, t) if seq.direction == "pi" else embed_pi_side(term, i, desc, t)
                entries[i] = entries[i] - emb
        value = value.map_coeffs(lambda c: c.with_prec(desc.M), R)
    cert = []
    for i, ent in seq.entries.items():
        emb = embed_varpi_side(value, i, desc, t) if seq.direction == "pi" else embed_pi_side(value, i, desc, t)
        cert.append((i, emb.equal_to_prec(ent)))
    return ProjlimResult(value, t, cert, seq.window, digits)


# ---------------------------------------------------------------------------
# comparison functors at finite level


@dataclass
class SideBase:
    """Constants of A_{K,pi} / A_{K,varpi} (or E) in constant mode."""

    kind: str  # "E" or "A"
    side: str  # "pi" or "varpi"
    ring: object  # k_K or O_K
    e: int
    gamma_count: int = 0

    def coerce(self, x):
        return self.ring.coerce(x)

    def phi(self, x):
        return x.frobenius(self.e)

    def gamma(self, index: int, x):
        return x

    @property
    def ngammas(self) -> int:
        return self.gamma_count

    def describe(self) -> str:
        return f"{self.kind} side {self.side} constants {self.ring!r}"


def module_over(kind: str, side: str, matPhi, e: int, ring=None, gamma_count: int = 0) -> charp.PhiGammaModule:
    first = matPhi[0][0]
    ring = first.desc if ring is None else ring
    base = SideBase(kind, side, ring, e, gamma_count)
    d = len(matPhi)
    one, zero = ring.one, ring.zero
    G = [linalg.identity(d, one, zero) for _ in range(gamma_count)]
    return charp.PhiGammaModule(base, [[ring.coerce(a) for a in row] for row in matPhi], G)


@dataclass
class FunctorResult:
    module: charp.PhiGammaModule
    conjugator: list  # P with new matPhi = P^{-1} A P
    window: tuple
    stabilized: bool


def _validate_constant_module(D: charp.PhiGammaModule, side: str):
    base = D.base
    if not isinstance(base, SideBase):
        raise UnsupportedModeError("unsupported mode: module is not over a finite-level constants base")
    if base.side != side:
        raise ValueError(f"module lives on the {base.side} side, expected {side}")
    for G in D.matGamma:
        if not linalg.is_identity(G):
            raise UnsupportedModeError("unsupported mode: non-trivial Gamma matrices in constant mode")
    A = D.matPhi
    try:
        linalg.mat_inv([[a.residue() if isinstance(a, ln.LocalInt) else a for a in row] for row in A])
    except linalg.SingularMatrixError:
        raise ff.NotEtaleError("not étale: matPhi is not invertible") from None
    return base


def _v_data(D: charp.PhiGammaModule):
    """V-basis X over the finite level and the descent matrix B (X^{-1} sigma(X) = R, B X solves Hilbert 90)."""
    base = D.base
    A = D.matPhi
    e = base.e
    if base.kind == "E":
        sol = charp.functor_V(A, e)
        X = linalg.from_columns(sol.basis)
        kprime = sol.field
        n = kprime.m // e
        Q = charp.hilbert90(sol.galois, e, n)
        return X, Q, kprime.m
    sol = functor_V_lift(A, base.ring, e)
    X = linalg.from_columns(sol.basis)
    R = sol.ring
    Xbar = [[x.residue() for x in row] for row in X]
    Rbar = linalg.mat_mul(linalg.mat_inv(Xbar), [[x.frobenius(e) for x in row] for row in Xbar])
    n = R.f // e
    Qbar = charp.hilbert90(Rbar, e, n)
    Bbar = linalg.mat_mul(Qbar, linalg.mat_inv(Xbar))
    B = [[R.teichmuller(b) for b in row] for row in Bbar]
    return X, linalg.mat_mul(B, X), R.f


def _functor(D: charp.PhiGammaModule, src: str, dst: str, window=(0, 2)) -> FunctorResult:
    base = _validate_constant_module(D, src)
    e = base.e
    A = D.matPhi
    d = len(A)
    X, Q, level = _v_data(D)
    kind = base.kind
    p = (base.ring.p if hasattr(base.ring, "p") else base.ring.residue.p)
    r = 1
    s = e
    desc = make_tower(p, r, s, level, "p" if kind == "E" else "0", getattr(base.ring, "M", 1), 4, 4)
    consts = desc.consts
    conv = (lambda a: consts.coerce(a)) if kind == "E" else (lambda a: embed_local(a, consts))
    Xc = [[conv(x) for x in row] for row in X]
    Ac = [[conv(a) for a in row] for row in A]
    Ainv = linalg.mat_inv(Ac)
    i0, i1 = window
    direction = src
    # D (x) A_{pi,varpi,i}: the V-basis vectors written in module coordinates
    seqs = []
    for k in range(d):
        ent = {}
        for i in range(i0, i1 + 1):
            if src == "pi":
                col = [desc.constant(Xc[j][k], i, side="pi") for j in range(d)]
            else:
                col = [desc.constant(Xc[j][k], i, side="varpi") for j in range(d)]
            ent[i] = col
        seqs.append(ent)
    # chain: A^{-1} phi_side(m_i) = m_{i -/+ 1}
    for ent in seqs:
        for i in range(i0 + 1, i1 + 1):
            if src == "pi":
                img = [partial_frobenius_pi(x) for x in ent[i]]
                target = ent[i - 1]
            else:
                img = [partial_frobenius_varpi(x) for x in ent[i - 1]]
                target = ent[i]
            img = [_lin(Ainv[j], img, desc, target[0].i) for j in range(d)]
            if not all(a.equal_to_prec(b) for a, b in zip(img, target)):
                raise NotCompatibleError("not a compatible sequence")
    # coordinates in the V-basis, reconstructed through the projective limit
    coords = [[None] * d for _ in range(d)]
    stabilized = True
    for k, ent in enumerate(seqs):
        for kk in range(d):
            seq = {}
            for i in range(i0, i1 + 1):
                Xi = [[desc.sigma(x, i) for x in row] for row in Xc] if src == "pi" else Xc
                Xi_inv = linalg.mat_inv(Xi)
                seq[i] = _lin(Xi_inv[kk], ent[i], desc, i)
            try:
                res = projlim_reconstruct(TowerSequence(seq, direction))
            except NoLimitError as err:
                raise WindowTooSmallError(f"no stabilization on window {window}: {err}; use a larger index window") from None
            stabilized &= res.exact
            coords[kk][k] = res.value[0] if res.value.coeffs else consts.zero
    if not linalg.is_identity(coords):
        raise ArithmeticError("projective limit does not identify the V-basis")
    # H-invariants: finite-level Galois descent with Q^{-1} sigma(Q) = R
    Qc = [[conv(x) for x in row] for row in Q]
    P = linalg.mat_mul(Xc, linalg.mat_inv(Qc))
    if any(not (desc.sigma(x) - x).is_zero() for row in P for x in row):
        raise ArithmeticError("descended basis is not defined over the base")
    ring = base.ring
    back = (lambda x: ff.restrict(x, ring)) if kind == "E" else (lambda x: _restrict_local(x, ring))
    Pb = [[back(x) for x in row] for row in P]
    Anew = linalg.mat_mul(linalg.mat_mul(linalg.mat_inv(Pb), A), Pb)
    out = module_over(kind, dst, Anew, e, ring, D.base.gamma_count)
    return FunctorResult(out, Pb, window, stabilized)


def _lin(row, vec, desc, i):
    acc = TwoTowerElem(desc, i, {}, INF, INF)
    for a, v in zip(row, vec):
        acc = acc + v * a
    return acc


def _restrict_local(x: ln.LocalInt, ring: ln.LocalRingDesc) -> ln.LocalInt:
    """Element of W(k') fixed by sigma, moved back to O_K by its Teichmuller digits."""
    out = ring.zero
    pw = ring.one
    for dgt in x.teichmuller_digits():
        if not dgt.is_zero():
            out = out + ring.teichmuller(ff.restrict(dgt, ring.residue)) * pw
        pw = pw * ring.uniformizer
    return out.with_prec(min(x.prec, ring.M))


def functor_Phi(D1: charp.PhiGammaModule, window=(0, 2)) -> FunctorResult:
    """pi side -> varpi side."""
    return _functor(D1, "pi", "varpi", window)


def functor_Psi(D2: charp.PhiGammaModule, window=(0, 2)) -> FunctorResult:
    """varpi side -> pi side."""
    return _functor(D2, "varpi", "pi", window)


@dataclass
class Comparison:
    phi: FunctorResult
    psi: FunctorResult
    conjugator: list
    isomorphic: bool

    @property
    def verdict(self) -> str:
        return "isomorphic" if self.isomorphic else "not isomorphic"


def compare(D: charp.PhiGammaModule, window=(0, 2)) -> Comparison:
    """Phi then Psi (or the reverse for a varpi-side module) and a certified conjugacy verdict."""
    if not isinstance(D.base, SideBase):
        raise UnsupportedModeError("unsupported mode: module is not over a finite-level constants base")
    first, second = (functor_Phi, functor_Psi) if D.base.side == "pi" else (functor_Psi, functor_Phi)
    a = first(D, window)
    b = second(a.module, window)
    T = linalg.mat_mul(a.conjugator, b.conjugator)
    A = D.matPhi
    A2 = b.module.matPhi
    ok = linalg.mat_eq(linalg.mat_mul(A, T), linalg.mat_mul(T, A2))
    try:
        linalg.mat_inv(T)
    except linalg.SingularMatrixError:
        ok = False
    if ok and D.base.kind == "E":
        ok = charp.are_conjugate(A2, A, D.base.ring)
    return Comparison(a, b, T, ok)
