"""Command-line driver.

Every command prints a "# ltphi-report v1" header followed by line-oriented
output.  Exit codes: 0 success, 1 property failure, 2 usage or parse error,
3 unsupported mode.
"""
from __future__ import annotations

import functools
import re
import sys
from dataclasses import dataclass, fields as dc_fields

import click
import numpy as np

from . import charp
from . import fields as ff
from . import lift0
from . import linalg
from . import localnum as ln
from . import twotower as tt
from .ltgroup import NotLubinTateError, group_law, lt_mul, make_lt, torsion_polynomial
from .series import PrecisionError, TruncSeries
from .verify import SUITES, SuiteConfig, run_suite

HEADER = "# ltphi-report v1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2, 3


@dataclass
class RunConfig:
    p: int = 3
    r: int = 1
    s: int = 1
    f: str = "standard"
    N: int = 8
    M: int = 4
    seed: int = 0

    @property
    def f_choice(self):
        if self.f in ("standard", "multiplicative"):
            return self.f
        try:
            coeffs = [int(t) for t in self.f.split(",")]
        except ValueError:
            raise click.UsageError(f"malformed f coefficients: {self.f!r}") from None
        if not coeffs:
            raise click.UsageError("malformed f coefficients: empty list")
        return coeffs


_INT_KEYS = ("p", "r", "s", "N", "M", "seed")


def read_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.UsageError(f"config line {lineno}: expected key=value")
            key, val = (t.strip() for t in line.split("=", 1))
            if key not in {f.name for f in dc_fields(RunConfig)}:
                raise click.UsageError(f"config line {lineno}: unknown key {key!r}")
            out[key] = val
    return out


def build_config(path, flags: dict) -> RunConfig:
    values = read_config(path) if path else {}
    values.update({k: v for k, v in flags.items() if v is not None})
    for k in _INT_KEYS:
        if k in values:
            try:
                values[k] = int(values[k])
            except (TypeError, ValueError):
                raise click.UsageError(f"{k} must be an integer, got {values[k]!r}") from None
    cfg = RunConfig(**values)
    if not ff.is_prime(cfg.p):
        raise click.UsageError(f"p={cfg.p} is not prime")
    if cfg.r < 1 or cfg.s < 1 or cfg.M < 1 or cfg.N < 2:
        raise click.UsageError("r, s, M must be positive and N at least 2")
    cfg.f_choice  # validates
    return cfg


def common_options(fn):
    opts = [
        click.option("--p", type=str, default=None, help="residue characteristic"),
        click.option("--r", type=str, default=None, help="residue degree of F"),
        click.option("--s", type=str, default=None, help="residue degree of K over F"),
        click.option("--f", type=str, default=None, help="standard | multiplicative | c1,c2,... (coefficients of X, X^2, ...)"),
        click.option("--N", "N", type=str, default=None, help="degree cutoff"),
        click.option("--M", "M", type=str, default=None, help="uniformizer-adic precision"),
        click.option("--seed", type=str, default=None, help="seed for randomized output"),
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="key=value file; flags win"),
    ]

    @functools.wraps(fn)
    def wrapper(p, r, s, f, N, M, seed, config_path, **kw):
        cfg = build_config(config_path, dict(p=p, r=r, s=s, f=f, N=N, M=M, seed=seed))
        try:
            return fn(cfg, **kw)
        except (tt.UnsupportedModeError, ff.NotEtaleError) as err:
            _fail(EXIT_UNSUPPORTED, str(err))
        except (NotLubinTateError, PrecisionError, charp.NotARepresentationError, ModuleSpecError) as err:
            _fail(EXIT_USAGE, str(err))

    for opt in reversed(opts):
        wrapper = opt(wrapper)
    return wrapper


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _out(lines):
    click.echo(HEADER)
    for line in lines:
        click.echo(line)


def _lt(cfg: RunConfig, N=None):
    return make_lt(cfg.p, cfg.r, cfg.f_choice, cfg.N if N is None else N, cfg.M)


def _rng(cfg: RunConfig):
    return np.random.default_rng(cfg.seed)


def _bool(b) -> str:
    return "true" if b else "false"


# ---------------------------------------------------------------------------
# module-spec files


class ModuleSpecError(ValueError):
    pass


_HEADER_RE = re.compile(r"^rank\s+(\d+)\s+over\s+(E|A)\s+side\s+(pi|varpi)$")
_TEICH_RE = re.compile(r"^teich\((.*)\)$")


def _split_entries(line: str) -> list[str]:
    """Split on ';' outside brackets."""
    out, depth, cur = [], 0, []
    for ch in line:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == ";" and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    return out


def _parse_entry(tok: str, kind: str, k: ff.FieldDesc, O):
    if re.search(r"[uxy]|O\(", tok):
        raise tt.UnsupportedModeError("unsupported mode: series entries are not finite-level constants")
    m = _TEICH_RE.match(tok)
    try:
        if m:
            c = k.parse_coeff(m.group(1))
            return c if kind == "E" else O.teichmuller(c)
        if kind == "E":
            return k.parse_coeff(tok)
        body = tok.strip()
        if body.startswith("[") and body.endswith("]"):
            parts = [t.strip() for t in body[1:-1].split(",") if t.strip()]
            return O.from_w([int(t) for t in parts] or [0])
        return O.coerce(int(body))
    except ValueError:
        raise ModuleSpecError(f"cannot parse entry {tok!r}") from None


def parse_module_spec(text: str, cfg: RunConfig):
    """Header "rank d over E|A side pi|varpi", then d rows of ';'-separated entries."""
    lines = [ln_.split("#", 1)[0].strip() for ln_ in text.splitlines()]
    lines = [t for t in lines if t]
    if not lines:
        raise ModuleSpecError("empty module spec")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ModuleSpecError(f"bad header {lines[0]!r}: expected 'rank d over E|A side pi|varpi'")
    d, kind, side = int(m.group(1)), m.group(2), m.group(3)
    rows = lines[1:]
    if rows and rows[0].rstrip(":") == "phi":
        rows = rows[1:]
    if d < 1 or len(rows) != d:
        raise ModuleSpecError(f"expected {d} matrix rows, found {len(rows)}")
    e = cfg.r * cfg.s
    k = ff.make_field(cfg.p, e)
    O = ln.unramified(cfg.p, e, cfg.M) if kind == "A" else None
    mat = []
    for row in rows:
        toks = _split_entries(row)
        if len(toks) != d:
            raise ModuleSpecError(f"row {row!r} has {len(toks)} entries, expected {d}")
        mat.append([_parse_entry(t, kind, k, O) for t in toks])
    ring = k if kind == "E" else O
    return tt.module_over(kind, side, mat, e, ring)


def _parse_matrix(text: str, k: ff.FieldDesc):
    try:
        rows = [[k.parse_coeff(t) for t in _split_commas(row)] for row in text.split(";")]
    except ValueError:
        raise click.UsageError(f"cannot parse matrix {text!r}") from None
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise click.UsageError("matrix must be square")
    return rows


def _split_commas(row: str):
    out, depth, cur = [], 0, []
    for ch in row:
        depth += ch == "["
        depth -= ch == "]"
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


# ---------------------------------------------------------------------------


@click.group()
def main():
    """Lubin-Tate formal groups, norm fields and (phi, Gamma)-modules at finite precision."""


@main.command("group-law")
@common_options
def cmd_group_law(cfg):
    """Print the formal group law F(X, Y)."""
    _out([group_law(_lt(cfg)).text()])


@main.command("lt-mul")
@click.option("--a", "a", type=int, default=2, show_default=True)
@common_options
def cmd_lt_mul(cfg, a):
    """Print the endomorphism series [a](X)."""
    lt = _lt(cfg)
    _out([f"a={a}", lt_mul(lt.work.coerce(a), lt).text()])


@main.command("torsion")
@click.option("--n", "n", type=int, default=1, show_default=True)
@common_options
def cmd_torsion(cfg, n):
    """Print the level-n torsion polynomial and its Eisenstein certificate."""
    lt = _lt(cfg)
    try:
        T = torsion_polynomial(lt, n)
    except ValueError as err:
        _fail(EXIT_USAGE, str(err))
    _out([T.text(), f"degree={T.degree}", f"eisenstein={_bool(T.eisenstein)}",
          f"torsion_points={lt.q ** n if T.eisenstein else 'uncertified'}"])
    if not T.eisenstein:
        sys.exit(EXIT_FAIL)


@main.command("norm-check")
@click.option("--eis", type=str, default=None, help="lower coefficients E_0,...,E_{e-1} of the Eisenstein polynomial of K")
@common_options
def cmd_norm_check(cfg, eis):
    """Whether norm(varpi) = pi^s for F = W(F_{p^r}), pi = p."""
    try:
        eis_t = None if eis is None else tuple(int(t) for t in eis.split(","))
        ext = ln.make_extension(cfg.p, cfg.r, cfg.s, eis_t, cfg.M)
    except ValueError as err:
        _fail(EXIT_USAGE, str(err))
    varpi = ext.top.uniformizer
    pi = ext.base.coerce(cfg.p)
    n = ln.norm(varpi, ext.base)
    _out([f"K={ext.top!r} over F={ext.base!r}", f"norm(varpi)={n.text()}",
          f"criterion={_bool(ln.lt_extension_criterion(pi, varpi, ext))}"])


@main.command("gamma-act")
@click.option("--c", "c", type=int, default=None, help="unit of O_F; default 1+p")
@click.option("--x", "x", type=str, default=None, help="residue coefficients of u^0, u^1, ... ; default random")
@common_options
def cmd_gamma_act(cfg, c, x):
    """Apply gamma_c to an element of k((u)) and check it commutes with phi."""
    lt = _lt(cfg, N=max(cfg.N, 8))
    E = charp.make_norm_field(lt, cfg.s, N=max(cfg.N, 8))
    k = E.residue
    prec = cfg.N
    if x is None:
        rng = _rng(cfg)
        elem = TruncSeries(k, {n: k.random(rng) for n in range(prec)}, prec)
    else:
        try:
            vals = [k.parse_coeff(t) for t in _split_commas(x)]
        except ValueError:
            raise click.UsageError(f"cannot parse element {x!r}") from None
        elem = TruncSeries(k, dict(enumerate(vals)), prec)
    cval = 1 + cfg.p if c is None else c
    cu = lt.work.coerce(cval)
    if not cu.is_unit():
        _fail(EXIT_USAGE, f"c={cval} is not a unit")
    g = charp.gamma_action(cu, elem, lt, E.N)
    comm = charp.frobenius_series(g, E.e).equal_to_prec(
        charp.gamma_action(cu, charp.frobenius_series(elem, E.e), lt, E.N))
    _out([f"field={E.describe()}", f"x={elem.text()}", f"gamma_{cval}(x)={g.text()}",
          f"phi-gamma-commute={_bool(comm)}"])
    if not comm:
        sys.exit(EXIT_FAIL)


@main.command("v-solve")
@click.option("--matrix", "matrix", type=str, required=True, help='rows separated by ";", entries by ","')
@click.option("--lift", is_flag=True, help="Teichmuller-lift the matrix to O_K and solve mod uniformizer^M")
@common_options
def cmd_v_solve(cfg, matrix, lift):
    """Solve phi(x) = A x for a constant matrix A."""
    e = cfg.r * cfg.s
    k = ff.make_field(cfg.p, e)
    A = _parse_matrix(matrix, k)
    if not lift:
        sol = charp.functor_V(A, e)
        lines = [f"field={sol.field!r}", f"dimension={sol.dimension}"]
        lines += [f"v{j}=" + " ; ".join(x.short() for x in v) for j, v in enumerate(sol.basis)]
        lines.append(f"check={_bool(charp.check_V_solution(A, sol))}")
        _out(lines)
        return
    O = ln.unramified(cfg.p, e, cfg.M)
    Al = [[O.teichmuller(a) for a in row] for row in A]
    try:
        sol = lift0.functor_V_lift(Al, O, e)
    except lift0.LiftError as err:
        _fail(EXIT_UNSUPPORTED, f"unsupported mode: {err}")
    ok = lift0.check_V_lift(Al, sol, e)
    lines = [f"ring={sol.ring!r}", f"precision={sol.precision}", f"dimension={len(sol.basis)}"]
    lines += [f"v{j}=" + " ; ".join(x.short() for x in v) for j, v in enumerate(sol.basis)]
    lines.append(f"check={_bool(ok)}")
    _out(lines)
    if not ok:
        sys.exit(EXIT_FAIL)


@main.command("d-descend")
@click.option("--matrix", "matrix", type=str, required=True, help="image of the Galois generator; entries in k_K")
@click.option("--n", "n", type=int, default=2, show_default=True, help="degree of the splitting extension")
@common_options
def cmd_d_descend(cfg, matrix, n):
    """D of an unramified representation, with the V o D round trip."""
    e = cfg.r * cfg.s
    k = ff.make_field(cfg.p, e)
    C = _parse_matrix(matrix, k)
    D = charp.functor_D_unramified(C, e, n)
    ok, _ = charp.round_trip_VD(C, e, n)
    _out([D.text(), f"round-trip={_bool(ok)}"])
    if not ok:
        sys.exit(EXIT_FAIL)


@main.command("projlim")
@click.option("--direction", type=click.Choice(["pi", "varpi"]), default="pi", show_default=True)
@click.option("--window", type=str, default="0,3", show_default=True)
@click.option("--fault", type=int, default=None, help="perturb the sequence at this digit")
@common_options
def cmd_projlim(cfg, direction, window, fault):
    """Reconstruct a random element from its diagonal sequence."""
    try:
        i0, i1 = (int(t) for t in window.split(","))
    except ValueError:
        raise click.UsageError(f"bad window {window!r}") from None
    e = cfg.r * cfg.s
    D = tt.make_tower(cfg.p, cfg.r, cfg.s, 2 * e, "0", M=min(cfg.M, 3), nx=6, ny=6)
    R = D.consts
    rng = _rng(cfg)
    var = "y" if direction == "pi" else "x"
    w = TruncSeries(R, {n: R.random(rng) for n in range(-1, 5)}, 5, var)
    seq = tt.diagonal_sequence(w, D, (i0, i1), direction)
    if fault is not None:
        seq = tt.inject_fault(seq, fault)
    lines = [f"input={w.text()}", f"window={i0},{i1}"]
    try:
        res = tt.projlim_reconstruct(seq)
    except (tt.NotCompatibleError, tt.NoLimitError) as err:
        lines.append(f"rejected: {err}")
        _out(lines)
        caught = isinstance(err, tt.NoLimitError) and err.digit == fault
        sys.exit(EXIT_OK if caught else EXIT_FAIL)
    ok = res.value.equal_to_prec(w)
    lines += [f"limit={res.value.text()}", f"exact={_bool(res.exact)}", f"round-trip={_bool(ok)}"]
    _out(lines)
    if fault is not None or not ok:
        sys.exit(EXIT_FAIL)


@main.command("compare")
@click.argument("specfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--window", type=str, default="0,2", show_default=True)
@common_options
def cmd_compare(cfg, specfile, window):
    """Run Phi and Psi on a module-spec file and print the conjugacy verdict."""
    try:
        i0, i1 = (int(t) for t in window.split(","))
    except ValueError:
        raise click.UsageError(f"bad window {window!r}") from None
    with open(specfile, encoding="utf-8") as fh:
        D = parse_module_spec(fh.read(), cfg)
    try:
        res = tt.compare(D, (i0, i1))
    except lift0.LiftError as err:
        _fail(EXIT_UNSUPPORTED, f"unsupported mode: {err}")
    first, second = ("Phi", "Psi") if D.base.side == "pi" else ("Psi", "Phi")
    _out([
        f"{first}(D):", res.phi.module.text(),
        f"{second}({first}(D)):", res.psi.module.text(),
        f"window={i0},{i1} stabilized={_bool(res.phi.stabilized and res.psi.stabilized)}",
        f"verdict: {res.verdict}",
    ])
    if not res.isomorphic:
        sys.exit(EXIT_FAIL)


@main.command("verify")
@click.option("--suite", type=str, default="all", show_default=True, help="|".join(SUITES + ("all",)))
@common_options
def cmd_verify(cfg, suite):
    """Run a property suite; one line per property."""
    if suite != "all" and suite not in SUITES:
        raise click.UsageError(f"unknown suite {suite!r}")
    scfg = SuiteConfig(cfg.p, cfg.r, cfg.s, cfg.f_choice, cfg.N, cfg.M, cfg.seed)
    rows = run_suite(suite, scfg)
    ok = all(r.passed for r in rows)
    _out([f"suite={suite} seed={cfg.seed}"] + [r.line() for r in rows]
         + [f"summary properties={len(rows)} {'pass' if ok else 'fail'}"])
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    main()
