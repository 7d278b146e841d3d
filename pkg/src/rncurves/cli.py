"""Command line interface: ``rncurves <curve-info|kdv|boutroux|verify|sweep>``.

Output is JSON (CSV for ``sweep``) with 17 significant digits and a fixed
key order, so identical invocations give identical bytes.  Exit codes:
0 success, 1 numerical failure or failed check, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import crit, hill, series
from .curve import SpectralCurve, from_coeffs, from_cubic, from_roots
from .errors import InputError, NoSolutionInBracket, NumericalError, OrderTooLarge
from .periods import period_vector
from .rnd import quasimomentum

SUITES = ("triple-consistency", "gradient", "obstruction")


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-12
    order: int = 20
    fd_step: float = 1e-5
    brackets: dict = field(default_factory=dict)
    output_format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if not (self.tol > 0 and self.fd_step > 0):
            raise InputError("tolerances must be positive")
        if self.order > series.MAX_ORDER:
            raise OrderTooLarge(f"order {self.order} exceeds {series.MAX_ORDER}")
        if self.order < 6:
            raise InputError("order must be at least 6")
        if self.output_format not in ("json", "csv"):
            raise InputError("output_format must be json or csv")

    @classmethod
    def load(cls, path, **overrides):
        """Read a JSON config; ``overrides`` win over the file before validation."""
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as e:
            raise InputError(f"cannot read config {path}: {e}") from None
        if not isinstance(data, dict):
            raise InputError(f"config {path} must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "brackets" in data:
            data["brackets"] = {k: tuple(map(float, v)) for k, v in data["brackets"].items()}
        data.update(overrides)
        return cls(**data)


# -- deterministic output ------------------------------------------------------


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with fixed float formatting; complex numbers become ``[re, im]``."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return {None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# -- argument helpers ----------------------------------------------------------


def _numbers(text: str, kind=complex):
    try:
        return [kind(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse number list {text!r}") from None


def _curve(args) -> SpectralCurve:
    if args.coeffs and args.roots:
        raise InputError("give either --coeffs or --roots")
    if args.coeffs:
        c = _numbers(args.coeffs)
        return from_cubic(c) if len(c) == 3 else from_coeffs(c)
    if args.roots:
        return from_roots(_numbers(args.roots))
    if args.g2 is not None and args.g3 is not None:
        return from_cubic((0.0, -args.g2, -args.g3))
    raise InputError("a curve needs --coeffs, --roots, or --g2 with --g3")


def _config(args) -> RunConfig:
    path = args.config or os.environ.get("RNCURVES_CONFIG")
    over = {}
    if getattr(args, "tol", None) is not None:
        over["tol"] = args.tol
    if getattr(args, "order", None) is not None:
        over["order"] = args.order
    return RunConfig.load(path, **over) if path else RunConfig(**over)


def curve_report(cv: SpectralCurve) -> dict:
    return {
        "curve": {"genus": cv.genus, "degree": cv.degree},
        "roots": [_c(r) for r in cv.roots],
        "coeffs": [_c(c) for c in cv.coeffs],
        "discriminant": _c(cv.discriminant),
        "conj_symmetric": cv.conj_symmetric,
    }


# -- commands ------------------------------------------------------------------


def cmd_curve_info(args, cfg):
    return curve_report(_curve(args))


def cmd_kdv(args, cfg):
    cv = _curve(args)
    sc = series.qde_coefficients(cv, cfg.order, cfg.tol)
    dq = quasimomentum(cv, cfg.tol)
    pv = period_vector(cv, dq, cfg.tol)
    h = sc.kdv
    return {
        "H": {"m1": _c(h[0]), "p1": _c(h[1]), "p3": _c(h[2])},
        "T1": _c(sc.T[1]),
        "qde2": {"T0": _c(sc.T[0]), "T1": _c(sc.T[1]), "H1": _c(sc.H[1]), "H3": _c(sc.H[3])},
        "im_H": [abs(x.imag) for x in h],
        "dQ": {"numerator": [_c(c) for c in dq.numerator], "periods": {k: _c(pv[k]) for k in pv.labels}},
    }


def _boutroux_row(r: crit.BoutrouxResult) -> dict:
    return {
        "family": r.family,
        "g2": r.g2,
        "g3": r.g3,
        "residuals": list(r.residuals),
        "ratio": r.ratio,
        "implied_h": r.implied_h,
        "iterations": r.iterations,
    }


def cmd_boutroux(args, cfg):
    g2 = 1.0 if args.g2 is None else args.g2
    if args.scan:
        rows = crit.convention_scan(g2, crit.H_TARGET, cfg.tol)
        keep = ("family", "status", "ratio", "implied_h", "h_error")
        return [{k: r[k] for k in keep} for r in rows]
    bracket = _numbers(args.bracket, float) if args.bracket else cfg.brackets.get(args.family)
    try:
        r = crit.solve_boutroux(args.family, g2, bracket, tol=cfg.tol)
    except NoSolutionInBracket as e:
        raise NoSolutionInBracket(f"{e}; bracket {e.bracket}, end residuals {e.values}", e.bracket, e.values) from None
    return _boutroux_row(r)


def _check(name, value, threshold, ok):
    return {"check": name, "value": value, "threshold": threshold, "pass": bool(ok)}


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def verify_triple(g2, g3, cfg):
    pot = hill.make_potential(g2, g3)
    a = hill.pn_integrals(pot)
    fit = hill.quasimomentum_fit(pot)
    b = fit.H
    edges = hill.band_edges(pot)
    cv = from_roots(edges)
    c = tuple(x.real for x in series.kdv_hamiltonians(cv, cfg.order, cfg.tol))
    names = ("H_m1", "H_p1", "H_p3")
    checks = []
    for i, n in enumerate(names):
        checks.append(_check(f"{n} quadrature vs series", _rel(a[i], c[i]), 1e-5, _rel(a[i], c[i]) < 1e-5))
        lim = 1e-4 if i == 2 else 1e-5
        checks.append(_check(f"{n} quadrature vs fit", _rel(a[i], b[i]), lim, _rel(a[i], b[i]) < lim))
        checks.append(_check(f"{n} fit vs series", _rel(b[i], c[i]), lim, _rel(b[i], c[i]) < lim))
    checks.append(_check("band-edge curve depressed |s1|", abs(cv.coeffs[0]), 1e-6, abs(cv.coeffs[0]) < 1e-6))
    return {
        "suite": "triple-consistency",
        "g2": g2,
        "g3": g3,
        "quadrature": list(a),
        "fit": list(b),
        "series": list(c),
        "band_edges": list(edges),
        "fit_residual": fit.residual,
        "checks": checks,
    }


def verify_gradient(cfg):
    sol = crit.solve_boutroux("monic_plus", 1.0, tol=cfg.tol)
    at = crit.constrained_gradient(crit.chart_point(sol.curve), crit.RE_H3, cfg.fd_step, cfg.order, cfg.tol)
    ref = crit.constrained_gradient(crit.chart_point(from_cubic((0, -1, 0))), crit.RE_H3, cfg.fd_step, cfg.order, cfg.tol)
    checks = [
        _check("critical at Boutroux curve", at.relative, 1e-5, at.projected_norm < 1e-5 * (at.raw_norm + 1e-8)),
        _check("not critical at (0,-1,0)", ref.projected_norm / ref.raw_norm, 1e-3, ref.projected_norm > 1e-3 * ref.raw_norm),
    ]
    return {
        "suite": "gradient",
        "boutroux_curve": [sol.curve.coeffs[1].real, sol.curve.coeffs[2].real],
        "at_solution": {"raw_norm": at.raw_norm, "projected_norm": at.projected_norm},
        "at_reference": {"raw_norm": ref.raw_norm, "projected_norm": ref.projected_norm},
        "checks": checks,
    }


def random_real_root_curves(rng, n=20, sep=0.2):
    out = []
    while len(out) < n:
        r = np.sort(rng.uniform(-3, 3, 3))
        if np.min(np.diff(r)) > sep:
            out.append(from_roots(r))
    return out


def random_potential_invariants(rng, n=20):
    out = []
    for _ in range(n):
        g2 = rng.uniform(0.5, 8.0)
        g3 = rng.uniform(-0.9, 0.9) * math.sqrt(g2**3 / 27)
        out.append((g2, g3))
    return out


def verify_obstruction(cfg):
    rng = np.random.default_rng(cfg.seed)
    res = []
    for cv in random_real_root_curves(rng):
        r = crit.boutroux_residual(cv, cfg.tol)
        res.append(max(abs(x) for x in r) / crit.residual_scale(cv))
    ups = []
    for g2, g3 in random_potential_invariants(rng):
        pot = hill.make_potential(g2, g3)
        ups.append(hill.mean_u_prime_squared(pot) / pot.scale**3)
    checks = [
        _check("min normalized residual, real roots", min(res), 1e-3, min(res) > 1e-3),
        _check("min normalized <u'^2>", min(ups), 1e-6, min(ups) > 1e-6),
    ]
    return {"suite": "obstruction", "seed": cfg.seed, "residuals": res, "mean_up2": ups, "checks": checks}


def cmd_verify(args, cfg):
    if args.suite == "triple-consistency":
        g2 = 4.0 if args.g2 is None else args.g2
        g3 = 0.5 if args.g3 is None else args.g3
        return verify_triple(g2, g3, cfg)
    if args.suite == "gradient":
        return verify_gradient(cfg)
    return verify_obstruction(cfg)


def cmd_sweep(args, cfg):
    fam = crit._family(args.family)
    g2 = 1.0 if args.g2 is None else args.g2
    if args.bracket:
        lo, hi = _numbers(args.bracket, float)
    else:
        lo, hi = (b * g2**1.5 for b in fam.bracket)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "g2", "g3", "ratio", "r_A", "r_B"])
    for p in np.linspace(lo, hi, args.points):
        rA, rB = crit.boutroux_residual(fam.curve(g2, p), cfg.tol)
        w.writerow([args.family, _fmt(g2), _fmt(p), _fmt(p / g2**1.5), _fmt(rA), _fmt(rB)])
    return buf.getvalue()


COMMANDS = {
    "curve-info": cmd_curve_info,
    "kdv": cmd_kdv,
    "boutroux": cmd_boutroux,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rncurves", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--coeffs", help="lower coefficients s1,s2,s3 of the monic polynomial")
    common.add_argument("--roots", help="branch points, complex allowed (1+2j)")
    common.add_argument("--g2", type=float)
    common.add_argument("--g3", type=float)
    common.add_argument("--family", default="weierstrass_plus", help=", ".join(crit.FAMILIES))
    common.add_argument("--bracket", help="lo,hi for the free parameter g3")
    common.add_argument("--order", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--json-out", help="also write the output to this file")
    common.add_argument("--config", help="JSON file with RunConfig fields")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("curve-info", parents=[common])
    sub.add_parser("kdv", parents=[common])
    b = sub.add_parser("boutroux", parents=[common])
    b.add_argument("--scan", action="store_true", help="solve every registered family and compare h")
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("suite", choices=SUITES)
    s = sub.add_parser("sweep", parents=[common])
    s.add_argument("--points", type=int, default=25)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        out = COMMANDS[args.command](args, cfg)
    except InputError as e:
        print(f"rncurves: error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"rncurves: numerical failure: {e}", file=sys.stderr)
        return 1
    text = out if isinstance(out, str) else dumps(out) + "\n"
    sys.stdout.write(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    if args.command == "verify":
        return 0 if all(c["pass"] for c in out["checks"]) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
