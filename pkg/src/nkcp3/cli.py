"""Command-line driver: verify, scan, identities, flag, canon.

Every command builds a report {"schema": 1, "command", "tolerances", "checks",
"pass"} and exits 0 if all checks pass, 1 otherwise, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from . import catalog, flag, linear_model, symmetry
from .algebra import matrix_from_json
from .chart import coframe, mc_pullback_fd

SCHEMA = 1


class UsageError(Exception):
    pass


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    return v


def check(name, value, target, provenance, residual, tol) -> dict:
    return {"name": name, "value": value, "target": target, "provenance": provenance,
            "residual": float(residual), "pass": bool(residual <= tol)}


def make_report(command: dict, tolerances: dict, checks: List[dict], extra: Optional[dict] = None):
    rep = {"schema": SCHEMA, "command": command, "tolerances": tolerances, "checks": checks,
           "pass": all(c["pass"] for c in checks)}
    if not checks:
        rep["empty"] = True
    if extra:
        rep.update(extra)
    return _clean(rep)


# ---------------------------------------------------------------------------
# Commands

def cmd_verify(args) -> tuple:
    names = catalog.example_names() if args.example == "all" else [args.example]
    checks = []
    for n in names:
        for c in catalog.verify_example(n, tol=args.tol, fd_tol=args.fd_tol, fd_step=args.fd_step):
            c["name"] = f"{n}.{c['name']}"
            checks.append(c)
    return make_report({"name": "verify", "example": args.example}, _tols(args), checks), None


EXPECTED_K3 = [(0.0, 1.0), (1 / np.sqrt(5), 0.0), (np.sqrt(3), 0.0)]
EXPECTED_K2 = [(1.0, 0.0), (0.0, np.sqrt(2 + np.sqrt(3)))]


def _match_roots(found, expected, tol):
    """Greedy matching; returns (max distance of matched expected roots, unmatched found)."""
    left = list(found)
    worst = 0.0
    for e in expected:
        if not left:
            return float("inf"), []
        d = [np.hypot(f[0] - e[0], f[1] - e[1]) for f in left]
        k = int(np.argmin(d))
        worst = max(worst, d[k])
        left.pop(k)
    return worst, left


def cmd_scan(args) -> tuple:
    g = args.group.upper()
    checks = []
    if g == "K1":
        s_vals = np.linspace(0.0, args.hi, args.n if args.n else 13)
        roots = symmetry.scan_k1(s_vals)
        mu = max((float(np.abs(r.mu).max()) for r in roots), default=0.0)
        fmax = max((abs(r.extra["f"]) for r in roots), default=0.0)
        checks.append(check("roots_found", len(roots), f">= {len(s_vals)}", "REFERENCE",
                            max(0, len(s_vals) - len(roots)), 0))
        checks.append(check("mu_on_roots", mu, 0.0, "REFERENCE", mu, args.tol))
        checks.append(check("f_on_roots", fmax, 0.0, "REFERENCE", fmax, args.tol))
    else:
        n = args.n if args.n else 400
        roots = symmetry.scan_slice(g, args.lo, args.hi, n)
        if g == "K3":
            worst, extra = _match_roots([r.coords for r in roots], EXPECTED_K3, 1e-8)
            checks.append(check("roots_match", [list(r.coords) for r in roots],
                                [list(e) for e in EXPECTED_K3], "REFERENCE", worst, 1e-8))
            checks.append(check("no_extra_roots", len(extra), 0, "REFERENCE", len(extra), 0))
        else:
            named = [r for r in roots if r.note in ("P21", "P22")]
            cong = [r for r in roots if r.note.startswith("congruent")]
            worst, extra = _match_roots([r.coords for r in named], EXPECTED_K2, 1e-8)
            checks.append(check("roots_match", [list(r.coords) for r in named],
                                [list(e) for e in EXPECTED_K2], "REFERENCE", worst, 1e-8))
            checks.append(check("other_roots_congruent", len(roots) - len(named) - len(cong), 0,
                                "DERIVED", len(roots) - len(named) - len(cong), 0))
        mu = max((float(np.abs(r.mu).max()) for r in roots), default=0.0)
        checks.append(check("mu_on_roots", mu, 0.0, "DERIVED", mu, args.tol))
    rows = [r.row() for r in roots]
    rep = make_report({"name": "scan", "group": g, "n": args.n, "lo": args.lo, "hi": args.hi},
                      _tols(args), checks, {"roots": rows})
    return rep, ("scan_" + g.lower(), rows)


def _random_chart_point(rng, scale=0.8):
    return scale * (rng.normal(size=3) + 1j * rng.normal(size=3))


def cmd_identities(args) -> tuple:
    rng = np.random.default_rng(args.seed)
    checks = []
    worst = {}

    def upd(key, v):
        worst[key] = max(worst.get(key, 0.0), float(v))

    for gid in ("K1", "K2", "K3"):
        gen = symmetry.generator_set(gid)
        if args.corrupt_sign:
            xis = list(gen.xis)
            xis[-1] = -xis[-1]
            gen = replace(gen, xis=xis)
        for _ in range(args.samples):
            p = _random_chart_point(rng)
            r = symmetry.dnu_identity_residual(gen, p, step=1e-4)
            upd(f"{gid}.dnu", r["nu_residual"])
            upd(f"{gid}.dmu", r["mu_residual"])
            upd(f"{gid}.re_psi", symmetry.reps_vanishing_check(gen, p))
            h = symmetry.random_hom_point(rng)
            g = symmetry.random_subgroup_element(gen, rng)
            e = symmetry.equivariance_residual(gen, h, g)
            upd(f"{gid}.equivariance", max(e["mu"], e["nu"]))
    for _ in range(args.samples):
        p = _random_chart_point(rng)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        upd("coframe_consistency", np.abs(mc_pullback_fd(p, v).omega - coframe(p, v)).max())
    tol_for = {"dnu": 1e-6, "dmu": 1e-6, "re_psi": 1e-10, "equivariance": 1e-9,
               "consistency": 1e-6}
    for key in sorted(worst):
        t = tol_for[key.split(".")[-1].replace("coframe_", "")]
        checks.append(check(key, worst[key], 0.0, "DERIVED", worst[key], t))
    cmd = {"name": "identities", "samples": args.samples, "seed": args.seed,
           "corrupt_sign": bool(args.corrupt_sign)}
    return make_report(cmd, _tols(args), checks), None


def cmd_flag(args) -> tuple:
    z = flag.zero_locus_grid(args.n)
    conv = flag.conversion_constant(seed=args.seed)
    surv = flag.stabilizer_survey(args.samples, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    fd = max(abs(flag.jacobian_det_fd(sp) - flag.jacobian_det_slice(sp))
             / max(1.0, abs(flag.jacobian_det_slice(sp))) for sp in rng.uniform(-3, 3, (50, 2)))
    dims = set(surv["so3"]) | set(surv["su2"])
    checks = [
        check("zero_locus_vs_lines", z["mismatch_det"], 0, "REFERENCE", z["mismatch_det"], 0),
        check("degenerate_vs_lines", z["mismatch_degenerate"], 0, "REFERENCE",
              z["mismatch_degenerate"], 0),
        check("sign_changes_off_lines", z["sign_changes_off_lines"], 0, "REFERENCE",
              z["sign_changes_off_lines"], 0),
        check("lines_crossed", z["lines_crossed"], 3, "REFERENCE", 3 - z["lines_crossed"], 0),
        check("jacobian_closed_form_vs_fd", fd, 0.0, "DERIVED", fd, args.fd_tol),
        check("conversion_constant", conv["constant"], [0.0, 1.0], "DERIVED",
              abs(conv["constant"] - 1j) + conv["spread"], args.tol),
        check("slice_stabilizer_dims", sorted(dims), [0, 1], "REFERENCE",
              len(dims - {0, 1}), 0),
        check("stabilizer_on_random_lines", surv["line_fraction_positive"], 0.0, "DERIVED",
              surv["line_fraction_positive"], 0.0),
    ]
    cmd = {"name": "flag", "n": args.n, "samples": args.samples, "seed": args.seed}
    rows = [{"lam": r[0], "mu": r[1], "det": r[2], "zero": int(r[3])} for r in z["rows"]]
    return make_report(cmd, _tols(args), checks, {"stabilizers": surv}), ("flag_jacobian", rows)


def load_basis(path: str) -> np.ndarray:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read basis file: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {path}: {e}")
    rows = data.get("basis") if isinstance(data, dict) else data
    try:
        B = matrix_from_json(rows)
    except (TypeError, ValueError, IndexError, KeyError) as e:
        raise UsageError(f"basis must be a 3x3 array of [re, im] pairs (columns = vectors): {e}")
    if B.shape != (3, 3):
        raise UsageError(f"basis must be 3x3, got {B.shape}")
    return B


def cmd_canon(args) -> tuple:
    B = load_basis(args.basis)
    try:
        ok, res = linear_model.is_special_lagrangian_subspace(B, 1e-10)
    except ValueError as e:
        raise UsageError(str(e))
    checks = [check("special_lagrangian", ok, True, "DERIVED", max(res["omega"], res["volume"]),
                    1e-10)]
    extra = {"sl_residuals": res}
    if ok:
        cf = linear_model.canonical_theta(B)
        extra.update({"theta": cf.theta, "n_w": cf.n_w, "half_abs_cos2theta": cf.half_abs_cos2theta})
        if args.expect_theta is not None:
            checks.append(check("theta", cf.theta, args.expect_theta, "DERIVED",
                                abs(cf.theta - args.expect_theta), 1e-9))
    return make_report({"name": "canon", "basis": os.path.basename(args.basis)},
                       _tols(args), checks, extra), None


# ---------------------------------------------------------------------------
# Plumbing

def _tols(args) -> dict:
    return {"tol": args.tol, "fd_tol": args.fd_tol, "fd_step": args.fd_step}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="algebraic tolerance")
    common.add_argument("--fd-tol", type=float, default=1e-4,
                        help="tolerance for finite-difference checks")
    common.add_argument("--fd-step", type=float, default=1e-3)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--out-dir", default=None)

    p = argparse.ArgumentParser(prog="nkcp3", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    v = sub.add_parser("verify", parents=[common], help="verify a named example")
    v.add_argument("example", choices=catalog.example_names() + ["all"])
    v.set_defaults(func=cmd_verify)
    s = sub.add_parser("scan", parents=[common], help="moment map zeros on a slice")
    s.add_argument("group", choices=("k1", "k2", "k3", "K1", "K2", "K3"))
    s.add_argument("--n", type=int, default=0, help="grid size (default 400; 13 s-values for k1)")
    s.add_argument("--lo", type=float, default=0.0)
    s.add_argument("--hi", type=float, default=None)
    s.set_defaults(func=cmd_scan)
    i = sub.add_parser("identities", parents=[common], help="moment identity suites")
    i.add_argument("--samples", type=int, default=100)
    i.add_argument("--corrupt-sign", action="store_true",
                   help="negate the third generator (negative control)")
    i.set_defaults(func=cmd_identities)
    f = sub.add_parser("flag", parents=[common], help="Jacobian zero locus and stabilisers")
    f.add_argument("--n", type=int, default=200)
    f.add_argument("--samples", type=int, default=10000)
    f.set_defaults(func=cmd_flag)
    c = sub.add_parser("canon", parents=[common], help="canonical angle of a 3-plane in C^3")
    c.add_argument("--basis", required=True, help="JSON file with a 3x3 complex basis")
    c.add_argument("--expect-theta", type=float, default=None)
    c.set_defaults(func=cmd_canon)
    return p


def _csv_text(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                    for k, v in r.items()})
    return buf.getvalue()


def _check_rows(rep) -> list:
    return [{"name": c["name"], "residual": c["residual"], "pass": int(c["pass"])}
            for c in rep["checks"]]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "hi", 0) is None:
        args.hi = 3.0 if args.group.upper() == "K1" else 5.0
    if getattr(args, "samples", 0) < 0 or getattr(args, "n", 0) < 0:
        parser.error("sizes must be non-negative")
    try:
        rep, table = args.func(args)
    except UsageError as e:
        print(f"nkcp3: error: {e}", file=sys.stderr)
        return 2
    text = json.dumps(rep, indent=2)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, f"{args.cmd}_report.json"), "w") as fh:
            fh.write(text + "\n")
        if table is not None:
            with open(os.path.join(args.out_dir, table[0] + ".csv"), "w") as fh:
                fh.write(_csv_text(table[1]))
    if args.output == "csv":
        sys.stdout.write(_csv_text(table[1] if table is not None else _check_rows(rep)))
    else:
        print(text)
    return 0 if rep["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
