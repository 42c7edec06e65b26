"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 mathematical precondition
violated, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .chain import Chain, iterate
from .errors import DegeneratePairing, NotAProjector, NotComplementary, ParameterCollision, RankMismatch
from .kdv import relative_residual, residual_scan, write_field_csv
from .lax import default_grid
from .maps import check_parameters, collide
from .verify import FAMILIES, check_reversibility, check_yang_baxter

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_FAILED = 0, 1, 2, 3

CERTIFICATE_TOL = 1e-9
YB_TOL = 1e-9
REVERSIBILITY_TOL = 1e-10
DRIFT_TOL = 1e-8
KDV_TOL = 1e-10

MATH_ERRORS = (ParameterCollision, DegeneratePairing, NotComplementary, RankMismatch)


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _emit(args, payload):
    text = payload if isinstance(payload, str) else io.dumps(payload)
    if args.out:
        io.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _load(path):
    return io.load_json(path)


def cmd_collide(args):
    doc = _load(args.input)
    records = doc.get("states") if isinstance(doc, dict) else doc
    if not isinstance(records, list) or len(records) != 2:
        raise io.InputError('expected "states": a list of exactly two records')
    kinds = {io.state_kind(r, f"states[{i}]") for i, r in enumerate(records)}
    if len(kinds) != 1:
        raise io.InputError(f"states mix different forms: {sorted(kinds)}", "states")
    family = kinds.pop()
    if isinstance(doc, dict) and doc.get("family", family) != family:
        raise io.InputError(f'"family" is {doc["family"]!r} but states are {family}', "family")
    (s1, l1), (s2, l2) = (io.decode_state(r, f"states[{i}]") for i, r in enumerate(records))
    if family == "grassmannian" and (l1.imag != 0 or l2.imag != 0):
        raise io.InputError("grassmannian states need real lambda", "states")
    check_parameters(l1, l2)
    grid = default_grid([l1, l2], size=args.zeta_samples, seed=args.seed)
    result = collide(l1, s1, l2, s2, grid=grid)
    tol = CERTIFICATE_TOL if args.tol is None else args.tol
    out = {
        "family": family,
        "states": [io.encode_state(s, lam) for s, lam in zip(result.states, result.lambdas)],
        "ranks": [p.rank for p in result.projectors],
        "residual": result.residual,
        "tol": tol,
        "seed": args.seed,
        "zeta_samples": args.zeta_samples,
    }
    _emit(args, out)
    return EXIT_OK if result.residual <= tol else EXIT_FAILED


def cmd_verify(args):
    if args.family not in FAMILIES:
        raise io.InputError(f"unknown family {args.family!r}; choose from {sorted(FAMILIES)}", "--family")
    if args.trials < 1:
        raise io.InputError("must be >= 1", "--trials")
    reports = []
    if args.check in ("yang-baxter", "both"):
        tol = YB_TOL if args.tol is None else args.tol
        reports.append(check_yang_baxter(args.family, args.trials, args.seed, tol))
    if args.check in ("reversibility", "both"):
        tol = REVERSIBILITY_TOL if args.tol is None else args.tol
        reports.append(check_reversibility(args.family, args.trials, args.seed, tol))
    dicts = [r.to_dict(timing=args.timing) for r in reports]
    _emit(args, dicts[0] if len(dicts) == 1 else dicts)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_transfer(args):
    chain = Chain.from_json(_load(args.input))
    if args.steps < 0:
        raise io.InputError("must be >= 0", "--steps")
    lams = chain.lambdas
    for k in range(1, len(lams)):
        try:
            check_parameters(lams[0], lams[k])
        except ParameterCollision as exc:
            raise ParameterCollision(f"step 1: site {k + 1}: {exc}") from exc
    grid = default_grid(lams, size=args.zeta_samples, seed=args.seed)
    traj = iterate(chain, args.steps, grid)
    tol = DRIFT_TOL if args.tol is None else args.tol
    lines = []
    for rec in traj.records():
        rec = {"step": rec["step"], "drift": rec["drift"], "det_error": rec["det_error"],
               "tol": tol, "seed": args.seed, "chain": rec["chain"]}
        lines.append(json.dumps(rec))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if traj.max_drift <= tol else EXIT_FAILED


def _grid_axis(spec, default, name):
    if spec is None:
        spec = default
    if (not isinstance(spec, list) or len(spec) != 3 or not isinstance(spec[2], int)
            or spec[2] < 1 or not all(isinstance(v, (int, float)) for v in spec[:2])):
        raise io.InputError("expected [low, high, count]", f"grid.{name}")
    return np.linspace(float(spec[0]), float(spec[1]), spec[2])


def cmd_kdv(args):
    doc = _load(args.input)
    if not isinstance(doc, dict):
        raise io.InputError("expected an object")
    key = "projector" if "projector" in doc else "amplitude"
    if key not in doc:
        raise io.InputError('missing "projector" (or "amplitude")')
    amp = io.decode_matrix(doc[key], key)
    if amp.shape[0] != amp.shape[1]:
        raise io.InputError("matrix must be square", key)
    if "lambda" not in doc:
        raise io.InputError('missing "lambda"')
    lam = io.decode_complex(doc["lambda"], "lambda")
    if lam.imag != 0:
        raise io.InputError("soliton velocity must be real", "lambda")
    lam = lam.real
    grid = doc.get("grid", {})
    if not isinstance(grid, dict):
        raise io.InputError("expected an object", "grid")
    xs = _grid_axis(grid.get("x"), [-5.0, 5.0, 21], "x")
    ts = _grid_axis(grid.get("t"), [-1.0, 1.0, 21], "t")
    scan = residual_scan(amp, lam, xs, ts)
    worst = float(scan.max())
    i, j = np.unravel_index(int(np.argmax(scan)), scan.shape)
    tol = KDV_TOL if args.tol is None else args.tol
    out = {
        "lambda": lam,
        "ambient_dim": amp.shape[0],
        "grid": {"x": [float(xs[0]), float(xs[-1]), len(xs)], "t": [float(ts[0]), float(ts[-1]), len(ts)]},
        "max_residual": worst,
        "argmax": [float(xs[i]), float(ts[j])],
        "residual_at_origin": relative_residual(amp, lam, 0.0, 0.0),
        "tol": tol,
    }
    if args.csv:
        write_field_csv(args.csv, amp, lam, xs, ts)
    _emit(args, out)
    return EXIT_OK if worst <= tol else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="ybmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, zeta=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if zeta:
            p.add_argument("--zeta-samples", type=int, default=16)

    p = sub.add_parser("collide", help="apply a Yang-Baxter map to two states")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_collide)

    p = sub.add_parser("verify", help="run a Yang-Baxter / reversibility campaign")
    p.add_argument("--family", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--check", choices=["yang-baxter", "reversibility", "both"], default="both")
    p.add_argument("--timing", action="store_true", help="record runtime_ms (breaks byte-identity)")
    common(p, zeta=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transfer", help="iterate the transfer map on a chain")
    p.add_argument("input")
    p.add_argument("--steps", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("kdv", help="scan the matrix KdV residual of a soliton")
    p.add_argument("input")
    p.add_argument("--csv", default=None, help="also write a field snapshot as CSV")
    common(p, zeta=False)
    p.set_defaults(func=cmd_kdv)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except MATH_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (io.InputError, NotAProjector, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
