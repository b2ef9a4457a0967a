"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 invalid input, 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tolerances: dict
    versions: dict
    wall_time: float = 0.0
    outputs: list = field(default_factory=list)
    # kept apart from the outputs so those stay byte-reproducible
    created_utc: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def _versions() -> dict:
    import scipy
    return {"bellscope": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialise {type(o).__name__}")


def load_config(path: Optional[str]) -> dict:
    """JSON object or flat 'key = value' lines (TOML subset)."""
    if not path:
        return {}
    try:
        text = open(path).read()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read config: {exc}")
    try:
        obj = json.loads(text)
        if not isinstance(obj, dict):
            raise CliError(EXIT_USAGE, "config must be a JSON object")
        return obj
    except json.JSONDecodeError:
        pass
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise CliError(EXIT_USAGE, f"config line {n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v.strip("'\"")
    return out


def _parse_grid(spec: str) -> np.ndarray:
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise CliError(EXIT_USAGE, f"grid must look like A:B:N, got {spec!r}")
    if n < 1:
        raise CliError(EXIT_USAGE, "grid needs at least one point")
    return np.linspace(a, b, n)


def _parse_functional(spec: str):
    """'chsh' or '+'-joined cells abxy, e.g. 0000+1110+1101."""
    from .corrgeom import CHSH, BellFunctional
    if spec.lower() == "chsh":
        return CHSH
    coeffs = np.zeros((2, 2, 2, 2))
    for term in spec.split("+"):
        term = term.strip()
        if len(term) != 4 or set(term) - {"0", "1"}:
            raise CliError(EXIT_USAGE, f"bad cell {term!r}; use four bits abxy")
        coeffs[tuple(int(ch) for ch in term)] += 1.0
    return BellFunctional(coeffs)


# ---------------------------------------------------------------- commands


def cmd_classify(args) -> dict:
    from .corrgeom import (InvalidCorrelation, classify_pattern, correlation_from_json,
                           validate, zero_pattern)
    try:
        text = sys.stdin.read() if args.input == "-" else open(args.input).read()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read input: {exc}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"invalid JSON: {exc}")
    try:
        c = correlation_from_json(obj, tol=args.tol)
    except InvalidCorrelation as exc:
        raise CliError(EXIT_INVALID, f"invalid correlation: {exc}")
    rep = validate(c, tol=args.tol)
    pattern = zero_pattern(c, tol=args.tol)
    out = {
        "class": classify_pattern(pattern).value if rep.ok else "unphysical",
        "validity": {"nonneg": rep.nonneg, "normalized": rep.normalized,
                     "no_signaling": rep.no_signaling},
        "zeros": sorted("".join(map(str, cell)) for cell in pattern.cells),
    }
    if not rep.ok:
        out["pattern_class"] = classify_pattern(pattern).value
        print(_dump(out))
        raise CliError(EXIT_INVALID, "correlation is not a valid no-signaling behaviour")
    return out


_POINT_CONSTANTS = {
    "hardy": ("nu", "hardy_angle", "hardy_theta"),
    "q": ("tau", "theta0", "alpha0", "kappa1", "kappa2", "kappa3"),
    "cabello": ("mu1", "mu2", "mu3", "mu_plus", "mu_minus", "k1", "k2", "k3",
                "cabello_alpha", "cabello_theta", "cabello_phi"),
    "q4": ("xi1", "xi2", "xi3"),
}


def cmd_named(args) -> dict:
    from .catalog import NAMED_POINTS, named_constants, named_point
    from .corrgeom import chsh_value, correlation_to_json
    from .qstrategy import strategy_to_json
    name = args.point.lower()
    if name not in NAMED_POINTS:
        raise CliError(EXIT_USAGE, f"unknown point {args.point!r}; choose from {', '.join(NAMED_POINTS)}")
    s, c = named_point(name)
    consts = named_constants()
    out = {"point": name, "chsh": chsh_value(c),
           "constants": {k: getattr(consts, k) for k in _POINT_CONSTANTS.get(name, ())}}
    if args.emit in ("correlation", "both"):
        out["correlation"] = correlation_to_json(c)
    if args.emit in ("strategy", "both"):
        out["strategy"] = strategy_to_json(s) if s is not None else None
    return out


def cmd_maximize(args) -> dict:
    from .optima import max_chsh_class, scan_verify
    from .qstrategy import born, entanglement_of_formation
    try:
        opt = max_chsh_class(args.cls)
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_INVALID, str(exc))
    out = {"class": opt.label.value, "value": opt.value,
           "eof": entanglement_of_formation(opt.strategy.state),
           "correlation": born(opt.strategy).table().tolist()}
    if args.verify_scan:
        r = scan_verify(opt.label, args.verify_scan, refine=args.refine, csv_path=args.csv)
        out["scan"] = {"grid": r.grid_n, "scan_max": r.scan_max, "gap": r.gap,
                       "evaluated": r.evaluated, "in_class": r.in_class}
        if args.csv:
            args._outputs.append(args.csv)
    return out


def cmd_scan(args) -> dict:
    from .optima import scan_verify
    try:
        r = scan_verify(args.cls, args.grid, refine=args.refine, csv_path=args.out,
                        budget=args.budget)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc))
    if args.out:
        args._outputs.append(args.out)
    return {"class": r.label.value, "grid": r.grid_n, "scan_max": r.scan_max,
            "closed_form": r.closed_form, "gap": r.gap, "argmax": r.argmax,
            "evaluated": r.evaluated, "in_class": r.in_class}


def cmd_mes(args) -> dict:
    from .corrgeom import chsh_value
    from .optima import construct_block_strategy, max_chsh_mes
    if args.d < 2:
        raise CliError(EXIT_INVALID, "dimension must be at least 2")
    bs = construct_block_strategy(args.d)
    return {"d": args.d, "value": max_chsh_mes(args.d),
            "achieved": chsh_value(bs.correlation()),
            "decomposition": [{"weight": w, "nonlocal": nl} for w, _, nl in bs.decomposition]}


def cmd_certify(args) -> dict:
    from .lpcert import CERTIFIABLE, certify_nonexposed
    name = args.point.lower()
    if name not in CERTIFIABLE:
        raise CliError(EXIT_USAGE, f"no certificate for {args.point!r}; choose from {', '.join(CERTIFIABLE)}")
    cert = certify_nonexposed(name)
    out = cert.to_json()
    out["certified"] = cert.certified
    if not cert.certified:
        print(_dump(out))
        raise CliError(EXIT_SOLVER, "certificate did not verify")
    return out


def cmd_robust(args) -> dict:
    from .catalog import QUANTUM_REFERENCES
    from .sdprelax import (RelaxationFailure, meas_merit_bound, swap_fidelity_bound,
                           write_robust_csv)
    name = args.point.lower()
    if name not in QUANTUM_REFERENCES:
        raise CliError(EXIT_USAGE, f"no quantum reference for {args.point!r}")
    if args.eps < 0:
        raise CliError(EXIT_INVALID, "eps must be nonnegative")
    rows = []
    for s in _parse_grid(args.chsh_grid):
        try:
            if args.merit == "state":
                bound = swap_fidelity_bound(name, float(s), args.eps, args.level)
            else:
                bound = meas_merit_bound(name, args.merit[-1], float(s), args.eps, args.level)
        except RelaxationFailure as exc:
            bound = float("nan")
            print(f"warning: S={s:.6g}: {exc}", file=sys.stderr)
        rows.append((float(s), args.eps, bound, args.merit))
    if args.out:
        write_robust_csv(rows, args.out)
        args._outputs.append(args.out)
    return {"point": name, "merit": args.merit, "level": args.level,
            "rows": [{"S": r[0], "eps": r[1], "bound": r[2]} for r in rows]}


def cmd_curve(args) -> dict:
    from .sdprelax import boundary_curve, write_curve_csv
    f = _parse_functional(args.functional)
    pts = boundary_curve(f, args.level, _parse_grid(args.grid), workers=args.threads)
    if args.out:
        write_curve_csv(pts, args.out, args.level)
        args._outputs.append(args.out)
    return {"functional": args.functional, "level": args.level,
            "points": [asdict(p) for p in pts]}


# ---------------------------------------------------------------- parser


def _threads_default() -> int:
    try:
        return max(1, int(os.environ.get("BELLSCOPE_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellscope", description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, default=None, help="zero / validity tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=None, help="seed for randomised work (default 0)")
    p.add_argument("--config", help="JSON or key = value file with defaults")
    p.add_argument("--manifest", help="write a run manifest JSON here")
    p.add_argument("--version", action="version", version=f"bellscope {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="zero class and validity of a correlation JSON file")
    c.add_argument("input", help="file with {\"p\": 4x4 table} or - for stdin")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("named", help="catalogue entry for a named point")
    c.add_argument("--point", required=True)
    c.add_argument("--emit", choices=("correlation", "strategy", "both"), default="correlation")
    c.set_defaults(func=cmd_named)

    c = sub.add_parser("maximize", help="maximal CHSH value within a zero class")
    c.add_argument("--class", dest="cls", required=True)
    c.add_argument("--verify-scan", type=int, default=0, metavar="N")
    c.add_argument("--refine", type=int, default=0)
    c.add_argument("--csv")
    c.set_defaults(func=cmd_maximize)

    c = sub.add_parser("scan", help="grid scan of a class family")
    c.add_argument("--class", dest="cls", required=True)
    c.add_argument("--grid", type=int, default=200)
    c.add_argument("--refine", type=int, default=0)
    c.add_argument("--budget", type=int, default=None)
    c.add_argument("--out")
    c.set_defaults(func=cmd_scan)

    c = sub.add_parser("mes", help="maximal CHSH with a d-dimensional maximally entangled state")
    c.add_argument("--d", type=int, required=True)
    c.set_defaults(func=cmd_mes)

    c = sub.add_parser("certify-nonexposed", help="LP certificate that a point is not exposed")
    c.add_argument("--point", required=True)
    c.set_defaults(func=cmd_certify)

    c = sub.add_parser("robust", help="SWAP-method robustness bounds along a CHSH grid")
    c.add_argument("--point", required=True)
    c.add_argument("--eps", type=float, default=0.0)
    c.add_argument("--chsh-grid", required=True, metavar="A:B:N")
    c.add_argument("--level", type=int, default=3)
    c.add_argument("--merit", choices=("state", "measA", "measB"), default="state")
    c.add_argument("--out")
    c.set_defaults(func=cmd_robust)

    c = sub.add_parser("curve", help="min/max CHSH over the relaxation along a functional")
    c.add_argument("--functional", required=True, help="chsh or cells like 0000+1110+1101")
    c.add_argument("--level", type=int, default=2)
    c.add_argument("--grid", required=True, metavar="A:B:N")
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--out")
    c.set_defaults(func=cmd_curve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config)
        if args.tol is None:
            args.tol = float(cfg.get("tol", 1e-9))
        if args.seed is None:
            args.seed = int(cfg.get("seed", 0))
        if getattr(args, "threads", 1) is None:
            args.threads = int(cfg.get("threads", _threads_default()))
        if args.tol <= 0:
            raise CliError(EXIT_USAGE, "--tol must be positive")
        np.random.seed(args.seed)
        args._outputs = []
        result = args.func(args)
        print(_dump(result))
        code = EXIT_OK
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = exc.code
    except Exception as exc:  # solver or numerical failure
        from .sdprelax import RelaxationFailure
        if isinstance(exc, RelaxationFailure):
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_SOLVER
        else:
            raise
    outputs = list(getattr(args, "_outputs", []))
    target = args.manifest or (outputs[0] + ".manifest.json" if outputs else None)
    if target:
        params = {k: v for k, v in vars(args).items()
                  if not k.startswith("_") and k not in ("func", "manifest")}
        m = RunManifest(args.command, params, {"tol": args.tol}, _versions(),
                        time.perf_counter() - t0, outputs,
                        time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
        with open(target, "w") as fh:
            fh.write(_dump(m.to_json()))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
