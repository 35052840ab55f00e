"""Command-line front end: ``wernerqfi {scan,thresholds,score,simulate,verify}``.

Option values resolve as command-line flag, then ``--config`` file, then the
built-in default. The config file is flat ``key = value`` text; keys are the
long option names with dashes or underscores (``theta-grid = 0,0.9,10``),
``#`` starts a comment.

Exit codes: 0 success, 1 usage/config error, 2 domain error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapacityError, ValidationError, WernerQFIError
from .estimation import run_experiment
from .hermitian import DENSE_CAP_ENV, dense_cap
from .metrics import (
    computational_povm,
    cramer_rao_bound,
    ghz_povm,
    qfi_sld,
    trivial_povm,
    werner_fidelity_closed_form,
    werner_qfi_closed_form,
)
from .score import QuadratureConfig, exact_score_spectral, integrate_score, rld, sld
from .verify import run_all
from .werner import (
    QuditSystem,
    WernerState,
    derivative,
    density,
    is_entangled,
    qfi_minimizer,
    separability_threshold,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {
    "d": 2,
    "n": 2,
    "theta": 1.0 / 3.0,
    "theta_grid": "0.0,0.9,10",
    "check_dense": False,
    "format": None,
    "out": None,
    "dense_cap": None,
    "d_min": 2,
    "d_max": 5,
    "n_min": 2,
    "n_max": 5,
    "quad_tol": 1e-8,
    "shots": 10_000,
    "trials": 200,
    "seed": 1,
    "povm": "ghz",
    "json": False,
    "fast": False,
    "tolerance": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def render_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(grid: str) -> np.ndarray:
    """``start,stop,count`` → ``count`` evenly spaced θ values, endpoints included."""
    try:
        start_s, stop_s, count_s = (part.strip() for part in str(grid).split(","))
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise UsageError(f"theta grid must be 'start,stop,count', got {grid!r}") from None
    if not (0.0 <= start < stop < 1.0) or count < 2:
        raise UsageError(f"theta grid needs 0 <= start < stop < 1 and count >= 2, got {grid!r}")
    return np.linspace(start, stop, count)


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    config = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        config[key] = value
    return config


def _coerce(key: str, value):
    default = DEFAULTS[key]
    if not isinstance(value, str) or key == "theta":
        return value
    try:
        if isinstance(default, bool):
            lowered = value.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return lowered in ("true", "1", "yes")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float) or key in ("tolerance",):
            return float(value)
        if key == "dense_cap":
            return int(value)
    except ValueError:
        raise UsageError(f"invalid value {value!r} for {key}") from None
    return value


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags over config file over defaults."""
    config = load_config(getattr(args, "config", None))
    merged = {}
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in config:
            merged[key] = _coerce(key, config[key])
        else:
            merged[key] = DEFAULTS[key]
    merged["command"] = args.command
    if merged["dense_cap"] is not None:
        merged["dense_cap"] = dense_cap(int(merged["dense_cap"]))
    return merged


def _theta(value) -> float:
    # accepts fractions such as 1/3 for convenience
    text = str(value)
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


# --- commands -----------------------------------------------------------------

SCAN_COLUMNS = ["theta", "qfi_closed", "qfi_dense", "fidelity_closed", "cr_bound", "is_entangled"]


def cmd_scan(cfg: dict) -> int:
    system = QuditSystem(cfg["d"], cfg["n"])
    thetas = parse_grid(cfg["theta_grid"])
    cap = cfg["dense_cap"]
    drho = derivative(system, cap) if cfg["check_dense"] else None
    rows = []
    for theta in thetas:
        j = werner_qfi_closed_form(system, theta)
        dense = qfi_sld(density(WernerState(system, theta), cap), drho) if drho is not None else None
        rows.append(
            {
                "theta": float(theta),
                "qfi_closed": j,
                "qfi_dense": dense,
                "fidelity_closed": werner_fidelity_closed_form(system, theta),
                "cr_bound": cramer_rao_bound(j),
                "is_entangled": is_entangled(system, theta),
            }
        )
    if (cfg["format"] or "csv") == "json":
        emit(render_json(rows), cfg["out"])
    else:
        emit(render_csv(SCAN_COLUMNS, rows), cfg["out"])
    return EXIT_OK


THRESHOLD_COLUMNS = ["d", "n", "D", "theta_star", "theta_min", "gap", "fidelity_at_min"]


def cmd_thresholds(cfg: dict) -> int:
    if cfg["d_min"] < 2 or cfg["n_min"] < 2 or cfg["d_max"] < cfg["d_min"] or cfg["n_max"] < cfg["n_min"]:
        raise UsageError("need 2 <= d-min <= d-max and 2 <= n-min <= n-max")
    rows = []
    for d in range(cfg["d_min"], cfg["d_max"] + 1):
        for n in range(cfg["n_min"], cfg["n_max"] + 1):
            try:
                system = QuditSystem(d, n)
            except CapacityError as exc:
                print(f"warning: skipping d={d} n={n}: {exc}", file=sys.stderr)
                continue
            star, tmin = separability_threshold(system), qfi_minimizer(system)
            rows.append(
                {
                    "d": d,
                    "n": n,
                    "D": system.dim,
                    "theta_star": star,
                    "theta_min": tmin,
                    "gap": tmin - star,
                    "fidelity_at_min": werner_fidelity_closed_form(system, tmin),
                }
            )
    if (cfg["format"] or "csv") == "json":
        emit(render_json(rows), cfg["out"])
    else:
        emit(render_csv(THRESHOLD_COLUMNS, rows), cfg["out"])
    return EXIT_OK


def score_report(d: int, n: int, theta: float, quad_tol: float = 1e-8, cap: int | None = None) -> dict:
    system = QuditSystem(d, n)
    rho = density(WernerState(system, theta), cap)
    drho = derivative(system, cap)
    quad = integrate_score(rho, drho, QuadratureConfig(rel_tol=quad_tol))
    scores = {
        "sld": sld(rho, drho).matrix,
        "rld": rld(rho, drho),
        "exact_spectral": exact_score_spectral(rho, drho).matrix,
        "exact_quadrature": quad.score.matrix,
    }
    distances = {f"{a}__{b}": float(np.linalg.norm(scores[a] - scores[b])) for a, b in combinations(scores, 2)}
    L = scores["sld"]
    return {
        "d": d,
        "n": n,
        "theta": float(theta),
        "distances": distances,
        "max_distance": max(distances.values()),
        "sld_hermiticity_residual": float(np.linalg.norm(L - L.conj().T)),
        "quadrature_residual": quad.residual,
        "quadrature_panels": quad.panels,
        "quadrature_tail_bound": quad.tail_bound,
    }


def cmd_score(cfg: dict) -> int:
    report = score_report(cfg["d"], cfg["n"], _theta(cfg["theta"]), float(cfg["quad_tol"]), cfg["dense_cap"])
    emit(render_json(report), cfg["out"])
    return EXIT_OK


POVMS = {
    "ghz": lambda system: ghz_povm(system),
    "computational": lambda system: computational_povm(system.dim),
    "trivial": lambda system: trivial_povm(system.dim),
}


def cmd_simulate(cfg: dict) -> int:
    system = QuditSystem(cfg["d"], cfg["n"])
    theta = _theta(cfg["theta"])
    if cfg["povm"] not in POVMS:
        raise UsageError(f"unknown POVM {cfg['povm']!r}; choose from {', '.join(POVMS)}")
    # build the state first so capacity/parameter errors precede POVM construction
    density(WernerState(system, theta), cfg["dense_cap"])
    povm = POVMS[cfg["povm"]](system)
    report = run_experiment(system, theta, povm, cfg["shots"], cfg["trials"], cfg["seed"])
    payload = {
        "config": {
            "d": system.d,
            "n": system.n,
            "theta": theta,
            "povm": cfg["povm"],
            "shots": cfg["shots"],
            "trials": cfg["trials"],
            "seed": cfg["seed"],
        },
        "report": report.to_dict(),
    }
    emit(render_json(payload), cfg["out"])
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    results = run_all(fast=cfg["fast"], tolerance=cfg["tolerance"])
    if cfg["json"]:
        emit(render_json([r.to_dict() for r in results]), cfg["out"])
    else:
        emit("".join(r.line() + "\n" for r in results), cfg["out"])
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed:", file=sys.stderr)
        for r in failed:
            print(f"  C{r.criterion} {r.name}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {
    "scan": cmd_scan,
    "thresholds": cmd_thresholds,
    "score": cmd_score,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="wernerqfi",
        description="Fisher information, scores and fidelity of Werner-type N-qudit states.",
        epilog=f"Environment: {DENSE_CAP_ENV} overrides the dense dimension cap (default 1024).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags take precedence")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--dense-cap", type=int, help=f"dense dimension cap (overrides {DENSE_CAP_ENV})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def system_args(p):
        p.add_argument("--d", type=int, help="levels per particle (default 2)")
        p.add_argument("--n", type=int, help="number of particles (default 2)")

    p = sub.add_parser("scan", parents=[common], help="closed-form QFI, fidelity and bound over a θ grid")
    system_args(p)
    p.add_argument("--theta-grid", help="start,stop,count with 0 <= start < stop < 1 (default 0.0,0.9,10)")
    p.add_argument("--check-dense", action="store_true", default=None, help="also compute the dense QFI")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("thresholds", parents=[common], help="separability point vs QFI minimizer table")
    p.add_argument("--d-min", type=int)
    p.add_argument("--d-max", type=int, help="largest d (default 5)")
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int, help="largest N (default 5)")
    p.add_argument("--format", choices=("csv", "json"))

    p = sub.add_parser("score", parents=[common], help="pairwise distances between the four scores")
    system_args(p)
    p.add_argument("--theta", help="mixing parameter in [0, 1); fractions like 1/3 accepted")
    p.add_argument("--quad-tol", type=float, help="quadrature relative tolerance (default 1e-8)")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo Cramér-Rao experiment (JSON)")
    system_args(p)
    p.add_argument("--theta", help="true mixing parameter (default 1/3)")
    p.add_argument("--shots", type=int, help="measurements per trial (default 10000)")
    p.add_argument("--trials", type=int, help="independent trials (default 200)")
    p.add_argument("--seed", type=int, help="64-bit seed (default 1)")
    p.add_argument("--povm", choices=tuple(POVMS), help="measurement (default ghz)")

    p = sub.add_parser("verify", parents=[common], help="run the self-verification suite")
    p.add_argument("--json", action="store_true", default=None, help="machine-readable results")
    p.add_argument("--fast", action="store_true", default=None, help="thinned grids")
    p.add_argument("--tolerance", type=float, help="replace every tolerance with this value")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"wernerqfi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WernerQFIError as exc:
        code = EXIT_USAGE if isinstance(exc, ValidationError) else EXIT_DOMAIN
        print(f"wernerqfi: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
