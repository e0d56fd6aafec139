"""Command-line front end.

    python -m alpha_envelope solve|sweep|check|oracle-compare --config run.json [--out DIR] [--field CSV]

Exit codes: 0 ok, 1 verification failure, 2 usage or config error,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .analysis import c1_diagnostic, check_alpha_convex, compare_fields, lipschitz_estimate
from .envelope import EnvelopeResult, Field, alpha_sweep, residual, setup, solve_on_arms
from .expr import ExpressionError
from .geometry import StrictlyConvexDomain, domain_from_spec, parse_datum
from .oracles import convex_envelope_oracle, quasiconvex_envelope_oracle, sample_boundary
from .scalar import as_alpha

log = logging.getLogger("alpha_envelope")

SCHEMA = "alpha-envelope/1"
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NOCONV = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    domain: dict
    datum: str
    alphas: list[float]
    h: float
    W: int = 2
    tol: float = 1e-10
    max_iter: int = 100_000
    mode: str = "gauss-seidel"
    out: str = "out"
    seed: int = 0
    oracle_samples: int = 1024
    oracle_tol: float | None = None
    check_tol: float = 1e-9
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def alpha(self) -> float:
        return self.alphas[0]


def _number(value, name):
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{name}: cannot read {value!r} as a number")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    return float(value)


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    for key in ("domain", "datum", "h"):
        if key not in raw:
            raise ConfigError(f"missing config key {key!r}")
    if "alpha" in raw and "alphas" in raw:
        raise ConfigError("give either 'alpha' or 'alphas', not both")
    if "alphas" in raw:
        if not isinstance(raw["alphas"], list):
            raise ConfigError("'alphas' must be a list")
        alphas = [_number(a, "alphas") for a in raw["alphas"]]
    elif "alpha" in raw:
        alphas = [_number(raw["alpha"], "alpha")]
    else:
        raise ConfigError("missing config key 'alpha'")
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ConfigError(f"alpha {a} outside [0, 1]")
    cfg = RunConfig(
        domain=raw["domain"],
        datum=raw["datum"],
        alphas=alphas,
        h=_number(raw["h"], "h"),
        W=int(raw.get("W", 2)),
        tol=_number(raw.get("tol", 1e-10), "tol"),
        max_iter=int(raw.get("max_iter", 100_000)),
        mode=raw.get("mode", "gauss-seidel"),
        out=raw.get("out", "out"),
        seed=int(raw.get("seed", 0)),
        oracle_samples=int(raw.get("oracle_samples", 1024)),
        oracle_tol=None if raw.get("oracle_tol") is None else _number(raw["oracle_tol"], "oracle_tol"),
        check_tol=_number(raw.get("check_tol", 1e-9), "check_tol"),
        raw=raw,
    )
    if cfg.W < 1:
        raise ConfigError("W must be at least 1")
    if not cfg.tol > 0:
        raise ConfigError("tol must be positive")
    if cfg.max_iter < 1:
        raise ConfigError("max_iter must be at least 1")
    if cfg.mode not in ("gauss-seidel", "jacobi"):
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    if not isinstance(cfg.datum, str):
        raise ConfigError("datum must be an expression string")
    return cfg


def _prepare(cfg: RunConfig):
    try:
        domain = domain_from_spec(cfg.domain)
        g = parse_datum(cfg.datum)
        arms = setup(domain, g, cfg.h, cfg.W)
    except ExpressionError as exc:
        raise ConfigError(f"datum: {exc}")
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc))
    return domain, g, arms


# -- serialization -----------------------------------------------------------


def write_field_csv(path, f: Field) -> None:
    lines = ["x,y,value"]
    for (x, y), v in zip(f.points, f.values):
        lines.append(f"{x:.17g},{y:.17g},{v:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path):
    """``(points, values)`` from a field CSV."""
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != "x,y,value":
        raise ConfigError(f"{path}: expected header 'x,y,value'")
    rows = [tuple(float(c) for c in line.split(",")) for line in text[1:] if line.strip()]
    arr = np.asarray(rows, dtype=float).reshape(-1, 3)
    return arr[:, :2], arr[:, 2]


def _dump(path, payload: dict) -> None:
    Path(path).write_text(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n")


def _summary(cfg: RunConfig, res: EnvelopeResult) -> dict:
    v = res.field.values
    return {
        "alpha": res.alpha.alpha,
        "h": res.h,
        "W": res.W,
        "tol": res.tol,
        "mode": res.mode,
        "datum": cfg.datum,
        "domain": cfg.domain,
        "nodes": int(v.size),
        "iterations": res.iterations,
        "converged": res.converged,
        "last_sweep_delta": res.last_sweep_delta,
        "residual_max": res.residual_max,
        "lipschitz_estimate": lipschitz_estimate(res.field),
        "min_value": float(v.min()),
        "max_value": float(v.max()),
    }


def _tag(alpha: float) -> str:
    return f"{alpha:.6g}".replace(".", "p")


# -- commands --------------------------------------------------------------------


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    if len(cfg.alphas) != 1:
        raise ConfigError("solve takes a single alpha")
    _, _, arms = _prepare(cfg)
    res = solve_on_arms(arms, cfg.alpha, tol=cfg.tol, max_iter=cfg.max_iter, mode=cfg.mode)
    out.mkdir(parents=True, exist_ok=True)
    write_field_csv(out / "field.csv", res.field)
    _dump(out / "summary.json", _summary(cfg, res))
    return EXIT_OK if res.converged else EXIT_NOCONV


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    alphas = cfg.alphas
    if len(alphas) < 2:
        raise ConfigError("sweep needs at least two alphas")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ConfigError("alphas must be strictly ascending")
    domain, g, arms = _prepare(cfg)
    grid_alphas = sorted(set(alphas) | {0.0, 1.0})
    results = alpha_sweep(domain, g, grid_alphas, cfg.h, cfg.W, cfg.tol, cfg.max_iter, cfg.mode, arms=arms)
    by_alpha = dict(zip(grid_alphas, results))
    out.mkdir(parents=True, exist_ok=True)
    pairs = []
    for a, b in zip(alphas, alphas[1:]):
        sup, _, b_le_a = compare_fields(by_alpha[a].field, by_alpha[b].field)
        pairs.append({"alpha_lo": a, "alpha_hi": b, "sup_diff": sup, "non_increasing": b_le_a})
    sandwich = []
    for a in alphas:
        _, _, above_one = compare_fields(by_alpha[a].field, by_alpha[1.0].field)
        _, below_zero, _ = compare_fields(by_alpha[a].field, by_alpha[0.0].field)
        sandwich.append({"alpha": a, "above_convex": above_one, "below_quasiconvex": below_zero})
    for a in alphas:
        res = by_alpha[a]
        write_field_csv(out / f"field_alpha_{_tag(a)}.csv", res.field)
        _dump(out / f"summary_alpha_{_tag(a)}.json", _summary(cfg, res))
    monotone = all(p["non_increasing"] for p in pairs)
    sand_ok = all(s["above_convex"] and s["below_quasiconvex"] for s in sandwich)
    _dump(
        out / "bridge.json",
        {"alphas": alphas, "pairs": pairs, "monotone": monotone, "sandwich": sandwich, "sandwich_ok": sand_ok},
    )
    if not all(r.converged for r in results):
        return EXIT_NOCONV
    return EXIT_OK if monotone and sand_ok else EXIT_VERIFY


def cmd_check(cfg: RunConfig, out: Path, field_path) -> int:
    if field_path is None:
        raise ConfigError("check needs --field")
    if len(cfg.alphas) != 1:
        raise ConfigError("check takes a single alpha")
    _, _, arms = _prepare(cfg)
    pts, vals = read_field_csv(field_path)
    if pts.shape != arms.grid.points.shape or not np.allclose(pts, arms.grid.points, rtol=0, atol=1e-12):
        raise ConfigError("field file does not match the configured grid")
    f = Field(arms, vals)
    report = check_alpha_convex(f, cfg.alpha, tol=cfg.check_tol)
    _, rmax = residual(f, cfg.alpha)
    payload = {
        "alpha": cfg.alpha,
        "h": cfg.h,
        "W": cfg.W,
        "field": str(field_path),
        "alpha_convex": report.ok,
        "report": report.to_dict(),
        "residual_max": rmax,
        "lipschitz_estimate": lipschitz_estimate(f),
        "c1_diagnostic": [{"r": r, "max_jump": j} for r, j in c1_diagnostic(f)],
    }
    out.mkdir(parents=True, exist_ok=True)
    _dump(out / "check.json", payload)
    for v in report.violations[:10]:
        log.info("violation at node %d (%.6g, %.6g): deficit %.3g", v.node, *f.points[v.node], v.deficit)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_oracle_compare(cfg: RunConfig, out: Path) -> int:
    if len(cfg.alphas) != 1 or cfg.alpha not in (0.0, 1.0):
        raise ConfigError("oracle-compare needs alpha 0 or 1")
    domain, g, arms = _prepare(cfg)
    res = solve_on_arms(arms, cfg.alpha, tol=cfg.tol, max_iter=cfg.max_iter, mode=cfg.mode)
    samples = sample_boundary(domain, g, cfg.oracle_samples)
    if cfg.alpha == 1.0:
        ref = convex_envelope_oracle(samples, res.field.points, method="hull")
    else:
        ref = quasiconvex_envelope_oracle(samples, res.field.points)
    diff = np.abs(res.field.values - ref)
    payload = {
        "alpha": cfg.alpha,
        "h": cfg.h,
        "W": cfg.W,
        "oracle_samples": samples.m,
        "sup_diff": float(diff.max()),
        "mean_diff": float(diff.mean()),
        "worst_node": [float(c) for c in res.field.points[int(diff.argmax())]],
        "converged": res.converged,
    }
    if cfg.oracle_tol is not None:
        payload["oracle_tol"] = cfg.oracle_tol
    out.mkdir(parents=True, exist_ok=True)
    _dump(out / "oracle_compare.json", payload)
    if not res.converged:
        return EXIT_NOCONV
    if cfg.oracle_tol is not None and payload["sup_diff"] > cfg.oracle_tol:
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "check": cmd_check,
    "oracle-compare": cmd_oracle_compare,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="alpha-envelope", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=None)
    parser.add_argument("--field", default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        out = Path(args.out or cfg.out)
        np.random.seed(cfg.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "check":
                return cmd_check(cfg, out, args.field)
            return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
