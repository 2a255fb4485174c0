"""Command-line front end.

    fixpoint certify --mapping flip --kind chatterjea --params b=0.4
    fixpoint scan    --mapping flip --k-grid 0.1:2.0:0.1
    fixpoint iterate --mapping flip --lambda 0.6 --x0 0 --out-csv trace.csv
    fixpoint solve   --mapping flip --x0 0
    fixpoint demo

Exit codes: 0 verified / feasible / converged, 1 falsified / diverged,
2 usage or configuration error.  Settings resolve as flags over ``--config``
file over defaults; the resolved settings are embedded in every report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import conditions as cond
from . import iterate as it
from .errors import ConvergenceError, FixpointError
from .mapping import check_self_map, known_fixed_point, spec_from_json
from .reports import atomic_write, dumps, trace_csv
from .space import NormKind, Point

COMMANDS = ("certify", "scan", "iterate", "solve", "demo")
DEFAULTS = {
    "mapping": {"kind": "builtin", "name": "flip"},
    "kind": None,
    "params": {},
    "k_grid": None,
    "norm": "L2",
    "seed": None,
    "sampler": {"grid": 51, "random": 1000},
    "iteration": {"lambda": None, "x0": None, "epsilon": 1e-10, "max_iter": 10_000,
                  "stop_rule": None, "delta": None},
    "output": {"json": None, "csv": None},
}
DEFAULT_K_GRID = "0:3:0.05"


class UsageError(Exception):
    pass


def number(text: str | float | int) -> float:
    """Parse ``0.25``, ``1e-3`` or a fraction such as ``2/3``."""
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        return float(text)


def parse_params(text: str | dict) -> dict[str, float]:
    if isinstance(text, dict):
        return {k: number(v) for k, v in text.items()}
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--params: expected name=value, got {item!r}")
        out[name.strip()] = number(value)
    return out


def parse_k_grid(spec: str | list) -> list[float]:
    if isinstance(spec, list):
        return [number(v) for v in spec]
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"--k-grid: expected start:stop:step, got {spec!r}")
        a, b, step = (number(p) for p in parts)
        if step <= 0 or b < a:
            raise UsageError("--k-grid: need step > 0 and stop >= start")
        n = int(round((b - a) / step)) + 1
        return [round(a + i * step, 12) for i in range(n)]
    return [number(v) for v in spec.split(",") if v.strip()]


def parse_mapping(text: str | dict) -> dict:
    if isinstance(text, dict):
        return text
    text = text.strip()
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--mapping: invalid JSON ({exc})") from None
    return {"kind": "builtin", "name": text}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fixpoint", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON file with any of the settings below")
    ap.add_argument("--mapping", help="mapping JSON, @file, or a builtin name (flip, step_half, affine(c))")
    ap.add_argument("--kind", help="condition kind, e.g. chatterjea, enriched-chatterjea")
    ap.add_argument("--params", help="constants, e.g. k=2/3,b=0.25")
    ap.add_argument("--k-grid", dest="k_grid", help="start:stop:step or comma list")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--grid", type=int, help="sampler grid points per axis")
    ap.add_argument("--random", type=int, help="sampler random pairs")
    ap.add_argument("--norm", choices=["L1", "L2", "LINF"])
    ap.add_argument("--x0", help="start point, comma separated")
    ap.add_argument("--lambda", dest="lam", help="averaging weight in (0, 1]")
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--max-iter", dest="max_iter", type=int)
    ap.add_argument("--stop", choices=it.STOP_RULES)
    ap.add_argument("--delta", help="delta for the a posteriori stop rule")
    ap.add_argument("--out-json", dest="out_json")
    ap.add_argument("--out-csv", dest="out_csv")
    return ap


def resolve_config(args: argparse.Namespace, env=os.environ) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}") from None
        for key, value in loaded.items():
            if key == "command":
                continue
            if key not in cfg:
                raise UsageError(f"config: unknown field {key!r}")
            if isinstance(cfg[key], dict) and key not in ("mapping", "params") and isinstance(value, dict):
                unknown = set(value) - set(cfg[key])
                if unknown:
                    raise UsageError(f"config: unknown field(s) {sorted(unknown)} in {key!r}")
                cfg[key].update(value)
            else:
                cfg[key] = value
    flag = {
        "mapping": args.mapping, "kind": args.kind, "params": args.params, "k_grid": args.k_grid,
        "norm": args.norm, "seed": args.seed,
    }
    for key, value in flag.items():
        if value is not None:
            cfg[key] = value
    for key, value in (("grid", args.grid), ("random", args.random)):
        if value is not None:
            cfg["sampler"][key] = value
    for key, value in (("lambda", args.lam), ("x0", args.x0), ("epsilon", args.epsilon),
                       ("max_iter", args.max_iter), ("stop_rule", args.stop), ("delta", args.delta)):
        if value is not None:
            cfg["iteration"][key] = value
    for key, value in (("json", args.out_json), ("csv", args.out_csv)):
        if value is not None:
            cfg["output"][key] = value
    if cfg["seed"] is None:
        env_seed = env.get("FIXPOINT_SEED")
        try:
            cfg["seed"] = int(env_seed) if env_seed else 0
        except ValueError:
            raise UsageError(f"FIXPOINT_SEED must be an integer, got {env_seed!r}") from None
    # normalise textual forms so the echoed config is canonical
    cfg["mapping"] = parse_mapping(cfg["mapping"])
    cfg["params"] = parse_params(cfg["params"] or {})
    if cfg["k_grid"] is not None:
        cfg["k_grid"] = parse_k_grid(cfg["k_grid"])
    itc = cfg["iteration"]
    for key in ("lambda", "delta", "epsilon"):
        if itc[key] is not None:
            itc[key] = number(itc[key])
    if itc["x0"] is not None and not isinstance(itc["x0"], list):
        itc["x0"] = [number(v) for v in str(itc["x0"]).split(",")]
    return cfg


# ---------------------------------------------------------------- commands


def _field(name: str, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except FixpointError as exc:
        raise UsageError(f"{name}: {exc}") from None


def _mapping(cfg):
    return _field("mapping", spec_from_json, cfg["mapping"])


def _sampler(cfg) -> cond.PairSampler:
    s = cfg["sampler"]
    return _field("sampler", cond.PairSampler, seed=cfg["seed"], n_random=s["random"], grid_per_axis=s["grid"])


def _norm(cfg) -> NormKind:
    return _field("norm", NormKind.parse, cfg["norm"])


def _kind(cfg, default: str) -> cond.ConditionKind:
    return _field("kind", cond.ConditionKind.parse, cfg["kind"] or default)


def _x0(cfg, T) -> Point:
    x0 = cfg["iteration"]["x0"]
    return _field("x0", Point, x0) if x0 is not None else T.domain.lower


def _certificate(cfg, T, kind, sampler, norm) -> cond.CertificateReport:
    params = cfg["params"]
    if kind.enriched and set(params) == {"k"}:
        return cond.certify(kind, T, sampler, norm, k=params["k"])
    if params:
        p = _field("params", cond.ConditionParams.of, kind, **params)
        return cond.certify(kind, T, sampler, norm, p)
    if kind.enriched:
        raise UsageError(f"params: {kind.value} needs at least k=... (or use scan)")
    return cond.certify(kind, T, sampler, norm)


def cmd_certify(cfg) -> tuple[int, dict]:
    T = _mapping(cfg)
    report = _certificate(cfg, T, _kind(cfg, "chatterjea"), _sampler(cfg), _norm(cfg))
    return (0 if report.feasible else 1), {"certificate": report.to_json()}


def cmd_scan(cfg) -> tuple[int, dict]:
    T = _mapping(cfg)
    kind = _kind(cfg, "enriched-chatterjea")
    if not cfg["k_grid"]:
        raise UsageError("k_grid: empty or missing (use --k-grid start:stop:step)")
    curve = _field("k_grid", cond.scan_k, kind, T, cfg["k_grid"], _sampler(cfg), _norm(cfg))
    return (0 if curve.best_feasible else 1), {"curve": curve.to_json()}


def _write_trace(cfg, trace, delta=None, p=None) -> str | None:
    path = cfg["output"]["csv"]
    if path:
        atomic_write(path, trace_csv(trace, delta, p))
    return path


def cmd_iterate(cfg) -> tuple[int, dict]:
    T = _mapping(cfg)
    itc = cfg["iteration"]
    verdict = check_self_map(T, seed=cfg["seed"])
    if not verdict.ok:
        return 1, {"error": f"self-map check failed at {verdict.worst_point} ({verdict.reason})"}
    stop = itc["stop_rule"] or (it.A_POSTERIORI if itc["delta"] is not None else it.STEP_NORM)
    icfg = _field("iteration", it.IterationConfig, itc["lambda"] if itc["lambda"] is not None else 1.0,
                  _x0(cfg, T), itc["max_iter"], itc["epsilon"], stop, itc["delta"])
    trace = _field("iteration", it.krasnoselskij, T, icfg, _norm(cfg), check_domain=False)
    p = known_fixed_point(T)
    path = _write_trace(cfg, trace, itc["delta"], p)
    out = {
        "converged": trace.converged,
        "final": trace.final,
        "iterations": trace.iterations_used,
        "last_step": trace.step_norms[-1],
        "diagnostic": trace.diagnostic,
        "trace_csv": path,
    }
    return (0 if trace.converged else 1), out


def cmd_solve(cfg) -> tuple[int, dict]:
    T = _mapping(cfg)
    kind = _kind(cfg, "enriched-chatterjea")
    if not kind.enriched:
        raise UsageError(f"kind: solve needs an enriched kind, got {kind.value}")
    sampler, norm = _sampler(cfg), _norm(cfg)
    itc = cfg["iteration"]
    out: dict = {}
    if cfg["params"]:
        cert = _certificate(cfg, T, kind, sampler, norm)
    else:
        grid = cfg["k_grid"] or parse_k_grid(DEFAULT_K_GRID)
        cfg["k_grid"] = grid
        curve = cond.scan_k(kind, T, grid, sampler, norm, refine=False)
        out["curve_best"] = {"k": curve.best[0], "min_constant": curve.best[1]}
        cert = cond.certify(kind, T, sampler, norm, k=curve.best[0])
    out["certificate"] = cert.to_json()
    if not cert.feasible:
        out["error"] = "certificate is infeasible; no convergence guarantee to run on"
        return 1, out
    delta = it.delta_from_b(cert.params["b"]) if kind is cond.ConditionKind.ENRICHED_CHATTERJEA else None
    try:
        res = it.solve(T, cert, _x0(cfg, T), itc["epsilon"], itc["max_iter"], norm, lam=itc["lambda"])
    except ConvergenceError as exc:
        out.update(error=str(exc), diverged=True, trace_csv=_write_trace(cfg, exc.trace, delta, known_fixed_point(T)),
                   iterations=exc.trace.iterations_used)
        return 1, out
    violations = res.budget.n_violations if res.budget is not None else 0
    out.update(
        p=res.p, k=res.k, constant=res.constant, lam=res.trace.lam,
        iterations=res.trace.iterations_used, violations=violations,
        budget=None if res.budget is None else res.budget.to_json(),
        reference=res.reference, trace_csv=_write_trace(cfg, res.trace, delta, res.reference),
    )
    return (0 if violations == 0 else 1), out


def cmd_demo(cfg) -> tuple[int, dict]:
    from .demo import run_demo

    rows = run_demo(seed=cfg["seed"])
    return 0, {"rows": rows}


HANDLERS = {"certify": cmd_certify, "scan": cmd_scan, "iterate": cmd_iterate, "solve": cmd_solve, "demo": cmd_demo}


def run(argv: list[str] | None = None, env=os.environ, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = resolve_config(args, env)
        code, body = HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"fixpoint: error: {exc}", file=sys.stderr)
        return 2
    except FixpointError as exc:
        print(f"fixpoint: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    report = {"command": args.command, "config": cfg, "exit_code": code, **body}
    if args.command == "demo":
        from .demo import format_table

        stdout.write(format_table(body["rows"]))
    else:
        stdout.write(dumps(report))
    if cfg["output"]["json"]:
        atomic_write(cfg["output"]["json"], dumps(report))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
