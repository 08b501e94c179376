"""Command-line front end: solve, optimize, sweep, simulate, reproduce.

Every output file starts with a header embedding the resolved configuration
and artifact version; feeding that header (or the whole file) back through
--config reproduces the file.  Resolution order: explicit flags, then
--config values, then built-in defaults.  Unknown config keys are rejected.
CSV output: '.' decimal, ',' separator, LF, UTF-8.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .equilibrium import solve_profile
from .errors import SolverError, ValidationError
from .metrics import MetricsBundle, auction_metrics
from .model import (MarketConfig, NumericalSettings, TimeCostSpec,
                    ValueDistribution)
from .optimize import Objective, SweepRow, comparative_sweep, optimize_starting_price
from .reproduce import (reproduce_example, reproduce_fig1, reproduce_fig2,
                        reproduce_fig3, reproduce_table1)
from .simulate import RECORD_CSV_HEADER, monte_carlo

_REQUIRED = object()

_MARKET_KEYS = {
    "n": (int, 2, "bidder count (>= 2)"),
    "dist": (str, "uniform", "value distribution"),
    "cost": (str, "none", "time cost '<kind>:<mu>' or 'none'"),
    "ode_steps": (int, 2000, "bid-curve integration steps"),
    "quad_nodes": (int, 2001, "Simpson nodes per integral segment"),
}

_KEYS = {
    "solve": {
        **_MARKET_KEYS,
        "s": (float, _REQUIRED, "starting price in [0, 1]"),
        "out": (str, ".", "output directory"),
        "format": (str, "json", "metrics file format: json or csv"),
    },
    "optimize": {
        **_MARKET_KEYS,
        "objective": (str, "auctioneer",
                      "auctioneer|bidder|welfare|duration|all"),
        "out": (str, ".", "output directory"),
        "format": (str, "json", "result file format: json or csv"),
    },
    "sweep": {
        "dist": _MARKET_KEYS["dist"],
        "cost": (str, "linear:0", "cost kind to sweep (mu comes from --mu)"),
        "ode_steps": _MARKET_KEYS["ode_steps"],
        "quad_nodes": _MARKET_KEYS["quad_nodes"],
        "mu": (str, "0:0.8:0.05", "mu grid: 'a,b,c' or 'a:b:step'"),
        "n": (str, "2:20:1", "bidder-count grid: 'a,b,c' or 'a:b:step'"),
        "objective": (str, "auctioneer",
                      "auctioneer|bidder|welfare|duration|all"),
        "threads": (int, 0, "worker threads (0 = all cores)"),
        "out": (str, "sweep.csv", "output CSV path"),
    },
    "simulate": {
        **_MARKET_KEYS,
        "s": (float, _REQUIRED, "starting price in [0, 1]"),
        "draws": (int, 100000, "number of simulated auctions"),
        "seed": (int, 0, "64-bit seed"),
        "tick": (float, 1e-4, "clock tick"),
        "threads": (int, 0, "worker threads (0 = all cores)"),
        "out": (str, ".", "output directory"),
        "records": (str, "", "stream per-auction records to this CSV path"),
    },
    "reproduce": {
        "target": (str, _REQUIRED, "example|table1|fig1|fig2|fig3"),
        "out": (str, ".", "output directory"),
        "threads": (int, 0, "worker threads (0 = all cores)"),
    },
}


def _parse_grid(text: str, integer: bool = False) -> list:
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"bad grid {text!r}: expected 'a:b:step'")
        a, b, step = (float(p) for p in parts)
        if step <= 0:
            raise ValidationError("grid step must be positive")
        count = int(round((b - a) / step))
        vals = [round(a + i * step, 10) for i in range(count + 1)]
        vals = [v for v in vals if v <= b + 1e-9]
    else:
        vals = [float(p) for p in text.split(",") if p.strip()]
    if not vals:
        raise ValidationError(f"empty grid {text!r}")
    if integer:
        out = []
        for v in vals:
            if abs(v - round(v)) > 1e-9:
                raise ValidationError(f"grid value {v:g} is not an integer")
            out.append(int(round(v)))
        return out
    return vals


def _market_config(resolved: dict) -> MarketConfig:
    return MarketConfig(
        n=resolved["n"],
        dist=ValueDistribution.parse(resolved["dist"]),
        cost=TimeCostSpec.parse(resolved["cost"]),
        num=NumericalSettings(ode_steps=resolved["ode_steps"],
                              quad_nodes=resolved["quad_nodes"]))


def _load_config(path: str, command: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("#"):
        raw = json.loads(stripped.splitlines()[0].lstrip("#").strip())
    else:
        raw = json.loads(text)
    if isinstance(raw, dict) and isinstance(raw.get("header"), dict):
        raw = raw["header"]
    if isinstance(raw, dict) and {"artifact", "command", "config"} <= raw.keys():
        if raw["command"] != command:
            raise ValidationError(
                f"config was produced by {raw['command']!r}, not {command!r}")
        raw = raw["config"]
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    return raw


def _resolve(command: str, args: argparse.Namespace) -> dict:
    keys = _KEYS[command]
    config = _load_config(args.config, command) if args.config else {}
    unknown = sorted(set(config) - set(keys))
    if unknown:
        raise ValidationError(f"unknown config keys for {command}: {unknown}")
    resolved = {}
    for key, (conv, default, _help) in keys.items():
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            resolved[key] = conv(cli_val)
        elif key in config:
            resolved[key] = conv(config[key])
        elif default is _REQUIRED:
            raise ValidationError(f"missing required option --{key.replace('_', '-')}")
        else:
            resolved[key] = default
    return resolved


def _header(command: str, resolved: dict) -> dict:
    return {"artifact": f"flowerauction {__version__}", "command": command,
            "config": resolved}


def _write_json(path: Path, header: dict, payload: dict) -> None:
    doc = {"header": header}
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: dict, columns: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + json.dumps(header) + "\n")
        fh.write(columns + "\n")
        for row in rows:
            fh.write(row + "\n")


def _threads(value: int) -> int:
    return value if value > 0 else (os.cpu_count() or 1)


# -- commands -----------------------------------------------------------


def cmd_solve(args) -> int:
    resolved = _resolve("solve", args)
    if resolved["format"] not in ("json", "csv"):
        raise ValidationError("format must be json or csv")
    cfg = _market_config(resolved)
    if not 0.0 <= resolved["s"] <= 1.0:
        raise ValidationError("starting price s must lie in [0, 1]")
    profile = solve_profile(cfg, resolved["s"])
    bundle = auction_metrics(cfg, profile)
    header = _header("solve", resolved)
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "profile.json", header, profile.to_json_dict())
    _write_csv(out / "curve.csv", header, "v,b",
               (f"{v!r},{b!r}" for v, b in profile.curve_csv_rows()))
    if resolved["format"] == "json":
        _write_json(out / "metrics.json", header, bundle.to_json_dict())
    else:
        _write_csv(out / "metrics.csv", header, MetricsBundle.CSV_HEADER,
                   [bundle.csv_row()])
    print(f"s={profile.s:g} cutoff={profile.cutoff:.6f} "
          f"s_tilde={profile.s_tilde:.6f}"
          f"{' (degenerate)' if profile.s_tilde_degenerate else ''}")
    print(f"eu_a={bundle.eu_auctioneer:.6f} eu_b={bundle.eu_bidder:.6f} "
          f"eu_s={bundle.eu_social:.6f} ed={bundle.expected_duration:.6f}")
    print(f"wrote profile.json, curve.csv, metrics.{resolved['format']} to {out}")
    return 0


_OPT_CSV_COLUMNS = ("objective,s_star,p_star,s_tilde,eu_a,eu_b,eu_s,ed,"
                    "eu_a_ratio,eu_b_ratio,eu_s_ratio,ed_ratio,flags")


def _opt_csv_row(res) -> str:
    m, rd = res.metrics, res.ratios_vs_dutch()
    vals = (res.s_star, res.cutoff_at_star, res.s_tilde, m.eu_auctioneer,
            m.eu_bidder, m.eu_social, m.expected_duration,
            rd["eu_a"], rd["eu_b"], rd["eu_s"], rd["ed"])
    return f"{res.objective.value}," + ",".join(repr(v) for v in vals) \
        + "," + ";".join(res.flags)


def cmd_optimize(args) -> int:
    resolved = _resolve("optimize", args)
    if resolved["format"] not in ("json", "csv"):
        raise ValidationError("format must be json or csv")
    cfg = _market_config(resolved)
    objectives = list(Objective) if resolved["objective"] == "all" \
        else [Objective(resolved["objective"])]
    results = [optimize_starting_price(cfg, ob) for ob in objectives]
    header = _header("optimize", resolved)
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    if resolved["format"] == "json":
        _write_json(out / "optimize.json", header,
                    {"results": [r.to_json_dict() for r in results]})
    else:
        _write_csv(out / "optimize.csv", header, _OPT_CSV_COLUMNS,
                   (_opt_csv_row(r) for r in results))
    for r in results:
        rd = r.ratios_vs_dutch()
        flags = f" flags={';'.join(r.flags)}" if r.flags else ""
        print(f"{r.objective.value}: s*={r.s_star:.4f} "
              f"value={r.objective.value_of(r.metrics):.6f} "
              f"vs_dutch eu_a={rd['eu_a']:.2%} eu_b={rd['eu_b']:.2%} "
              f"eu_s={rd['eu_s']:.2%} ed={rd['ed']:.2%}{flags}")
    print(f"wrote optimize.{resolved['format']} to {out}")
    return 0


def cmd_sweep(args) -> int:
    resolved = _resolve("sweep", args)
    mu_grid = _parse_grid(resolved["mu"])
    n_grid = _parse_grid(resolved["n"], integer=True)
    objectives = list(Objective) if resolved["objective"] == "all" \
        else [Objective(resolved["objective"])]
    base = MarketConfig(
        n=2, dist=ValueDistribution.parse(resolved["dist"]),
        cost=TimeCostSpec.parse(resolved["cost"]),
        num=NumericalSettings(ode_steps=resolved["ode_steps"],
                              quad_nodes=resolved["quad_nodes"]))
    rows = comparative_sweep(base, mu_grid=mu_grid, n_grid=n_grid,
                             objectives=objectives,
                             threads=_threads(resolved["threads"]))
    header = _header("sweep", resolved)
    out = Path(resolved["out"])
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, header, SweepRow.CSV_HEADER, (r.csv_row() for r in rows))
    errors = sum(1 for r in rows if r.error is not None)
    print(f"wrote {len(rows)} rows to {out} ({errors} row errors)")
    return 0 if errors < len(rows) else 3


def cmd_simulate(args) -> int:
    resolved = _resolve("simulate", args)
    cfg = _market_config(resolved)
    if not 0.0 <= resolved["s"] <= 1.0:
        raise ValidationError("starting price s must lie in [0, 1]")
    profile = solve_profile(cfg, resolved["s"])
    header = _header("simulate", resolved)
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    record_fh = None
    try:
        if resolved["records"]:
            rec_path = Path(resolved["records"])
            if rec_path.parent != Path(""):
                rec_path.parent.mkdir(parents=True, exist_ok=True)
            record_fh = open(rec_path, "w", encoding="utf-8", newline="")
            record_fh.write("# " + json.dumps(header) + "\n")
            record_fh.write(RECORD_CSV_HEADER + "\n")
        result = monte_carlo(cfg, profile, resolved["draws"], resolved["seed"],
                             tick=resolved["tick"],
                             threads=_threads(resolved["threads"]),
                             record_file=record_fh)
    finally:
        if record_fh is not None:
            record_fh.close()
    _write_json(out / "summary.json", header, result.to_json_dict())
    b, se = result.bundle, result.stderr
    print(f"draws={result.draws} seed={result.seed} tick={result.tick:g} "
          f"phases={result.phase_counts}")
    print(f"eu_a={b.eu_auctioneer:.6f}±{se.eu_auctioneer:.1e} "
          f"eu_b={b.eu_bidder:.6f}±{se.eu_bidder:.1e} "
          f"eu_s={b.eu_social:.6f}±{se.eu_social:.1e} "
          f"ed={b.expected_duration:.6f}±{se.expected_duration:.1e}")
    print(f"inefficiency={result.inefficiency:.2e} no_winner={result.no_winner}")
    print(f"wrote summary.json to {out}"
          + (f" and records to {resolved['records']}" if resolved["records"] else ""))
    return 0


def cmd_reproduce(args) -> int:
    resolved = _resolve("reproduce", args)
    target = resolved["target"]
    threads = _threads(resolved["threads"])
    out = Path(resolved["out"])
    out.mkdir(parents=True, exist_ok=True)
    header = _header("reproduce", resolved)
    fig_rows = None
    if target == "example":
        items, extra = reproduce_example()
    elif target == "table1":
        items, extra = reproduce_table1(threads=threads)
    elif target == "fig1":
        items, extra, fig_rows = reproduce_fig1()
    elif target == "fig2":
        items, extra, fig_rows = reproduce_fig2(threads=threads)
    elif target == "fig3":
        items, extra, fig_rows = reproduce_fig3(threads=threads)
    else:
        raise ValidationError(
            f"unknown reproduce target {target!r}; "
            "pick one of example, table1, fig1, fig2, fig3")
    if fig_rows is not None:
        _write_csv(out / f"{target}.csv", header, "x,y,series",
                   (f"{x!r},{y!r},{series}" for x, y, series in fig_rows))
    all_pass = all(i.passed for i in items)
    _write_json(out / f"reproduce_{target}.json", header, {
        "items": [i.__dict__ for i in items],
        "passed": all_pass,
        **extra,
    })
    width = max(len(i.name) for i in items)
    print(f"{'check'.ljust(width)}  {'target':>22}  {'computed':>22}  "
          f"{'tolerance':>12}  status")
    for i in items:
        mark = "PASS" if i.passed else "FAIL"
        print(f"{i.name.ljust(width)}  {i.target:>22}  {i.computed:>22}  "
              f"{i.tolerance:>12}  {mark}")
    print(("all checks passed" if all_pass else "SOME CHECKS FAILED")
          + f"; report in {out / f'reproduce_{target}.json'}")
    return 0 if all_pass else 4


# -- parser -------------------------------------------------------------


def _add_options(sub: argparse.ArgumentParser, command: str) -> None:
    sub.add_argument("--config", metavar="FILE", default=None,
                     help="JSON config (or a previous output file / its "
                          "header); explicit flags override it")
    for key, (conv, default, help_text) in _KEYS[command].items():
        if key == "target":
            continue
        flag = "--" + key.replace("_", "-")
        shown = "required" if default is _REQUIRED else f"default: {default!r}"
        sub.add_argument(flag, dest=key, default=None, type=str,
                         help=f"{help_text} ({shown})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowerauction",
        description="Hybrid descending/ascending clock auction laboratory: "
                    "equilibrium solving, welfare metrics, starting-price "
                    "optimization, Monte Carlo validation.")
    parser.add_argument("--version", action="version",
                        version=f"flowerauction {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("solve", help="equilibrium profile and metrics at one s")
    _add_options(sub, "solve")
    sub.set_defaults(func=cmd_solve)

    sub = subs.add_parser("optimize", help="optimal starting price per objective")
    _add_options(sub, "optimize")
    sub.set_defaults(func=cmd_optimize)

    sub = subs.add_parser("sweep", help="comparative sweep over mu and n grids")
    _add_options(sub, "sweep")
    sub.set_defaults(func=cmd_sweep)

    sub = subs.add_parser("simulate", help="Monte Carlo estimate of the metrics")
    _add_options(sub, "simulate")
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("reproduce", help="check published reference values")
    sub.add_argument("target", nargs="?", default=None,
                     help="example|table1|fig1|fig2|fig3")
    _add_options(sub, "reproduce")
    sub.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
