"""Command-line front end.

Subcommands:
  solve    solve the configured problem at its first target level
  ladder   run the continuation ladder, write CSV + per-rung field dumps
  verify   run the identity-oracle suite, write a JSON report
  checkf   admissibility analysis of the configured right-hand side
  report   merge ladder CSVs into one plot-ready long-format CSV

Configuration is a single JSON document (see default_config()); any entry
can be overridden with -o dotted.path=value.  Exit codes: 0 success,
2 non-convergence, 3 invalid configuration, 4 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, fcheck, oracle, pde, solver
from .backend import BACKEND_NAME
from .errors import ConfigurationError, GridError, InadmissibleDataError, VolgeoError
from .families import (dirichlet_probe, manufactured_state, manufactured_state_2d,
                       phi_family, spatial_family, target_family)
from .geometry import Field, Metric, SpaceTimeGrid
from .io import (fmt_value, load_config, read_ladder_csv, write_field,
                 write_json, write_ladder_csv)

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 2
EXIT_BAD_CONFIG = 3
EXIT_VERIFY_FAILED = 4


def default_config() -> dict:
    return {
        "geometry": {"dim": 1, "length": 1.0, "nx": 128, "nt": 65, "phi": "flat"},
        "problem": {
            "a": {"family": "constant", "value": 1.0},
            "b": 0.0,
            "mode": "epsilon-ladder",
            "f": {"kind": "constant", "value": 1.0e-2},
            "u0": {"family": "zero"},
            "u1": {"family": "sine", "amplitude": 0.02, "frequency": 1},
        },
        "solver": {},
        "output": {"directory": "out", "fields": True},
        "seed": 1234,
        "verify": {"samples": 100000},
    }


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _apply_override(cfg: dict, item: str):
    if "=" not in item:
        raise ConfigurationError(f"override {item!r} is not of the form path=value")
    path, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    keys = path.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigurationError(f"override path {path!r} crosses a non-object")
    node[keys[-1]] = value


def build_problem(cfg: dict):
    """Config dict -> (ProblemData, SolverConfig)."""
    try:
        gcfg = cfg["geometry"]
        grid = SpaceTimeGrid(int(gcfg["dim"]), int(gcfg["nx"]), int(gcfg["nt"]),
                             float(gcfg["length"]))
        metric = Metric(grid.dim, grid.length, phi_family(gcfg.get("phi"), grid))
        pcfg = cfg["problem"]
        mode = pcfg.get("mode", "epsilon-ladder")
        if mode not in ("epsilon-ladder", "fixed-f", "degenerate-f"):
            raise ConfigurationError(f"unknown mode {mode!r}")
        scfg = solver.SolverConfig(**cfg.get("solver", {}))
        if mode == "epsilon-ladder":
            target = scfg.eps0
        else:
            target = target_family(pcfg["f"], grid)
            if mode == "degenerate-f" and not isinstance(target, Field):
                target = Field(grid, np.broadcast_to(float(target), grid.shape).copy())
        problem = pde.ProblemData(
            metric=metric, grid=grid,
            a=spatial_family(pcfg.get("a", {"family": "constant", "value": 1.0}), grid),
            b=float(pcfg.get("b", 0.0)),
            u0=spatial_family(pcfg.get("u0", {"family": "zero"}), grid),
            u1=spatial_family(pcfg.get("u1", {"family": "zero"}), grid),
            target=target,
            delta=scfg.eps0 if mode == "degenerate-f" else 0.0,
        )
        return problem, scfg, mode
    except (KeyError, TypeError, ValueError, GridError) as exc:
        raise ConfigurationError(f"invalid configuration: {exc}") from exc


def _outdir(cfg: dict) -> Path:
    out = Path(cfg.get("output", {}).get("directory", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(cfg: dict) -> int:
    problem, scfg, mode = build_problem(cfg)
    out = _outdir(cfg)
    lam = scfg.bulge if scfg.bulge is not None else solver.default_bulge(problem)
    u = solver.initial_path(problem, lam)
    result = solver.newton_solve(problem, u, scfg)
    rung = diagnostics.collect_rung(result.u, problem, problem.level, result)
    payload = {name: getattr(rung, name) for name in rung.columns()}
    payload["converged"] = result.converged
    payload["message"] = result.message
    payload["backend"] = BACKEND_NAME
    write_json(out / "solve_report.json", payload)
    if cfg.get("output", {}).get("fields", True):
        write_field(out / "solution.field", result.u)
    if not result.converged:
        print(f"solve: no convergence: {result.message}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    print(f"solve: converged in {result.iterations} iterations, "
          f"residual {result.residual_norm:.3e}")
    return EXIT_OK


def cmd_ladder(cfg: dict) -> int:
    problem, scfg, mode = build_problem(cfg)
    out = _outdir(cfg)
    report = solver.epsilon_ladder(problem, scfg)
    write_ladder_csv(out / "ladder.csv", report)
    if cfg.get("output", {}).get("fields", True):
        for k, rung in enumerate(report.rungs):
            write_field(out / f"rung_{k:03d}.field", rung.u)
    write_json(out / "ladder_summary.json", {
        "completed": report.completed,
        "failure": report.failure,
        "rungs": len(report.rungs),
        "mode": mode,
        "backend": BACKEND_NAME,
    })
    for rung in report.rungs:
        print(f"ladder: level {rung.epsilon:.3e}  iters {rung.newton_iters:2d}  "
              f"sup|hess u| {rung.sup_hess_u:.6f}  residual {rung.final_residual:.2e}")
    if not report.completed:
        print(f"ladder: {report.failure}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _verify_suite(cfg: dict) -> dict:
    seed = int(cfg.get("seed", 1234))
    samples = int(cfg.get("verify", {}).get("samples", 100000))
    report: dict = {"backend": BACKEND_NAME, "seed": seed}

    conc = {}
    for n in (1, 2):
        c = oracle.check_concavity(samples=samples, seed=seed, n=n)
        conc[str(n)] = {"max_eig": c.max_eig, "max_scaled_eig": c.max_scaled_eig,
                        "max_quadform": c.max_quadform}
    report["concavity"] = conc

    grid = SpaceTimeGrid(1, 48, 25, 1.0)
    u, _ = manufactured_state(grid)
    psi = dirichlet_probe(grid)
    slopes = {}
    for b in (0.0, 0.5):
        m = Metric(1, 1.0)
        p = pde.ProblemData(m, grid, spatial_family({"family": "constant", "value": 1.0}, grid),
                            b, spatial_family({"family": "zero"}, grid),
                            spatial_family({"family": "zero"}, grid), 1.0)
        rep = oracle.check_linearization(u, psi, p)
        slopes[f"b={b}"] = {"slope": rep.slope, "hs": rep.hs, "errors": rep.errors}
    report["linearization"] = slopes

    def _identity_pair(dim):
        ratios = {}
        for name, fn in (("gradient", oracle.check_gradient_identity),
                         ("grad_sq", oracle.check_grad_sq_identity)):
            sups = []
            for scalefac in (1, 2):
                if dim == 1:
                    g = SpaceTimeGrid(1, 32 * scalefac, 16 * scalefac + 1, 1.0)
                    uu, _ = manufactured_state(g)
                    m = Metric(1, 1.0)
                else:
                    g = SpaceTimeGrid(2, 24 * scalefac, 12 * scalefac + 1, 1.0)
                    uu = manufactured_state_2d(g)
                    m = Metric(2, 1.0, phi_family(
                        {"kind": "cos-bump", "amplitude": 0.1, "frequency": 1}, g))
                pidm = pde.ProblemData(m, g,
                                       spatial_family({"family": "constant", "value": 1.0}, g),
                                       0.0, spatial_family({"family": "zero"}, g),
                                       spatial_family({"family": "zero"}, g), 1.0)
                sups.append(fn(uu, pidm))
            ratios[name] = {"coarse": sups[0], "fine": sups[1],
                            "ratio": sups[0] / sups[1]}
        return ratios

    report["identities"] = {"dim1": _identity_pair(1), "dim2": _identity_pair(2)}

    grid_c = SpaceTimeGrid(1, 32, 17, 1.0)
    u_c, _ = manufactured_state(grid_c)
    report["flat_commutation"] = oracle.check_flat_commutation(u_c)

    ok = (all(c["max_scaled_eig"] <= 1e-10 for c in conc.values())
          and all(1.7 <= s["slope"] <= 2.3 for s in slopes.values())
          and all(3.0 <= r[name]["ratio"] <= 5.5
                  for r in report["identities"].values() for name in r)
          and report["flat_commutation"] <= 1e-12)
    report["passed"] = bool(ok)
    return report


def cmd_verify(cfg: dict) -> int:
    out = _outdir(cfg)
    report = _verify_suite(cfg)
    write_json(out / "verify.json", report)
    for key in ("concavity", "linearization"):
        print(f"verify: {key}: "
              + json.dumps(report[key], sort_keys=True, default=str)[:160])
    print(f"verify: passed = {report['passed']}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


def cmd_checkf(cfg: dict) -> int:
    problem, scfg, mode = build_problem(cfg)
    out = _outdir(cfg)
    fspec = cfg["problem"].get("f", {"kind": "constant", "value": scfg.eps0})
    target = target_family(fspec, problem.grid)
    if not isinstance(target, Field):
        target = Field(problem.grid,
                       np.broadcast_to(float(target), problem.grid.shape).copy())
    try:
        record = fcheck.f_admissibility(target, problem.metric)
        growth = fcheck.gradient_growth_check(target, problem.metric)
    except GridError as exc:
        print(f"checkf: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    payload = {
        "sup_f": record.sup_f,
        "sup_sqrtf_t": record.sup_sqrtf_t,
        "sup_grad_sqrtf": record.sup_grad_sqrtf,
        "sup_f_tt": record.sup_f_tt,
        "sup_hess_sqrtf": record.sup_hess_sqrtf,
        "total": record.total,
        "gradient_growth_constant": None if not np.isfinite(growth) else growth,
    }
    write_json(out / "checkf.json", payload)
    print(f"checkf: bundle total {record.total:.6g}, growth constant "
          f"{growth if np.isfinite(growth) else 'unbounded'}")
    return EXIT_OK


def cmd_report(inputs: list, output: str) -> int:
    rows = []
    for src in inputs:
        try:
            parsed = read_ladder_csv(src)
        except OSError as exc:
            raise ConfigurationError(f"cannot read {src}: {exc}") from exc
        for k, row in enumerate(parsed):
            eps = row["epsilon"]
            for key, val in row.items():
                if key == "epsilon":
                    continue
                rows.append((src, k, eps, key, val))
    with open(output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "rung", "epsilon", "metric", "value"])
        for src, k, eps, key, val in rows:
            w.writerow([src, k, fmt_value(eps), key, fmt_value(val)])
    print(f"report: wrote {len(rows)} rows to {output}")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="volgeo",
                                 description="geodesics in the space of volume forms: "
                                             "solver and verification harness")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("solve", "ladder", "verify", "checkf"):
        sp = sub.add_parser(name)
        sp.add_argument("-c", "--config", help="JSON config file (defaults built in)")
        sp.add_argument("-o", "--override", action="append", default=[],
                        metavar="PATH=VALUE", help="override a config entry, "
                        "e.g. -o solver.newton_tol=1e-8")
    rp = sub.add_parser("report")
    rp.add_argument("inputs", nargs="+", help="ladder CSV files to merge")
    rp.add_argument("--output", "-O", default="report.csv")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args.inputs, args.output)
        cfg = default_config()
        if args.config:
            cfg = _merge(cfg, load_config(args.config))
        for item in args.override:
            _apply_override(cfg, item)
        handler = {"solve": cmd_solve, "ladder": cmd_ladder,
                   "verify": cmd_verify, "checkf": cmd_checkf}[args.command]
        return handler(cfg)
    except (ConfigurationError, InadmissibleDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except VolgeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
