"""Command-line front end.

Subcommands: gen (write benchmark matrices), solve (single run), sweep
(ground-state-probability grids), bench (random-instance benchmark),
critical / basins / phasemap (landscape analysis).

Every result file gets a sidecar manifest (<out>.manifest.json) with the
resolved configuration, seed, kernel backend, and tool version; outputs are
byte-stable for a fixed manifest regardless of --threads.

Exit codes: 0 success, 2 validation error, 3 numerical divergence, 4 I/O.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .backend import active as active_backend
from .bench import (
    SweepSpec,
    build_graph,
    random_benchmark,
    sweep,
    write_sweep_csv,
)
from .coupling import load_coupling, save_coupling
from .errors import DivergenceError, ValidationError
from .landscape import basins, find_critical_points, phase_map
from .solvers import SOLVERS, SolverConfig, run

_CFG_FLOAT_FIELDS = ("dt", "eps", "gamma0", "p0", "p_rate", "delta", "mass",
                     "damping", "beta0", "sigma", "init_scale", "init_aniso_scale",
                     "divergence_bound", "amplitude_floor")
_CFG_INT_FIELDS = ("n_steps", "seed", "traj_stride", "max_restarts")


def _env_threads() -> int:
    try:
        return max(1, int(os.environ.get("SPIN_ANNEAL_THREADS", "1")))
    except ValueError:
        return 1


def _parse_alpha(text):
    if text is None or text == "":
        return None
    if text == "auto":
        return "auto"
    return float(text)


def _config_from_file(path: str, solver: str) -> dict:
    """Read [solver.<name>] section of a key = value config file."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise OSError(f"cannot read config file {path}")
    section = f"solver.{solver}"
    out = {}
    if parser.has_section(section):
        for key, value in parser.items(section):
            if key in _CFG_FLOAT_FIELDS:
                out[key] = float(value)
            elif key in _CFG_INT_FIELDS:
                out[key] = int(value)
            elif key == "alpha":
                out[key] = _parse_alpha(value)
            elif key == "coupling_scale":
                out[key] = value if value == "auto" else float(value)
            elif key in ("clip",):
                out[key] = parser.getboolean(section, key)
            elif key in ("init_mode",):
                out[key] = value
            else:
                raise ValidationError(f"unknown config key {key!r} in {section}")
    return out


def _solver_config(args, solver: str) -> SolverConfig:
    kw = {}
    if getattr(args, "config", None):
        kw.update(_config_from_file(args.config, solver))
    for field, attr in (
        ("n_steps", "steps"), ("dt", "dt"), ("eps", "eps"), ("gamma0", "gamma0"),
        ("p0", "p0"), ("p_rate", "p_rate"), ("delta", "delta"), ("mass", "mass"),
        ("damping", "damping"), ("beta0", "beta0"), ("sigma", "sigma"),
        ("seed", "seed"), ("init_scale", "init_scale"), ("init_mode", "init_mode"),
        ("traj_stride", "traj_stride"),
    ):
        v = getattr(args, attr, None)
        if v is not None:
            kw[field] = v
    if getattr(args, "alpha", None) is not None:
        kw["alpha"] = _parse_alpha(args.alpha)
    if getattr(args, "coupling_scale", None) is not None:
        cs = args.coupling_scale
        kw["coupling_scale"] = cs if cs == "auto" else float(cs)
    if getattr(args, "T", None) is not None:
        dt = kw.get("dt", 0.1)
        kw["n_steps"] = int(round(args.T / dt))
    return SolverConfig(solver=solver, **kw)


def _manifest(args, command: str, config=None, extra=None) -> dict:
    m = {
        "command": command,
        "version": __version__,
        "backend": active_backend(),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "argv": sys.argv[1:],
    }
    if config is not None:
        m["config"] = config
    if extra:
        m.update(extra)
    return m


def _write_manifest(out_path: str, manifest: dict) -> None:
    with open(str(out_path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)


def _cfg_dict(cfg: SolverConfig) -> dict:
    return dataclasses.asdict(cfg)


def _graph_from_args(args):
    if getattr(args, "graph", None):
        return load_coupling(args.graph)
    if not getattr(args, "family", None):
        raise ValidationError("provide --graph FILE or --family plus its parameters")
    params = {}
    if args.family in ("mobius", "jg"):
        if args.J is None:
            raise ValidationError(f"--J is required for family {args.family}")
        params["J"] = args.J
    if args.family == "jg":
        if args.G is None or args.k is None:
            raise ValidationError("--G and --k are required for family jg")
        params.update(G=args.G, k=args.k)
    return build_graph(args.family, args.n, params, seed=args.seed or 0)


def cmd_gen(args) -> int:
    cm = _graph_from_args(args)
    save_coupling(args.out, cm)
    _write_manifest(args.out, _manifest(args, "gen", extra={
        "family": args.family, "n": args.n, "J": args.J, "G": args.G,
        "k": args.k, "seed": args.seed, "out": str(args.out)}))
    print(f"wrote {args.out}: n={cm.n}, {sum(1 for _ in cm.edges())} edges")
    return 0


def _write_trajectory(path, result, cfg):
    rows = ["t,component,value"]
    for t, state in zip(result.trajectory.times, result.trajectory.states):
        for c, v in enumerate(state):
            rows.append(f"{float(t)!r},{c},{float(v)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    with open(str(path) + ".json", "w") as fh:
        json.dump(_cfg_dict(cfg), fh, indent=2)


def cmd_solve(args) -> int:
    cm = _graph_from_args(args)
    cfg = _solver_config(args, args.solver)
    if args.traj and cfg.traj_stride <= 0:
        cfg = dataclasses.replace(cfg, traj_stride=max(1, cfg.steps // 200))
    result = run(cm, cfg)
    print(f"solver={args.solver} energy={result.energy!r}")
    print("spins=" + " ".join(str(int(s)) for s in result.spins))
    payload = {
        "solver": args.solver,
        "energy": result.energy,
        "spins": [int(s) for s in result.spins],
        "wall_time": result.wall_time,
        "manifest": _manifest(args, "solve", config=_cfg_dict(cfg)),
    }
    if result.axis is not None:
        payload["axis"] = [float(a) for a in result.axis]
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    if args.traj:
        if result.trajectory is None:
            raise ValidationError("trajectory requested but stride resolved to 0")
        _write_trajectory(args.traj, result, cfg)
    return 0


def _parse_solvers(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise ValidationError("empty solver list")
    for s in names:
        if s not in SOLVERS:
            raise ValidationError(f"unknown solver {s!r}")
    return names


def cmd_sweep(args) -> int:
    solvers = {}
    for name in _parse_solvers(args.solvers):
        ns = argparse.Namespace(**vars(args))
        solvers[name] = _solver_config(ns, name)
    fixed = {}
    for key in ("J", "G", "k"):
        v = getattr(args, key, None)
        if v is not None and key != args.param:
            fixed[key] = v
    grid = list(np.arange(args.start, args.stop + 0.5 * args.step, args.step))
    spec = SweepSpec(family=args.family, n=args.n, param=args.param, grid=grid,
                     solvers=solvers, fixed=fixed, runs_per_point=args.runs,
                     base_seed=args.seed or 0)
    rows, markers = sweep(spec, threads=args.threads)
    if args.format == "json":
        payload = {
            "rows": [{"param": v, "solver": s, "p_gs": p, "runs": r, "reference_energy": e}
                     for v, s, p, r, e in rows],
            "markers": markers,
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    else:
        write_sweep_csv(args.out, rows)
    _write_manifest(args.out, _manifest(
        args, "sweep",
        config={name: _cfg_dict(c) for name, c in solvers.items()},
        extra={"family": args.family, "n": args.n, "param": args.param,
               "grid": [float(g) for g in grid], "fixed": fixed,
               "runs": args.runs, "seed": args.seed or 0, "markers": markers,
               "threads_note": "thread count never changes numeric output"}))
    print(f"wrote {args.out} ({len(rows)} rows); markers: {markers}")
    return 0


def cmd_bench(args) -> int:
    solvers = {}
    for name in _parse_solvers(args.solvers):
        ns = argparse.Namespace(**vars(args))
        cfg = _solver_config(ns, name)
        if name == "visa" and args.coupling_scale is None:
            cfg = dataclasses.replace(cfg, coupling_scale="auto")
        if name in ("cim", "mrcim") and args.alpha is None:
            cfg = dataclasses.replace(cfg, alpha="auto", p0=cfg.p0 if cfg.p0 is not None else -1.0)
        solvers[name] = cfg
    report = random_benchmark(args.family, args.n, args.instances, solvers,
                              base_seed=args.seed or 0,
                              reference_mode=args.reference_mode,
                              runs_per_instance=args.runs_per_instance,
                              threads=args.threads,
                              reference_file=args.reference_file)
    with open(args.out, "w") as fh:
        fh.write(report.to_json())
    _write_manifest(args.out, _manifest(
        args, "bench", config={name: _cfg_dict(c) for name, c in solvers.items()},
        extra={"family": args.family, "n": args.n, "instances": args.instances,
               "reference_mode": args.reference_mode, "seed": args.seed or 0}))
    gaps = [r.proximity_gap for r in report.records if r.proximity_gap is not None]
    print(f"wrote {args.out}: {len(report.records)} records, "
          f"mean gap {np.mean(gaps):.4f}" if gaps else f"wrote {args.out}")
    return 0


def _parse_range(text: str) -> np.ndarray:
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except Exception as exc:
        raise ValidationError(f"range must be start:stop:step, got {text!r}") from exc
    return np.arange(a, b + 0.5 * step, step)


def cmd_critical(args) -> int:
    cm = _graph_from_args(args)
    points, dropped = find_critical_points(
        cm, args.gamma, args.P, alpha=args.landscape_alpha,
        n_starts=args.starts, seed=args.seed or 0, include_seeded=args.seeded)
    rows = ["energy,distance,label,hessian_index,zero_modes"]
    for p in points:
        rows.append(f"{p.energy!r},{p.distance!r},{p.label},{p.hessian_index},{p.n_zero_modes}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    _write_manifest(args.out, _manifest(args, "critical", extra={
        "J": args.J, "n": args.n, "gamma": args.gamma, "P": args.P,
        "alpha": args.landscape_alpha, "starts": args.starts,
        "seed": args.seed or 0, "dropped": dropped}))
    print(f"wrote {args.out}: {len(points)} critical points ({dropped} starts dropped)")
    return 0


def cmd_basins(args) -> int:
    cm = _graph_from_args(args)
    records, failures = basins(cm, args.gamma, args.P, alpha=args.landscape_alpha,
                               n_starts=args.starts, seed=args.seed or 0)
    rows = ["start,label,energy,m_mag,x_corr_mag"]
    for r in records:
        rows.append(f"{r.start_index},{r.label},{r.energy!r},{r.m_mag!r},{r.x_corr_mag!r}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    _write_manifest(args.out, _manifest(args, "basins", extra={
        "J": args.J, "n": args.n, "gamma": args.gamma, "P": args.P,
        "alpha": args.landscape_alpha, "starts": args.starts,
        "seed": args.seed or 0, "failures": failures}))
    print(f"wrote {args.out}: {len(records)} basins records ({failures} failures)")
    return 0


def cmd_phasemap(args) -> int:
    cm = _graph_from_args(args)
    gammas = _parse_range(args.gamma_range)
    Ps = _parse_range(args.p_range)
    pm = phase_map(cm, gammas, Ps, alpha=args.landscape_alpha,
                   n_starts=args.starts, seed=args.seed or 0)
    payload = {
        "gammas": [float(g) for g in pm.gammas],
        "Ps": [float(p) for p in pm.Ps],
        "labels": pm.labels,
        "boundary": [[float(a), float(b)] for a, b in pm.boundary],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
    _write_manifest(args.out, _manifest(args, "phasemap", extra={
        "J": args.J, "n": args.n, "alpha": args.landscape_alpha,
        "gamma_range": args.gamma_range, "p_range": args.p_range,
        "seed": args.seed or 0}))
    print(f"wrote {args.out}: {len(pm.boundary)} boundary points")
    return 0


def _add_graph_args(p, need_out=False):
    p.add_argument("--graph", help="matrix file (text format)")
    p.add_argument("--family", choices=["mobius", "jg", "sk", "3reg"])
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--J", type=float)
    p.add_argument("--G", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    if need_out:
        p.add_argument("--out", required=True)


def _add_solver_args(p):
    p.add_argument("--steps", type=int, dest="steps")
    p.add_argument("--T", type=float, help="horizon; overrides --steps via n = T/dt")
    p.add_argument("--dt", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--p0", type=float)
    p.add_argument("--alpha")
    p.add_argument("--p-rate", type=float, dest="p_rate")
    p.add_argument("--delta", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--damping", type=float)
    p.add_argument("--beta0", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--init-scale", type=float, dest="init_scale")
    p.add_argument("--init-mode", choices=["isotropic", "matched"], dest="init_mode")
    p.add_argument("--coupling-scale", dest="coupling_scale")
    p.add_argument("--config", help="key = value config file with [solver.<name>] sections")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spin-anneal",
        description="Gain-based annealing solvers for Ising Hamiltonian minimization")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a benchmark coupling matrix")
    _add_graph_args(g, need_out=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one solver on one instance")
    _add_graph_args(s)
    s.add_argument("--solver", required=True, choices=list(SOLVERS))
    _add_solver_args(s)
    s.add_argument("--out", help="result JSON path")
    s.add_argument("--traj", help="trajectory CSV path")
    s.add_argument("--traj-stride", type=int, dest="traj_stride")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="ground-state probability over a parameter grid")
    _add_graph_args(w)
    w.add_argument("--param", required=True, choices=["J", "G"])
    w.add_argument("--from", type=float, required=True, dest="start")
    w.add_argument("--to", type=float, required=True, dest="stop")
    w.add_argument("--step", type=float, required=True)
    w.add_argument("--solvers", required=True)
    w.add_argument("--runs", type=int, default=1000)
    _add_solver_args(w)
    w.add_argument("--threads", type=int, default=_env_threads())
    w.add_argument("--format", choices=["csv", "json"], default="csv")
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bench", help="random-instance benchmark")
    b.add_argument("--family", required=True, choices=["sk", "3reg"])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--instances", type=int, required=True)
    b.add_argument("--solvers", required=True)
    b.add_argument("--seed", type=int)
    b.add_argument("--reference-mode", choices=["oracle", "best_found", "file"],
                   default="oracle", dest="reference_mode")
    b.add_argument("--reference-file", dest="reference_file")
    b.add_argument("--runs-per-instance", type=int, default=1, dest="runs_per_instance")
    _add_solver_args(b)
    b.add_argument("--threads", type=int, default=_env_threads())
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("critical", help="critical points of the frozen landscape")
    _add_graph_args(c)
    c.add_argument("--gamma", type=float, required=True)
    c.add_argument("--P", type=float, required=True)
    c.add_argument("--landscape-alpha", type=float, default=1.0, dest="landscape_alpha")
    c.add_argument("--starts", type=int, default=5000)
    c.add_argument("--seeded", action="store_true",
                   help="add deterministic spin-texture starts")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_critical)

    ba = sub.add_parser("basins", help="basins of attraction survey")
    _add_graph_args(ba)
    ba.add_argument("--gamma", type=float, required=True)
    ba.add_argument("--P", type=float, required=True)
    ba.add_argument("--landscape-alpha", type=float, default=1.0, dest="landscape_alpha")
    ba.add_argument("--starts", type=int, default=4000)
    ba.add_argument("--out", required=True)
    ba.set_defaults(func=cmd_basins)

    pm = sub.add_parser("phasemap", help="global-minimum labels over a gamma-P grid")
    _add_graph_args(pm)
    pm.add_argument("--gamma-range", required=True, dest="gamma_range",
                    help="start:stop:step")
    pm.add_argument("--p-range", required=True, dest="p_range", help="start:stop:step")
    pm.add_argument("--landscape-alpha", type=float, default=1.0, dest="landscape_alpha")
    pm.add_argument("--starts", type=int, default=16)
    pm.add_argument("--out", required=True)
    pm.set_defaults(func=cmd_phasemap)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
