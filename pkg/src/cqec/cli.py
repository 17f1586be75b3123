"""Command-line entry point: ``cqec simulate|ensemble|replay|baseline|plot``."""

import argparse
import os
import sys

import numpy as np

from . import config as cfgmod
from . import io
from .baselines import baseline_table
from .ensemble import run_ensemble, sweep_configs
from .plot import Series, write_svg
from .trajectory import COLUMNS, run_trajectory


class ReplayError(RuntimeError):
    """Replayed runs did not see the same noise stream."""


def _common(p):
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--preset", choices=sorted(cfgmod.PRESETS), help="named parameter set")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key (JSON value); repeatable")


def build_config(args):
    base = {}
    if args.config:
        base = io.read_json(args.config)
    d = cfgmod.apply_overrides(base, args.overrides)
    if args.seed is not None:
        d["seed"] = args.seed
    return cfgmod.from_dict(d, preset=args.preset)


def cmd_simulate(args):
    cfg = build_config(args)
    out = io.ensure_dir(args.out)
    result = run_trajectory(cfg)
    io.write_trajectory_csv(os.path.join(out, "trajectory.csv"), result)
    summary = io.trajectory_summary(result, cfg)
    io.write_json(os.path.join(out, "summary.json"), summary)
    print(f"final fidelity {result.final_fidelity:.6f}  corrections {sum(result.events['corrections'])}  "
          f"({result.wall_time:.2f} s)")
    return summary


def _fmt_value(v):
    return f"{v:g}".replace("-", "m")


def cmd_ensemble(args):
    cfg = build_config(args)
    out = io.ensure_dir(args.out)

    def progress(done, total):
        if args.verbose:
            print(f"\r{done}/{total}", end="", file=sys.stderr, flush=True)

    if cfg.sweep is None:
        res = run_ensemble(cfg, workers=args.workers, progress=progress)
        io.write_ensemble_csv(os.path.join(out, "ensemble.csv"), res)
        summary = res.summary()
        io.write_json(os.path.join(out, "summary.json"), summary)
        print(f"mean final fidelity {res.final_mean:.6f} +- {res.final_stderr:.6f} "
              f"(N={res.n_ok}, failed={len(res.failed)}, {res.wall_time:.1f} s)")
        return summary
    param = cfg.sweep["param"]
    index = {"param": param, "points": [], "config": cfg.to_dict()}
    for value, c in sweep_configs(cfg):
        res = run_ensemble(c, workers=args.workers, progress=progress)
        name = f"ensemble_{param}_{_fmt_value(value)}.csv"
        io.write_ensemble_csv(os.path.join(out, name), res)
        point = {"value": value, "csv": name, **{k: v for k, v in res.summary().items() if k != "config"}}
        index["points"].append(point)
        print(f"{param}={value:g}: mean final fidelity {res.final_mean:.6f} +- {res.final_stderr:.6f}")
    io.write_json(os.path.join(out, "index.json"), index)
    return index


def replay(cfg, lambdas, index=0):
    """Run one trajectory per feedback strength (multiples of kappa) on a shared noise stream.

    Returns ``[(lambda, TrajectoryResult), ...]``.

    Raises
    ------
    ReplayError
        If the noise checksums differ between runs.
    """
    runs = []
    for lam in lambdas:
        c = cfg.with_updates(lambda0_over_kappa=float(lam), replay_lambdas=None)
        runs.append((float(lam), run_trajectory(c, index=index)))
    sums = {r.dw_checksum for _, r in runs}
    if len(sums) != 1:
        raise ReplayError(f"noise checksums differ across replays: {sorted(sums)}")
    return runs


def cmd_replay(args):
    cfg = build_config(args)
    lambdas = args.lambdas if args.lambdas else cfg.replay_lambdas
    if not lambdas:
        raise cfgmod.ConfigError("replay needs --lambdas or replay_lambdas in the configuration")
    out = io.ensure_dir(args.out)
    runs = replay(cfg, lambdas, index=args.trajectory)
    manifest = {"seed": cfg.seed, "trajectory": args.trajectory, "runs": [], "config": cfg.to_dict()}
    for lam, r in runs:
        name = f"replay_lam{_fmt_value(lam)}.csv"
        io.write_trajectory_csv(os.path.join(out, name), r)
        manifest["runs"].append({"lambda0_over_kappa": lam, "csv": name, "dw_checksum": r.dw_checksum,
                                 "final_fidelity": r.final_fidelity, "events": r.events})
        print(f"lambda={lam:g} kappa: final fidelity {r.final_fidelity:.6f}")
    manifest["checksums_identical"] = True
    io.write_json(os.path.join(out, "manifest.json"), manifest)
    return manifest


def cmd_baseline(args):
    out = io.ensure_dir(args.out)
    table = baseline_table(np.linspace(0.0, args.t_max, args.points), args.gamma)
    path = io.write_csv(os.path.join(out, "baseline.csv"), io.BASELINE_COLUMNS, table)
    print(path)
    return table


def _default_columns(header):
    if "mean" in header:
        return ["mean"]
    if "F_logical" in header:
        return ["F_logical"]
    return [h for h in header if h != "t"]


def cmd_plot(args):
    series = []
    for path in args.csv:
        header, data = io.read_csv(path)
        if "t" not in header:
            raise io.SchemaError(f"{path}: no t column")
        cols = args.columns or _default_columns(header)
        stem = os.path.splitext(os.path.basename(path))[0]
        for col in cols:
            if col not in header:
                raise io.SchemaError(f"{path}: no column {col!r}; available {list(header)}")
            band = None
            if col == "mean" and "stderr" in header and not args.no_band:
                band = data[:, header.index("stderr")]
            label = stem if len(cols) == 1 else f"{stem}:{col}"
            series.append(Series(label, data[:, header.index("t")], data[:, header.index(col)], band))
    out = io.ensure_dir(args.out)
    path = write_svg(os.path.join(out, args.name), series, xlabel=args.xlabel, ylabel=args.ylabel,
                     title=args.title)
    print(path)
    return path


def make_parser():
    parser = argparse.ArgumentParser(prog="cqec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one trajectory -> trajectory.csv + summary.json")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ensemble", help="N trajectories -> ensemble.csv (t, mean, stderr) + summary.json")
    _common(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("replay", help="same noise under several feedback strengths")
    _common(p)
    p.add_argument("--lambdas", type=float, nargs="+", help="feedback strengths in units of kappa")
    p.add_argument("--trajectory", type=int, default=0, help="noise stream index")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("baseline", help="analytic comparison curves -> baseline.csv")
    p.add_argument("--out", default=".")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("plot", help="CSV columns -> SVG")
    p.add_argument("csv", nargs="+")
    p.add_argument("--columns", nargs="+")
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="plot.svg")
    p.add_argument("--xlabel", default="t (1/gamma)")
    p.add_argument("--ylabel", default="")
    p.add_argument("--title", default="")
    p.add_argument("--no-band", action="store_true", help="omit the stderr band of ensemble CSVs")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    if getattr(args, "points", 2) < 2:
        print("error: --points must be at least 2", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except (cfgmod.ConfigError, io.SchemaError, OSError, ReplayError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
