"""Command-line entry point.

Exit codes: 0 when every assertion of the command passes, 1 when one
fails, 2 on configuration or runtime errors (including bad usage).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from ..diagnostics import alpha_theory, lambda1
from ..errors import MBQError
from ..field import Grid
from .config import RunConfig, parse_config
from .snapshot import write_snapshot
from .timeseries import write_timeseries

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        d = {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if hasattr(obj, "passed"):
            d["passed"] = bool(obj.passed)
        return d
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    return _jsonable(float(obj)) if hasattr(obj, "__float__") else str(obj)


def write_report(report, path) -> Path:
    """Serialize a report dataclass as an indented JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(report), indent=2) + "\n")
    return path


class _Printer:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, *args):
        if not self.quiet:
            print(*args)


def _cmd_run(cfg: RunConfig, out: Path, say) -> int:
    from ..experiments import InitialCondition, simulate
    from ..stepper import cfl_max_dt

    ic = InitialCondition(cfg.initial_condition.name, cfg.initial_condition.amplitudes)
    s0 = ic.build(Grid(cfg.n), cfg.bc_theta, cfg.bc_b)
    if cfg.fixed_dt is not None and cfg.fixed_dt > cfl_max_dt(s0, cfg.coefficients) * (1 + 1e-12):
        raise MBQError(f"dt={cfg.fixed_dt} exceeds the stability bound at t=0")
    count = [0]

    def on_sample(rec, s):
        if cfg.snapshot_every and count[0] % cfg.snapshot_every == 0:
            write_snapshot(s, out / f"snapshot_{count[0]:06d}.bin")
        count[0] += 1

    res = simulate(s0, cfg.coefficients, cfg.t_final, dt=cfg.fixed_dt,
                   sample_every=cfg.sample_every, on_sample=on_sample)
    path = write_timeseries(res.records, out / "timeseries.csv")
    say(f"{res.steps} steps to t={res.final.t:.6g}; {len(res.records)} samples -> {path}")
    ok = res.final.divergence_ok()
    say(f"divergence invariants: {'ok' if ok else 'VIOLATED'}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_mms(cfg: RunConfig, out: Path, say) -> int:
    from ..experiments import run_mms

    m = cfg.mms
    space = run_mms(m.levels, "continuous_forcing", m.t_final, cfg.coefficients)
    time = run_mms(m.time_steps, "discrete_forcing", m.time_t_final, cfg.coefficients, n_time=m.time_n)
    ok = space.min_order() >= m.min_order and time.min_order() >= m.min_order
    write_report({"spatial": space, "temporal": time, "min_order": m.min_order, "passed": ok}, out / "mms.json")
    for tab in (space, time):
        say(f"{tab.mode}: orders {[[round(v, 3) for v in row] for row in tab.orders]}")
    say("mms:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_decay(cfg: RunConfig, out: Path, say) -> int:
    from ..experiments import decay_report, run_config

    _, res = run_config(cfg)
    rep = decay_report(cfg, res, cfg.n)
    if not (cfg.bc_theta == "dirichlet" and cfg.bc_b == "dirichlet"):
        rep.checks.pop("decay_bound")
    write_timeseries(res.records, out / "timeseries.csv")
    write_report(rep, out / "decay.json")
    say(f"lambda1_h={rep.lambda1_h:.10g} alpha_theory={rep.alpha_theory:.10g} "
        f"worst E/envelope={rep.worst_bound_ratio:.6g}")
    say("decay:", "PASS" if rep.passed else "FAIL", rep.checks)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_stability(cfg: RunConfig, out: Path, say) -> int:
    from ..experiments import run_stability

    rep = run_stability(cfg)
    write_report(rep, out / "stability.json")
    say(f"d(T)/d(0)={rep.amplification[-1]:.6g} linearity={rep.linearity_ratio:.6g}")
    say("stability:", "PASS" if rep.passed else "FAIL", rep.checks)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_bc_matrix(cfg: RunConfig, out: Path, say) -> int:
    from ..experiments import run_bc_matrix

    rep = run_bc_matrix(cfg)
    write_report(rep, out / "bc_matrix.json")
    for name, cell in rep.cells.items():
        say(f"{name}: {'PASS' if cell.passed else 'FAIL'} {cell.checks}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_poincare(cfg: RunConfig, n: int, say) -> int:
    lam = lambda1(Grid(n))
    alpha = alpha_theory(cfg.coefficients.c0, lam)
    print(f"lambda1_h = {lam:.12g}")
    print(f"alpha_theory = {alpha:.12g} (c0 = {cfg.coefficients.c0:g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="TOML run configuration")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress progress output")
    p = argparse.ArgumentParser(prog="mbq", description="Boussinesq-MHD decay simulator", parents=[common])
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True
    sub.add_parser("run", parents=[common], help="single simulation to a CSV time series")
    sub.add_parser("mms", parents=[common], help="manufactured-solution convergence study")
    sub.add_parser("decay", parents=[common], help="certified energy decay run")
    sub.add_parser("stability", parents=[common], help="perturbation amplification study")
    sub.add_parser("bc-matrix", parents=[common], help="four boundary-condition variants")
    pc = sub.add_parser("poincare", parents=[common], help="discrete Poincare eigenvalue")
    pc.add_argument("--n", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    say = _Printer(getattr(args, "quiet", False))
    try:
        cfg = parse_config(args.config) if getattr(args, "config", None) else RunConfig()
        out = Path(getattr(args, "out", None) or cfg.out_dir)
        if args.command == "poincare":
            return _cmd_poincare(cfg, args.n, say)
        handler = {
            "run": _cmd_run,
            "mms": _cmd_mms,
            "decay": _cmd_decay,
            "stability": _cmd_stability,
            "bc-matrix": _cmd_bc_matrix,
        }[args.command]
        return handler(cfg, out, say)
    except MBQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
