"""Command-line entry point: ``scalarlab <subcommand> ...``.

Every subcommand prints (or writes) JSON.  The exit status is 0 when every
``pass``-style flag in the report is true, 1 when one is false and 2 on a
usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import flux as fluxmod
from .errors import ConfigurationError, ScalarLabError
from .exponents import compute_exponents, optimize_gamma
from .harness import (contraction_audit, field_scale, is_nonincreasing, max_principle_audit,
                      run_decay_experiment)
from .initial import RarefactionPlusBump
from .kinetic import BumpTest, degiorgi_sequence, entropy_dissipation_residual, roundtrip_check
from .solver import solve

log = logging.getLogger("scalarlab")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected a comma separated list of numbers, got {text!r}") from exc


def parse_deltas(text: str) -> list[float]:
    """``0.1,0.05,...`` or ``geom:FIRST:LAST`` for ``2^-FIRST ... 2^-LAST``."""
    if text.startswith("geom:"):
        try:
            _, a, b = text.split(":")
            return fluxmod.geometric_deltas(int(a), int(b))
        except ValueError as exc:
            raise ConfigurationError(f"bad geometric delta pattern {text!r}") from exc
    return _floats(text)


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2)
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def _status(*flags: bool) -> int:
    return 0 if all(flags) else 1


# ---------------------------------------------------------------------------
# subcommands

def cmd_nondeg(args) -> int:
    interval = cfgmod.parse_pair(args.interval, "--interval")
    if args.flux == "burgers":
        model = fluxmod.burgers(args.n, interval)
    elif args.flux == "convex-power":
        model = fluxmod.convex_power(args.p, args.n, interval)
    else:
        if not args.coeffs:
            raise ConfigurationError("--flux custom-poly needs --coeffs")
        model = fluxmod.custom_poly([_floats(c) for c in args.coeffs.split(";")], interval)
    profile = fluxmod.nondegeneracy_profile(model, parse_deltas(args.deltas),
                                            args.sphere_samples, args.v_samples,
                                            workers=args.workers)
    _emit(profile.to_dict(), args.out)
    return 0


def cmd_exponents(args) -> int:
    if args.optimize:
        exps = optimize_gamma(args.alpha, args.n, args.margin)
    elif args.delta is not None:
        exps = compute_exponents(args.alpha, args.n, args.delta)
    else:
        raise ConfigurationError("give --delta or --optimize")
    _emit(exps.to_dict(), None)
    return _status(exps.valid)


def cmd_solve(args) -> int:
    config = cfgmod.solve_config_from_dict(cfgmod.load_mapping(args.config))
    trajectory = solve(config)
    manifest = cfgmod.write_trajectory(args.out_prefix, trajectory, config)
    ok = max_principle_audit(trajectory) if trajectory else True
    print(json.dumps({"manifest": str(manifest), "snapshots": len(trajectory),
                      "max_principle_ok": ok}))
    return _status(ok)


def _write_series(path: str, report) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "linf_diff", "l1_diff", "bound_envelope"])
        for row in zip(report.times, report.linf_diff, report.l1_diff, report.bound_envelope):
            writer.writerow([repr(float(v)) for v in row])


def cmd_decay(args) -> int:
    config = cfgmod.experiment_from_dict(cfgmod.load_mapping(args.config))
    report = run_decay_experiment(config)
    body = report.to_dict()
    body["config"] = config.to_dict()
    _emit(body, args.out)
    if args.csv:
        _write_series(args.csv, report)
    log.info("fitted rate %.4f, bound %.4f", report.fitted_rate, report.gamma_bound)
    return _status(report.passed, report.contraction_ok, report.max_principle_ok)


def cmd_audit(args) -> int:
    a = cfgmod.read_trajectory(args.a)
    b = cfgmod.read_trajectory(args.b)
    l1 = contraction_audit(a, b)
    contraction = is_nonincreasing(l1, args.rel, scale=field_scale(a, b))
    mp_a, mp_b = max_principle_audit(a), max_principle_audit(b)
    _emit({"times": [s.time for s in a], "l1_diff": l1, "contraction_ok": contraction,
           "max_principle_ok": [mp_a, mp_b]}, args.out)
    return _status(contraction, mp_a, mp_b)


def _kinetic_trajectories(args):
    """Dense run of ``--config`` and its reference (unperturbed run or closed form)."""
    data = cfgmod.load_mapping(args.config)
    config = cfgmod.solve_config_from_dict(data)
    config.snapshot_times = np.linspace(0.0, config.end_time, args.snapshots).tolist()
    u = solve(config)
    init = config.initial
    if not isinstance(init, RarefactionPlusBump):
        raise ConfigurationError("kinetic diagnostics need init.rarefaction or init.base")
    if args.reference == "analytic":
        return config, u, init.reference
    return config, u, solve(config.with_initial(init.unperturbed()))


def cmd_kinetic(args) -> int:
    if args.action == "roundtrip-check":
        report = roundtrip_check(args.samples, args.Lambda, args.v_cells, args.seed)
        _emit(report, args.out)
        return _status(report["pass"])
    if args.action == "degiorgi":
        _, u, ref = _kinetic_trajectories(args)
        data = degiorgi_sequence(u, ref, _floats(args.center), args.scale, args.K, args.kmax)
        report = data.to_dict()
        report["nonincreasing"] = bool(np.all(np.diff(data.energies) <= 0))
        _emit(report, args.out)
        return _status(report["nonincreasing"])
    # dissipation
    config = cfgmod.solve_config_from_dict(cfgmod.load_mapping(args.config))
    config.snapshot_times = np.linspace(0.0, config.end_time, args.snapshots).tolist()
    u = solve(config)
    nums = _floats(args.bump)
    d1 = config.grid.dimension + 1
    if len(nums) != 2 * d1:
        raise ConfigurationError(f"--bump needs {2 * d1} numbers: centre then half widths")
    ramps = _floats(args.ramps) if args.ramps else None
    test = BumpTest(tuple(nums[:d1]), tuple(nums[d1:]), ramps)
    rep = entropy_dissipation_residual(u, config.flux, args.k, test)
    body = rep.to_dict()
    tol = max(config.grid.spacing)
    body["tolerance"] = tol
    body["pass"] = bool(rep.residual >= -tol)
    _emit(body, args.out)
    return _status(body["pass"])


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scalarlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("nondeg", help="measure the genuine-nonlinearity profile of a flux")
    q.add_argument("--flux", choices=["burgers", "convex-power", "custom-poly"], default="burgers")
    q.add_argument("--n", type=int, default=1)
    q.add_argument("--p", type=int, default=2, help="power for convex-power")
    q.add_argument("--coeffs", help="custom-poly: ascending coefficients, components split by ';'")
    q.add_argument("--interval", default="-1,1")
    q.add_argument("--deltas", default="geom:3:10")
    q.add_argument("--sphere-samples", type=int, default=2000)
    q.add_argument("--v-samples", type=int, default=20000)
    q.add_argument("--workers", type=int, default=1)
    q.add_argument("--out")
    q.set_defaults(func=cmd_nondeg)

    q = sub.add_parser("exponents", help="exponent bundle for (alpha, n, delta)")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--n", type=int, required=True)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--delta", type=float)
    g.add_argument("--optimize", action="store_true")
    q.add_argument("--margin", type=float, default=0.01)
    q.set_defaults(func=cmd_exponents)

    q = sub.add_parser("solve", help="run the finite-volume solver and store snapshots")
    q.add_argument("--config", required=True)
    q.add_argument("--out-prefix", required=True)
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("kinetic", help="kinetic-layer diagnostics")
    q.add_argument("action", choices=["roundtrip-check", "degiorgi", "dissipation"])
    q.add_argument("--config", help="run config (degiorgi, dissipation)")
    q.add_argument("--snapshots", type=int, default=161, help="evenly spaced snapshots on [0, end]")
    q.add_argument("--reference", choices=["numerical", "analytic"], default="numerical")
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--Lambda", type=float, default=1.0)
    q.add_argument("--v-cells", type=int, default=2048)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--center", help="space-time point t,x[,y]")
    q.add_argument("--scale", type=float)
    q.add_argument("--K", type=float)
    q.add_argument("--kmax", type=int, default=8)
    q.add_argument("--k", type=float, default=0.0)
    q.add_argument("--bump", help="test function: centre t,x.. then half widths")
    q.add_argument("--ramps", help="ramp lengths per space-time axis")
    q.add_argument("--out")
    q.set_defaults(func=cmd_kinetic)

    q = sub.add_parser("decay", help="perturbed-wave decay experiment")
    q.add_argument("--config", required=True)
    q.add_argument("--out")
    q.add_argument("--csv")
    q.set_defaults(func=cmd_decay)

    q = sub.add_parser("audit", help="contraction and maximum-principle audit of two stored runs")
    q.add_argument("--a", required=True, help="manifest of the first trajectory")
    q.add_argument("--b", required=True, help="manifest of the second trajectory")
    q.add_argument("--rel", type=float, default=1e-12)
    q.add_argument("--out")
    q.set_defaults(func=cmd_audit)
    return p


def _check_kinetic_args(args) -> None:
    if args.action == "degiorgi":
        missing = [n for n in ("config", "center", "scale", "K") if getattr(args, n) is None]
    elif args.action == "dissipation":
        missing = [n for n in ("config", "bump") if getattr(args, n) is None]
    else:
        missing = []
    if missing:
        raise ConfigurationError(f"kinetic {args.action} needs --" + ", --".join(missing))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "kinetic":
            _check_kinetic_args(args)
        return args.func(args)
    except (ScalarLabError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
