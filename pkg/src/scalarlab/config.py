"""Structured-text run configuration (YAML or JSON) and trajectory files.

A run file has the sections ``flux``, ``grid``, ``init``, ``time`` and a
``scheme`` string; a decay experiment adds ``experiment``::

    flux: {kind: burgers, n: 1, interval: [0, 1]}
    grid: {cells: 8192, lo: -8, hi: 24, boundary: outflow}
    init:
      rarefaction: {axis: 0, uL: 0, uR: 1, t0: 1, x0: 0}
      bump: {amplitude: 0.1, width: 0.5, center: [0.5]}
    time: {end: 16, snapshots: [0, 1, 2, 4, 8, 16]}
    scheme: engquist-osher
    experiment: {times: [1, 2, 4, 8, 16], alpha: 1.0, margin: 0.01}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from . import flux as fluxmod
from .errors import ConfigurationError
from .exponents import compute_exponents, optimize_gamma
from .grid import Grid, SolutionField
from .initial import Bump, Constant, InitialData, RarefactionPlusBump, Riemann, Table
from .solver import SolveConfig
from .waves import RarefactionWave


def load_mapping(path: str | Path) -> dict:
    text = Path(path).read_text()
    data = yaml.safe_load(text)
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return dict(data)


def _section(data: Mapping, key: str) -> dict:
    sec = data.get(key)
    if not isinstance(sec, Mapping):
        raise ConfigurationError(f"missing or malformed section {key!r}")
    return dict(sec)


def parse_pair(value, name: str) -> tuple[float, float]:
    if isinstance(value, str):
        value = value.split(",")
    try:
        lo, hi = (float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{name} must be two numbers lo, hi") from exc
    return lo, hi


def flux_from_dict(sec: Mapping) -> fluxmod.FluxModel:
    kind = sec.get("kind", "burgers")
    n = int(sec.get("n", 1))
    interval = parse_pair(sec.get("interval", (-1.0, 1.0)), "flux.interval")
    if kind == "burgers":
        return fluxmod.burgers(n, interval)
    if kind == "convex-power":
        return fluxmod.convex_power(int(sec.get("p", 2)), n, interval)
    if kind == "custom-poly":
        coeffs = sec.get("coeffs")
        if not coeffs:
            raise ConfigurationError("custom-poly flux needs flux.coeffs")
        return fluxmod.custom_poly(coeffs, interval)
    if kind == "linear":
        return fluxmod.linear(n, float(sec.get("speed", 1.0)), interval)
    raise ConfigurationError(f"unknown flux kind {kind!r}")


def grid_from_dict(sec: Mapping) -> Grid:
    try:
        return Grid.uniform(sec["cells"], sec["lo"], sec["hi"], sec.get("boundary", "outflow"))
    except KeyError as exc:
        raise ConfigurationError(f"grid section lacks {exc.args[0]!r}") from exc


def _bump(sec: Mapping | None, dim: int) -> Bump | None:
    if sec is None:
        return None
    center = sec.get("center", [0.0] * dim)
    return Bump(float(sec["amplitude"]), float(sec["width"]), center)


def wave_from_dict(sec: Mapping, model: fluxmod.FluxModel) -> RarefactionWave:
    return RarefactionWave.from_model(model, float(sec["uL"]), float(sec["uR"]),
                                      float(sec.get("t0", 1.0)), float(sec.get("x0", 0.0)),
                                      int(sec.get("axis", 0)))


def initial_from_dict(sec: Mapping, model: fluxmod.FluxModel, grid: Grid) -> InitialData:
    dim = grid.dimension
    bump = _bump(sec.get("bump"), dim)
    if "rarefaction" in sec:
        wave = wave_from_dict(sec["rarefaction"], model)
        if wave.dimension != dim:
            raise ConfigurationError("rarefaction dimension differs from the grid dimension")
        return RarefactionPlusBump(wave, bump)
    if "base" in sec:
        return RarefactionPlusBump(None, bump, float(sec["base"]), dim)
    if "riemann" in sec:
        r = sec["riemann"]
        return Riemann(float(r["uL"]), float(r["uR"]), int(r.get("axis", 0)),
                       float(r.get("x0", 0.0)), dim)
    if "constant" in sec:
        return Constant(float(sec["constant"]), dim)
    if "table" in sec:
        t = sec["table"]
        return Table(tuple(t["coords"]), np.asarray(t["values"], dtype=float))
    raise ConfigurationError("init needs one of rarefaction, base, riemann, constant, table")


def solve_config_from_dict(data: Mapping) -> SolveConfig:
    model = flux_from_dict(_section(data, "flux"))
    grid = grid_from_dict(_section(data, "grid"))
    init = initial_from_dict(_section(data, "init"), model, grid)
    tsec = _section(data, "time")
    snapshots = [float(t) for t in tsec.get("snapshots", [])]
    end = float(tsec.get("end", snapshots[-1] if snapshots else 0.0))
    if not snapshots:
        snapshots = [0.0, end]
    return SolveConfig(model, grid, init, end, tsec.get("cfl"), snapshots,
                       data.get("scheme", "engquist-osher"))


def experiment_from_dict(data: Mapping):
    from .harness import ExperimentConfig, geometric_times

    data = dict(data)
    exp = dict(data.get("experiment") or {})
    init = _section(data, "init")
    if "bump" not in init:
        raise ConfigurationError("a decay experiment needs init.bump")
    if "times" in exp:
        times = [float(t) for t in exp["times"]]
    else:
        first, last = parse_pair(exp.get("time_range", (1.0, 16.0)), "experiment.time_range")
        times = geometric_times(first, last, float(exp.get("ratio", 2.0)))
    tsec = dict(data.get("time") or {})
    tsec.setdefault("end", times[-1])
    tsec["snapshots"] = [0.0] + times
    data["time"] = tsec
    solve_cfg = solve_config_from_dict(data)
    n = solve_cfg.flux.dimension
    alpha = float(exp.get("alpha", 1.0 / n))
    if "delta" in exp:
        exps = compute_exponents(alpha, n, float(exp["delta"]))
    else:
        exps = optimize_gamma(alpha, n, float(exp.get("margin", 0.01)))
    wave = base = None
    if "rarefaction" in init:
        wave = wave_from_dict(init["rarefaction"], solve_cfg.flux)
    elif "base" in init:
        base = float(init["base"])
    else:
        raise ConfigurationError("a decay experiment needs init.rarefaction or init.base")
    window = exp.get("fit_window")
    return ExperimentConfig(
        solve=solve_cfg,
        bump=_bump(init["bump"], solve_cfg.grid.dimension),
        times=times,
        wave=wave,
        base=base,
        fit_window=None if window is None else parse_pair(window, "experiment.fit_window"),
        exponents=exps,
        rate_tolerance=float(exp.get("rate_tolerance", 0.05)),
    )


# ---------------------------------------------------------------------------
# trajectory files

AXIS_NAMES = ("x", "y")


def write_snapshot_csv(path: str | Path, snap: SolutionField) -> None:
    grid = snap.grid
    cols = [grid.points[..., j].ravel() for j in range(grid.dimension)] + [snap.values.ravel()]
    header = ",".join(list(AXIS_NAMES[:grid.dimension]) + ["u"])
    np.savetxt(path, np.column_stack(cols), delimiter=",", header=header, comments="", fmt="%.17g")


def read_snapshot_csv(path: str | Path, grid: Grid, time: float) -> SolutionField:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if header[-1] != "u" or len(header) != grid.dimension + 1:
        raise ConfigurationError(f"{path}: unexpected header {header}")
    values = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)[:, -1]
    if values.size != int(np.prod(grid.shape)):
        raise ConfigurationError(f"{path}: {values.size} rows for a grid of shape {grid.shape}")
    return SolutionField(grid, values.reshape(grid.shape), time)


def conservation_ledger(trajectory: Sequence[SolutionField]) -> dict:
    masses = [s.mass() for s in trajectory]
    m0 = masses[0] if masses else 0.0
    scale = max(abs(m0), np.finfo(float).tiny)
    return {
        "mass": masses,
        "relative_drift": [(m - m0) / scale for m in masses],
        "min": [float(s.values.min()) for s in trajectory],
        "max": [float(s.values.max()) for s in trajectory],
    }


def write_trajectory(prefix: str | Path, trajectory: Sequence[SolutionField],
                     config: SolveConfig) -> Path:
    """CSV per snapshot plus ``<prefix>.json`` manifest; returns the manifest path."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    files = []
    for i, snap in enumerate(trajectory):
        path = prefix.parent / f"{prefix.name}_{i:04d}.csv"
        write_snapshot_csv(path, snap)
        files.append(path.name)
    manifest = {
        "times": [s.time for s in trajectory],
        "files": files,
        "config": config.to_dict(),
        "conservation": conservation_ledger(trajectory),
    }
    out = prefix.parent / f"{prefix.name}.json"
    out.write_text(json.dumps(manifest, indent=2))
    return out


def read_trajectory(manifest_path: str | Path) -> list[SolutionField]:
    manifest_path = Path(manifest_path)
    manifest: dict[str, Any] = json.loads(manifest_path.read_text())
    grid = grid_from_dict(manifest["config"]["grid"])
    return [read_snapshot_csv(manifest_path.parent / f, grid, float(t))
            for f, t in zip(manifest["files"], manifest["times"])]
