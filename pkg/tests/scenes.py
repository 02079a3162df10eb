"""Reference experiment set-ups shared by several test modules."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from scalarlab import (Bump, ExperimentConfig, Grid, RarefactionPlusBump, RarefactionWave,
                       SolveConfig, burgers, run_decay_experiment, solve)
from scalarlab.initial import Constant

FLAGSHIP_TIMES = [1.0, 2.0, 4.0, 8.0, 16.0]
FLAGSHIP_DOMAIN = (-8.0, 24.0)


def flagship_flux():
    return burgers(1, (0.0, 1.0))


def flagship_wave():
    return RarefactionWave.from_model(flagship_flux(), 0.0, 1.0, t0=1.0, x0=0.0)


def flagship_bump(amplitude: float = 0.1):
    return Bump(amplitude, 0.5, 0.5)


def flagship_config(cells: int, amplitude: float = 0.1, flat: bool = False) -> ExperimentConfig:
    f = flagship_flux()
    solve_cfg = SolveConfig(f, Grid.uniform(cells, *FLAGSHIP_DOMAIN), Constant(0.0), FLAGSHIP_TIMES[-1])
    return ExperimentConfig(
        solve=solve_cfg,
        bump=flagship_bump(amplitude),
        times=FLAGSHIP_TIMES,
        wave=None if flat else flagship_wave(),
        base=0.5 if flat else None,
    )


@lru_cache(maxsize=None)
def flagship_report(cells: int, flat: bool = False):
    return run_decay_experiment(flagship_config(cells, flat=flat))


@lru_cache(maxsize=None)
def flagship_trajectory(cells: int, times: tuple[float, ...] = (0.0, 1.0, 2.0, 4.0, 8.0, 16.0),
                        scheme: str = "engquist-osher"):
    f = flagship_flux()
    init = RarefactionPlusBump(flagship_wave(), flagship_bump())
    cfg = SolveConfig(f, Grid.uniform(cells, *FLAGSHIP_DOMAIN), init, times[-1],
                      snapshot_times=list(times), scheme=scheme)
    return solve(cfg), solve(cfg.with_initial(init.unperturbed()))


# shock-in-rarefaction scene for the localized variation bound

SHOCK_SCENE_FLUX_INTERVAL = (0.0, 1.6)


@lru_cache(maxsize=None)
def shock_scene(cells: int):
    f = burgers(1, SHOCK_SCENE_FLUX_INTERVAL)
    wave = RarefactionWave.from_model(f, 0.0, 1.0, t0=1.0, x0=0.0)
    init = RarefactionPlusBump(wave, Bump(0.5, 0.5, 1.5))
    cfg = SolveConfig(f, Grid.uniform(cells, -4.0, 12.0), init, 4.0,
                      snapshot_times=np.linspace(0.0, 4.0, 161).tolist())
    return f, wave, solve(cfg)


def shock_scene_ratio(cells: int) -> float:
    from scalarlab.kinetic import variation_bound

    f, wave, traj = shock_scene(cells)
    res = variation_bound(traj, wave.evaluate, f, lambda t, x: wave.evaluate(t, x) + 0.05,
                          (2.0, 3.5), 1.0, 1.0, 2.0)
    return res.ratio
