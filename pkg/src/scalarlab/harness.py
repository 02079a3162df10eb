"""Decay experiments: a perturbed rarefaction against its unperturbed evolution.

Both the perturbed solution ``u`` and the reference ``u~`` are advanced by
the same monotone scheme, so their discrete difference obeys the L1
contraction and the maximum principle exactly and vanishes when the
perturbation does.  The closed-form wave is still evaluated at every
measurement time; its distance to the numerical reference is reported as
``reference_error``, and it supplies ``GammaBar``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, FitError, GeometryError
from .exponents import ExponentSet, bound_envelope, optimize_gamma
from .grid import SolutionField
from .initial import Bump, RarefactionPlusBump, cell_averages
from .solver import SolveConfig, solve
from .waves import RarefactionWave

RATE_TOLERANCE = 0.05
MIN_CELLS_PER_BUMP = 16


def geometric_times(first: float, last: float, ratio: float = 2.0) -> list[float]:
    """``first, first*ratio, ...`` up to and including ``last`` when it is hit."""
    if not (0 < first <= last) or ratio <= 1:
        raise ConfigurationError("need 0 < first <= last and ratio > 1")
    out, t = [], first
    while t <= last * (1 + 1e-12):
        out.append(t)
        t *= ratio
    return out


@dataclass
class ExperimentConfig:
    """A perturbed-wave run.

    ``solve`` supplies flux, grid, scheme and CFL; its initial data and
    snapshot list are rebuilt from ``wave``/``base`` and ``bump``.  Give
    either a rarefaction ``wave`` or a constant ``base`` state.
    """

    solve: SolveConfig
    bump: Bump
    times: list[float]
    wave: RarefactionWave | None = None
    base: float | None = None
    fit_window: tuple[float, float] | None = None
    exponents: ExponentSet | None = None
    rate_tolerance: float = RATE_TOLERANCE

    def __post_init__(self):
        if (self.wave is None) == (self.base is None):
            raise ConfigurationError("give exactly one of a reference wave or a base state")
        grid = self.solve.grid
        if len(self.bump.center) != grid.dimension:
            raise ConfigurationError("bump centre dimension does not match the grid")
        for j, (a, b) in enumerate(self.bump.support()):
            if not (grid.lo[j] < a and b < grid.hi[j]):
                raise ConfigurationError("perturbation support must lie strictly inside the domain")
            if self.bump.width / grid.spacing[j] < MIN_CELLS_PER_BUMP:
                raise ConfigurationError(
                    f"grid under-resolves the bump: need {MIN_CELLS_PER_BUMP} cells across its width")
        times = [float(t) for t in self.times]
        if len(times) < 1 or any(t <= 0 for t in times) or times != sorted(set(times)):
            raise ConfigurationError("measurement times must be positive and strictly increasing")
        self.times = times
        if self.fit_window is None:
            self.fit_window = (times[0], times[-1])
        lo, hi = map(float, self.fit_window)
        if not lo <= hi:
            raise ConfigurationError("fit window must satisfy t_min <= t_max")
        self.fit_window = (lo, hi)
        if self.exponents is None:
            n = self.solve.flux.dimension
            self.exponents = optimize_gamma(1.0 / n, n, 0.01)
        if self.rate_tolerance < 0:
            raise ConfigurationError("rate tolerance must be nonnegative")
        self.solve = SolveConfig(self.solve.flux, grid, self.perturbed_initial(), times[-1],
                                 self.solve.cfl, [0.0] + times, self.solve.scheme)

    def perturbed_initial(self) -> RarefactionPlusBump:
        return RarefactionPlusBump(self.wave, self.bump, self.base, self.solve.grid.dimension)

    def reference(self, t, x):
        return self.perturbed_initial().reference(t, x)

    @property
    def gamma_bar(self) -> float:
        return 0.0 if self.wave is None else self.wave.gamma_bar

    def to_dict(self) -> dict:
        return {
            "solve": self.solve.to_dict(),
            "times": list(self.times),
            "fit_window": list(self.fit_window),
            "exponents": self.exponents.to_dict(),
            "rate_tolerance": self.rate_tolerance,
        }


@dataclass
class DecayReport:
    times: list[float]
    linf_diff: list[float]
    l1_diff: list[float]
    fitted_rate: float
    gamma_bound: float
    envelope_constant: float
    passed: bool
    bound_envelope: list[float] = field(default_factory=list)
    reference_error: list[float] = field(default_factory=list)
    l1_initial: float = 0.0
    Lambda: float = 0.0
    GammaBar: float = 0.0
    window: list[list[float]] = field(default_factory=list)
    contraction_ok: bool = True
    max_principle_ok: bool = True
    exponents: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return self.passed and self.contraction_ok and self.max_principle_ok

    def to_dict(self) -> dict:
        rate = self.fitted_rate
        return {
            "times": self.times,
            "linf_diff": self.linf_diff,
            "l1_diff": self.l1_diff,
            "fitted_rate": rate if math.isfinite(rate) else "inf",
            "gamma_bound": self.gamma_bound,
            "envelope_constant": self.envelope_constant,
            "pass": self.passed,
            "bound_envelope": self.bound_envelope,
            "reference_error": self.reference_error,
            "l1_initial": self.l1_initial,
            "Lambda": self.Lambda,
            "GammaBar": self.GammaBar,
            "window": self.window,
            "contraction_ok": self.contraction_ok,
            "max_principle_ok": self.max_principle_ok,
            "exponents": self.exponents,
        }


def fit_rate(times: Sequence[float], values: Sequence[float]) -> float:
    """Negative OLS slope of ``log values`` against ``log times``."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.size < 3:
        raise FitError("need at least three (time, value) pairs")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise FitError("times must be positive and strictly increasing")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise FitError("values must be finite and strictly positive")
    slope = np.polyfit(np.log(t), np.log(v), 1)[0]
    return float(-slope)


def interior_window(config: SolveConfig, t: float) -> list[tuple[float, float]]:
    """Box untouched by boundary data at time ``t``.

    Information from an outflow boundary travels inward at most at the
    largest characteristic speed pointing into the domain; periodic axes
    have no boundary and are not shrunk.
    """
    out = []
    for j, bc in enumerate(config.grid.boundary):
        lo, hi = config.grid.lo[j], config.grid.hi[j]
        if bc == "outflow":
            amin, amax = config.flux.velocity_range(j)
            lo = lo + t * max(amax, 0.0)
            hi = hi - t * max(-amin, 0.0)
        out.append((lo, hi))
    return out


def _window_mask(snap: SolutionField, box) -> np.ndarray:
    mask = np.ones(snap.grid.shape, dtype=bool)
    for j, (lo, hi) in enumerate(box):
        x = snap.grid.points[..., j]
        mask &= (x >= lo) & (x <= hi)
    return mask


def contraction_audit(traj_a: Sequence[SolutionField], traj_b: Sequence[SolutionField]) -> list[float]:
    """Discrete L1 distance between two trajectories at each shared snapshot."""
    if len(traj_a) != len(traj_b):
        raise ConfigurationError("trajectories have different lengths")
    out = []
    for a, b in zip(traj_a, traj_b):
        if a.grid != b.grid:
            raise ConfigurationError("trajectories live on different grids")
        if abs(a.time - b.time) > 1e-9 * max(1.0, a.time):
            raise ConfigurationError(f"snapshot times differ: {a.time} vs {b.time}")
        out.append(a.l1_distance(b))
    return out


def is_nonincreasing(values: Sequence[float], rel: float = 1e-12, scale: float | None = None) -> bool:
    """``values[k+1] <= values[k] + rel * scale`` for every ``k``.

    ``scale`` defaults to the largest value.  Callers comparing two
    trajectories pass the L1 size of the fields themselves, which is what
    sets the round-off floor of a conservative update.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return True
    if scale is None:
        scale = float(np.abs(v).max())
    return bool(np.all(np.diff(v) <= rel * max(scale, np.finfo(float).tiny)))


def field_scale(*trajectories: Sequence[SolutionField]) -> float:
    """Largest discrete L1 norm over all snapshots of the given trajectories."""
    return max(float(np.abs(s.values).sum() * s.grid.cell_volume) for tr in trajectories for s in tr)


def max_principle_audit(trajectory: Sequence[SolutionField]) -> bool:
    """Every snapshot stays inside the range of the first one."""
    lo, hi = trajectory[0].values.min(), trajectory[0].values.max()
    return all(s.values.min() >= lo and s.values.max() <= hi for s in trajectory)


def run_decay_experiment(config: ExperimentConfig) -> DecayReport:
    solve_cfg = config.solve
    ref_cfg = solve_cfg.with_initial(RarefactionPlusBump(config.wave, None, config.base,
                                                         solve_cfg.grid.dimension))
    u_traj = solve(solve_cfg)
    ref_traj = solve(ref_cfg)
    u0, r0 = u_traj[0], ref_traj[0]
    Lambda = max(float(np.abs(u0.values).max()), float(np.abs(r0.values).max()))
    l1_initial = u0.l1_distance(r0)

    times, linf, l1, ref_err, windows = [], [], [], [], []
    for u, r in zip(u_traj[1:], ref_traj[1:]):
        box = interior_window(solve_cfg, u.time)
        if any(lo >= hi for lo, hi in box):
            raise GeometryError(f"interior window is empty at t={u.time}; enlarge the domain")
        mask = _window_mask(u, box)
        if not mask.any():
            raise GeometryError(f"no cell centre inside the interior window at t={u.time}")
        exact = cell_averages(u.grid, lambda x: config.reference(u.time, x))
        times.append(u.time)
        linf.append(float(np.abs(u.values - r.values)[mask].max()))
        l1.append(u.l1_distance(r))
        ref_err.append(float(np.abs(r.values - exact)[mask].max()))
        windows.append([v for pair in box for v in pair])

    exps = config.exponents
    n = solve_cfg.flux.dimension
    gamma_bound = n * exps.gamma
    t_lo, t_hi = config.fit_window
    sel = [i for i, t in enumerate(times) if t_lo - 1e-12 <= t <= t_hi + 1e-12]
    fit_t = [times[i] for i in sel]
    fit_v = [linf[i] for i in sel]

    if any(v == 0.0 for v in fit_v):
        rate = math.inf
    else:
        rate = fit_rate(fit_t, fit_v)

    unit = [bound_envelope(exps, Lambda, config.gamma_bar, l1_initial, t) for t in times]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = [linf[i] / unit[i] for i in sel if unit[i] > 0]
    C = max(ratios, default=0.0)
    envelope = [C * e for e in unit]

    return DecayReport(
        times=times,
        linf_diff=linf,
        l1_diff=l1,
        fitted_rate=rate,
        gamma_bound=gamma_bound,
        envelope_constant=C,
        passed=bool(rate >= gamma_bound - config.rate_tolerance),
        bound_envelope=envelope,
        reference_error=ref_err,
        l1_initial=l1_initial,
        Lambda=Lambda,
        GammaBar=config.gamma_bar,
        window=windows,
        contraction_ok=is_nonincreasing([l1_initial] + l1, scale=field_scale(u_traj, ref_traj)),
        max_principle_ok=max_principle_audit(u_traj) and max_principle_audit(ref_traj),
        exponents=exps.to_dict(),
    )
