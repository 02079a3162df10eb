"""Planar rarefaction waves and the Oleinik slope diagnostic."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .flux import FluxModel, ScalarFlux
from .grid import SolutionField


@dataclass(frozen=True)
class RarefactionWave:
    """Centred fan ``u(t, x) = a_e^{-1}((x_e - x0)/(t + t0))`` clamped to ``[uL, uR]``.

    The flux component along the wave direction must be strictly convex on
    ``[uL, uR]`` so the inverse speed is single valued.
    """

    flux: ScalarFlux
    uL: float
    uR: float
    t0: float = 1.0
    x0: float = 0.0
    axis: int = 0
    dimension: int = 1

    def __post_init__(self):
        if not self.uL < self.uR:
            raise ConfigurationError("a rarefaction needs uL < uR")
        if self.t0 <= 0:
            raise ConfigurationError("t0 must be positive")
        if not (0 <= self.axis < self.dimension):
            raise ConfigurationError(f"axis {self.axis} out of range for dimension {self.dimension}")
        if not self.uL >= self.flux.lo - 1e-12 or not self.uR <= self.flux.hi + 1e-12:
            raise ConfigurationError("wave states must lie in the flux interval")
        if self.flux.min_curvature(self.uL, self.uR) <= 0:
            raise ConfigurationError("flux component is not strictly convex on [uL, uR]")

    @classmethod
    def from_model(cls, model: FluxModel, uL: float, uR: float, t0: float = 1.0,
                   x0: float = 0.0, axis: int = 0) -> "RarefactionWave":
        return cls(model.component(axis), uL, uR, t0, x0, axis, model.dimension)

    @property
    def min_curvature(self) -> float:
        return self.flux.min_curvature(self.uL, self.uR)

    def inverse_velocity(self, xi):
        """Solve ``a_e(u) = xi`` on ``[uL, uR]`` (closed form for quadratic flux)."""
        xi = np.asarray(xi, dtype=float)
        vel = self.flux.velocity_poly
        if vel.degree() == 1:
            c0, c1 = vel.coef
            return np.clip((xi - c0) / c1, self.uL, self.uR)
        lo = np.full_like(xi, self.uL)
        hi = np.full_like(xi, self.uR)
        while np.max(hi - lo, initial=0.0) > 1e-12:
            mid = 0.5 * (lo + hi)
            below = vel(mid) < xi
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def _coordinate(self, x):
        x = np.asarray(x, dtype=float)
        if self.dimension == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            return x
        return x[..., self.axis]

    def evaluate(self, t, x):
        """Wave value at time ``t`` and point(s) ``x`` (trailing axis = space for d > 1)."""
        if np.any(np.asarray(t) < 0):
            raise DomainError("t must be nonnegative")
        xi = (self._coordinate(x) - self.x0) / (np.asarray(t, dtype=float) + self.t0)
        aL = float(self.flux.velocity(self.uL))
        aR = float(self.flux.velocity(self.uR))
        fan = self.inverse_velocity(np.clip(xi, aL, aR))
        return np.where(xi < aL, self.uL, np.where(xi > aR, self.uR, fan))

    __call__ = evaluate

    def gradient(self, t, x):
        """``d u / d x_e`` (zero transversally); exact in the open fan."""
        xi = (self._coordinate(x) - self.x0) / (np.asarray(t, dtype=float) + self.t0)
        aL = float(self.flux.velocity(self.uL))
        aR = float(self.flux.velocity(self.uR))
        inside = (xi > aL) & (xi < aR)
        u = self.evaluate(t, x)
        with np.errstate(divide="ignore"):
            g = 1.0 / ((np.asarray(t, dtype=float) + self.t0) * self.flux.curvature(u))
        return np.where(inside, g, 0.0)

    def lipschitz_envelope(self, t: float) -> float:
        """``sup_x |grad u(t, x)| = 1 / ((t + t0) inf A_e'')``."""
        if t < 0:
            raise DomainError("t must be nonnegative")
        return 1.0 / ((t + self.t0) * self.min_curvature)

    @property
    def gamma_bar(self) -> float:
        """``sup_t t * lipschitz_envelope(t)``, approached as ``t -> infinity``."""
        return 1.0 / self.min_curvature

    @property
    def sup_norm(self) -> float:
        return max(abs(self.uL), abs(self.uR))

    def to_dict(self) -> dict:
        return {"axis": self.axis, "uL": self.uL, "uR": self.uR, "t0": self.t0, "x0": self.x0}


def oleinik_ratio(trajectory: Sequence[SolutionField], flux: FluxModel, t_min: float = 0.0) -> float:
    """``sup t * inf A'' * (u_{i+1} - u_i)_+ / dx`` over snapshots with ``t > 0, t >= t_min``."""
    if flux.dimension != 1:
        raise ConfigurationError("the Oleinik diagnostic is one dimensional")
    kappa = flux.component(0).min_curvature()
    if kappa <= 0:
        raise ConfigurationError("the Oleinik diagnostic needs a strictly convex flux")
    worst = 0.0
    for snap in trajectory:
        if snap.grid.dimension != 1:
            raise ConfigurationError("the Oleinik diagnostic is one dimensional")
        if snap.time <= 0 or snap.time < t_min:
            continue
        rise = np.diff(snap.values).clip(min=0.0).max(initial=0.0)
        worst = max(worst, snap.time * kappa * rise / snap.grid.spacing[0])
    return float(worst)
