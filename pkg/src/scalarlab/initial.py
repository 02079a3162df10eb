"""Initial data specifiers and their cell averages."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid import Grid
from .waves import RarefactionWave

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(4)


def smoothstep(s):
    """Quintic smoothstep on [0, 1], clamped outside."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def smoothstep_deriv(s):
    s = np.asarray(s, dtype=float)
    inside = (s > 0) & (s < 1)
    return np.where(inside, 30.0 * s * s * (1.0 - s) ** 2, 0.0)


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return x


@dataclass(frozen=True)
class Bump:
    """Compactly supported radial bump of diameter ``width`` and height ``amplitude``."""

    amplitude: float
    width: float
    center: tuple[float, ...]

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigurationError("bump width must be positive")
        c = (self.center,) if np.isscalar(self.center) else tuple(self.center)
        object.__setattr__(self, "center", tuple(float(v) for v in c))

    def __call__(self, x):
        x = _as_points(x, len(self.center))
        r = np.linalg.norm(x - np.asarray(self.center), axis=-1)
        half = 0.5 * self.width
        return self.amplitude * smoothstep((half - r) / half)

    def support(self) -> list[tuple[float, float]]:
        return [(c - 0.5 * self.width, c + 0.5 * self.width) for c in self.center]

    @property
    def mass_1d(self) -> float:
        # int smoothstep over [0,1] is 1/2
        return self.amplitude * 0.5 * self.width


class InitialData:
    kind = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def sup_norm(self, grid: Grid) -> float:
        return float(np.abs(cell_averages(grid, self)).max())

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Constant(InitialData):
    value: float
    dimension: int = 1
    kind = "constant"

    def __call__(self, x):
        x = _as_points(x, self.dimension)
        return np.full(x.shape[:-1], float(self.value))

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class Riemann(InitialData):
    uL: float
    uR: float
    axis: int = 0
    x0: float = 0.0
    dimension: int = 1
    kind = "riemann"

    def __call__(self, x):
        x = _as_points(x, self.dimension)
        return np.where(x[..., self.axis] < self.x0, self.uL, self.uR)

    def to_dict(self):
        return {"kind": self.kind, "uL": self.uL, "uR": self.uR, "axis": self.axis, "x0": self.x0}


@dataclass(frozen=True)
class RarefactionPlusBump(InitialData):
    """Rarefaction wave at its own time zero plus an optional bump.

    ``wave`` may be ``None`` together with ``base`` to put the bump on a
    constant state.
    """

    wave: RarefactionWave | None
    bump: Bump | None = None
    base: float | None = None
    dimension: int = 1
    kind = "rarefaction-plus-bump"

    def __post_init__(self):
        if (self.wave is None) == (self.base is None):
            raise ConfigurationError("give exactly one of wave or base state")
        if self.wave is not None:
            object.__setattr__(self, "dimension", self.wave.dimension)

    def reference(self, t, x):
        if self.wave is None:
            x = _as_points(x, self.dimension)
            return np.full(x.shape[:-1], float(self.base))
        return self.wave.evaluate(t, x)

    def __call__(self, x):
        out = self.reference(0.0, x)
        if self.bump is not None:
            out = out + self.bump(x)
        return out

    def unperturbed(self) -> "RarefactionPlusBump":
        return RarefactionPlusBump(self.wave, None, self.base, self.dimension)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.wave is not None:
            d["wave"] = self.wave.to_dict()
        else:
            d["base"] = self.base
        if self.bump is not None:
            d["bump"] = {"amplitude": self.bump.amplitude, "width": self.bump.width,
                         "center": list(self.bump.center)}
        return d


@dataclass(frozen=True)
class Table(InitialData):
    """Sampled data; linear interpolation, held constant beyond the table."""

    coords: tuple[np.ndarray, ...]
    values: np.ndarray = field(repr=False)
    kind = "table"

    def __post_init__(self):
        coords = tuple(np.asarray(c, dtype=float) for c in self.coords)
        values = np.asarray(self.values, dtype=float)
        if values.shape != tuple(len(c) for c in coords):
            raise ConfigurationError("table values do not match its coordinates")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "values", values)

    def __call__(self, x):
        x = _as_points(x, len(self.coords))
        if len(self.coords) == 1:
            return np.interp(x[..., 0], self.coords[0], self.values)
        from scipy.interpolate import RegularGridInterpolator

        clipped = np.stack([np.clip(x[..., j], c[0], c[-1]) for j, c in enumerate(self.coords)], axis=-1)
        return RegularGridInterpolator(self.coords, self.values)(clipped)

    def to_dict(self):
        return {"kind": self.kind, "coords": [c.tolist() for c in self.coords],
                "values": self.values.tolist()}


def cell_averages(grid: Grid, data) -> np.ndarray:
    """Tensor-product 4-point Gauss average of ``data`` over every cell."""
    d = grid.dimension
    h = np.asarray(grid.spacing)
    offsets = np.stack(np.meshgrid(*([GAUSS_NODES] * d), indexing="ij"), axis=-1).reshape(-1, d)
    weights = np.prod(np.stack(np.meshgrid(*([GAUSS_WEIGHTS] * d), indexing="ij"), axis=-1).reshape(-1, d), axis=1)
    weights = weights / 2.0 ** d
    pts = grid.points[..., None, :] + 0.5 * offsets * h
    vals = np.asarray(data(pts if d > 1 else pts[..., 0]), dtype=float)
    return vals @ weights
