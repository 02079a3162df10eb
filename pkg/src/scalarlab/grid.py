"""Uniform Cartesian grids and cell-averaged solution fields."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

BOUNDARY_POLICIES = ("periodic", "outflow")


@dataclass(frozen=True)
class Grid:
    cells: tuple[int, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    boundary: tuple[str, ...]

    def __post_init__(self):
        d = len(self.cells)
        if d not in (1, 2):
            raise ConfigurationError(f"only 1 and 2 space dimensions are supported, got {d}")
        if not (len(self.lo) == len(self.hi) == len(self.boundary) == d):
            raise ConfigurationError("grid fields disagree on the dimension")
        for n, a, b, bc in zip(self.cells, self.lo, self.hi, self.boundary):
            if int(n) != n or n < 4:
                raise ConfigurationError(f"need at least 4 integer cells per axis, got {n}")
            if not b > a:
                raise ConfigurationError(f"empty axis [{a}, {b}]")
            if bc not in BOUNDARY_POLICIES:
                raise ConfigurationError(f"unknown boundary policy {bc!r}")
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        object.__setattr__(self, "lo", tuple(float(a) for a in self.lo))
        object.__setattr__(self, "hi", tuple(float(b) for b in self.hi))
        object.__setattr__(self, "boundary", tuple(self.boundary))

    @classmethod
    def uniform(cls, cells: int | Sequence[int], lo, hi, boundary="outflow") -> "Grid":
        cells = (cells,) if np.isscalar(cells) else tuple(cells)
        d = len(cells)
        lo = (lo,) * d if np.isscalar(lo) else tuple(lo)
        hi = (hi,) * d if np.isscalar(hi) else tuple(hi)
        boundary = (boundary,) * d if isinstance(boundary, str) else tuple(boundary)
        return cls(cells, lo, hi, boundary)

    @property
    def dimension(self) -> int:
        return len(self.cells)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((b - a) / n for a, b, n in zip(self.lo, self.hi, self.cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    def centers(self, axis: int = 0) -> np.ndarray:
        h = self.spacing[axis]
        return self.lo[axis] + (np.arange(self.cells[axis]) + 0.5) * h

    @cached_property
    def points(self) -> np.ndarray:
        """Cell centres as an array of shape ``cells + (d,)``."""
        axes = np.meshgrid(*[self.centers(j) for j in range(self.dimension)], indexing="ij")
        return np.stack(axes, axis=-1)

    def same_as(self, other: "Grid") -> bool:
        return self == other

    def to_dict(self) -> dict:
        return {"cells": list(self.cells), "lo": list(self.lo), "hi": list(self.hi),
                "boundary": list(self.boundary)}


@dataclass
class SolutionField:
    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ConfigurationError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("solution contains non-finite values")
        if self.time < 0:
            raise ConfigurationError("time must be nonnegative")

    def mass(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)

    def l1_distance(self, other: "SolutionField") -> float:
        return float(np.abs(self.values - other.values).sum() * self.grid.cell_volume)
