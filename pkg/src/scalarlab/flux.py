"""Polynomial flux models and brute-force genuine-nonlinearity measurement.

A flux ``A: R -> R^n`` is stored as one :class:`numpy.polynomial.Polynomial`
per component.  Polynomials give exact derivatives, exact extrema of the
characteristic speed on an interval and an exact primitive of ``|a_j|``,
which the finite-volume solver uses for the Engquist-Osher flux.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigurationError, DomainError, FitError


def _real_roots_in(poly: Polynomial, lo: float, hi: float) -> np.ndarray:
    scale = np.abs(poly.coef).max(initial=0.0)
    # drop negligible leading terms; they send companion-matrix roots to garbage
    poly = poly.trim(tol=1e-14 * scale) if scale > 0 else poly
    if poly.degree() < 1:
        return np.empty(0)
    roots = poly.roots()
    real = roots[np.abs(roots.imag) <= 1e-10].real
    return np.unique(real[(real > lo) & (real < hi)])


@dataclass(frozen=True)
class ScalarFlux:
    """One component ``A_j`` of a flux restricted to the interval ``[lo, hi]``."""

    poly: Polynomial
    lo: float
    hi: float

    @cached_property
    def velocity_poly(self) -> Polynomial:
        return self.poly.deriv()

    @cached_property
    def curvature_poly(self) -> Polynomial:
        return self.poly.deriv(2)

    def flux(self, u):
        return self.poly(np.asarray(u, dtype=float))

    def velocity(self, u):
        return self.velocity_poly(np.asarray(u, dtype=float))

    def curvature(self, u):
        return self.curvature_poly(np.asarray(u, dtype=float))

    @cached_property
    def _sign_breaks(self) -> np.ndarray:
        # Points splitting [lo, hi] into pieces where a_j keeps one sign.
        roots = _real_roots_in(self.velocity_poly, self.lo, self.hi)
        return np.concatenate([[self.lo], roots, [self.hi]])

    @cached_property
    def _piece_signs(self) -> np.ndarray:
        b = self._sign_breaks
        mids = 0.5 * (b[:-1] + b[1:])
        return np.sign(self.velocity(mids))

    def abs_velocity_primitive(self, u):
        """Exact ``G(u) = int_lo^u |a_j(s)| ds`` (vectorized)."""
        u = np.asarray(u, dtype=float)
        b = self._sign_breaks
        out = np.zeros_like(u)
        for s0, s1, sgn in zip(b[:-1], b[1:], self._piece_signs):
            if sgn == 0:
                continue
            out += sgn * (self.poly(np.clip(u, s0, s1)) - self.poly(s0))
        return out

    @cached_property
    def _speed_critical_points(self) -> np.ndarray:
        return _real_roots_in(self.curvature_poly, self.lo, self.hi)

    def max_abs_velocity_between(self, u1, u2):
        """Exact ``max |a_j|`` over the closed interval between ``u1`` and ``u2``."""
        u1 = np.asarray(u1, dtype=float)
        u2 = np.asarray(u2, dtype=float)
        a = np.minimum(u1, u2)
        b = np.maximum(u1, u2)
        out = np.maximum(np.abs(self.velocity(a)), np.abs(self.velocity(b)))
        for c in self._speed_critical_points:
            out = np.maximum(out, np.abs(self.velocity(np.clip(c, a, b))))
        return out

    def extreme_velocity(self) -> tuple[float, float]:
        """``(min a_j, max a_j)`` over the whole interval."""
        pts = np.concatenate([[self.lo, self.hi], self._speed_critical_points])
        vals = self.velocity(pts)
        return float(vals.min()), float(vals.max())

    def min_curvature(self, lo: float | None = None, hi: float | None = None) -> float:
        """``inf A_j''`` over ``[lo, hi]`` (defaults to the full interval)."""
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        crit = _real_roots_in(self.curvature_poly.deriv(), lo, hi)
        pts = np.concatenate([[lo, hi], crit])
        return float(self.curvature(pts).min())


@dataclass(frozen=True)
class FluxModel:
    """A flux ``A: I -> R^n`` with polynomial components."""

    components: tuple[Polynomial, ...]
    interval: tuple[float, float]
    name: str = "custom-poly"

    def __post_init__(self):
        lo, hi = self.interval
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ConfigurationError(f"bad value interval {self.interval}")
        if not self.components:
            raise ConfigurationError("flux needs at least one component")
        object.__setattr__(self, "interval", (float(lo), float(hi)))
        object.__setattr__(self, "components", tuple(
            p if isinstance(p, Polynomial) else Polynomial(np.asarray(p, dtype=float))
            for p in self.components))

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]

    def component(self, j: int) -> ScalarFlux:
        return self._scalars[j]

    @cached_property
    def _scalars(self) -> tuple[ScalarFlux, ...]:
        lo, hi = self.interval
        return tuple(ScalarFlux(p, lo, hi) for p in self.components)

    def contains(self, v, slack: float = 1e-12) -> bool:
        v = np.asarray(v, dtype=float)
        lo, hi = self.interval
        tol = slack * max(1.0, abs(lo), abs(hi))
        return bool(np.all((v >= lo - tol) & (v <= hi + tol)))

    def flux(self, v) -> np.ndarray:
        """``A(v)`` with a trailing axis of length n."""
        v = np.asarray(v, dtype=float)
        return np.stack([p(v) for p in self.components], axis=-1)

    def velocity(self, v) -> np.ndarray:
        """``a(v) = A'(v)`` with a trailing axis of length n."""
        v = np.asarray(v, dtype=float)
        return np.stack([s.velocity(v) for s in self._scalars], axis=-1)

    @cached_property
    def lipschitz_bound(self) -> float:
        """``C_1 = sup_I max_j |a_j|``, exact for polynomials."""
        bounds = [max(abs(lo), abs(hi)) for lo, hi in (s.extreme_velocity() for s in self._scalars)]
        return float(max(bounds))

    def velocity_range(self, j: int) -> tuple[float, float]:
        return self._scalars[j].extreme_velocity()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "interval": list(self.interval),
            "coefficients": [p.coef.tolist() for p in self.components],
            "lipschitz_bound": self.lipschitz_bound,
        }


def burgers(n: int = 1, interval: tuple[float, float] = (-1.0, 1.0)) -> FluxModel:
    """Multi-d Burgers flux ``(u^2/2, u^3/3, ..., u^{n+1}/(n+1))``."""
    return convex_power(2, n, interval, name="burgers")


def convex_power(p: int, n: int = 1, interval=(-1.0, 1.0), name: str = "convex-power") -> FluxModel:
    """Components ``u^{p+j}/(p+j)`` for ``j = 0..n-1``; ``p = 2`` is Burgers."""
    if n < 1:
        raise ConfigurationError("dimension must be positive")
    if p < 2:
        raise ConfigurationError("power must be at least 2")
    comps = []
    for j in range(n):
        deg = p + j
        coef = np.zeros(deg + 1)
        coef[deg] = 1.0 / deg
        comps.append(Polynomial(coef))
    return FluxModel(tuple(comps), tuple(interval), name=name)


def custom_poly(coefficients: Sequence[Sequence[float]], interval=(-1.0, 1.0)) -> FluxModel:
    """Flux from ascending coefficient lists, one per component."""
    return FluxModel(tuple(Polynomial(c) for c in coefficients), tuple(interval))


def linear(n: int = 1, speed: float = 1.0, interval=(-1.0, 1.0)) -> FluxModel:
    """``A_j(u) = speed * u``, the canonical degenerate flux."""
    return FluxModel(tuple(Polynomial([0.0, speed]) for _ in range(n)), tuple(interval), name="linear")


def eval_velocity(model: FluxModel, v: float) -> np.ndarray:
    if not np.isfinite(v) or not model.contains(v, slack=0.0):
        raise DomainError(f"v={v} outside value interval {model.interval}")
    return model.velocity(float(v))


# ---------------------------------------------------------------------------
# nondegeneracy

@dataclass
class NondegeneracyProfile:
    delta_grid: list[float]
    worst_measure: list[float]
    alpha_est: float
    C0_est: float
    sphere_sample_count: int
    v_sample_count: int
    genuinely_nonlinear: bool = True
    flag: str = ""
    fit_mask: list[bool] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "delta_grid": list(self.delta_grid),
            "worst_measure": list(self.worst_measure),
            "alpha_est": self.alpha_est,
            "C0_est": self.C0_est,
            "sphere_sample_count": self.sphere_sample_count,
            "v_sample_count": self.v_sample_count,
            "genuinely_nonlinear": self.genuinely_nonlinear,
            "flag": self.flag,
            "fit_mask": list(self.fit_mask),
        }


def sphere_points(count: int, dim: int) -> np.ndarray:
    """Deterministic quasi-uniform points on the unit sphere in ``R^dim``.

    Uniform angles on the circle, the Fibonacci lattice on ``S^2``.  Higher
    spheres use a Halton sequence pushed through the Gaussian quantile and
    normalized.
    """
    i = np.arange(count) + 0.5
    if dim == 2:
        phi = 2.0 * np.pi * i / count
        return np.stack([np.cos(phi), np.sin(phi)], axis=1)
    if dim == 3:
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = np.pi * (1.0 + np.sqrt(5.0)) * i
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    from scipy.special import ndtri
    from scipy.stats import qmc

    u = qmc.Halton(d=dim, scramble=False).random(count + 1)[1:]
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def geometric_deltas(first_exp: int = 3, last_exp: int = 10) -> list[float]:
    return [2.0 ** -k for k in range(first_exp, last_exp + 1)]


def _sublevel_measures(points, speeds, weights, deltas):
    vals = np.abs(points[:, :1] + points[:, 1:] @ speeds.T)
    return np.stack([(vals < d) @ weights for d in deltas], axis=1)


def nondegeneracy_profile(
    model: FluxModel,
    delta_grid: Sequence[float],
    sphere_samples: int = 2000,
    v_samples: int = 20000,
    chunk: int = 100,
    workers: int = 1,
) -> NondegeneracyProfile:
    """Sup over the sphere of ``|{v in I : |t + a(v).xi| < delta}|`` for each delta.

    The exponent and constant come from ordinary least squares on
    ``log worst_measure`` against ``log delta``, leaving out zero and
    saturated (``> 0.9 |I|``) measurements.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.ndim != 1 or deltas.size == 0 or np.any(deltas <= 0):
        raise DomainError("delta_grid must be a nonempty list of positive values")
    if sphere_samples < 100:
        raise DomainError("need at least 100 sphere samples")
    if v_samples < 1000:
        raise DomainError("need at least 1000 v samples")
    order = np.argsort(-deltas)
    deltas = deltas[order]

    lo, hi = model.interval
    v = np.linspace(lo, hi, v_samples)
    weights = np.full(v_samples, (hi - lo) / (v_samples - 1))
    weights[0] *= 0.5
    weights[-1] *= 0.5
    speeds = model.velocity(v)
    pts = sphere_points(sphere_samples, model.dimension + 1)

    blocks = [pts[s:s + chunk] for s in range(0, sphere_samples, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _sublevel_measures(b, speeds, weights, deltas).max(axis=0), blocks))
    else:
        parts = [_sublevel_measures(b, speeds, weights, deltas).max(axis=0) for b in blocks]
    worst = np.max(np.stack(parts), axis=0)

    width = hi - lo
    if not np.any(worst > 0):
        raise FitError("degenerate grid: worst measure vanishes for every delta")
    saturated = worst > 0.9 * width
    mask = (worst > 0) & ~saturated

    base = dict(
        delta_grid=deltas.tolist(),
        worst_measure=worst.tolist(),
        sphere_sample_count=int(sphere_samples),
        v_sample_count=int(v_samples),
        fit_mask=mask.tolist(),
    )
    if mask.sum() < 2:
        if saturated.any():
            return NondegeneracyProfile(alpha_est=0.0, C0_est=float(worst.max()),
                                        genuinely_nonlinear=False,
                                        flag="flux not genuinely nonlinear", **base)
        raise FitError("degenerate fit: fewer than two usable delta values")
    slope, intercept = np.polyfit(np.log(deltas[mask]), np.log(worst[mask]), 1)
    if slope < 0.05:
        return NondegeneracyProfile(alpha_est=0.0, C0_est=float(worst.max()),
                                    genuinely_nonlinear=False,
                                    flag="flux not genuinely nonlinear", **base)
    return NondegeneracyProfile(alpha_est=float(slope), C0_est=float(np.exp(intercept)), **base)
