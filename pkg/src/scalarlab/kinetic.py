"""Kinetic lifting, level-set energies and entropy-dissipation pairings.

All space-time integrals here are quadratures over a trajectory, i.e. a
list of :class:`~scalarlab.grid.SolutionField` snapshots of one run.  Cells
enter by their centres (midpoint rule in space), snapshots by trapezoid
weights in time.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, GeometryError
from .flux import FluxModel
from .grid import SolutionField
from .initial import smoothstep, smoothstep_deriv

Reference = Callable[[float, np.ndarray], np.ndarray]


def kinetic_function(u, v):
    """``chi(u, v)``: 1 on ``0 <= v <= u``, -1 on ``u <= v <= 0``, else 0 (and 0 when ``u = 0``)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    pos = (u > 0) & (v >= 0) & (v <= u)
    neg = (u < 0) & (v <= 0) & (v >= u)
    out = pos.astype(int) - neg.astype(int)
    return int(out) if out.ndim == 0 else out


def difference_function(u, u_tilde, v):
    """``h = chi(u, .) - chi(u_tilde, .)`` evaluated at ``v``."""
    return np.asarray(kinetic_function(u, v)) - np.asarray(kinetic_function(u_tilde, v))


def v_grid(Lambda: float, cells: int = 2048, pad: float = 0.05) -> tuple[np.ndarray, float]:
    """Midpoints and width of a uniform v-grid on ``[-Lambda - pad, Lambda + pad]``."""
    lo, hi = -Lambda - pad, Lambda + pad
    dv = (hi - lo) / cells
    return lo + (np.arange(cells) + 0.5) * dv, dv


def reconstruct_u(u, Lambda: float, cells: int = 2048, pad: float = 0.05):
    """Midpoint-rule ``int chi(u, v) dv``; recovers ``u`` to within one v-cell."""
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > Lambda):
        raise DomainError("|u| must not exceed Lambda")
    v, dv = v_grid(Lambda, cells, pad)
    out = kinetic_function(u[..., None], v).sum(axis=-1) * dv
    return float(out) if np.ndim(out) == 0 else out


def level_set_integral(u, u_tilde, ell, Lambda: float):
    """``(u - u_tilde - ell)_+``, the mass of ``h`` above ``u_tilde + ell``."""
    u = np.asarray(u, dtype=float)
    u_tilde = np.asarray(u_tilde, dtype=float)
    ell = np.asarray(ell, dtype=float)
    if np.any(u < 0) or np.any(u_tilde < 0) or np.any(u > Lambda) or np.any(u_tilde > Lambda):
        raise DomainError("states must lie in [0, Lambda]; shift by the minimum first")
    if np.any(ell < 0):
        raise DomainError("level must be nonnegative")
    out = np.maximum(u - u_tilde - ell, 0.0)
    return float(out) if out.ndim == 0 else out


def roundtrip_check(samples: int = 1000, Lambda: float = 1.0, cells: int = 2048, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    u = rng.uniform(-Lambda, Lambda, samples)
    err = np.abs(reconstruct_u(u, Lambda, cells) - u)
    _, dv = v_grid(Lambda, cells)
    return {"samples": samples, "Lambda": Lambda, "v_cells": cells, "v_cell_width": dv,
            "max_error": float(err.max()), "pass": bool(err.max() <= dv)}


# ---------------------------------------------------------------------------
# trajectory helpers

def time_weights(times: Sequence[float]) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.size < 2:
        raise GeometryError("need at least two snapshots for a time integral")
    w = np.zeros_like(t)
    w[1:] += 0.5 * np.diff(t)
    w[:-1] += 0.5 * np.diff(t)
    return w


def _points(snap: SolutionField) -> np.ndarray:
    return snap.grid.points


def reference_values(u_tilde, snap: SolutionField, index: int | None = None) -> np.ndarray:
    """Reference at a snapshot: a callable ``(t, points)`` or a matching trajectory."""
    if callable(u_tilde):
        pts = _points(snap)
        arg = pts[..., 0] if snap.grid.dimension == 1 else pts
        return np.asarray(u_tilde(snap.time, arg), dtype=float)
    ref = u_tilde[index]
    if ref.grid != snap.grid or abs(ref.time - snap.time) > 1e-9 * max(1.0, snap.time):
        raise GeometryError("reference trajectory does not match the solution trajectory")
    return ref.values


def _check_ball(trajectory: Sequence[SolutionField], center, radius: float) -> None:
    grid = trajectory[0].grid
    tc, xc = center[0], center[1:]
    if len(xc) != grid.dimension:
        raise GeometryError("centre must be a space-time point (t, x...)")
    if tc - radius < trajectory[0].time - 1e-12 or tc + radius > trajectory[-1].time + 1e-12:
        raise GeometryError(f"ball of radius {radius} about t={tc} leaves the time range "
                            f"[{trajectory[0].time}, {trajectory[-1].time}]")
    for j, c in enumerate(xc):
        if c - radius < grid.lo[j] or c + radius > grid.hi[j]:
            raise GeometryError(f"ball of radius {radius} leaves the domain along axis {j}")


def _bounding_slices(grid, center, radius: float) -> tuple[slice, ...]:
    out = []
    for j in range(grid.dimension):
        x = grid.centers(j)
        idx = np.nonzero(np.abs(x - center[1 + j]) <= radius)[0]
        out.append(slice(int(idx[0]), int(idx[-1]) + 1) if idx.size else slice(0, 0))
    return tuple(out)


def _distance_sq(snap: SolutionField, center) -> np.ndarray:
    diff = _points(snap) - np.asarray(center[1:], dtype=float)
    return (snap.time - center[0]) ** 2 + np.sum(diff * diff, axis=-1)


# ---------------------------------------------------------------------------
# De Giorgi energies

@dataclass
class KineticLevelData:
    K: float
    radii: list[float]
    levels: list[float]
    energies: list[float]
    center: tuple[float, ...]
    scale: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["center"] = list(self.center)
        return d


def degiorgi_radii(k_max: int) -> np.ndarray:
    return 1.0 + 2.0 ** -np.arange(k_max + 1, dtype=float)


def degiorgi_levels(K: float, k_max: int) -> np.ndarray:
    return K * (1.0 - 2.0 ** -np.arange(k_max + 1, dtype=float))


def degiorgi_sequence(trajectory: Sequence[SolutionField], u_tilde, center, scale: float,
                      K: float, k_max: int) -> KineticLevelData:
    """``A_k = int_{B_{r_k}} (u - u_tilde - l_k)_+`` over space-time balls of radius ``r_k * scale``.

    The truncation is invariant under a common shift of ``u`` and
    ``u_tilde``, so no explicit shift to nonnegative values is needed.
    """
    if K <= 0 or scale <= 0 or k_max < 0:
        raise DomainError("K and scale must be positive and k_max nonnegative")
    center = tuple(float(c) for c in center)
    _check_ball(trajectory, center, 2.0 * scale)
    weights = time_weights([s.time for s in trajectory])
    vol = trajectory[0].grid.cell_volume
    lo, hi = center[0] - 2.0 * scale, center[0] + 2.0 * scale
    keep = [i for i, s in enumerate(trajectory) if lo - 1e-12 <= s.time <= hi + 1e-12]

    diff = np.stack([trajectory[i].values - reference_values(u_tilde, trajectory[i], i) for i in keep])
    dist = np.stack([_distance_sq(trajectory[i], center) for i in keep])
    w = np.broadcast_to(weights[keep].reshape((-1,) + (1,) * (diff.ndim - 1)) * vol, diff.shape)

    radii = degiorgi_radii(k_max)
    levels = degiorgi_levels(K, k_max)
    energies = []
    for r, ell in zip(radii, levels):
        inside = dist <= (r * scale) ** 2
        energies.append(float(np.where(inside, np.maximum(diff - ell, 0.0) * w, 0.0).sum()))
    return KineticLevelData(K, radii.tolist(), levels.tolist(), energies, center, scale)


# ---------------------------------------------------------------------------
# entropy dissipation

@dataclass(frozen=True)
class BumpTest:
    """Tensor-product test function built from quintic smoothsteps.

    Along each space-time axis the profile is ``S((hw - |s - c|) / ramp)``:
    zero outside ``[c - hw, c + hw]`` and one on the plateau
    ``|s - c| <= hw - ramp``.  ``ramp`` defaults to the half width (no
    plateau).
    """

    center: tuple[float, ...]
    half_widths: tuple[float, ...]
    ramps: tuple[float, ...] | None = None

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        hw = tuple(float(v) for v in self.half_widths)
        ramps = hw if self.ramps is None else tuple(float(v) for v in self.ramps)
        if not (len(c) == len(hw) == len(ramps)):
            raise DomainError("centre, half widths and ramps must have equal length")
        if any(h <= 0 for h in hw) or any(not (0 < r <= h) for r, h in zip(ramps, hw)):
            raise DomainError("need 0 < ramp <= half width")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_widths", hw)
        object.__setattr__(self, "ramps", ramps)

    def profile(self, axis: int, s):
        c, hw, ramp = self.center[axis], self.half_widths[axis], self.ramps[axis]
        return smoothstep((hw - np.abs(np.asarray(s) - c)) / ramp)

    def profile_deriv(self, axis: int, s):
        c, hw, ramp = self.center[axis], self.half_widths[axis], self.ramps[axis]
        s = np.asarray(s, dtype=float)
        return smoothstep_deriv((hw - np.abs(s - c)) / ramp) * (-np.sign(s - c)) / ramp

    def support(self, axis: int) -> tuple[float, float]:
        return self.center[axis] - self.half_widths[axis], self.center[axis] + self.half_widths[axis]

    def time_integral(self, x=None) -> float:
        """``int phi(t, x) dt`` at a spatial point (the plateau value if omitted)."""
        spatial = 1.0
        if x is not None:
            for j, xj in enumerate(np.atleast_1d(x)):
                spatial *= float(self.profile(j + 1, xj))
        hw, ramp = self.half_widths[0], self.ramps[0]
        # int S over one ramp is ramp/2; the plateau contributes its length
        return spatial * (2.0 * (hw - ramp) + ramp)

    def to_dict(self) -> dict:
        return {"center": list(self.center), "half_widths": list(self.half_widths),
                "ramps": list(self.ramps)}


@dataclass
class DissipationReport:
    k: float
    test: dict
    residual: float
    resolution: list[int]
    snapshots: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _check_bump(trajectory: Sequence[SolutionField], test: BumpTest) -> None:
    grid = trajectory[0].grid
    if len(test.center) != grid.dimension + 1:
        raise GeometryError("test function must live in space-time (t, x...)")
    t0, t1 = test.support(0)
    if t0 < trajectory[0].time - 1e-12 or t1 > trajectory[-1].time + 1e-12:
        raise GeometryError("test function support leaves the trajectory time range")
    for j in range(grid.dimension):
        a, b = test.support(j + 1)
        if a < grid.lo[j] or b > grid.hi[j]:
            raise GeometryError(f"test function support leaves the domain along axis {j}")


def entropy_flux(flux: FluxModel, u, k: float, j: int):
    comp = flux.component(j)
    return np.sign(u - k) * (comp.flux(u) - comp.flux(k))


def entropy_dissipation_residual(trajectory: Sequence[SolutionField], flux: FluxModel,
                                 k: float, test: BumpTest) -> DissipationReport:
    """``int int |u-k| phi_t + sgn(u-k)(A(u)-A(k)) . grad phi``.

    This is minus the distributional pairing of the Kruzhkov entropy
    inequality, so it is nonnegative for entropy solutions.
    """
    _check_bump(trajectory, test)
    grid = trajectory[0].grid
    weights = time_weights([s.time for s in trajectory])
    axes = [grid.centers(j) for j in range(grid.dimension)]
    spatial = [test.profile(j + 1, axes[j]) for j in range(grid.dimension)]
    spatial_d = [test.profile_deriv(j + 1, axes[j]) for j in range(grid.dimension)]

    def outer(factors):
        out = factors[0]
        for f in factors[1:]:
            out = np.multiply.outer(out, f)
        return out

    phi_x = outer(spatial)
    grads = [outer([spatial_d[j] if i == j else spatial[i] for i in range(grid.dimension)])
             for j in range(grid.dimension)]
    total = 0.0
    for w, snap in zip(weights, trajectory):
        pt = float(test.profile(0, snap.time))
        dpt = float(test.profile_deriv(0, snap.time))
        if pt == 0.0 and dpt == 0.0:
            continue
        u = snap.values
        integrand = np.abs(u - k) * dpt * phi_x
        for j in range(grid.dimension):
            integrand = integrand + entropy_flux(flux, u, k, j) * pt * grads[j]
        total += w * float(integrand.sum())
    return DissipationReport(float(k), test.to_dict(), total * grid.cell_volume,
                             list(grid.cells), len(trajectory))


# ---------------------------------------------------------------------------
# localized variation of the dissipation measure

@dataclass
class VariationBound:
    lhs: float
    rhs: float
    ratio: float
    lipschitz_w: float
    h_mass: float


def _fd_gradient(fn: Reference, t, pts, dim: int, eps: float):
    """Central differences of ``fn`` in ``(t, x)``; ``pts`` has a trailing space axis."""
    arg = (lambda p: p[..., 0]) if dim == 1 else (lambda p: p)
    t_lo = t - eps if t - eps >= 0 else t  # references are undefined before t = 0
    grads = [(fn(t + eps, arg(pts)) - fn(t_lo, arg(pts))) / (t + eps - t_lo)]
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = eps
        grads.append((fn(t, arg(pts + e)) - fn(t, arg(pts - e))) / (2 * eps))
    return [np.asarray(g, dtype=float) for g in grads]


def variation_bound(trajectory: Sequence[SolutionField], u_tilde: Reference, flux: FluxModel,
                    w: Reference, center, scale: float, r: float, R: float,
                    v_cells: int = 256, smoothing_cells: int = 4) -> VariationBound:
    """Compare the dissipation mass above ``w`` on ``B_r`` with its variation bound on ``B_R``.

    The dissipation measure ``mu`` of the kinetic equation is half the
    Kruzhkov entropy dissipation at level ``v``.  Its mass over
    ``{x in B_r, v > w(x)}`` is estimated by pairing with
    ``phi(x) zeta(v - w(x))``, where ``phi`` is a radial smoothstep equal to
    one on ``B_r`` and zero off ``B_R`` and ``zeta`` a smoothstep of width
    ``smoothing_cells`` v-cells.  The bound is
    ``|abar|_inf (Lip(w) + 1/(R - r)) int_{B_R} int_w^inf |h|`` with unit
    constant, everything measured in physical (t, x) units.
    """
    if not (0 < r < R <= 2):
        raise DomainError("need 0 < r < R <= 2")
    center = tuple(float(c) for c in center)
    _check_ball(trajectory, center, R * scale)
    grid = trajectory[0].grid
    dim = grid.dimension
    weights = time_weights([s.time for s in trajectory])
    vol = grid.cell_volume
    keep = [i for i, s in enumerate(trajectory) if abs(s.time - center[0]) <= R * scale + 1e-12]

    box = _bounding_slices(grid, center, R * scale)
    pts = grid.points[box]
    u = np.stack([trajectory[i].values[box] for i in keep])
    ut = np.stack([reference_values(u_tilde, trajectory[i], i)[box] for i in keep])
    times = np.array([trajectory[i].time for i in keep])
    dist = np.sqrt(np.stack([_distance_sq(trajectory[i], center)[box] for i in keep]))
    rho = dist / scale
    in_R = rho <= R
    if np.any(u[in_R] < 0) or np.any(ut[in_R] < 0):
        raise DomainError("u and u_tilde must be nonnegative on the ball")

    eps = 1e-6 * scale
    wv = np.stack([np.asarray(w(t, pts[..., 0] if dim == 1 else pts), dtype=float) for t in times])
    wgrad = [np.stack(g) for g in zip(*[_fd_gradient(w, t, pts, dim, eps) for t in times])]
    lip_w = float(np.sqrt(sum(g * g for g in wgrad))[in_R].max(initial=0.0))

    # phi = S((R - rho)/(R - r)); grad phi = -S' / ((R - r) scale) * (xbar - c)/|xbar - c|
    phi = smoothstep((R - rho) / (R - r))
    dphi_drho = -smoothstep_deriv((R - rho) / (R - r)) / (R - r)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit_t = np.where(dist > 0, (times.reshape((-1,) + (1,) * dim) - center[0]) / dist, 0.0)
        unit_x = [np.where(dist > 0, (pts[..., j] - center[1 + j]) / dist, 0.0) for j in range(dim)]
    phi_grad = [dphi_drho / scale * unit_t] + [dphi_drho / scale * ux for ux in unit_x]

    Lambda = float(max(u[in_R].max(initial=0.0), ut[in_R].max(initial=0.0), 1e-12))
    dv = Lambda / v_cells
    vs = (np.arange(v_cells) + 0.5) * dv
    width = smoothing_cells * dv
    tw = (weights[keep] * vol).reshape((-1,) + (1,) * dim)

    lhs = 0.0
    for v in vs:
        s = (v - wv) / width
        zeta = smoothstep(s)
        dzeta = smoothstep_deriv(s) / width
        # d/dxbar [phi zeta(v - w)] = grad phi * zeta - phi * zeta' * grad w
        dpsi = [phi_grad[a] * zeta - phi * dzeta * wgrad[a] for a in range(dim + 1)]
        integrand = np.abs(u - v) * dpsi[0]
        for j in range(dim):
            integrand = integrand + entropy_flux(flux, u, v, j) * dpsi[j + 1]
        lhs += 0.5 * dv * float((integrand * tw).sum())

    hi_state = np.maximum(u, ut)
    lo_state = np.minimum(u, ut)
    above = np.clip(hi_state - np.maximum(wv, lo_state), 0.0, None)
    h_mass = float(np.where(in_R, above * tw, 0.0).sum())
    speeds = flux.velocity(np.linspace(0.0, Lambda, 257))
    abar = float(np.sqrt(1.0 + np.max(np.sum(speeds ** 2, axis=-1))))
    rhs = abar * (lip_w + 1.0 / ((R - r) * scale)) * h_mass
    if rhs > 0:
        ratio = lhs / rhs
    else:
        # with no mass above w any positive lhs below this floor is round-off
        floor = 1e-12 * Lambda * float(np.where(in_R, tw, 0.0).sum())
        ratio = 0.0 if lhs <= floor else float("inf")
    return VariationBound(lhs, rhs, ratio, lip_w, h_mass)


def variation_bound_ratio(*args, **kwargs) -> float:
    return variation_bound(*args, **kwargs).ratio
