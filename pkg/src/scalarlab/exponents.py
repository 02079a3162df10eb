"""Exponent bundle of the De Giorgi iteration and the decay envelope."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ExponentSet:
    alpha: float
    n: int
    theta: float
    delta: float
    beta: float
    gamma: float
    eta: float
    gamma0: float
    valid: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _check_alpha(alpha: float) -> None:
    if not math.isfinite(alpha) or alpha <= 0 or alpha > 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")


def compute_theta(alpha: float) -> float:
    _check_alpha(alpha)
    return alpha / (alpha + 4.0)


def gamma0(n: int) -> float:
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return 1.0 / (1.0 + n * (n + 1) / 2.0)


def compute_exponents(alpha: float, n: int, delta: float) -> ExponentSet:
    """All exponents for a given ``delta``; ``valid`` says whether ``0 < delta < theta/(n+1)``."""
    if not (math.isfinite(alpha) and math.isfinite(delta)):
        raise DomainError("non-finite exponent input")
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    theta = compute_theta(alpha)
    g0 = gamma0(n)
    beta = (1.0 - theta) / 2.0 + delta
    return ExponentSet(
        alpha=alpha,
        n=n,
        theta=theta,
        delta=delta,
        beta=beta,
        gamma=delta / (beta + theta),
        eta=theta / (beta + theta),
        gamma0=g0,
        valid=delta < theta / (n + 1),
    )


def optimize_gamma(alpha: float, n: int, margin: float = 0.01) -> ExponentSet:
    """Exponents at ``delta = (1 - margin) theta/(n+1)``.

    ``gamma`` increases with ``delta``, so this is the largest admissible
    ``gamma`` that keeps a relative distance ``margin`` from the open bound.
    """
    if not (0 < margin < 1):
        raise DomainError(f"margin must lie in (0, 1), got {margin}")
    theta = compute_theta(alpha)
    return compute_exponents(alpha, n, (1.0 - margin) * theta / (n + 1))


def bound_envelope(exps: ExponentSet, Lambda: float, GammaBar: float, l1_norm: float,
                   t: float, C: float = 1.0) -> float:
    """``C (1 + GammaBar)^eta ||u0 - u0~||_1^gamma / t^(n gamma)``.

    ``Lambda`` only enters the unknown constant ``C``; it is accepted so
    callers can pass the full set of hypotheses.
    """
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    if l1_norm < 0:
        raise DomainError("l1_norm must be nonnegative")
    if C <= 0:
        raise DomainError("C must be positive")
    if not exps.valid:
        raise DomainError("exponent set is not valid")
    return C * (1.0 + GammaBar) ** exps.eta * l1_norm ** exps.gamma / t ** (exps.n * exps.gamma)
