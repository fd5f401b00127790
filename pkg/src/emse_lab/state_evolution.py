"""Fixed points of the decoupled-channel noise equation.

For a random linear system with measurement rate ``delta`` and noise
``sigma_z2``, the effective scalar channel seen by each coordinate has a
noise variance solving  delta * (sigma2 - sigma_z2) = Psi(sigma2),
where Psi is the scalar MSE curve of the denoiser in use.  This module
iterates that equation from the natural large-noise start, scans for
every root on a grid, and classifies stability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .priors import MseEvalConfig, second_moment
from .scalar_channel import MismatchPair, psi, psi_derivatives


@dataclass(frozen=True)
class SystemParams:
    """Measurement rate delta = M/N and measurement noise variance."""

    delta: float
    sigma_z2: float = 0.0

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.sigma_z2 < 0:
            raise ValueError(f"sigma_z2 must be >= 0, got {self.sigma_z2}")


@dataclass(frozen=True)
class FixedPointSolution:
    sigma2: float
    psi_at: float
    stable: bool
    iterations: int
    residual: float


class FixedPointError(RuntimeError):
    """Fixed-point iteration failed to converge; carries the trajectory tail."""

    def __init__(self, message: str, trajectory: list[float]):
        super().__init__(message)
        self.trajectory = trajectory


_REL_TOL = 1e-12
_TRAJECTORY_TAIL = 16


def solve_se(
    pair: MismatchPair,
    params: SystemParams,
    cfg: MseEvalConfig,
    max_iters: int = 10**4,
) -> FixedPointSolution:
    """Iterate the noise equation from the large-noise starting point.

    Starts at sigma2 = sigma_z2 + E[X^2]/delta, the effective noise of a
    zero estimate, and applies sigma2 <- sigma_z2 + Psi(sigma2)/delta
    until the relative change drops below 1e-12.  This start selects the
    fixed point that message-passing recursions reach in practice.
    """
    start = params.sigma_z2 + second_moment(pair.true_prior) / params.delta
    s = start
    tail: list[float] = [s]
    for it in range(max_iters):
        s_next = params.sigma_z2 + psi(pair, s, cfg) / params.delta
        tail.append(s_next)
        if abs(s_next - s) < _REL_TOL * s:
            return _solution(pair, params, cfg, s_next, it + 1)
        s = s_next
    raise FixedPointError(
        f"no convergence after {max_iters} iterations (last sigma2 = {s})",
        tail[-_TRAJECTORY_TAIL:],
    )


def _solution(pair, params, cfg, sigma2, iterations) -> FixedPointSolution:
    psi_at = psi(pair, sigma2, cfg)
    residual = abs(params.delta * (sigma2 - params.sigma_z2) - psi_at)
    slope = psi_derivatives(pair, sigma2, cfg).alpha
    return FixedPointSolution(
        sigma2=sigma2,
        psi_at=psi_at,
        stable=bool(slope < params.delta),
        iterations=iterations,
        residual=residual,
    )


def scan_fixed_points(
    pair: MismatchPair,
    params: SystemParams,
    cfg: MseEvalConfig,
    lo: float | None = None,
    hi: float | None = None,
    num: int = 512,
) -> list[FixedPointSolution]:
    """Find every fixed point by sign-change bracketing plus bisection.

    Evaluates g(sigma2) = delta*(sigma2 - sigma_z2) - Psi(sigma2) on a
    geometric grid over [lo, hi] (defaults: [sigma_z2, large-noise
    start], extended upward until g > 0), refines each bracketed root by
    bisection to 1e-12 relative, and marks stability by whether the MSE
    curve crosses the line with slope below delta.
    """
    start = params.sigma_z2 + second_moment(pair.true_prior) / params.delta
    if hi is None:
        hi = start
    if lo is None:
        lo = params.sigma_z2
    lo = max(lo, 1e-15 * hi)  # geometric grid needs a positive floor

    def g(s):
        return params.delta * (s - params.sigma_z2) - psi(pair, s, cfg)

    while g(hi) < 0:  # guaranteed to turn positive: Psi is bounded
        hi *= 2.0

    grid = np.geomspace(lo, hi, num)
    values = np.array([g(s) for s in grid])
    roots = []
    for a, b, ga, gb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if ga == 0.0:
            roots.append(float(a))
        elif ga * gb < 0.0:
            roots.append(float(bisect(g, a, b, rtol=_REL_TOL)))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return [_solution(pair, params, cfg, r, 0) for r in roots]
