"""Excess MSE in large linear systems: exact value and closed-form predictions.

A mismatched prior hurts twice in a linear system: the estimator is
wrong for the signal, and the decoupled channel it induces is noisier.
The exact excess (``emse_l_exact``) comes from solving the noise
fixed-point equation once with the true prior and once with the
postulated one.  The closed-form approximations predict it from purely
scalar quantities: the scalar excess MSE at the true-prior operating
point and the local slope/curvature of the mismatched MSE curve there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .priors import MseEvalConfig
from .scalar_channel import MismatchPair, emse_s, psi, psi_derivatives
from .state_evolution import FixedPointSolution, SystemParams, solve_se

# Relative-curvature guard below which the square-root form switches to
# its curvature-free limit to avoid catastrophic cancellation.
_BETA_NEGLIGIBLE = 1e-12


@dataclass
class EmseReport:
    """Everything the mismatch analysis produces for one configuration."""

    delta: float
    sigma_p2: float
    sigma_q2: float
    Delta: float
    emse_s: float
    emse_l_exact: float
    alpha: float
    beta: float
    approx_first: float | None
    approx_second_taylor: float | None
    approx_second_sqrt: float | None
    rel_err_first: float | None
    rel_err_second_taylor: float | None
    rel_err_second_sqrt: float | None
    identity_residual: float
    beta_positive: bool = False
    theta_mismatch: float | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)

    def csv_row(self) -> list:
        return [
            self.theta_mismatch,
            self.Delta,
            _fmt(self.rel_err_first),
            _fmt(self.rel_err_second_taylor),
            _fmt(self.rel_err_second_sqrt),
        ]


CSV_HEADER = [
    "theta_mismatch",
    "Delta",
    "rel_err_first",
    "rel_err_second_taylor",
    "rel_err_second_sqrt",
]


def _fmt(x):
    return "n/a" if x is None else x


@dataclass(frozen=True)
class ExactEmse:
    """Exact large-system excess MSE with its two fixed points."""

    sigma_p2: float
    sigma_q2: float
    Delta: float
    emse_l: float
    fp_true: FixedPointSolution = field(repr=False, default=None)
    fp_postulated: FixedPointSolution = field(repr=False, default=None)


def emse_l_exact(
    pair: MismatchPair, params: SystemParams, cfg: MseEvalConfig
) -> ExactEmse:
    """Exact excess MSE from the two noise fixed points.

    Solves the noise equation with the true prior as denoiser and with
    the postulated prior as denoiser (signal always from the true
    prior), then takes the difference of the achieved MSEs.
    """
    matched = MismatchPair(pair.true_prior, pair.true_prior)
    fp_p = solve_se(matched, params, cfg)
    fp_q = solve_se(pair, params, cfg)
    value = psi(pair, fp_q.sigma2, cfg) - psi(matched, fp_p.sigma2, cfg)
    return ExactEmse(
        sigma_p2=fp_p.sigma2,
        sigma_q2=fp_q.sigma2,
        Delta=fp_q.sigma2 - fp_p.sigma2,
        emse_l=value,
        fp_true=fp_p,
        fp_postulated=fp_q,
    )


def check_claim_identity(
    report: EmseReport, pair: MismatchPair, cfg: MseEvalConfig
) -> float:
    """Residual of the exact scalar-to-linear-system excess relation.

    The large-system excess equals the scalar excess at the true-prior
    operating point plus the rise of the mismatched MSE curve between
    the two operating points; the rise integral telescopes to
    Psi_q(sigma_p2 + emse_l/delta) - Psi_q(sigma_p2).
    """
    s_upper = report.sigma_p2 + report.emse_l_exact / report.delta
    rise = psi(pair, s_upper, cfg) - psi(pair, report.sigma_p2, cfg)
    return report.emse_s + rise - report.emse_l_exact


def approx_first_order(emse_s_value: float, alpha: float, delta: float) -> float:
    """Slope-only prediction: the scalar excess times delta/(delta-alpha)."""
    _check_amplification(alpha, delta)
    return delta / (delta - alpha) * emse_s_value


def approx_second_taylor(
    emse_s_value: float, alpha: float, beta: float, delta: float
) -> float:
    """Curvature-corrected prediction, truncated to second order."""
    _check_amplification(alpha, delta)
    lead = delta * emse_s_value / (delta - alpha)
    return lead * (1.0 + 0.5 * beta * emse_s_value / (delta - alpha) ** 2)


def approx_second_sqrt(
    emse_s_value: float, alpha: float, beta: float, delta: float
) -> float:
    """Curvature-corrected prediction from the exact quadratic root.

    Solves the second-order self-consistency equation for the excess in
    closed form, keeping the root that vanishes with the scalar excess.
    Near-zero curvature falls back to the slope-only value, which is the
    analytic limit.
    """
    _check_amplification(alpha, delta)
    gap = delta - alpha
    if abs(beta) < _BETA_NEGLIGIBLE * gap**2 / max(emse_s_value, 1e-300):
        return delta / gap * emse_s_value
    disc = 1.0 - 2.0 * beta * emse_s_value / gap**2
    if disc < 0.0:
        raise ValueError(
            "second-order model has no real solution "
            f"(curvature {beta} too large for excess {emse_s_value})"
        )
    return delta * gap / beta * (1.0 - math.sqrt(disc))


def _check_amplification(alpha: float, delta: float):
    if alpha >= delta:
        raise ValueError(
            f"first-order amplification diverges: slope {alpha} >= rate {delta}"
        )


def full_report(
    pair: MismatchPair,
    params: SystemParams,
    cfg: MseEvalConfig,
    theta_mismatch: float | None = None,
) -> EmseReport:
    """Assemble exact values, derivatives, predictions, and relative errors.

    Relative errors are |exact - predicted| / exact; when the exact
    excess is zero (no mismatch) they are reported as None rather than
    propagating NaNs.
    """
    exact = emse_l_exact(pair, params, cfg)
    es = emse_s(pair, exact.sigma_p2, cfg)
    deriv = psi_derivatives(pair, exact.sigma_p2, cfg)
    alpha, beta = deriv.alpha, deriv.beta

    approx1 = approx2t = approx2s = None
    if alpha < params.delta:
        approx1 = approx_first_order(es, alpha, params.delta)
        approx2t = approx_second_taylor(es, alpha, beta, params.delta)
        approx2s = approx_second_sqrt(es, alpha, beta, params.delta)

    def rel(pred):
        if pred is None or exact.emse_l == 0.0:
            return None
        return abs(exact.emse_l - pred) / exact.emse_l

    report = EmseReport(
        delta=params.delta,
        sigma_p2=exact.sigma_p2,
        sigma_q2=exact.sigma_q2,
        Delta=exact.Delta,
        emse_s=es,
        emse_l_exact=exact.emse_l,
        alpha=alpha,
        beta=beta,
        approx_first=approx1,
        approx_second_taylor=approx2t,
        approx_second_sqrt=approx2s,
        rel_err_first=rel(approx1),
        rel_err_second_taylor=rel(approx2t),
        rel_err_second_sqrt=rel(approx2s),
        identity_residual=0.0,
        beta_positive=bool(beta > 0),
        theta_mismatch=theta_mismatch,
    )
    report.identity_residual = check_claim_identity(report, pair, cfg)
    return report
