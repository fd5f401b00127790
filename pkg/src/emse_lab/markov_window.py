"""Two-state Markov-constant signals and Bayesian sliding-window denoisers.

The signal holds a constant value per state and jumps between states
with fixed transition probabilities, giving geometric run lengths (a
block-sparse signal for the standard parameters).  The exact posterior
mean of one entry given the whole observed sequence is intractable in
practice, so the denoisers here condition on a window of two or three
noisy entries, enumerating the window's state patterns exactly.

MSE curves for these denoisers have no closed form; they are estimated
by Monte Carlo over long sequences, with common random numbers across
noise levels so that fixed-point solving and finite-difference
derivatives stay usable.  That machinery powers a heuristic
transfer of the scalar-excess amplification analysis to this non-i.i.d.
setting, predicting the linear-system MSE of the cheap window-2
denoiser from measurements of the window-3 one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .amp import AmpConfig, instance_from_signal, run_amp
from .emse_analysis import approx_second_sqrt
from .state_evolution import FixedPointError, FixedPointSolution, SystemParams


@dataclass(frozen=True)
class MarkovChainSpec:
    """Two-state chain: p10 leaves the "on" state, p01 leaves the "off" state."""

    p10: float
    p01: float
    value0: float = 0.0
    value1: float = 1.0

    def __post_init__(self):
        for name, p in (("p10", self.p10), ("p01", self.p01)):
            if not 0.0 < p < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {p}")

    @property
    def stationary_on(self) -> float:
        """Stationary probability of the nonzero state."""
        return self.p01 / (self.p01 + self.p10)

    @cached_property
    def log_stationary(self) -> np.ndarray:
        return np.log([1.0 - self.stationary_on, self.stationary_on])

    @cached_property
    def log_transition(self) -> np.ndarray:
        return np.log(
            [[1.0 - self.p01, self.p01], [self.p10, 1.0 - self.p10]]
        )

    @property
    def values(self) -> np.ndarray:
        return np.array([self.value0, self.value1])

    def stationary_variance(self) -> float:
        pi1 = self.stationary_on
        m = (1 - pi1) * self.value0 + pi1 * self.value1
        return (1 - pi1) * (self.value0 - m) ** 2 + pi1 * (self.value1 - m) ** 2


def paper_chain() -> MarkovChainSpec:
    """The standard block-sparse example: 10% on, mean run lengths 5 and 45."""
    return MarkovChainSpec(p10=0.2, p01=1.0 / 45.0)


def sample_markov(chain: MarkovChainSpec, n: int, seed) -> np.ndarray:
    """Sample n chain values, starting from the stationary distribution.

    Generated run-by-run: each sojourn in a state is geometric with the
    state's leave probability, which is exactly the forward chain law.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    state = int(rng.random() < chain.stationary_on)
    leave = (chain.p01, chain.p10)
    values = chain.values
    mean_pair_len = 1.0 / chain.p01 + 1.0 / chain.p10
    chunks = []
    total = 0
    while total < n:
        # enough alternating run pairs to usually finish in one batch
        k = max(8, int((n - total) / mean_pair_len * 1.15) + 16)
        lens = np.empty(2 * k, dtype=np.int64)
        lens[0::2] = rng.geometric(leave[state], size=k)
        lens[1::2] = rng.geometric(leave[1 - state], size=k)
        states = np.empty(2 * k, dtype=np.int64)
        states[0::2] = state
        states[1::2] = 1 - state
        chunks.append(values[np.repeat(states, lens)])
        total += int(lens.sum())
        # an even number of alternating runs leaves the state unchanged
    return np.concatenate(chunks)[:n]


@dataclass(frozen=True)
class WindowDenoiser:
    """Posterior mean of one entry given a short window of observations.

    Window 2 denoises the last entry of (y[i-1], y[i]); window 3
    denoises the middle entry of (y[i-1], y[i], y[i+1]).
    """

    chain: MarkovChainSpec
    window: int

    def __post_init__(self):
        if self.window not in (2, 3):
            raise ValueError(f"window must be 2 or 3, got {self.window}")

    @property
    def target(self) -> int:
        """Index of the denoised entry within the window."""
        return 1  # last of 2, middle of 3

    # --- SequenceDenoiser protocol, so the denoiser plugs into run_amp

    def estimate(self, s: np.ndarray, sigma2: float) -> np.ndarray:
        return denoise_sequence(self, s, sigma2)

    def mean_derivative(self, s, sigma2, estimate, mode, eps, rng):
        # no closed scalar derivative exists: randomized single-probe
        # divergence estimate, mean over entries
        probe = rng.choice([-1.0, 1.0], size=len(s))
        shifted = denoise_sequence(self, s + eps * probe, sigma2)
        return float(probe @ (shifted - estimate) / (eps * len(s)))


def _state_loglik(chain: MarkovChainSpec, y: np.ndarray, sigma2: float) -> np.ndarray:
    """log N(y; value_s, sigma2) per state, dropping the shared constant."""
    v = chain.values
    return -0.5 * (y[:, None] - v[None, :]) ** 2 / sigma2


def window_pme(d: WindowDenoiser, y_window, sigma2: float) -> float:
    """Exact posterior mean for one window by pattern enumeration."""
    y_window = np.asarray(y_window, dtype=float)
    if y_window.shape != (d.window,):
        raise ValueError(f"expected {d.window} observations, got {y_window.shape}")
    post = window_pattern_posterior(d, y_window, sigma2)
    values = d.chain.values
    total = 0.0
    for pattern, prob in post.items():
        total += prob * values[pattern[d.target]]
    return total


def window_pattern_posterior(
    d: WindowDenoiser, y_window: np.ndarray, sigma2: float
) -> dict[tuple[int, ...], float]:
    """Posterior probability of each binary state pattern of the window."""
    if sigma2 <= 0:
        raise ValueError(f"noise variance must be > 0, got {sigma2}")
    chain = d.chain
    L = _state_loglik(chain, np.asarray(y_window, dtype=float), sigma2)
    patterns = [
        tuple(int(b) for b in np.binary_repr(i, width=d.window))
        for i in range(2**d.window)
    ]
    logs = np.empty(len(patterns))
    for i, pat in enumerate(patterns):
        lp = chain.log_stationary[pat[0]]
        for k in range(d.window - 1):
            lp += chain.log_transition[pat[k], pat[k + 1]]
        logs[i] = lp + sum(L[k, pat[k]] for k in range(d.window))
    logs -= logs.max()
    probs = np.exp(logs)
    probs /= probs.sum()
    return dict(zip(patterns, probs))


def denoise_sequence(d: WindowDenoiser, y: np.ndarray, sigma2: float) -> np.ndarray:
    """Apply the window denoiser along a whole sequence, vectorized.

    Entries without a full window (the first one, and the last one for
    window 3) fall back to truncated conditioning so the output length
    matches the input; exclude them when measuring per-entry MSE.
    """
    if sigma2 <= 0:
        raise ValueError(f"noise variance must be > 0, got {sigma2}")
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 3:
        raise ValueError("sequence too short for window denoising")
    chain = d.chain
    L = _state_loglik(chain, y, sigma2)
    log_pi = chain.log_stationary
    log_t = chain.log_transition
    out = np.empty(n)

    # joint over (state[i-1], state[i]) given (y[i-1], y[i])
    lw2 = (
        log_pi[None, :, None]
        + log_t[None, :, :]
        + L[:-1, :, None]
        + L[1:, None, :]
    ).reshape(n - 1, 4)
    lw2 -= lw2.max(axis=1, keepdims=True)
    w2 = np.exp(lw2)
    w2 /= w2.sum(axis=1, keepdims=True)
    # p(state[i] = 1 | window): patterns (0,1) and (1,1)
    p_on_last = w2[:, 1] + w2[:, 3]

    v0, v1 = chain.value0, chain.value1
    if d.window == 2:
        out[1:] = v0 + (v1 - v0) * p_on_last
    else:
        lw3 = (
            log_pi[None, :, None, None]
            + log_t[None, :, :, None]
            + log_t[None, None, :, :]
            + L[:-2, :, None, None]
            + L[1:-1, None, :, None]
            + L[2:, None, None, :]
        ).reshape(n - 2, 8)
        lw3 -= lw3.max(axis=1, keepdims=True)
        w3 = np.exp(lw3)
        w3 /= w3.sum(axis=1, keepdims=True)
        # middle state on: patterns xx with bit index (a,1,c) -> 2,3,6,7
        p_on_mid = w3[:, 2] + w3[:, 3] + w3[:, 6] + w3[:, 7]
        out[1:-1] = v0 + (v1 - v0) * p_on_mid
        out[-1] = v0 + (v1 - v0) * p_on_last[-1]

    # first entry: stationary prior, own observation only
    lw0 = log_pi + L[0]
    w0 = np.exp(lw0 - lw0.max())
    out[0] = v0 + (v1 - v0) * (w0[1] / w0.sum())
    return out


def _valid_slice(d: WindowDenoiser) -> slice:
    return slice(1, None) if d.window == 2 else slice(1, -1)


def psi_window(
    d: WindowDenoiser,
    sigma2: float,
    mc_samples: int = 10**6,
    seed: int = 0,
    chunks: int = 1,
) -> tuple[float, float]:
    """Monte-Carlo per-entry MSE of the window denoiser at one noise level.

    Samples a long chain plus Gaussian noise, denoises, and averages the
    squared error over full-window entries.  The same seed reuses the
    same signal and noise variables at every ``sigma2``, so curves and
    finite differences in sigma2 are smooth (common random numbers).
    Splitting into ``chunks`` independent subsequences changes the
    estimate but keeps it deterministic given (seed, chunks).
    """
    if mc_samples < 10**4:
        raise ValueError("mc_samples must be >= 10^4 for a usable estimate")
    if chunks < 1:
        raise ValueError("chunks must be >= 1")
    per = mc_samples // chunks
    sq_sum = 0.0
    sq_sumsq = 0.0
    count = 0
    for child in np.random.SeedSequence(seed).spawn(chunks):
        sig_seed, noise_seed = child.spawn(2)
        x = sample_markov(d.chain, per, sig_seed)
        noise = np.random.default_rng(noise_seed).standard_normal(per)
        y = x + np.sqrt(sigma2) * noise
        xhat = denoise_sequence(d, y, sigma2)
        sl = _valid_slice(d)
        err = (xhat[sl] - x[sl]) ** 2
        sq_sum += float(err.sum())
        sq_sumsq += float((err**2).sum())
        count += len(err)
    mean = sq_sum / count
    var = max(sq_sumsq / count - mean**2, 0.0)
    return mean, float(np.sqrt(var / count))


def se_with_window(
    d: WindowDenoiser,
    params: SystemParams,
    mc_samples: int = 10**6,
    seed: int = 0,
    max_iters: int = 200,
) -> FixedPointSolution:
    """Noise fixed point when the window denoiser drives the iteration.

    Same damped-free iteration as the i.i.d. solver, but the MSE curve
    is a Monte-Carlo estimate, so iteration halts once the update falls
    below the estimate's own noise floor (or 1e-6, whichever is larger).
    """
    target_second_moment = (
        d.chain.stationary_on * d.chain.value1**2
        + (1 - d.chain.stationary_on) * d.chain.value0**2
    )
    s = params.sigma_z2 + target_second_moment / params.delta
    trajectory = [s]
    for it in range(max_iters):
        value, stderr = psi_window(d, s, mc_samples, seed)
        s_next = params.sigma_z2 + value / params.delta
        trajectory.append(s_next)
        if abs(s_next - s) < max(1e-6, 3.0 * stderr / params.delta):
            psi_at, stderr_at = psi_window(d, s_next, mc_samples, seed)
            residual = abs(params.delta * (s_next - params.sigma_z2) - psi_at)
            slope = _window_slope(d, s_next, mc_samples, seed)
            return FixedPointSolution(
                sigma2=s_next,
                psi_at=psi_at,
                stable=bool(slope < params.delta),
                iterations=it + 1,
                residual=residual,
            )
        s = s_next
    raise FixedPointError(
        f"no convergence after {max_iters} iterations", trajectory[-16:]
    )


def _window_slope(d, sigma2, mc_samples, seed, rel_step=0.1) -> float:
    h = rel_step * sigma2
    up, _ = psi_window(d, sigma2 + h, mc_samples, seed)
    down, _ = psi_window(d, sigma2 - h, mc_samples, seed)
    return (up - down) / (2.0 * h)


@dataclass(frozen=True)
class Fig2Row:
    """One measurement-rate point of the window-2-inside-AMP prediction."""

    delta: float
    sigma2_of_delta: float
    mse_x3: float
    mse_x2_scalar: float
    emse_s: float
    alpha: float
    beta: float
    predicted_mse_x2_amp: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def empirical_window_amp(
    chain: MarkovChainSpec,
    window: int,
    params: SystemParams,
    n: int,
    trials: int,
    seed: int,
    max_iters: int = 40,
) -> tuple[float, float, np.ndarray]:
    """Measured linear-system MSE of a window denoiser inside AMP.

    Runs the recursion on `trials` independent instances with
    Markov-constant signals and returns (mean, stderr, per-trial MSEs).
    A fixed iteration budget is used: the randomized divergence probe
    leaves a small jitter on the effective noise, so the usual
    relative-change halt would never fire; the recursion itself settles
    well inside the default budget.
    """
    denoiser = WindowDenoiser(chain, window)
    cfg = AmpConfig(max_iters=max_iters, divergence_mode="finite-difference")
    mses = np.empty(trials)
    words = np.random.SeedSequence(seed).generate_state(3 * trials, dtype=np.uint64)
    for i in range(trials):
        sig_seed, inst_seed, probe_seed = (int(v) for v in words[3 * i : 3 * i + 3])
        x = sample_markov(chain, n, sig_seed)
        instance = instance_from_signal(x, params, inst_seed)
        mses[i] = run_amp(instance, denoiser, cfg, seed=probe_seed).mse[-1]
    return float(mses.mean()), float(mses.std(ddof=1) / np.sqrt(trials)), mses


def predict_fig2(
    chain: MarkovChainSpec,
    delta_grid,
    sigma_z2: float,
    mc_samples: int = 10**6,
    seed: int = 0,
    derivative_step: float = 0.1,
) -> list[Fig2Row]:
    """Predict the linear-system MSE of the window-2 denoiser per rate.

    For each measurement rate: solve the noise fixed point driven by the
    window-3 denoiser; measure both denoisers' scalar MSE there; take
    finite-difference slope/curvature of the window-2 curve (common
    random numbers across the stencil); and amplify the scalar excess
    through the square-root second-order formula.  The predicted MSE of
    window-2-inside-AMP is the window-3 MSE plus that amplified excess.
    """
    delta_grid = list(delta_grid)
    if not delta_grid:
        raise ValueError("delta grid must be nonempty")
    d3 = WindowDenoiser(chain, 3)
    d2 = WindowDenoiser(chain, 2)
    rows = []
    for delta in delta_grid:
        params = SystemParams(delta=delta, sigma_z2=sigma_z2)
        fp = se_with_window(d3, params, mc_samples, seed)
        s2 = fp.sigma2
        mse_x3 = fp.psi_at
        mse_x2, _ = psi_window(d2, s2, mc_samples, seed)
        excess = mse_x2 - mse_x3

        h = derivative_step * s2
        up, _ = psi_window(d2, s2 + h, mc_samples, seed)
        down, _ = psi_window(d2, s2 - h, mc_samples, seed)
        alpha = (up - down) / (2.0 * h)
        beta = (up - 2.0 * mse_x2 + down) / h**2

        predicted = mse_x3 + approx_second_sqrt(excess, alpha, beta, delta)
        rows.append(
            Fig2Row(
                delta=delta,
                sigma2_of_delta=s2,
                mse_x3=mse_x3,
                mse_x2_scalar=mse_x2,
                emse_s=excess,
                alpha=alpha,
                beta=beta,
                predicted_mse_x2_amp=predicted,
            )
        )
    return rows
