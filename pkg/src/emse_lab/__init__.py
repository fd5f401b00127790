"""Excess MSE of mismatched posterior-mean estimation.

Library for quantifying how much a wrong prior costs a posterior-mean
estimator, in scalar Gaussian channels and in large random linear
systems, with closed-form predictions of the large-system excess and
simulation machinery to validate them.
"""

from .priors import (
    BernoulliGaussian,
    BernoulliPointMass,
    FiniteMixture,
    Gaussian,
    MixtureComponent,
    MseEvalConfig,
    Prior,
    canonicalize,
    prior_from_json,
    prior_to_json,
    sample,
    second_moment,
)
from .scalar_channel import (
    MismatchPair,
    PsiDerivatives,
    ScalarChannel,
    emse_s,
    emse_s_via_kl,
    pme,
    pme_derivative,
    psi,
    psi_derivatives,
    psi_mc,
)
from .state_evolution import (
    FixedPointError,
    FixedPointSolution,
    SystemParams,
    scan_fixed_points,
    solve_se,
)
from .emse_analysis import (
    EmseReport,
    approx_first_order,
    approx_second_sqrt,
    approx_second_taylor,
    check_claim_identity,
    emse_l_exact,
    full_report,
)
from .amp import (
    AmpConfig,
    AmpDivergenceError,
    AmpTrace,
    LinearSystemInstance,
    empirical_emse_l,
    generate_instance,
    instance_from_signal,
    paired_mse_trials,
    run_amp,
)
from .markov_window import (
    Fig2Row,
    MarkovChainSpec,
    WindowDenoiser,
    denoise_sequence,
    empirical_window_amp,
    paper_chain,
    predict_fig2,
    psi_window,
    sample_markov,
    se_with_window,
    window_pme,
)

__version__ = "0.1.0"
