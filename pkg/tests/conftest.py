import time
from types import SimpleNamespace

import pytest

from emse_lab import (
    BernoulliGaussian,
    BernoulliPointMass,
    MismatchPair,
    MseEvalConfig,
    SystemParams,
    full_report,
)

MISMATCH_THETAS = [0.11, 0.13, 0.15, 0.17, 0.20]
TABLE_PARAMS = SystemParams(delta=0.2, sigma_z2=0.03)


@pytest.fixture(scope="session")
def eval_config():
    return MseEvalConfig()


@pytest.fixture(scope="session")
def table_reports(eval_config):
    """Full mismatch sweeps for both example priors, with wall time."""
    out = {}
    for kind, make in (
        ("table1", BernoulliPointMass),
        ("table2", BernoulliGaussian),
    ):
        true_prior = make(0.1)
        start = time.monotonic()
        reports = [
            full_report(
                MismatchPair(true_prior, make(t)),
                TABLE_PARAMS,
                eval_config,
                theta_mismatch=t,
            )
            for t in MISMATCH_THETAS
        ]
        out[kind] = SimpleNamespace(
            reports=reports,
            elapsed=time.monotonic() - start,
            true_prior=true_prior,
            make=make,
        )
    return out
