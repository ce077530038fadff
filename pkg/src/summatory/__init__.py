"""Workbench for the Mertens and Liouville summatory functions."""

__version__ = "0.1.0"

from .errors import AccuracyError, CheckpointParseError, DomainError, SingularityError
from .sieve import (
    Factorization,
    Kind,
    SignSequence,
    factorize,
    liouville_of,
    mobius_of,
    sieve_block,
)
from .walks import (
    Checkpoint,
    WalkSeries,
    WalkSummary,
    accumulate,
    load_checkpoints,
    partial_sums,
    ratio_diagnostic,
    save_checkpoints,
    scan_sign_events,
)
from .stats import (
    EmpiricalDistribution,
    KSResult,
    LagCovariance,
    MomentSummary,
    PhiKind,
    SqrtFit,
    average_summatory,
    block_scaling,
    block_sums_distribution,
    char_fn,
    envelope_check,
    ks_statistic,
    lag_covariance,
    moments,
    value_distribution,
)
from .zeta import ZetaParams, dirichlet_F, leading_constant, zeta
from .perron import PerronJob, QuadratureResult, perron_truncated, remainder_scan

__all__ = [
    "__version__",
    "AccuracyError",
    "CheckpointParseError",
    "DomainError",
    "SingularityError",
    "Factorization",
    "Kind",
    "SignSequence",
    "factorize",
    "liouville_of",
    "mobius_of",
    "sieve_block",
    "Checkpoint",
    "WalkSeries",
    "WalkSummary",
    "accumulate",
    "load_checkpoints",
    "partial_sums",
    "ratio_diagnostic",
    "save_checkpoints",
    "scan_sign_events",
    "EmpiricalDistribution",
    "KSResult",
    "LagCovariance",
    "MomentSummary",
    "PhiKind",
    "SqrtFit",
    "average_summatory",
    "block_scaling",
    "block_sums_distribution",
    "char_fn",
    "envelope_check",
    "ks_statistic",
    "lag_covariance",
    "moments",
    "value_distribution",
    "ZetaParams",
    "dirichlet_F",
    "leading_constant",
    "zeta",
    "PerronJob",
    "QuadratureResult",
    "perron_truncated",
    "remainder_scan",
]
