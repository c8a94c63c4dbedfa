"""Numerical toolkit for linear fading-memory functionals on semi-infinite sequences.

The pieces fit together as follows: ``seqspace`` holds the sequence
arithmetic, ``convrep`` evaluates and classifies matrix-kernel
representations with certified tail bounds, ``ssm`` realizes the same
functionals as linear state-space recursions, ``rkhs`` runs sequence-kernel
ridge regression (with the truncation/finite-memory equivalence), ``duality``
converts between functionals and time-invariant filters, and ``estimator``
wraps the regression in a scikit-learn interface.
"""

from .convrep import (
    FINITE_MEMORY,
    ConeCertificate,
    FiniteMemoryFlag,
    FMPReport,
    GeometricTail,
    KernelSeq,
    ZeroTail,
    classify,
    classify_constant_norm,
    classify_from_bounds,
    classify_power_law,
    cone_certificate,
    construct_weighting,
    continuity_bound,
    evaluate,
    extract_kernel,
    holder_conjugate,
    op_norm,
    orthant_index,
    q_seq_norm,
)
from .duality import (
    WindowedFilter,
    filter_to_functional,
    functional_to_filter,
    time_invariance_check,
)
from .estimator import SequenceKernelRidge
from .exceptions import (
    FadekitError,
    NoWeighting,
    NotLinear,
    NumericalFailure,
    OrthogonalityNotCertified,
    StabilityUndecided,
    Unstable,
    WindowUnderflow,
)
from .rkhs import (
    InducedKernel,
    LambdaKernel,
    RidgeFit,
    finite_memory_fit,
    finite_memory_predict,
    gram,
    kernel_eval,
    load_dataset,
    predict,
    ridge_fit,
    rkhs_norm,
    save_dataset_csv,
    truncated_fit,
)
from .seqspace import (
    ExponentialWeighting,
    FiniteSeq,
    PolynomialWeighting,
    TabulatedWeighting,
    WeightingSeq,
    finite_seq_from_csv,
    include,
    lp_norm,
    shift,
    truncate,
    weighted_lp_norm,
)
from .ssm import (
    LinearSSM,
    StabilityReport,
    UnstableWitness,
    run_recurrent,
    spectral_radius,
    ssm_to_kernel,
    unstable_witness,
)

__version__ = "0.1.0"
