"""Numerical laboratory for stationary quantum sources with memory.

Builds block density matrices of memoryless and finitely correlated
sources, estimates their entropy rate, constructs high-probability
subspaces, and runs finite-block compression experiments whose exact
inequality chains certify the positive and negative source coding
theorems at machine precision.
"""

from .linalg import (
    ConvergenceFailure,
    DimensionMismatch,
    EigenSystem,
    NotHermitian,
    NotPSD,
    haar_isometry,
    haar_unitary,
    hermitian_eig,
    kron,
    partial_trace,
    psd_sqrt,
)
from .sources import (
    DEFAULT_SIZE_CAP,
    ConsistencyReport,
    DensityMatrix,
    FixedPointNotUnique,
    InvalidSource,
    KrausSource,
    SizeCapExceeded,
    SourceModel,
    ValidationReport,
    correlated_source,
    example1_source,
    fcs_density,
    marginal_consistency,
    maximally_mixed_source,
    product_density,
    product_source,
    random_source,
    source_fingerprint,
    source_from_json,
    source_to_json,
    validate_source,
)
from .entropy import (
    ClassicalJoint,
    EntropyTrace,
    InvalidPOVM,
    POVM,
    holevo_chi,
    mean_entropy_trace,
    measurement_joint,
    mutual_information,
    shannon_entropy,
    to_bits,
    von_neumann_entropy,
)
from .coding import (
    BadMixer,
    CodingScheme,
    HighProbSubspace,
    LengthMismatch,
    MixedEnsemble,
    PureEnsemble,
    RankUnderflow,
    TheoremReport,
    TrialResult,
    coarse_grain,
    converse_coding_experiment,
    direct_coding_experiment,
    encode_ensemble,
    encode_pure,
    extremal_ensemble,
    fidelity,
    fidelity_sqrt,
    high_prob_subspace,
    min_log_dim,
    optimal_encoder,
)
from .cache import (
    CacheEntry,
    ChecksumMismatch,
    cached_eig_fn,
    load_entry,
    store_entry,
)

__version__ = "0.1.0"
