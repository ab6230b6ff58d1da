"""Integrated-information measures for multipartite quantum states.

The library computes the minimum quantum Jensen-Shannon divergence between a
density matrix and product states over bipartitions, along with the optimal
cut, the nearest product state, an algebraic witness operator, a recursive
integration dendrogram, a channel-family observer search, and a
recovery-based blanket scan. All divergences are in nats.
"""

from .blanket import BlanketResult, blanket_scan, petz_recover, recovered_conditional
from .channels import (
    KrausChannel,
    LocalChannel,
    apply_channel,
    apply_local,
    dephasing,
    depolarizing,
    identity_channel,
    local_dephasing,
    local_depolarizing,
    partial_trace_channel,
    random_channel,
    random_local_channel,
)
from .dendrogram import (
    Dendrogram,
    DendrogramNode,
    build_dendrogram,
    from_json as dendrogram_from_json,
    stability_probe,
    to_dot,
    to_json as dendrogram_to_json,
    to_newick,
)
from .divergence import (
    GramReport,
    LN2,
    delta,
    negative_type_check,
    qjsd,
    von_neumann_entropy,
)
from .errors import (
    BadBudget,
    BadParameter,
    BadSize,
    BudgetExceeded,
    ConfigInvalid,
    DimensionMismatch,
    DisjointnessViolation,
    EmptyKeepSet,
    GridTooLarge,
    IndexOutOfRange,
    InvalidCut,
    InvalidPartition,
    LayoutMismatch,
    NotHermitian,
    NotPSD,
    NumericalBreakdown,
    QphiError,
    SearchBudgetExceeded,
    SingleSubsystem,
    SupportBreakdown,
    TooFewStates,
    TraceNotOne,
    ValidationError,
)
from .observer import (
    ChannelFamily,
    ObserverResult,
    SpectrumResult,
    custom_family,
    local_dephasing_family,
    local_depolarizing_family,
    maximize_phi,
    observer_spectrum,
    partial_trace_family,
)
from .phi import (
    ConvexityReport,
    LipschitzReport,
    PartitionKBlocks,
    PhiResult,
    as_partition,
    convexity_check,
    divergence_for_partition,
    enumerate_partitions,
    lipschitz_check,
    merge_blocks,
    merge_inequality_check,
    min_over_partitions,
    phi,
)
from .qstate_io import (
    channel_from_json,
    channel_to_json,
    read_state,
    state_from_json,
    state_to_json,
)
from .states import (
    Bipartition,
    DensityMatrix,
    SubsystemLayout,
    bell,
    enumerate_bipartitions,
    ghz,
    ginibre_mixed,
    haar_pure,
    maximally_mixed,
    partial_trace,
    product_of_block_marginals,
    product_of_marginals,
    pure_state,
    random_product,
    substream,
    tensor,
    validate_state,
    w_state,
)
from .verify import CheckResult, VerificationReport, VerifyConfig, run_suite
from .witness import (
    ProductScanReport,
    Witness,
    build_witness,
    expectation,
    phi_comparison,
    product_state_scan,
)

__version__ = "0.1.0"

__all__ = [
    "BadBudget",
    "BadParameter",
    "BadSize",
    "Bipartition",
    "BlanketResult",
    "BudgetExceeded",
    "ChannelFamily",
    "CheckResult",
    "ConfigInvalid",
    "ConvexityReport",
    "Dendrogram",
    "DendrogramNode",
    "DensityMatrix",
    "DimensionMismatch",
    "DisjointnessViolation",
    "EmptyKeepSet",
    "GramReport",
    "GridTooLarge",
    "IndexOutOfRange",
    "InvalidCut",
    "InvalidPartition",
    "KrausChannel",
    "LN2",
    "LayoutMismatch",
    "LipschitzReport",
    "LocalChannel",
    "NotHermitian",
    "NotPSD",
    "NumericalBreakdown",
    "ObserverResult",
    "PartitionKBlocks",
    "PhiResult",
    "ProductScanReport",
    "QphiError",
    "SearchBudgetExceeded",
    "SingleSubsystem",
    "SpectrumResult",
    "SubsystemLayout",
    "SupportBreakdown",
    "TooFewStates",
    "TraceNotOne",
    "ValidationError",
    "VerificationReport",
    "VerifyConfig",
    "Witness",
    "apply_channel",
    "apply_local",
    "as_partition",
    "bell",
    "blanket_scan",
    "build_dendrogram",
    "build_witness",
    "channel_from_json",
    "channel_to_json",
    "convexity_check",
    "custom_family",
    "delta",
    "dendrogram_from_json",
    "dendrogram_to_json",
    "dephasing",
    "depolarizing",
    "divergence_for_partition",
    "enumerate_bipartitions",
    "enumerate_partitions",
    "expectation",
    "ghz",
    "ginibre_mixed",
    "haar_pure",
    "identity_channel",
    "lipschitz_check",
    "local_dephasing",
    "local_dephasing_family",
    "local_depolarizing",
    "local_depolarizing_family",
    "maximally_mixed",
    "maximize_phi",
    "merge_blocks",
    "merge_inequality_check",
    "min_over_partitions",
    "negative_type_check",
    "observer_spectrum",
    "partial_trace",
    "partial_trace_channel",
    "partial_trace_family",
    "petz_recover",
    "phi",
    "phi_comparison",
    "product_of_block_marginals",
    "product_of_marginals",
    "product_state_scan",
    "pure_state",
    "qjsd",
    "random_channel",
    "random_local_channel",
    "random_product",
    "read_state",
    "recovered_conditional",
    "run_suite",
    "stability_probe",
    "state_from_json",
    "state_to_json",
    "substream",
    "tensor",
    "validate_state",
    "von_neumann_entropy",
    "w_state",
]
