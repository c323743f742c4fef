"""Exact analytics, construction, and simulation of polar codes decoded with
the min-sum approximation on binary-input symmetric channels."""

from .channels import (
    LabeledChannel,
    LabelerReport,
    binary_entropy,
    from_config,
    label_llrs,
    make_bsc,
    make_custom,
    make_quantized_biawgn,
    reference_capacities,
    to_config,
    validate_labeler,
)
from .posynomial import (
    LabelPosynomial,
    above,
    below,
    error_probability,
    evaluate,
    hadamard,
    label_distribution,
    minus_transform,
    mirror,
    mutual_information,
    neg_op,
    plus_transform,
    pos_op,
    z_star,
    z_value,
)
from .synthesis import (
    PolarCode,
    SyntheticReport,
    brute_force_joint,
    construct_code,
    hamming_weights,
    pe_exact,
    synthesize_all,
)
from .thresholds import (
    ThresholdTree,
    compute_thresholds,
    delta_prime,
    eta_of_delta,
    is_leaf_set,
    pair_rates,
    rl_of,
    ru_of,
    validate_tree,
    zeta_step,
)
from .decoder import (
    CodewordFrame,
    SimResult,
    block_genie_decode,
    coset_max_oracle,
    exact_sc_decode,
    f_exact,
    f_minsum,
    g_combine,
    msa_sc_decode,
    polar_encode,
    sample_frames,
    simulate,
)

__version__ = "0.1.0"
