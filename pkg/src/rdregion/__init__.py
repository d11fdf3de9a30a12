"""Rate-distortion regions for distributed compression with side information.

Three correlated sources X1, X2, X3 are encoded separately; a single decoder
observes two side-information variables Z and F.  The package computes inner
and outer bounds on the achievable rate region over auxiliary test channels,
optimizes rate-distortion frontiers by exhaustive grid search, reduces the
machinery to the classical single-source-with-side-information curve, and
validates the achievability argument empirically with a Monte Carlo
simulation of random binning.
"""

from .errors import (
    ConfigError,
    ConstraintError,
    DecoderError,
    DuplicateVariable,
    InputError,
    InsufficientSamples,
    InvalidQuery,
    ModelError,
    RdRegionError,
    UnknownVariable,
)
from .probability import (
    Alphabet,
    ConditionalPMF,
    JointPMF,
    attach_channel,
    binary_alphabet,
    channel,
    condition,
    entropy,
    indexed_alphabet,
    marginalize,
    mutual_information,
    verify_markov,
)
from .sources import (
    AUX_AXES,
    CANONICAL_AXES,
    DecoderRule,
    DistortionMeasure,
    SourceModel,
    TestChannelTriple,
    TreeModelSpec,
    assemble_tree_model,
    bsc_matrix,
    check_tree_structure,
    expected_distortion,
    extend_with_auxiliary,
    extend_with_test_channels,
    hamming_distortion,
    is_tree_model,
    optimal_decoder,
    reference_model,
    test_channel,
)
from .region import (
    FORM_INNER,
    FORM_OUTER,
    FORM_RELAXED_OUTER,
    FORM_TREE_COLLAPSED,
    RateRegionBounds,
    RateTriple,
    admissibility_residuals,
    check_admissible,
    inner_bound,
    min_sum_rate_point,
    outer_bound,
    productize_auxiliary,
    relaxed_outer_bound,
    tree_collapsed_bounds,
    verify_rate_identities,
)
from .optimizer import (
    FrontierPoint,
    SearchConfig,
    enumerate_channels,
    envelope_value,
    lower_convex_envelope,
    trace_frontier,
)
from .wynerziv import (
    BinaryClosedForm,
    binary_closed_form,
    binary_entropy,
    closed_form_parameters,
    crossover,
    embed_two_variable_model,
    wyner_ziv_reduction,
    zero_rate_distortion,
)
from .simulate import (
    BinAssignment,
    BinningScheme,
    Codebook,
    SimReport,
    TypicalityParams,
    empirical_entropy_gap,
    is_typical,
    is_weakly_typical,
    markov_lemma_trial,
    resolve_binning,
    run_binning_trials,
)
from .modelio import (
    ModelFile,
    format_float,
    joint_model_data,
    load_model_file,
    parse_model_data,
    report_json,
    save_model_file,
    tree_model_data,
)
from .generators import (
    random_channel_triple,
    random_correlated_auxiliary,
    random_joint_pmf,
    random_source_model,
    random_tree_model,
    random_tree_spec,
    seeded,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet", "AUX_AXES", "BinAssignment", "BinaryClosedForm", "BinningScheme",
    "CANONICAL_AXES", "Codebook", "ConditionalPMF", "ConfigError", "ConstraintError",
    "DecoderError", "DecoderRule", "DistortionMeasure", "DuplicateVariable",
    "FORM_INNER", "FORM_OUTER", "FORM_RELAXED_OUTER", "FORM_TREE_COLLAPSED",
    "FrontierPoint", "InputError", "InsufficientSamples", "InvalidQuery",
    "JointPMF", "ModelError", "ModelFile", "RateRegionBounds", "RateTriple",
    "RdRegionError", "SearchConfig", "SimReport", "SourceModel", "TestChannelTriple",
    "TreeModelSpec", "TypicalityParams", "UnknownVariable",
    "admissibility_residuals", "assemble_tree_model", "attach_channel",
    "binary_alphabet", "binary_closed_form", "binary_entropy", "bsc_matrix",
    "channel", "check_admissible", "check_tree_structure", "closed_form_parameters",
    "condition", "crossover", "embed_two_variable_model", "empirical_entropy_gap",
    "entropy", "enumerate_channels", "envelope_value", "expected_distortion",
    "extend_with_auxiliary", "extend_with_test_channels", "format_float",
    "hamming_distortion", "indexed_alphabet", "inner_bound", "is_tree_model",
    "is_typical", "is_weakly_typical", "joint_model_data", "load_model_file",
    "lower_convex_envelope", "marginalize", "markov_lemma_trial",
    "min_sum_rate_point", "mutual_information", "optimal_decoder", "outer_bound",
    "parse_model_data", "productize_auxiliary", "random_channel_triple",
    "random_correlated_auxiliary", "random_joint_pmf", "random_source_model",
    "random_tree_model", "random_tree_spec", "reference_model",
    "relaxed_outer_bound", "report_json", "resolve_binning", "run_binning_trials",
    "save_model_file", "seeded", "test_channel", "trace_frontier",
    "tree_collapsed_bounds", "tree_model_data", "verify_markov",
    "verify_rate_identities", "wyner_ziv_reduction", "zero_rate_distortion",
]
