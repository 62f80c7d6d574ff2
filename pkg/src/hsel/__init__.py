"""Hypothesis selection in total variation distance: selectors, hard-instance
generators, and a Monte Carlo experiment harness."""

from .baselines import (
    SelectorResult,
    mlw_pair_order,
    select_min_w,
    select_mlw,
    select_quantile,
)
from .distributions import (
    DiscreteDistribution,
    DomainMismatchError,
    EmptySampleError,
    HypothesisSet,
    InvalidDistributionError,
    InvalidPairError,
    SampleSet,
    SemiDistanceTable,
    TableMode,
    build_table,
    draw_sample,
    estimate_semi_distance,
    load_instance,
    save_instance,
    scheffe_mass,
    scheffe_set,
    semi_distance_exact,
    tv_distance,
)
from .expected import (
    MixtureOutput,
    closed_form_weights,
    factor_bound,
    good_index,
    round_weights,
    select_expected,
)
from .harness import ExperimentConfig, run_trials, sample_size, summarize
from .instances import (
    HardExpectedInstance,
    PlantedInstance,
    collision_probability,
    gen_hard_expected,
    gen_paired_family,
    gen_planted,
    split_seed,
)
from .knownopt import OptInfeasibleError, lambda_fraction, select_known_opt
from .preprocess import (
    DiameterStructure,
    ExactDiameter,
    HeuristicApprox,
    preprocess,
    select_tournament,
)
from .threshold import (
    PromptingResult,
    ThresholdAnswer,
    ThresholdGraphView,
    ThresholdTrace,
    estimate_average_degree,
    estimate_out_degree,
    find_heavy_prompter,
    find_prompting,
    select_fast,
    solve_threshold,
)

__version__ = "0.1.0"
