"""Approximating a dialogue partner's probabilistic world model.

The package tracks a probability distribution over the possible worlds
of a small propositional language while two parties exchange attacking
arguments.  Stated confidences pass through a personalizable weighting
curve before a Bayesian block update moves probability mass; the curve
parameters are learned per participant by rank-correlation grid search.
Redistribution and case-based baselines, experiment runners, a batch
CLI, and a live dialogue session service round out the toolkit.
"""

__version__ = "0.1.0"

from .arguments import (
    Argument,
    AttackGraph,
    CandidateModel,
    DialogueEvent,
    DialogueTrace,
    ModelRanking,
    attacks,
    build_attack_graph,
    load_dataset,
    load_trace,
    save_trace,
    validate_argument,
    validate_trace,
)
from .beliefs import (
    BeliefState,
    IDENTITY_PARAMS,
    WeightingParams,
    confidence_to_probability,
    probability_of_formula,
    probability_to_confidence,
    rank_candidates,
    uniform_belief,
    update_belief,
)
from .baselines import flip_counterpart, ha_beliefs, hm1_update, hm2_update, sbu_update
from .learning import (
    DEFAULT_GRID,
    LearnedParams,
    ParamGrid,
    computed_ranking,
    evaluate_round,
    learn_params,
    learn_params_pooled,
)
from .logic import (
    Formula,
    Language,
    World,
    entails,
    eval_world,
    format_formula,
    is_consistent,
    models_of,
    parse_formula,
)
from .ranking import Ranking
from .stats import (
    bucket_fractions,
    paired_t_test_one_sided,
    spearman_rho,
    student_t_cdf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
