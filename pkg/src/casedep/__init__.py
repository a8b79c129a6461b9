"""Dependency-forest models of case-frame slots.

Parses case-frame files, learns which case slots of a head depend on one
another (a thresholded maximum-mutual-information forest), evaluates the
learned models (perplexity, divergence, learning curves), and applies
them to prepositional-phrase attachment decisions.
"""

from .attach import (
    AttachmentDecision,
    AttachmentTuple,
    attach_double,
    attach_single,
    compare_likelihood,
    parse_attachment_tuples,
)
from .caseframes import (
    ABSENT,
    CaseFrameError,
    CaseFrameInstance,
    DiscreteDataset,
    group_by_head,
    parse_case_frames,
    project,
    render_case_frame,
)
from .evaluation import (
    CrossValidation,
    LearningCurveRow,
    brute_force_mdl,
    cross_validate,
    description_length,
    independent_model,
    learning_curve,
    learning_curve_csv,
    make_random_dendroid,
    model_joint,
    model_kl,
)
from .learner import (
    DependencyLink,
    ScoredPair,
    dependency_report,
    learn_model,
    learn_structure,
    score_pairs,
)
from .model import (
    DendroidModel,
    DependencyForest,
    enumerate_forests,
    fit_parameters,
    root_trees,
)
from .modelio import ModelFormatError, deserialize, format_pattern, serialize
from .stats import (
    JointTable,
    ele_joint,
    ele_marginal,
    entropy,
    kl_divergence,
    mutual_information,
    perplexity,
    threshold,
)

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "AttachmentDecision",
    "AttachmentTuple",
    "CaseFrameError",
    "CaseFrameInstance",
    "CrossValidation",
    "DendroidModel",
    "DependencyForest",
    "DependencyLink",
    "DiscreteDataset",
    "JointTable",
    "LearningCurveRow",
    "ModelFormatError",
    "ScoredPair",
    "attach_double",
    "attach_single",
    "brute_force_mdl",
    "compare_likelihood",
    "cross_validate",
    "dependency_report",
    "description_length",
    "deserialize",
    "ele_joint",
    "ele_marginal",
    "entropy",
    "enumerate_forests",
    "fit_parameters",
    "format_pattern",
    "group_by_head",
    "independent_model",
    "kl_divergence",
    "learn_model",
    "learn_structure",
    "learning_curve",
    "learning_curve_csv",
    "make_random_dendroid",
    "model_joint",
    "model_kl",
    "mutual_information",
    "parse_attachment_tuples",
    "parse_case_frames",
    "perplexity",
    "project",
    "render_case_frame",
    "root_trees",
    "score_pairs",
    "serialize",
    "threshold",
]
