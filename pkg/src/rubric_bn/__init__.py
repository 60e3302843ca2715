"""Assessment rubrics compiled into leaky noisy-OR Bayesian networks.

The toolkit turns a rubric grid with a declared ordering of competence
levels into a two-layer Bayesian network, encodes observed task behaviour
into evidence, and computes exact posterior mastery probabilities per
competence level, together with deterministic and probabilistic scores.
A CLI covers batch evaluation; an HTTP service hosts live assessment
sessions for the browser console.
"""

from .compiler import (
    AchievedLevel,
    AnswerNode,
    EvidenceSet,
    ExplicitObservations,
    GridMeta,
    LambdaOverride,
    NoisyOrNetwork,
    ParameterSpec,
    PupilRecord,
    SkillNode,
    answer_id,
    compile_network,
    encode,
    skill_id,
)
from .errors import (
    CapacityError,
    EncodingError,
    ImpossibleEvidenceError,
    ParseError,
    RubricBnError,
    UndefinedCorrelationError,
    ValidationError,
)
from .inference import (
    PosteriorReport,
    cpt_failure_prob,
    expected_information_gain,
    infer,
    posterior_single_negative,
    posterior_single_positive,
    rank_tasks,
)
from .io import (
    RubricDocument,
    fixture_path,
    load_dataset,
    load_params,
    load_rubric,
    network_to_dict,
    params_from_dict,
    rubric_from_dict,
    save_dataset,
    save_params,
    save_rubric,
)
from .oracle import oracle_check, oracle_infer, random_evidence, random_network
from .rubric import AxisEntry, LevelCoord, OrderRelation, Rubric, compare, dominated_set, dominating_set
from .scoring import avg_cat_score, cat_score, pearson, probabilistic_score

__version__ = "0.1.0"

__all__ = [
    "AchievedLevel",
    "AnswerNode",
    "AxisEntry",
    "CapacityError",
    "EncodingError",
    "EvidenceSet",
    "ExplicitObservations",
    "GridMeta",
    "ImpossibleEvidenceError",
    "LambdaOverride",
    "LevelCoord",
    "NoisyOrNetwork",
    "OrderRelation",
    "ParameterSpec",
    "ParseError",
    "PosteriorReport",
    "PupilRecord",
    "Rubric",
    "RubricBnError",
    "RubricDocument",
    "SkillNode",
    "UndefinedCorrelationError",
    "ValidationError",
    "answer_id",
    "avg_cat_score",
    "cat_score",
    "compare",
    "compile_network",
    "cpt_failure_prob",
    "dominated_set",
    "dominating_set",
    "encode",
    "expected_information_gain",
    "fixture_path",
    "infer",
    "load_dataset",
    "load_params",
    "load_rubric",
    "network_to_dict",
    "oracle_check",
    "params_from_dict",
    "rubric_from_dict",
    "oracle_infer",
    "pearson",
    "posterior_single_negative",
    "posterior_single_positive",
    "probabilistic_score",
    "random_evidence",
    "random_network",
    "rank_tasks",
    "save_dataset",
    "save_params",
    "save_rubric",
    "skill_id",
]
