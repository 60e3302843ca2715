"""Exact posterior inference over skills given observed answers.

Inference enumerates every joint skill configuration and weights it by the
prior times the product of per-answer likelihood factors; an answer fails
only when every mastered parent skill is independently inhibited and the
leak does not fire. Likelihoods accumulate in log space so that long
evidence lists cannot underflow, and marginals come out of a normalised
log-sum-exp. This is exact and O(2^n * m * n); the configured skill cap
makes that boundary explicit.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .compiler import AnswerNode, EvidenceSet, NoisyOrNetwork
from .errors import CapacityError, ImpossibleEvidenceError, ValidationError
from .rubric import LevelCoord, OrderRelation, relate

DEFAULT_SKILL_CAP = 24
_CHUNK_BITS = 18

# Assignment of each skill id to {0,1}; must cover at least the parents of
# any answer node it is evaluated against.
SkillConfig = Mapping[str, int]


@dataclass(frozen=True)
class PosteriorReport:
    """Per-skill posterior marginals for one body of evidence."""

    posteriors: Mapping[str, float]
    evidence_digest: str
    log_likelihood: float

    def __post_init__(self):
        for skill, p in self.posteriors.items():
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"posterior for {skill} out of [0,1]: {p}")
        object.__setattr__(self, "posteriors", dict(self.posteriors))


def evidence_digest(evidence: EvidenceSet) -> str:
    """Order-independent digest of an evidence set."""
    lines = "\n".join(f"{k}={v}" for k, v in sorted(evidence.values.items()))
    return hashlib.sha256(lines.encode()).hexdigest()[:16]


def cpt_failure_prob(answer: AnswerNode, config: SkillConfig) -> float:
    """P(answer not shown | skill configuration).

    The product of the inhibitions of all mastered parents, times the
    complement of the leak guess. An empty mastered set gives the pure
    no-skill failure probability.
    """
    p = 1.0 - answer.leak_guess
    for skill, lam in answer.parent_edges:
        if skill not in config:
            raise ValidationError(f"configuration does not cover parent {skill}")
        if config[skill] == 1:
            p *= lam
    return p


def posterior_single_negative(prior: float, lam: float) -> float:
    """Posterior that the skill is mastered after one failed answer.

    Closed form: prior*lam / (prior*lam + 1 - prior). Never exceeds the
    prior; an information-free arc (lam=1) returns it unchanged.
    """
    if not 0.0 < prior < 1.0:
        raise ValidationError(f"prior must be in (0,1), got {prior}")
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"inhibition must be in [0,1], got {lam}")
    return prior * lam / (prior * lam + (1.0 - prior))


def posterior_single_positive(
    priors: Sequence[float], lambdas: Sequence[float], q: int
) -> float:
    """Posterior that parent ``q`` is mastered after one correct answer.

    Success can be explained by any parent, so the update depends on every
    parent's prior and inhibition. A leak enters as an extra parent with
    prior 1 and inhibition equal to the leak's failure probability.
    """
    if len(priors) != len(lambdas):
        raise ValidationError("priors and lambdas must align")
    if not 0 <= q < len(priors):
        raise ValidationError(f"parent index {q} out of range")
    for p in priors:
        if not 0.0 < p <= 1.0:
            raise ValidationError(f"prior must be in (0,1], got {p}")
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise ValidationError(f"inhibition must be in [0,1], got {lam}")
    denom = 1.0
    others = 1.0
    for j, (p, lam) in enumerate(zip(priors, lambdas)):
        factor = 1.0 - p * (1.0 - lam)
        denom *= factor
        if j != q:
            others *= factor
    denominator = 1.0 - denom
    if denominator <= 0.0:
        raise ImpossibleEvidenceError(
            "a correct answer has probability zero: every arc is "
            "information-free and there is no leak"
        )
    return (priors[q] - priors[q] * lambdas[q] * others) / denominator


def _logsumexp(values: np.ndarray | list[float]) -> float:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return -math.inf
    m = float(np.max(arr))
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.sum(np.exp(arr - m))))


def _validate_evidence(network: NoisyOrNetwork, evidence: EvidenceSet) -> list[tuple[str, int]]:
    items = sorted(evidence.values.items())
    for answer, _ in items:
        if answer not in network.answers_by_id:
            raise ValidationError(f"evidence references unknown answer node {answer}")
    return items


def _chunk_ranges(n_configs: int) -> Iterable[tuple[int, int]]:
    step = 1 << _CHUNK_BITS
    for lo in range(0, n_configs, step):
        yield lo, min(lo + step, n_configs)


def _accumulate(
    network: NoisyOrNetwork, items: list[tuple[str, int]]
) -> tuple[float, np.ndarray]:
    """Log evidence probability plus per-skill log numerators."""
    skills = network.skills
    n = len(skills)
    index = {s.id: i for i, s in enumerate(skills)}
    priors = np.array([s.prior for s in skills])
    log_p1 = np.log(priors)
    log_p0 = np.log1p(-priors)

    total_parts: list[float] = []
    skill_parts: list[list[float]] = [[] for _ in range(n)]
    with np.errstate(divide="ignore"):
        for lo, hi in _chunk_ranges(1 << n):
            idx = np.arange(lo, hi, dtype=np.int64)
            bits = (idx[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1
            logw = bits @ log_p1 + (1 - bits) @ log_p0
            for answer, value in items:
                node = network.answers_by_id[answer]
                p_fail = np.full(idx.shape, 1.0 - node.leak_guess)
                for skill, lam in node.parent_edges:
                    p_fail = p_fail * np.where(bits[:, index[skill]] == 1, lam, 1.0)
                factor = p_fail if value == 0 else 1.0 - p_fail
                logw = logw + np.log(factor)
            total_parts.append(_logsumexp(logw))
            for q in range(n):
                skill_parts[q].append(_logsumexp(logw[bits[:, q] == 1]))

    total = _logsumexp(total_parts)
    numerators = np.array([_logsumexp(parts) for parts in skill_parts])
    return total, numerators


def _log_evidence(network: NoisyOrNetwork, items: list[tuple[str, int]]) -> float:
    total, _ = _accumulate(network, items)
    return total


def _offending_subset(
    network: NoisyOrNetwork, items: list[tuple[str, int]]
) -> tuple[tuple[str, int], ...]:
    """Shrink zero-probability evidence to a near-minimal conflicting subset."""
    prefix: list[tuple[str, int]] = []
    for item in items:
        prefix.append(item)
        if _log_evidence(network, prefix) == -math.inf:
            break
    core = list(prefix)
    for item in list(core[:-1]):
        trial = [x for x in core if x != item]
        if _log_evidence(network, trial) == -math.inf:
            core = trial
    return tuple(core)


def infer(
    network: NoisyOrNetwork,
    evidence: EvidenceSet,
    *,
    skill_cap: int = DEFAULT_SKILL_CAP,
) -> PosteriorReport:
    """Exact marginal posterior P(skill mastered | evidence) for every skill.

    Empty evidence returns the priors. Evidence whose probability is zero
    raises ImpossibleEvidenceError carrying a near-minimal offending subset;
    networks larger than ``skill_cap`` skills raise CapacityError.
    """
    n = len(network.skills)
    if n > skill_cap:
        raise CapacityError(
            f"network has {n} skills, above the exact-enumeration cap {skill_cap}"
        )
    items = _validate_evidence(network, evidence)
    if not items:
        return PosteriorReport(
            posteriors={s.id: s.prior for s in network.skills},
            evidence_digest=evidence_digest(evidence),
            log_likelihood=0.0,
        )
    total, numerators = _accumulate(network, items)
    if total == -math.inf:
        offending = _offending_subset(network, items)
        raise ImpossibleEvidenceError(
            "evidence has probability zero under the model", offending
        )
    posteriors = {
        s.id: min(1.0, max(0.0, math.exp(numerators[q] - total)))
        for q, s in enumerate(network.skills)
    }
    return PosteriorReport(
        posteriors=posteriors,
        evidence_digest=evidence_digest(evidence),
        log_likelihood=total,
    )


def bernoulli_entropy_bits(p: float) -> float:
    """Entropy of a {0,1} variable with success probability ``p``, in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def _marginal_entropy_bits(report: PosteriorReport) -> float:
    return sum(bernoulli_entropy_bits(p) for p in report.posteriors.values())


def _consistent_task_outcomes(
    answers: Sequence[AnswerNode], rows_ordered: bool
) -> list[dict[str, int]]:
    """All full {0,1} assignments to a task's answers compatible with dominance.

    Shown behaviours must be closed downward: a level can be marked shown
    only when every strictly lower level of the task is shown too. These
    are exactly the complete patterns an achieved-level encoding extended
    through its incomparable cells could produce.
    """
    ordered = sorted(answers, key=lambda a: (a.coord.r, a.coord.c))
    below: list[list[int]] = []
    for i, node in enumerate(ordered):
        below.append(
            [
                j
                for j in range(i)
                if relate(node.coord, ordered[j].coord, rows_ordered)
                is OrderRelation.HIGHER
            ]
        )
    outcomes: list[dict[str, int]] = []

    def extend(i: int, assignment: list[int]) -> None:
        if i == len(ordered):
            outcomes.append({ordered[k].id: assignment[k] for k in range(len(ordered))})
            return
        extend(i + 1, assignment + [0])
        if all(assignment[j] == 1 for j in below[i]):
            extend(i + 1, assignment + [1])

    extend(0, [])
    return outcomes


def expected_information_gain(
    network: NoisyOrNetwork,
    evidence: EvidenceSet,
    candidate_task: str,
    *,
    skill_cap: int = DEFAULT_SKILL_CAP,
) -> float:
    """Expected drop, in bits, of total marginal skill entropy after the task.

    The expectation runs over the predictive distribution of the task's
    dominance-consistent complete outcomes. Nonnegative up to numerical
    tolerance.
    """
    if network.grid is None:
        raise ValidationError(
            "information gain needs the grid metadata of a compiled network"
        )
    task_answers = network.answers_for_task(candidate_task)
    if not task_answers:
        raise ValidationError(f"unknown task {candidate_task!r}")
    observed = [a.id for a in task_answers if a.id in evidence.values]
    if observed:
        raise ValidationError(
            f"task {candidate_task!r} already has observed answers: {', '.join(observed)}"
        )

    base = infer(network, evidence, skill_cap=skill_cap)
    base_entropy = _marginal_entropy_bits(base)

    weights: list[float] = []
    entropies: list[float] = []
    for outcome in _consistent_task_outcomes(task_answers, network.grid.rows_ordered):
        merged = evidence.merged(EvidenceSet(outcome))
        try:
            report = infer(network, merged, skill_cap=skill_cap)
        except ImpossibleEvidenceError:
            continue
        weights.append(math.exp(report.log_likelihood - base.log_likelihood))
        entropies.append(_marginal_entropy_bits(report))
    mass = sum(weights)
    if mass <= 0.0:
        raise ImpossibleEvidenceError(
            f"every consistent outcome of task {candidate_task!r} has probability zero"
        )
    expected = sum(w * h for w, h in zip(weights, entropies)) / mass
    return base_entropy - expected


def rank_tasks(
    network: NoisyOrNetwork,
    evidence: EvidenceSet,
    *,
    skill_cap: int = DEFAULT_SKILL_CAP,
) -> list[tuple[str, float]]:
    """Unobserved tasks ranked by expected information gain, best first.

    Ties break toward the lowest task id.
    """
    observed_tasks = {
        network.answers_by_id[a].task
        for a in evidence.values
        if a in network.answers_by_id
    }
    ranked = [
        (task, expected_information_gain(network, evidence, task, skill_cap=skill_cap))
        for task in network.tasks
        if task not in observed_tasks
    ]
    ranked.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked
