"""Brute-force reference inference via the explicit inhibitor formulation.

Instead of multiplying closed-form likelihood factors, the oracle builds
the network the long way round: every (skill, answer) arc becomes its own
binary inhibitor-output variable that can be 1 only when the skill is
mastered and the inhibition does not fire, the leak becomes one more such
variable per answer, and an answer is 1 exactly when any of them is 1. It
then enumerates the complete joint over skills and inhibitor outputs and
sums. Deliberately slower and structurally different from the main engine
so the two can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compiler import AnswerNode, EvidenceSet, NoisyOrNetwork, SkillNode
from .errors import CapacityError, ImpossibleEvidenceError
from .inference import PosteriorReport, _validate_evidence, evidence_digest
from .rubric import LevelCoord

DEFAULT_VARIABLE_CAP = 26
_CHUNK_BITS = 18


@dataclass(frozen=True)
class _Inhibitor:
    """One auxiliary variable: column of its skill (or None for the leak)."""

    skill_col: int | None
    pass_prob: float  # chance the variable fires given its skill is mastered


def oracle_infer(
    network: NoisyOrNetwork,
    evidence: EvidenceSet,
    *,
    variable_cap: int = DEFAULT_VARIABLE_CAP,
) -> PosteriorReport:
    """Exact marginals by enumerating skills plus all inhibitor outputs."""
    items = _validate_evidence(network, evidence)
    skills = network.skills
    n = len(skills)
    index = {s.id: i for i, s in enumerate(skills)}

    # Layout: columns 0..n-1 are skills, then one block per observed answer.
    inhibitors: list[_Inhibitor] = []
    blocks: list[tuple[int, int, int]] = []  # (start, end, observed value)
    col = n
    for answer, value in items:
        node = network.answers_by_id[answer]
        start = col
        for skill, lam in node.parent_edges:
            inhibitors.append(_Inhibitor(index[skill], 1.0 - lam))
            col += 1
        inhibitors.append(_Inhibitor(None, node.leak_guess))
        col += 1
        blocks.append((start, col, value))

    n_vars = col
    if n_vars > variable_cap:
        raise CapacityError(
            f"explicit formulation needs {n_vars} variables, "
            f"above the enumeration cap {variable_cap}"
        )

    priors = np.array([s.prior for s in skills])
    total = 0.0
    skill_sums = np.zeros(n)
    step = 1 << _CHUNK_BITS
    for lo in range(0, 1 << n_vars, step):
        hi = min(lo + step, 1 << n_vars)
        idx = np.arange(lo, hi, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(n_vars, dtype=np.int64)[None, :]) & 1
        w = np.ones(hi - lo)
        for q in range(n):
            w *= np.where(bits[:, q] == 1, priors[q], 1.0 - priors[q])
        for j, inh in enumerate(inhibitors):
            fired = bits[:, n + j] == 1
            if inh.skill_col is None:
                w *= np.where(fired, inh.pass_prob, 1.0 - inh.pass_prob)
            else:
                mastered = bits[:, inh.skill_col] == 1
                w *= np.where(
                    mastered,
                    np.where(fired, inh.pass_prob, 1.0 - inh.pass_prob),
                    np.where(fired, 0.0, 1.0),
                )
        for start, end, value in blocks:
            disjunction = bits[:, start:end].max(axis=1)
            w *= disjunction == value
        total += float(w.sum())
        for q in range(n):
            skill_sums[q] += float(w[bits[:, q] == 1].sum())

    if total <= 0.0:
        raise ImpossibleEvidenceError(
            "evidence has probability zero under the model", tuple(items)
        )
    posteriors = {
        s.id: min(1.0, max(0.0, skill_sums[q] / total)) for q, s in enumerate(skills)
    }
    return PosteriorReport(
        posteriors=posteriors,
        evidence_digest=evidence_digest(evidence),
        log_likelihood=math.log(total),
    )


def random_network(
    rng: np.random.Generator,
    *,
    max_skills: int = 4,
    max_answers: int = 3,
) -> NoisyOrNetwork:
    """Small random network for engine-vs-oracle equivalence checks.

    Inhibitions are drawn from (0,1], leak guesses from [0,0.5) and priors
    away from the endpoints. Structure is arbitrary, not grid-shaped.
    """
    n = int(rng.integers(1, max_skills + 1))
    skills = tuple(
        SkillNode(id=f"X_{i + 1}", coord=LevelCoord(1, i + 1), prior=float(p))
        for i, p in enumerate(rng.uniform(0.05, 0.95, size=n))
    )
    m = int(rng.integers(1, max_answers + 1))
    answers = []
    for j in range(m):
        k = int(rng.integers(1, n + 1))
        parents = sorted(rng.choice(n, size=k, replace=False).tolist())
        edges = tuple(
            (skills[p].id, float(1.0 - rng.uniform(0.0, 1.0))) for p in parents
        )
        answers.append(
            AnswerNode(
                id=f"Y_{j + 1}",
                task=f"t{j + 1}",
                coord=LevelCoord(1, 1),
                parent_edges=edges,
                leak_guess=float(rng.uniform(0.0, 0.5)),
            )
        )
    return NoisyOrNetwork(skills=skills, answers=tuple(answers), provenance="random")


def random_evidence(rng: np.random.Generator, network: NoisyOrNetwork) -> EvidenceSet:
    """Random partial assignment of the network's answer nodes."""
    values = {
        a.id: int(rng.integers(0, 2))
        for a in network.answers
        if rng.uniform() < 0.7
    }
    return EvidenceSet(values)


def oracle_check(seed: int, cases: int) -> float:
    """Max |engine - oracle| posterior deviation over ``cases`` random runs."""
    from .inference import infer

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        network = random_network(rng)
        evidence = random_evidence(rng, network)
        fast = infer(network, evidence)
        slow = oracle_infer(network, evidence)
        for skill in fast.posteriors:
            worst = max(worst, abs(fast.posteriors[skill] - slow.posteriors[skill]))
    return worst
