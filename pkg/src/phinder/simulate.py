"""Headless policy players that drive the engine directly.

Simulation bypasses the network layer on purpose: it is the fast,
deterministic way to exercise the full scoring/lives/clock mechanics, and the
logs it emits feed the replay checker.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .detector import BrandDirectory, RuleConfig
from .engine import (
    GameSession,
    Phase,
    PlayerAction,
    ReplayWriter,
    advance_level,
    apply_action,
    begin_level,
    new_session,
)
from .generator import Corpus, LevelConfig, derive_seed
from .model import CONCEPT_ORDER, GroundTruth, PhishingConcept, sort_concepts


@dataclass(frozen=True)
class PolicySpec:
    kind: str  # oracle | random | skill
    seed: int = 0
    accuracies: dict = field(default_factory=dict)  # PhishingConcept -> [0,1]

    def __post_init__(self) -> None:
        if self.kind not in ("oracle", "random", "skill"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        for concept, acc in self.accuracies.items():
            if not 0.0 <= acc <= 1.0:
                raise ValueError(f"accuracy out of [0,1] for {concept}: {acc}")


class OraclePolicy:
    """Classifies exactly as the detector does and always answers the quiz
    with the first intended concept; never asks Shifu."""

    def decide(self, sess: GameSession, worm) -> PlayerAction:
        report = sess.report_for(worm)
        if report.verdict is GroundTruth.PHISHING:
            return PlayerAction.avoid()
        return PlayerAction.eat()

    def quiz_answer(self, sess: GameSession, worm) -> PhishingConcept:
        return sort_concepts(worm.intended_concepts)[0]


class RandomPolicy:
    """Uniform coin-flip classification; uniform random quiz answers."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def decide(self, sess: GameSession, worm) -> PlayerAction:
        return PlayerAction.eat() if self.rng.random() < 0.5 else PlayerAction.avoid()

    def quiz_answer(self, sess: GameSession, worm) -> PhishingConcept:
        return CONCEPT_ORDER[self.rng.randrange(len(CONCEPT_ORDER))]


class SkillPolicy:
    """Per-concept success probabilities; a phishing worm is judged at the
    mean accuracy of its intended concepts, a clean worm at the overall mean."""

    def __init__(self, accuracies: dict, seed: int):
        self.accuracies = dict(accuracies)
        self.rng = random.Random(seed)

    def _accuracy_for(self, worm) -> float:
        if worm.intended_concepts:
            values = [self.accuracies.get(c, 0.5) for c in sort_concepts(worm.intended_concepts)]
            return sum(values) / len(values)
        if self.accuracies:
            return sum(self.accuracies.values()) / len(self.accuracies)
        return 0.5

    def decide(self, sess: GameSession, worm) -> PlayerAction:
        phishing = worm.ground_truth is GroundTruth.PHISHING
        correct = self.rng.random() < self._accuracy_for(worm)
        if correct == phishing:
            return PlayerAction.avoid()
        return PlayerAction.eat()

    def quiz_answer(self, sess: GameSession, worm) -> PhishingConcept:
        first = sort_concepts(worm.intended_concepts)[0]
        if self.rng.random() < self.accuracies.get(first, 0.5):
            return first
        others = [c for c in CONCEPT_ORDER if c is not first]
        return others[self.rng.randrange(len(others))]


def make_policy(spec: PolicySpec):
    if spec.kind == "oracle":
        return OraclePolicy()
    if spec.kind == "random":
        return RandomPolicy(spec.seed)
    return SkillPolicy(spec.accuracies, spec.seed)


@dataclass
class LevelRow:
    level: int
    worms: int = 0
    phish: int = 0
    score: int = 0
    lives_lost: int = 0
    medals: int = 0
    timeouts: int = 0
    completed: bool = False


def play_level(sess: GameSession, policy, t: float, dt: float = 0.0) -> tuple[LevelRow, float]:
    """Drive the current level from intro to a terminal phase."""
    st = sess.state
    row = LevelRow(level=st.level)
    score_before = st.score
    medals_before = len(st.medals)
    begin_level(sess, t)
    while st.phase in (Phase.AWAITING_DECISION, Phase.AWAITING_CONCEPT_ID):
        worm = st.active_worm
        if st.phase is Phase.AWAITING_DECISION:
            action = policy.decide(sess, worm)
            if worm.ground_truth is GroundTruth.PHISHING:
                row.phish += 1
            row.worms += 1
        else:
            action = PlayerAction.identify(policy.quiz_answer(sess, worm))
        t += dt
        feedback = apply_action(sess, action, t)
        if feedback is not None and feedback.lives_delta < 0:
            row.lives_lost += 1
    row.score = st.score - score_before
    row.medals = len(st.medals) - medals_before
    row.timeouts = 1 if st.phase is Phase.LEVEL_FAILED else 0
    row.completed = st.phase in (Phase.LEVEL_COMPLETE, Phase.GAME_WON)
    return row, t


def simulate_run(
    spec: PolicySpec,
    levels: list[int],
    seed: int,
    level_configs: Optional[dict[int, LevelConfig]] = None,
    corpus: Optional[Corpus] = None,
    brands: Optional[BrandDirectory] = None,
    rules: Optional[RuleConfig] = None,
    replay: Optional[ReplayWriter] = None,
) -> tuple[list[LevelRow], GameSession]:
    """Play one session through the requested (contiguous, ascending) levels."""
    if levels != list(range(levels[0], levels[0] + len(levels))):
        raise ValueError(f"levels must be contiguous ascending, got {levels}")
    policy = make_policy(spec)
    sess = new_session(
        f"sim-{spec.kind}",
        levels[0],
        seed,
        level_configs=level_configs,
        corpus=corpus,
        brands=brands,
        rules=rules,
        replay=replay,
    )
    rows = []
    t = 0.0
    for i, level in enumerate(levels):
        row, t = play_level(sess, policy, t)
        rows.append(row)
        if not row.completed:
            break
        if i + 1 < len(levels) and sess.state.phase is Phase.LEVEL_COMPLETE:
            advance_level(sess)
    return rows, sess


def run_decisions(
    spec: PolicySpec,
    n_decisions: int,
    seed: int,
    level: int = 1,
    level_configs: Optional[dict[int, LevelConfig]] = None,
    corpus: Optional[Corpus] = None,
    brands: Optional[BrandDirectory] = None,
    rules: Optional[RuleConfig] = None,
) -> tuple[int, int]:
    """Accumulate classification decisions across as many sessions as needed.

    Returns (decisions, wrong). Sessions that hit game-over or level-failure
    are simply replaced; quiz answers do not count as decisions.
    """
    policy = make_policy(spec)
    decisions = wrong = 0
    session_index = 0
    while decisions < n_decisions:
        sess = new_session(
            f"trial-{spec.kind}",
            level,
            derive_seed(seed, f"trial-{session_index}"),
            level_configs=level_configs,
            corpus=corpus,
            brands=brands,
            rules=rules,
            validate=session_index == 0,
        )
        session_index += 1
        t = 0.0
        begin_level(sess, t)
        st = sess.state
        while (
            st.phase in (Phase.AWAITING_DECISION, Phase.AWAITING_CONCEPT_ID)
            and decisions < n_decisions
        ):
            worm = st.active_worm
            if st.phase is Phase.AWAITING_DECISION:
                action = policy.decide(sess, worm)
                feedback = apply_action(sess, action, t)
                decisions += 1
                if feedback is not None and feedback.lives_delta < 0:
                    wrong += 1
            else:
                action = PlayerAction.identify(policy.quiz_answer(sess, worm))
                apply_action(sess, action, t)
    return decisions, wrong
