"""The deterministic game state machine.

Levels, lives, scoring, the level clock, the three-action protocol, bonus
worms, medals, the concept-identification quiz, and player-profile knowledge
tracking. Time never comes from the system clock: every operation takes the
caller's timestamp, which makes sessions replayable bit-for-bit from their
logs.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace as dc_replace
from enum import Enum
from pathlib import Path
from typing import Optional

from .detector import (
    BrandDirectory,
    RuleConfig,
    default_brand_directory,
    default_rule_config,
    detect,
)
from .generator import (
    Corpus,
    LevelConfig,
    bundled_corpus,
    default_level_configs,
    generate_worm,
    validate_corpus,
)
from .model import (
    DetectionReport,
    GroundTruth,
    PhishingConcept,
    Worm,
    content_display_text,
    content_kind,
)

POINTS_CORRECT = 100
QUIZ_BONUS = 50
SHIFU_COST = 60.0
LIVES_PER_LEVEL = 5

ADVICE_CLEAN = (
    "Shifu looked this worm over and found nothing wrong; it is safe to eat."
)
ADVICE_WRONG_AVOID = (
    "that worm was actually safe; nothing about it matched a known trick, "
    "and passing up good worms keeps you small"
)


class Phase(Enum):
    LEVEL_INTRO = "level_intro"
    AWAITING_DECISION = "awaiting_decision"
    AWAITING_CONCEPT_ID = "awaiting_concept_id"
    # Feedback is delivered inline with each action result; the machine never
    # parks in this phase, but the value stays part of the public vocabulary.
    FEEDBACK = "feedback"
    LEVEL_COMPLETE = "level_complete"
    LEVEL_FAILED = "level_failed"
    GAME_WON = "game_won"
    GAME_OVER = "game_over"


class EngineError(Exception):
    code = "engine_error"


class IllegalPhase(EngineError):
    code = "illegal_phase"


class IllegalAction(EngineError):
    code = "illegal_action"


class StaleTimestamp(EngineError):
    code = "stale_timestamp"


class UnknownLevel(EngineError):
    code = "unknown_level"


class InvalidCorpus(EngineError):
    code = "invalid_corpus"


class NoNextLevel(EngineError):
    code = "no_next_level"


class ActionKind(Enum):
    EAT = "eat"
    AVOID = "avoid"
    ASK_SHIFU = "ask_shifu"
    IDENTIFY_CONCEPT = "identify_concept"


@dataclass(frozen=True)
class PlayerAction:
    kind: ActionKind
    concept: Optional[PhishingConcept] = None

    def __post_init__(self) -> None:
        if (self.kind is ActionKind.IDENTIFY_CONCEPT) != (self.concept is not None):
            raise ValueError("identify_concept carries a concept; other actions do not")

    @classmethod
    def eat(cls) -> "PlayerAction":
        return cls(ActionKind.EAT)

    @classmethod
    def avoid(cls) -> "PlayerAction":
        return cls(ActionKind.AVOID)

    @classmethod
    def ask_shifu(cls) -> "PlayerAction":
        return cls(ActionKind.ASK_SHIFU)

    @classmethod
    def identify(cls, concept: PhishingConcept) -> "PlayerAction":
        return cls(ActionKind.IDENTIFY_CONCEPT, concept)


class Outcome(Enum):
    CORRECT_EAT = "correct_eat"
    CORRECT_AVOID = "correct_avoid"
    WRONG_EAT = "wrong_eat"
    WRONG_AVOID = "wrong_avoid"
    SHIFU_ADVICE = "shifu_advice"
    QUIZ_RESULT = "quiz_result"
    BONUS_EXPIRED = "bonus_expired"


@dataclass(frozen=True)
class Feedback:
    outcome: Outcome
    advice: tuple[str, ...]
    points_delta: int
    lives_delta: int
    medal_awarded: bool
    quiz_correct: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.outcome in (Outcome.WRONG_EAT, Outcome.WRONG_AVOID) and self.lives_delta != -1:
            raise ValueError("wrong classifications cost exactly one life")
        if (
            self.outcome in (Outcome.CORRECT_EAT, Outcome.CORRECT_AVOID)
            and self.points_delta < POINTS_CORRECT
        ):
            raise ValueError("correct classifications award at least 100 points")


# --- player profile -------------------------------------------------------------

@dataclass
class ConceptStats:
    seen: int = 0
    correct_classifications: int = 0
    correct_identifications: int = 0

    @property
    def accuracy(self) -> Optional[float]:
        return self.correct_classifications / self.seen if self.seen else None


@dataclass
class LevelHistory:
    level: int
    attempts: int = 0
    completions: int = 0
    decisions: int = 0
    decision_time_total: float = 0.0

    @property
    def mean_decision_time(self) -> Optional[float]:
        return self.decision_time_total / self.decisions if self.decisions else None


@dataclass(frozen=True)
class TrainingLogEntry:
    at: float
    worm_id: str
    worm_kind: str
    worm_summary: str
    action: str
    outcome: str
    advice: tuple[str, ...]
    points_delta: int = 0
    lives_delta: int = 0


@dataclass
class PlayerProfile:
    player_id: str
    total_score: int = 0
    medals: list = field(default_factory=list)
    per_concept: dict = field(default_factory=dict)
    per_level: dict = field(default_factory=dict)
    training_log: list = field(default_factory=list)

    def concept_stats(self, concept: PhishingConcept) -> ConceptStats:
        return self.per_concept.setdefault(concept, ConceptStats())

    def level_history(self, level: int) -> LevelHistory:
        return self.per_level.setdefault(level, LevelHistory(level))

    def log(self, entry: TrainingLogEntry) -> None:
        self.training_log.append(entry)

    # Stable-field-order text document; what the service persists.
    def to_record(self) -> dict:
        return {
            "player_id": self.player_id,
            "total_score": self.total_score,
            "medals": [{"level": m.level, "worm_id": m.worm_id} for m in self.medals],
            "per_concept": {
                c.value: {
                    "seen": s.seen,
                    "correct_classifications": s.correct_classifications,
                    "correct_identifications": s.correct_identifications,
                }
                for c, s in sorted(self.per_concept.items(), key=lambda kv: kv[0].value)
            },
            "per_level": {
                str(level): {
                    "attempts": h.attempts,
                    "completions": h.completions,
                    "decisions": h.decisions,
                    "decision_time_total": h.decision_time_total,
                }
                for level, h in sorted(self.per_level.items())
            },
            "training_log": [
                {
                    "at": e.at,
                    "worm_id": e.worm_id,
                    "worm_kind": e.worm_kind,
                    "worm_summary": e.worm_summary,
                    "action": e.action,
                    "outcome": e.outcome,
                    "advice": list(e.advice),
                    "points_delta": e.points_delta,
                    "lives_delta": e.lives_delta,
                }
                for e in self.training_log
            ],
        }

    @classmethod
    def from_record(cls, record: dict) -> "PlayerProfile":
        profile = cls(player_id=record["player_id"], total_score=record["total_score"])
        for m in record.get("medals", []):
            profile.medals.append(Medal(m["level"], m["worm_id"]))
        for name, s in record.get("per_concept", {}).items():
            profile.per_concept[PhishingConcept(name)] = ConceptStats(
                s["seen"], s["correct_classifications"], s["correct_identifications"]
            )
        for level, h in record.get("per_level", {}).items():
            profile.per_level[int(level)] = LevelHistory(
                int(level), h["attempts"], h["completions"], h["decisions"],
                h["decision_time_total"],
            )
        for e in record.get("training_log", []):
            profile.training_log.append(
                TrainingLogEntry(
                    e["at"], e["worm_id"], e["worm_kind"], e["worm_summary"],
                    e["action"], e["outcome"], tuple(e["advice"]),
                    e.get("points_delta", 0), e.get("lives_delta", 0),
                )
            )
        return profile


@dataclass(frozen=True)
class Medal:
    level: int
    worm_id: str


# --- game state -------------------------------------------------------------------

@dataclass
class GameState:
    session_id: str
    level: int
    phase: Phase = Phase.LEVEL_INTRO
    score: int = 0
    lives: int = LIVES_PER_LEVEL
    level_clock_remaining: float = 0.0
    worms_presented: int = 0
    worms_resolved: int = 0
    worm_seq: int = 0  # session-wide counter, keeps worm ids unique across levels
    # The clock is derived from absolute timestamps, not accumulated deltas, so
    # replaying a log reproduces it bit-for-bit no matter how many ticks the
    # live session saw: remaining = time_limit - shifu_spent - (now - anchor).
    clock_anchor: Optional[float] = None
    shifu_spent: float = 0.0
    active_worm: Optional[Worm] = None
    bonus_deadline: Optional[float] = None
    medals: list = field(default_factory=list)
    shifu_advice_pending: Optional[DetectionReport] = None
    last_feedback: Optional[Feedback] = None
    presented_at: Optional[float] = None
    last_settled_at: Optional[float] = None


class ReplayWriter:
    """Append-only line-delimited session log; optionally written through to disk."""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else None
        self.records: list[dict] = []
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, record: dict) -> None:
        self.records.append(record)
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=False) + "\n")

    def lines(self) -> list[str]:
        return [json.dumps(r, sort_keys=False) for r in self.records]


@dataclass
class GameSession:
    state: GameState
    profile: PlayerProfile
    rng: random.Random
    seed: int
    level_configs: dict[int, LevelConfig]
    corpus: Corpus
    brands: BrandDirectory
    rules: RuleConfig
    quiz_bonus: int = QUIZ_BONUS
    replay: Optional[ReplayWriter] = None
    _report_cache: dict = field(default_factory=dict)

    @property
    def max_level(self) -> int:
        return max(self.level_configs)

    def level_config(self) -> LevelConfig:
        return self.level_configs[self.state.level]

    def report_for(self, worm: Worm) -> DetectionReport:
        if worm.id not in self._report_cache:
            self._report_cache[worm.id] = detect(worm.content, self.brands, self.rules)
        return self._report_cache[worm.id]

    def _log(self, record: dict) -> None:
        if self.replay is not None:
            record["digest"] = state_digest(self)
            self.replay.write(record)


def state_digest(sess: GameSession) -> str:
    """Deterministic fingerprint of everything replay must reproduce."""
    st = sess.state
    payload = {
        "level": st.level,
        "phase": st.phase.value,
        "score": st.score,
        "lives": st.lives,
        "clock": st.level_clock_remaining,
        "clock_anchor": st.clock_anchor,
        "shifu_spent": st.shifu_spent,
        "presented": st.worms_presented,
        "resolved": st.worms_resolved,
        "worm_seq": st.worm_seq,
        "medals": [[m.level, m.worm_id] for m in st.medals],
        "active_worm": st.active_worm.id if st.active_worm else None,
        "bonus_deadline": st.bonus_deadline,
        "rng": hashlib.sha256(repr(sess.rng.getstate()).encode()).hexdigest()[:16],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def corpus_fingerprint(corpus: Corpus) -> str:
    h = hashlib.sha256()
    for item in corpus.items():
        h.update(item.id.encode())
        h.update(content_display_text(item.content).encode())
    return h.hexdigest()[:16]


def new_session(
    player_id: str,
    start_level: int,
    seed: int,
    level_configs: Optional[dict[int, LevelConfig]] = None,
    corpus: Optional[Corpus] = None,
    brands: Optional[BrandDirectory] = None,
    rules: Optional[RuleConfig] = None,
    profile: Optional[PlayerProfile] = None,
    replay: Optional[ReplayWriter] = None,
    session_id: Optional[str] = None,
    validate: bool = True,
) -> GameSession:
    configs = level_configs or default_level_configs()
    if start_level not in configs:
        raise UnknownLevel(f"no level {start_level}; levels are {sorted(configs)}")
    corpus = corpus or bundled_corpus()
    brands = brands or default_brand_directory()
    rules = rules or default_rule_config()
    if validate and validate_corpus(corpus, brands, rules):
        raise InvalidCorpus("corpus contains items the detector flags; run validate first")

    session_id = session_id or f"{player_id}-{start_level}-{seed:x}"
    state = GameState(
        session_id=session_id,
        level=start_level,
        level_clock_remaining=configs[start_level].time_limit,
    )
    sess = GameSession(
        state=state,
        profile=profile or PlayerProfile(player_id=player_id),
        rng=random.Random(seed),
        seed=seed,
        level_configs=configs,
        corpus=corpus,
        brands=brands,
        rules=rules,
        replay=replay,
    )
    if replay is not None:
        replay.write(
            {
                "type": "session",
                "session_id": session_id,
                "player_id": player_id,
                "level": start_level,
                "seed": seed,
                "quiz_bonus": sess.quiz_bonus,
                "corpus_fingerprint": corpus_fingerprint(corpus),
            }
        )
    return sess


# --- transitions ------------------------------------------------------------------

def _fail_level(sess: GameSession) -> None:
    st = sess.state
    st.phase = Phase.LEVEL_FAILED
    st.active_worm = None
    st.bonus_deadline = None
    st.presented_at = None
    st.shifu_advice_pending = None


def _recompute_clock(sess: GameSession) -> None:
    st = sess.state
    st.level_clock_remaining = (
        sess.level_config().time_limit - st.shifu_spent - (st.last_settled_at - st.clock_anchor)
    )


def _settle(sess: GameSession, now: float) -> bool:
    """Deduct wall time from the level clock; returns True if a bonus expired."""
    st = sess.state
    if now > st.last_settled_at:
        st.last_settled_at = now
        _recompute_clock(sess)
        if st.level_clock_remaining <= 0:
            st.level_clock_remaining = 0.0
            _fail_level(sess)
            return False
    if (
        st.bonus_deadline is not None
        and now > st.bonus_deadline
        and st.active_worm is not None
    ):
        st.active_worm = dc_replace(st.active_worm, bonus=False)
        st.bonus_deadline = None
        return True
    return False


def _present_worm(sess: GameSession, at: float) -> None:
    st = sess.state
    cfg = sess.level_config()
    st.worm_seq += 1
    worm, _ = generate_worm(
        cfg, sess.corpus, sess.brands, sess.rules, sess.rng,
        worm_id=f"{st.session_id}-w{st.worm_seq:04d}",
    )
    st.active_worm = worm
    st.presented_at = at
    st.worms_presented += 1
    st.bonus_deadline = at + cfg.bonus_window if worm.bonus else None
    st.shifu_advice_pending = None
    st.phase = Phase.AWAITING_DECISION


def begin_level(sess: GameSession, at: float) -> None:
    st = sess.state
    if st.phase is not Phase.LEVEL_INTRO:
        raise IllegalPhase(f"begin_level requires level_intro, found {st.phase.value}")
    st.last_settled_at = at
    st.clock_anchor = at
    st.shifu_spent = 0.0
    sess.profile.level_history(st.level).attempts += 1
    _present_worm(sess, at)
    sess._log({"type": "begin_level", "at": at})


def _worm_summary(worm: Worm) -> str:
    text = content_display_text(worm.content)
    first_line = text.splitlines()[0] if text else ""
    return first_line[:80]


def _conclude_worm(sess: GameSession, at: float) -> None:
    st = sess.state
    st.active_worm = None
    st.bonus_deadline = None
    st.presented_at = None
    st.shifu_advice_pending = None
    if st.worms_resolved >= sess.level_config().worm_count:
        sess.profile.level_history(st.level).completions += 1
        st.phase = Phase.GAME_WON if st.level >= sess.max_level else Phase.LEVEL_COMPLETE
    else:
        _present_worm(sess, at)


def _classify(sess: GameSession, action: PlayerAction, at: float) -> Feedback:
    st = sess.state
    worm = st.active_worm
    truth_phish = worm.ground_truth is GroundTruth.PHISHING
    correct = (action.kind is ActionKind.AVOID) == truth_phish
    report = sess.report_for(worm)

    history = sess.profile.level_history(st.level)
    history.decisions += 1
    history.decision_time_total += max(at - st.presented_at, 0.0)
    for concept in worm.intended_concepts:
        stats = sess.profile.concept_stats(concept)
        stats.seen += 1
        if correct:
            stats.correct_classifications += 1

    st.worms_resolved += 1
    if correct:
        st.score += POINTS_CORRECT
        sess.profile.total_score += POINTS_CORRECT
        medal = worm.bonus  # survives only if resolved before the bonus deadline
        if medal:
            m = Medal(st.level, worm.id)
            st.medals.append(m)
            sess.profile.medals.append(m)
        outcome = Outcome.CORRECT_AVOID if action.kind is ActionKind.AVOID else Outcome.CORRECT_EAT
        feedback = Feedback(outcome, (), POINTS_CORRECT, 0, medal)
        if truth_phish:
            # Shifu asks what gave the worm away before moving on.
            st.bonus_deadline = None
            st.phase = Phase.AWAITING_CONCEPT_ID
        else:
            _conclude_worm(sess, at)
    else:
        st.lives -= 1
        advice = report.advice if truth_phish else (ADVICE_WRONG_AVOID,)
        outcome = Outcome.WRONG_EAT if action.kind is ActionKind.EAT else Outcome.WRONG_AVOID
        feedback = Feedback(outcome, advice, 0, -1, False)
        if st.lives <= 0:
            st.phase = Phase.GAME_OVER
            st.active_worm = None
            st.bonus_deadline = None
            st.presented_at = None
        else:
            _conclude_worm(sess, at)

    sess.profile.log(
        TrainingLogEntry(
            at, worm.id, content_kind(worm.content), _worm_summary(worm),
            action.kind.value, feedback.outcome.value, feedback.advice,
            feedback.points_delta, feedback.lives_delta,
        )
    )
    return feedback


def _ask_shifu(sess: GameSession, at: float) -> Feedback:
    st = sess.state
    worm = st.active_worm
    st.shifu_spent += SHIFU_COST
    _recompute_clock(sess)
    report = sess.report_for(worm)
    advice = report.advice or (ADVICE_CLEAN,)
    st.shifu_advice_pending = report
    feedback = Feedback(Outcome.SHIFU_ADVICE, advice, 0, 0, False)
    if st.level_clock_remaining <= 0:
        st.level_clock_remaining = 0.0
        _fail_level(sess)
    sess.profile.log(
        TrainingLogEntry(
            at, worm.id, content_kind(worm.content), _worm_summary(worm),
            ActionKind.ASK_SHIFU.value, feedback.outcome.value, advice,
        )
    )
    return feedback


def _answer_quiz(sess: GameSession, action: PlayerAction, at: float) -> Feedback:
    st = sess.state
    worm = st.active_worm
    correct = action.concept in worm.intended_concepts
    points = sess.quiz_bonus if correct else 0
    if correct:
        st.score += points
        sess.profile.total_score += points
        sess.profile.concept_stats(action.concept).correct_identifications += 1
    feedback = Feedback(Outcome.QUIZ_RESULT, (), points, 0, False, quiz_correct=correct)
    sess.profile.log(
        TrainingLogEntry(
            at, worm.id, content_kind(worm.content), _worm_summary(worm),
            f"{ActionKind.IDENTIFY_CONCEPT.value}:{action.concept.value}",
            feedback.outcome.value, (), feedback.points_delta, 0,
        )
    )
    _conclude_worm(sess, at)
    return feedback


def apply_action(sess: GameSession, action: PlayerAction, at: float) -> Optional[Feedback]:
    """Apply one player action at the given timestamp.

    Returns the feedback, or None when the level clock ran out before the
    action landed (the state is then LEVEL_FAILED).
    """
    st = sess.state
    if st.phase not in (Phase.AWAITING_DECISION, Phase.AWAITING_CONCEPT_ID):
        raise IllegalPhase(f"no actions accepted in phase {st.phase.value}")
    if at < st.last_settled_at:
        raise StaleTimestamp(f"timestamp {at} precedes {st.last_settled_at}")
    if action.kind is ActionKind.IDENTIFY_CONCEPT and st.phase is not Phase.AWAITING_CONCEPT_ID:
        raise IllegalAction("identify_concept is only legal during the quiz")
    if action.kind is not ActionKind.IDENTIFY_CONCEPT and st.phase is Phase.AWAITING_CONCEPT_ID:
        raise IllegalAction("the quiz must be answered before anything else")

    _settle(sess, at)
    if st.phase is Phase.LEVEL_FAILED:
        sess._log(
            {"type": "action", "at": at, "action": action.kind.value,
             "concept": action.concept.value if action.concept else None,
             "outcome": None}
        )
        return None

    if action.kind in (ActionKind.EAT, ActionKind.AVOID):
        feedback = _classify(sess, action, at)
    elif action.kind is ActionKind.ASK_SHIFU:
        feedback = _ask_shifu(sess, at)
    else:
        feedback = _answer_quiz(sess, action, at)

    st.last_feedback = feedback
    sess._log(
        {"type": "action", "at": at, "action": action.kind.value,
         "concept": action.concept.value if action.concept else None,
         "outcome": feedback.outcome.value}
    )
    return feedback


def tick(sess: GameSession, now: float) -> Optional[Feedback]:
    """Settle clocks without a player action; idempotent for past timestamps."""
    st = sess.state
    if st.phase not in (Phase.AWAITING_DECISION, Phase.AWAITING_CONCEPT_ID):
        return None
    if now <= st.last_settled_at:
        return None
    expired = _settle(sess, now)
    if st.phase is Phase.LEVEL_FAILED:
        sess._log({"type": "tick", "at": now})
        return None
    if expired:
        feedback = Feedback(Outcome.BONUS_EXPIRED, (), 0, 0, False)
        st.last_feedback = feedback
        sess._log({"type": "tick", "at": now})
        return feedback
    return None


def advance_level(sess: GameSession) -> None:
    st = sess.state
    if st.phase is Phase.GAME_WON:
        raise NoNextLevel("the final level is already complete")
    if st.phase is not Phase.LEVEL_COMPLETE:
        raise IllegalPhase(f"advance_level requires level_complete, found {st.phase.value}")
    st.level += 1
    _reset_level(sess)
    sess._log({"type": "advance_level"})


def retry_level(sess: GameSession) -> None:
    """After a timeout the same level restarts with fresh clock, lives and worms."""
    st = sess.state
    if st.phase is not Phase.LEVEL_FAILED:
        raise IllegalPhase(f"retry_level requires level_failed, found {st.phase.value}")
    _reset_level(sess)
    sess._log({"type": "retry_level"})


def _reset_level(sess: GameSession) -> None:
    st = sess.state
    st.lives = LIVES_PER_LEVEL
    st.level_clock_remaining = sess.level_config().time_limit
    st.worms_presented = 0
    st.worms_resolved = 0
    st.clock_anchor = None
    st.shifu_spent = 0.0
    st.active_worm = None
    st.bonus_deadline = None
    st.presented_at = None
    st.last_settled_at = None
    st.shifu_advice_pending = None
    st.last_feedback = None
    st.phase = Phase.LEVEL_INTRO


def shift_clock_anchor(sess: GameSession, delta: float) -> None:
    """Move the level clock forward in wall time without consuming any of it.

    Used when a suspended session resumes: the wall time spent suspended must
    not count against the player.
    """
    st = sess.state
    if delta <= 0:
        return
    if st.clock_anchor is not None:
        st.clock_anchor += delta
    if st.last_settled_at is not None:
        st.last_settled_at += delta
    if st.bonus_deadline is not None:
        st.bonus_deadline += delta
    if st.presented_at is not None:
        st.presented_at += delta
    sess._log({"type": "suspend_shift", "delta": delta})


# --- progress ---------------------------------------------------------------------

@dataclass(frozen=True)
class ProgressSummary:
    player_id: str
    levels_total: int
    levels_completed: int
    journey_position: float
    total_score: int
    medals: tuple[Medal, ...]
    per_concept: dict
    training_entries: int


def progress_report(profile: PlayerProfile, levels_total: int = 5) -> ProgressSummary:
    completed = sum(1 for h in profile.per_level.values() if h.completions > 0)
    per_concept = {
        c: {
            "seen": s.seen,
            "correct_classifications": s.correct_classifications,
            "correct_identifications": s.correct_identifications,
            "accuracy": s.accuracy,
        }
        for c, s in profile.per_concept.items()
    }
    return ProgressSummary(
        player_id=profile.player_id,
        levels_total=levels_total,
        levels_completed=completed,
        journey_position=completed / levels_total if levels_total else 0.0,
        total_score=profile.total_score,
        medals=tuple(profile.medals),
        per_concept=per_concept,
        training_entries=len(profile.training_log),
    )


# --- replay -----------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayDivergence:
    index: int
    record_type: str
    expected: str
    actual: str


def replay_session(
    lines: list[str],
    level_configs: Optional[dict[int, LevelConfig]] = None,
    corpus: Optional[Corpus] = None,
    brands: Optional[BrandDirectory] = None,
    rules: Optional[RuleConfig] = None,
) -> tuple[GameSession, list[ReplayDivergence]]:
    """Re-drive a recorded session and report digest mismatches."""
    records = [json.loads(line) for line in lines if line.strip()]
    if not records or records[0].get("type") != "session":
        raise ValueError("replay log must start with a session record")
    header = records[0]
    corpus = corpus or bundled_corpus()
    if "corpus_fingerprint" in header and corpus_fingerprint(corpus) != header["corpus_fingerprint"]:
        raise ValueError("corpus differs from the one the log was recorded against")

    sess = new_session(
        header["player_id"],
        header["level"],
        header["seed"],
        level_configs=level_configs,
        corpus=corpus,
        brands=brands,
        rules=rules,
        session_id=header["session_id"],
    )
    sess.quiz_bonus = header.get("quiz_bonus", QUIZ_BONUS)

    divergences = []
    for index, record in enumerate(records[1:], start=1):
        kind = record["type"]
        if kind == "begin_level":
            begin_level(sess, record["at"])
        elif kind == "action":
            concept = PhishingConcept(record["concept"]) if record.get("concept") else None
            action = PlayerAction(ActionKind(record["action"]), concept)
            apply_action(sess, action, record["at"])
        elif kind == "tick":
            tick(sess, record["at"])
        elif kind == "advance_level":
            advance_level(sess)
        elif kind == "retry_level":
            retry_level(sess)
        elif kind == "suspend_shift":
            shift_clock_anchor(sess, record["delta"])
        else:
            raise ValueError(f"unknown replay record type {kind!r}")
        actual = state_digest(sess)
        if "digest" in record and record["digest"] != actual:
            divergences.append(ReplayDivergence(index, kind, record["digest"], actual))
    return sess, divergences
