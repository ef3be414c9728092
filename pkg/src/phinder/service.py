"""Session-hosting HTTP + WebSocket service.

The server owns authoritative time: every engine call is stamped with the
server clock, and client-supplied timestamps are ignored. State views for an
unresolved worm never contain its label, its intended concepts, or detector
findings; the browser cannot read the answer out of the wire.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import pickle
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import engine
from .detector import BrandDirectory, RuleConfig, default_brand_directory, default_rule_config
from .engine import (
    ActionKind,
    EngineError,
    Feedback,
    GameSession,
    Phase,
    PlayerAction,
    PlayerProfile,
    ReplayWriter,
    progress_report,
)
from .generator import Corpus, LevelConfig, bundled_corpus, default_level_configs, validate_corpus
from .model import PhishingConcept, concept_catalog, content_display_text, content_kind

DEFAULT_IDLE_SUSPEND_SECONDS = 30 * 60


class CreateSessionBody(BaseModel):
    player: str
    level: int = 1
    # fixed seed makes the worm sequence reproducible (demos, tests)
    seed: Optional[int] = None


class ActionBody(BaseModel):
    action: str
    concept: Optional[str] = None


@dataclass
class SessionRuntime:
    sess: GameSession
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    sockets: list = field(default_factory=list)
    last_action_at: float = 0.0


# --- views ------------------------------------------------------------------------

def feedback_view(feedback: Feedback, findings: Optional[list[dict]] = None) -> dict:
    view = {
        "outcome": feedback.outcome.value,
        "advice": list(feedback.advice),
        "points_delta": feedback.points_delta,
        "lives_delta": feedback.lives_delta,
        "medal_awarded": feedback.medal_awarded,
        "quiz_correct": feedback.quiz_correct,
    }
    if findings is not None:
        view["findings"] = findings
    return view


def _quiz_options() -> list[dict]:
    return [{"concept": c.value, "description": d} for c, d in concept_catalog()]


def state_view(sess: GameSession, now: float) -> dict:
    """Client-facing projection. Never includes ground truth, intended
    concepts, or findings for the active unresolved worm."""
    st = sess.state
    worm = st.active_worm
    worm_view = None
    if worm is not None:
        worm_view = {
            "id": worm.id,
            "kind": content_kind(worm.content),
            "text": content_display_text(worm.content),
            "bonus": worm.bonus,
            "bonus_remaining": (
                max(st.bonus_deadline - now, 0.0) if st.bonus_deadline is not None else None
            ),
        }
    view = {
        "session_id": st.session_id,
        "player_id": sess.profile.player_id,
        "level": st.level,
        "levels_total": sess.max_level,
        "phase": st.phase.value,
        "score": st.score,
        "lives": st.lives,
        "clock_remaining": round(st.level_clock_remaining, 3),
        "worms_presented": st.worms_presented,
        "worms_resolved": st.worms_resolved,
        "worm_count": sess.level_config().worm_count,
        "medals": [{"level": m.level, "worm_id": m.worm_id} for m in st.medals],
        "active_worm": worm_view,
        "quiz": {"options": _quiz_options()} if st.phase is Phase.AWAITING_CONCEPT_ID else None,
        "last_feedback": feedback_view(st.last_feedback) if st.last_feedback else None,
    }
    return view


def progress_view(profile: PlayerProfile, levels_total: int) -> dict:
    summary = progress_report(profile, levels_total)
    return {
        "player_id": summary.player_id,
        "levels_total": summary.levels_total,
        "levels_completed": summary.levels_completed,
        "levels_remaining": summary.levels_total - summary.levels_completed,
        "journey_position": summary.journey_position,
        "total_score": summary.total_score,
        "medals": [{"level": m.level, "worm_id": m.worm_id} for m in summary.medals],
        "per_concept": {
            c.value: dict(stats) for c, stats in sorted(
                summary.per_concept.items(), key=lambda kv: kv[0].value
            )
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
            }
            for e in profile.training_log
        ],
    }


# --- the application --------------------------------------------------------------

class PhinderService:
    """All mutable server state; one instance per app."""

    def __init__(
        self,
        data_dir: Optional[Path] = None,
        corpus: Optional[Corpus] = None,
        brands: Optional[BrandDirectory] = None,
        rules: Optional[RuleConfig] = None,
        level_configs: Optional[dict[int, LevelConfig]] = None,
        clock=time.time,
        idle_suspend_seconds: float = DEFAULT_IDLE_SUSPEND_SECONDS,
    ):
        self.data_dir = Path(data_dir) if data_dir else None
        self.corpus = corpus or bundled_corpus()
        self.brands = brands or default_brand_directory()
        self.rules = rules or default_rule_config()
        self.level_configs = level_configs or default_level_configs()
        self.clock = clock
        self.idle_suspend_seconds = idle_suspend_seconds
        self.sessions: dict[str, SessionRuntime] = {}
        self.profiles: dict[str, PlayerProfile] = {}
        self.session_counter = 0
        bad = validate_corpus(self.corpus, self.brands, self.rules)
        if bad:
            raise ValueError(f"corpus is not clean: {[e.item_id for e in bad]}")
        if self.data_dir:
            for sub in ("players", "replays", "sessions"):
                (self.data_dir / sub).mkdir(parents=True, exist_ok=True)

    # - persistence -
    def _profile_path(self, player_id: str) -> Optional[Path]:
        return self.data_dir / "players" / f"{player_id}.json" if self.data_dir else None

    def load_profile(self, player_id: str) -> PlayerProfile:
        if player_id in self.profiles:
            return self.profiles[player_id]
        path = self._profile_path(player_id)
        if path and path.exists():
            profile = PlayerProfile.from_record(json.loads(path.read_text("utf-8")))
        else:
            profile = PlayerProfile(player_id=player_id)
        self.profiles[player_id] = profile
        return profile

    def save_profile(self, profile: PlayerProfile) -> None:
        path = self._profile_path(profile.player_id)
        if path:
            path.write_text(json.dumps(profile.to_record(), indent=1), "utf-8")

    def has_profile(self, player_id: str) -> bool:
        if player_id in self.profiles:
            return True
        path = self._profile_path(player_id)
        return bool(path and path.exists())

    def _suspended_path(self, session_id: str) -> Optional[Path]:
        return self.data_dir / "sessions" / f"{session_id}.pkl" if self.data_dir else None

    def suspend_session(self, session_id: str) -> None:
        runtime = self.sessions.get(session_id)
        path = self._suspended_path(session_id)
        if runtime is None or path is None:
            return
        envelope = {"sess": runtime.sess, "suspended_at": self.clock()}
        path.write_bytes(pickle.dumps(envelope))
        del self.sessions[session_id]

    def resume_session(self, session_id: str) -> Optional[SessionRuntime]:
        path = self._suspended_path(session_id)
        if path is None or not path.exists():
            return None
        envelope = pickle.loads(path.read_bytes())
        path.unlink()
        sess: GameSession = envelope["sess"]
        # suspended wall time does not count against the player
        engine.shift_clock_anchor(sess, self.clock() - envelope["suspended_at"])
        runtime = SessionRuntime(sess=sess, last_action_at=self.clock())
        self.sessions[session_id] = runtime
        self.profiles[sess.profile.player_id] = sess.profile
        return runtime

    def get_runtime(self, session_id: str) -> SessionRuntime:
        runtime = self.sessions.get(session_id) or self.resume_session(session_id)
        if runtime is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return runtime

    # - session lifecycle -
    def create_session(self, player_id: str, level: int, seed: Optional[int] = None) -> SessionRuntime:
        profile = self.load_profile(player_id)
        self.session_counter += 1
        if seed is None:
            seed = int(self.clock() * 1000) ^ (self.session_counter << 48)
        session_id = f"s{self.session_counter:06d}-{seed & 0xFFFFFFFF:08x}"
        replay = None
        if self.data_dir:
            replay = ReplayWriter(self.data_dir / "replays" / f"{session_id}.jsonl")
        sess = engine.new_session(
            player_id,
            level,
            seed,
            level_configs=self.level_configs,
            corpus=self.corpus,
            brands=self.brands,
            rules=self.rules,
            profile=profile,
            replay=replay,
            session_id=session_id,
            validate=False,
        )
        runtime = SessionRuntime(sess=sess, last_action_at=self.clock())
        self.sessions[session_id] = runtime
        self.save_profile(profile)
        return runtime

    def suspend_idle(self) -> None:
        now = self.clock()
        for sid, runtime in list(self.sessions.items()):
            if runtime.sockets:
                continue
            if now - runtime.last_action_at > self.idle_suspend_seconds:
                self.suspend_session(sid)


async def _broadcast(runtime: SessionRuntime, frame: dict) -> None:
    dead = []
    for ws in runtime.sockets:
        try:
            await ws.send_json(frame)
        except Exception:
            dead.append(ws)
    for ws in dead:
        with contextlib.suppress(ValueError):
            runtime.sockets.remove(ws)


def _engine_error_response(exc: EngineError) -> JSONResponse:
    return JSONResponse(status_code=409, content={"error": exc.code, "message": str(exc)})


def create_app(
    data_dir: Optional[Path] = None,
    corpus: Optional[Corpus] = None,
    brands: Optional[BrandDirectory] = None,
    rules: Optional[RuleConfig] = None,
    level_configs: Optional[dict[int, LevelConfig]] = None,
    static_dir: Optional[Path] = None,
    clock=time.time,
    tick_interval: float = 1.0,
    idle_suspend_seconds: float = DEFAULT_IDLE_SUSPEND_SECONDS,
) -> FastAPI:
    service = PhinderService(
        data_dir=data_dir,
        corpus=corpus,
        brands=brands,
        rules=rules,
        level_configs=level_configs,
        clock=clock,
        idle_suspend_seconds=idle_suspend_seconds,
    )

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_tick_loop(service, tick_interval))
        yield
        task.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await task

    app = FastAPI(title="phinder", lifespan=lifespan)
    app.state.service = service
    # the client may be served from a dev server on another port; the API
    # carries no credentials beyond a player name
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    async def create_session(body: CreateSessionBody):
        if body.level not in service.level_configs:
            raise HTTPException(status_code=400, detail=f"unknown level {body.level}")
        runtime = service.create_session(body.player, body.level, seed=body.seed)
        return state_view(runtime.sess, service.clock())

    @app.get("/v1/sessions/{session_id}")
    async def get_state(session_id: str):
        runtime = service.get_runtime(session_id)
        async with runtime.lock:
            return state_view(runtime.sess, service.clock())

    @app.post("/v1/sessions/{session_id}/actions")
    async def submit_action(session_id: str, body: ActionBody):
        runtime = service.get_runtime(session_id)
        async with runtime.lock:
            sess = runtime.sess
            now = service.clock()
            runtime.last_action_at = now
            try:
                feedback_dict = _apply(service, sess, body, now)
            except EngineError as exc:
                return _engine_error_response(exc)
            service.save_profile(sess.profile)
            view = state_view(sess, now)
            await _broadcast(runtime, {"type": "state", "state": view})
            return {"feedback": feedback_dict, "state": view}

    @app.get("/v1/players/{player_id}/progress")
    async def get_progress(player_id: str):
        if not service.has_profile(player_id):
            raise HTTPException(status_code=404, detail="unknown player")
        profile = service.load_profile(player_id)
        return progress_view(profile, levels_total=max(service.level_configs))

    @app.websocket("/v1/sessions/{session_id}/stream")
    async def stream(ws: WebSocket, session_id: str):
        try:
            runtime = service.get_runtime(session_id)
        except HTTPException:
            await ws.close(code=4004)
            return
        await ws.accept()
        runtime.sockets.append(ws)
        try:
            async with runtime.lock:
                await ws.send_json(
                    {"type": "state", "state": state_view(runtime.sess, service.clock())}
                )
            while True:
                await ws.receive_text()  # inbound frames are ignored; REST mutates
        except WebSocketDisconnect:
            pass
        finally:
            with contextlib.suppress(ValueError):
                runtime.sockets.remove(ws)

    if static_dir and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="web")

    return app


def _apply(service: PhinderService, sess: GameSession, body: ActionBody, now: float) -> Optional[dict]:
    """Run one engine operation; returns the feedback view (or None)."""
    action_name = body.action
    if action_name == "begin_level":
        engine.begin_level(sess, now)
        return None
    if action_name == "advance_level":
        engine.advance_level(sess)
        return None
    if action_name == "retry_level":
        engine.retry_level(sess)
        return None

    try:
        kind = ActionKind(action_name)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"unknown action {action_name!r}")
    concept = None
    if kind is ActionKind.IDENTIFY_CONCEPT:
        if body.concept is None:
            raise HTTPException(status_code=400, detail="identify_concept needs a concept")
        try:
            concept = PhishingConcept(body.concept)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown concept {body.concept!r}")

    worm = sess.state.active_worm
    feedback = engine.apply_action(sess, PlayerAction(kind, concept), now)
    if feedback is None:
        return None

    findings = None
    resolved = feedback.outcome.value.startswith(("correct", "wrong"))
    if resolved and worm is not None:
        report = sess.report_for(worm)
        findings = [
            {
                "concept": e.concept.value,
                "field": e.span.field_name,
                "byte_start": e.span.byte_start,
                "byte_end": e.span.byte_end,
                "detail": e.detail,
            }
            for e in report.findings
        ]
    return feedback_view(feedback, findings)


async def _tick_loop(service: PhinderService, interval: float) -> None:
    while True:
        await asyncio.sleep(interval)
        now = service.clock()
        for runtime in list(service.sessions.values()):
            async with runtime.lock:
                sess = runtime.sess
                phase_before = sess.state.phase
                feedback = engine.tick(sess, now)
                st = sess.state
                frame = {
                    "type": "clock",
                    "clock_remaining": round(st.level_clock_remaining, 3),
                    "phase": st.phase.value,
                    "bonus_remaining": (
                        max(st.bonus_deadline - now, 0.0)
                        if st.bonus_deadline is not None
                        else None
                    ),
                }
                await _broadcast(runtime, frame)
                if feedback is not None or st.phase is not phase_before:
                    await _broadcast(
                        runtime, {"type": "state", "state": state_view(sess, now)}
                    )
        service.suspend_idle()
