"""Local HTTP service: sessions against the engine plus lazy tree expansion.

One session per id, state held in process memory.  The engine replies
automatically whenever it is due, so a state returned to the caller is
always either the human's turn or final.  Error mapping: 400 illegal move,
404 unknown session, 409 move out of turn.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import formula as fm
from .formula import ParseError, parse, render
from .game import (
    CLIENT, SERVER, TURN_WORD, IllegalMoveError, interpret, render_move,
    tree_from_json,
)
from .semantics import DEFAULT_BANG_CAP, DEFAULT_BANG_MODE, unit_env
from .strategy import Engine, PlaySession, solve


class NewSession(BaseModel):
    formula: str
    atoms: dict | None = None
    humanSide: str = "client"
    bangCap: int | None = None
    bangMode: str | None = None


class MoveBody(BaseModel):
    move: str


class SolveBody(BaseModel):
    formula: str
    atoms: dict | None = None
    bangCap: int | None = None
    bangMode: str | None = None


@dataclass
class Session:
    id: str
    play: PlaySession
    human: str
    engine: Engine
    lock: threading.Lock = field(default_factory=threading.Lock)

    def view(self) -> dict:
        status = self.play.status()
        return {
            "turn": TURN_WORD[self.play.turn()],
            "legalMoves": [render_move(m) for m in self.play.legal_moves()]
            if status == "ongoing" else [],
            "history": [{"side": TURN_WORD[side], "move": move}
                        for side, move in self.play.trace],
            "terminated": status == "terminated",
            "stuckSide": TURN_WORD.get(self.play.stuck_side())
            if self.play.stuck_side() else None,
        }

    def engine_turns(self) -> None:
        engine_side = SERVER if self.human == CLIENT else CLIENT
        while (self.play.status() == "ongoing"
               and self.play.turn() == engine_side):
            self.play.apply(self.engine.pick(self.play.state))


def _env_from(atoms: dict | None, f: fm.Formula) -> dict:
    if atoms is None:
        return unit_env(f)
    try:
        return {name: tree_from_json(tree) for name, tree in atoms.items()}
    except (KeyError, ValueError, AttributeError) as exc:
        raise HTTPException(400, f"bad atom environment: {exc}") from exc


def _parse_or_400(text: str) -> fm.Formula:
    try:
        return parse(text)
    except ParseError as exc:
        raise HTTPException(400, f"cannot parse formula: {exc}") from exc


def build_app(cfg=None, engine_mode: str = "solve",
              engine_seed: int = 0) -> FastAPI:
    from .cli import Config
    cfg = cfg or Config()
    app = FastAPI(title="llgames session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    sessions: dict[str, Session] = {}

    def _interpret(f: fm.Formula, env: dict, cap: int | None,
                   mode: str | None):
        try:
            return interpret(f, env, cap=cap or cfg.bang_cap,
                             mode=mode or cfg.bang_mode)
        except KeyError as exc:
            raise HTTPException(400, str(exc.args[0])) from exc

    @app.post("/session")
    def create_session(body: NewSession) -> dict:
        if body.humanSide not in ("client", "server"):
            raise HTTPException(400, "humanSide must be client or server")
        if body.bangMode not in (None, "consistent", "stream"):
            raise HTTPException(400, "bangMode must be consistent or stream")
        f = _parse_or_400(body.formula)
        env = _env_from(body.atoms, f)
        p = _interpret(f, env, body.bangCap, body.bangMode)
        human = CLIENT if body.humanSide == "client" else SERVER
        engine_side = SERVER if human == CLIENT else CLIENT
        session = Session(
            id=uuid.uuid4().hex,
            play=PlaySession(p),
            human=human,
            engine=Engine(p, engine_side, mode=engine_mode,
                          seed=engine_seed),
        )
        session.engine_turns()
        sessions[session.id] = session
        return {"id": session.id, "state": session.view()}

    def _lookup(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return session

    @app.get("/session/{session_id}")
    def get_session(session_id: str) -> dict:
        return _lookup(session_id).view()

    @app.post("/session/{session_id}/move")
    def post_move(session_id: str, body: MoveBody) -> dict:
        session = _lookup(session_id)
        with session.lock:
            if (session.play.status() != "ongoing"
                    or session.play.turn() != session.human):
                raise HTTPException(409, "not your turn")
            try:
                session.play.apply_rendered(body.move)
            except IllegalMoveError as exc:
                raise HTTPException(400, str(exc)) from exc
            session.engine_turns()
            return session.view()

    @app.post("/solve")
    def solve_formula(body: SolveBody) -> dict:
        f = _parse_or_400(body.formula)
        env = _env_from(body.atoms, f)
        p = _interpret(f, env, body.bangCap, body.bangMode)
        return {"winner": solve(p).winner}

    @app.get("/game/tree")
    def game_tree(formula: str, path: str = "") -> dict:
        f = _parse_or_400(formula)
        p = _interpret(f, unit_env(f), None, None)
        state = p.initial
        for text in [t for t in path.split(",") if t]:
            matched = next((m for m in p.moves(state)
                            if render_move(m) == text), None)
            if matched is None:
                raise HTTPException(400, f"no move {text!r} at this node")
            state = p.apply(state, matched)
        return {
            "turn": TURN_WORD[p.turn(state)],
            "moves": [render_move(m) for m in p.moves(state)],
        }

    return app
