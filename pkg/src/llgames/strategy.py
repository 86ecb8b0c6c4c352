"""Winning-strategy machinery: solver, behaviors, referee, echo strategies.

The solver is backward induction memoized on canonical states: terminated
states are server wins, a client-turn state is a server win when every child
is (a stuck client in particular), a server-turn state when some child is.
server_wins_naive is the deliberately plain oracle for the same question: an
unmemoized walk of the full play tree, kept free of the solver's machinery so
the two can check each other.
"""

from __future__ import annotations

import random
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import formula as fm
from .game import (
    AtomMove, BudgetExceededError, Choice, Count, CLIENT, SERVER, TERMINATED,
    ExplicitTree, InComponent, InCopy, IllegalMoveError, InterpretedProtocol,
    Move, Protocol, atom_game, dual, encode_state, interpret, par_game,
    render_move,
)

Strategy = dict
History = tuple


@contextmanager
def _deep_recursion(limit: int):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class _Solver:
    def __init__(self, p: Protocol, node_budget: int | None = None) -> None:
        self.p = p
        self.budget = node_budget
        self.memo: dict = {}

    def win(self, state) -> bool:
        found = self.memo.get(state)
        if found is not None:
            return found
        if self.budget is not None and len(self.memo) >= self.budget:
            raise BudgetExceededError(
                f"solver exceeded {self.budget} states", self.budget)
        p = self.p
        turn = p.turn(state)
        if turn == TERMINATED:
            result = True
        elif turn == CLIENT:
            result = all(self.win(p.apply(state, m)) for m in p.moves(state))
        else:
            result = any(self.win(p.apply(state, m)) for m in p.moves(state))
        self.memo[state] = result
        return result


def server_wins(p: Protocol, node_budget: int | None = None) -> bool:
    """True when the server has a strategy that never leaves it stuck."""
    with _deep_recursion(4 * p.depth_bound() + 200):
        return _Solver(p, node_budget).win(p.initial)


def server_wins_naive(p: Protocol) -> bool:
    """Oracle: same question answered by brute recursion, no memoization."""
    def walk(state) -> bool:
        turn = p.turn(state)
        if turn == TERMINATED:
            return True
        if turn == CLIENT:
            for m in p.moves(state):
                if not walk(p.apply(state, m)):
                    return False
            return True
        for m in p.moves(state):
            if walk(p.apply(state, m)):
                return True
        return False

    with _deep_recursion(4 * p.depth_bound() + 200):
        return walk(p.initial)


@dataclass
class Solution:
    winner: str                  # "server" or "client"
    strategy: Strategy           # state -> move, for the winner's moves
    for_protocol: Protocol       # the game the strategy plays the server in

    def dump(self) -> list[tuple[str, str]]:
        return sorted((encode_state(s), render_move(m))
                      for s, m in self.strategy.items())


def solve(p: Protocol, node_budget: int | None = None) -> Solution:
    """Winner of the game plus a winning strategy.

    A client win is reported with the strategy that plays the server side of
    the dual game, which is the same thing seen from the other chair.
    """
    with _deep_recursion(4 * p.depth_bound() + 200):
        solver = _Solver(p, node_budget)
        if solver.win(p.initial):
            return Solution("server", _server_strategy(solver, p), p)
        d = dual(p)
        dsolver = _Solver(d, node_budget)
        if not dsolver.win(d.initial):
            raise AssertionError(
                "finite game with no winner on either side; this cannot happen")
        return Solution("client", _server_strategy(dsolver, d), d)


def _server_strategy(solver: _Solver, p: Protocol) -> Strategy:
    """First winning move at every server state reachable under the strategy."""
    strategy: Strategy = {}
    queue = [p.initial]
    seen = {p.initial}
    while queue:
        state = queue.pop()
        turn = p.turn(state)
        if turn == TERMINATED:
            continue
        if turn == CLIENT:
            nexts = [p.apply(state, m) for m in p.moves(state)]
        else:
            move = next(m for m in p.moves(state)
                        if solver.win(p.apply(state, m)))
            strategy[state] = move
            nexts = [p.apply(state, move)]
        for n in nexts:
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return strategy


def strategy_wins(p: Protocol, strategy: Mapping) -> bool:
    """True when every play following the strategy ends well for the server.

    Ending well means terminated, or the client to move with nothing legal.
    A reachable server state where the strategy is silent or illegal counts
    as a loss.
    """
    queue = [p.initial]
    seen = {p.initial}
    while queue:
        state = queue.pop()
        turn = p.turn(state)
        if turn == TERMINATED:
            continue
        moves = p.moves(state)
        if turn == SERVER:
            if not moves:
                return False
            move = strategy.get(state)
            if move is None or move not in moves:
                return False
            nexts = [p.apply(state, move)]
        else:
            nexts = [p.apply(state, m) for m in moves]
        for n in nexts:
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return True


# ------------------------------------------------- replication consistency

def _replication_divergence(state, move: Move) -> bool:
    """Does this server move answer an already-answered local position
    differently from the copy that answered it?"""
    if not (isinstance(state, tuple) and len(state) == 2 and state[0] == "run"
            and isinstance(move, InCopy)):
        return False
    histories = state[1]
    h = histories[move.index]
    return any(i != move.index and len(other) > len(h)
               and other[:len(h)] == h and other[len(h)] != move.inner
               for i, other in enumerate(histories))


def replication_consistent_plays(p: Protocol) -> bool:
    """True when no reachable play of a replication game can answer equal
    client prefixes unequally across copies.

    Quantifies over all plays, hence over the plays of every strategy.  On a
    game without replication states this is vacuously true.
    """
    queue = [p.initial]
    seen = {p.initial}
    while queue:
        state = queue.pop()
        if p.turn(state) == TERMINATED:
            continue
        for m in p.moves(state):
            if p.turn(state) == SERVER and _replication_divergence(state, m):
                return False
            nxt = p.apply(state, m)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def inconsistency_witness(
        p: Protocol, node_budget: int | None = None,
) -> tuple[Strategy, tuple[Move, ...]] | None:
    """A winning strategy for a replication game that answers equal client
    prefixes unequally, together with the play that reaches the unequal
    answer.  None when the server loses or every winning strategy is
    consistent over the reachable states.

    The search walks states reachable while the server only plays winning
    moves; the returned strategy follows the discovered path and falls back
    to first winning moves everywhere else, so it wins by construction.
    """
    with _deep_recursion(4 * p.depth_bound() + 200):
        solver = _Solver(p, node_budget)
        if not solver.win(p.initial):
            return None
        parent: dict = {p.initial: None}
        queue = [p.initial]
        hit: tuple | None = None
        at = 0
        while at < len(queue) and hit is None:
            state = queue[at]
            at += 1
            turn = p.turn(state)
            if turn == TERMINATED:
                continue
            for m in p.moves(state):
                nxt = p.apply(state, m)
                if turn == SERVER:
                    if not solver.win(nxt):
                        continue
                    if _replication_divergence(state, m):
                        hit = (state, m)
                        break
                if nxt not in parent:
                    parent[nxt] = (state, m)
                    queue.append(nxt)
        if hit is None:
            return None

        strategy: Strategy = {hit[0]: hit[1]}
        play = [hit[1]]
        back = parent[hit[0]]
        while back is not None:
            prev, move = back
            play.append(move)
            if p.turn(prev) == SERVER:
                strategy[prev] = move
            back = parent[prev]
        play.reverse()

        fill = [p.initial]
        seen = {p.initial}
        while fill:
            state = fill.pop()
            turn = p.turn(state)
            if turn == TERMINATED:
                continue
            if turn == SERVER:
                if state not in strategy:
                    strategy[state] = next(m for m in p.moves(state)
                                           if solver.win(p.apply(state, m)))
                nexts = [p.apply(state, strategy[state])]
            else:
                nexts = [p.apply(state, m) for m in p.moves(state)]
            for n in nexts:
                if n not in seen:
                    seen.add(n)
                    fill.append(n)
        return strategy, tuple(play)


# -------------------------------------------------------------- behaviors

def extract_behavior(p: Protocol, strategy: Mapping,
                     max_nodes: int = 200_000) -> frozenset[History]:
    """All plays that can arise when the server follows the strategy.

    The result contains every prefix of every such play, which is exactly
    the behavior determined by the strategy.  KeyError when the strategy is
    silent at a reachable server state.
    """
    plays: set[History] = set()
    queue: list[tuple[History, object]] = [((), p.initial)]
    while queue:
        history, state = queue.pop()
        if len(plays) >= max_nodes:
            raise BudgetExceededError(
                f"behavior exceeded {max_nodes} positions", max_nodes)
        plays.add(history)
        turn = p.turn(state)
        if turn == TERMINATED:
            continue
        if turn == CLIENT:
            moves: Iterable[Move] = p.moves(state)
        else:
            if state not in strategy:
                raise KeyError(
                    f"strategy has no move at server state {encode_state(state)}")
            moves = (strategy[state],)
        for m in moves:
            queue.append((history + (m,), p.step(state, m)))
    return frozenset(plays)


def is_behavior(p: Protocol, positions: Iterable[History],
                at_least_one: bool = False) -> bool:
    """Check the defining conditions of a behavior.

    The empty play belongs to it; a client-turn member has every one-move
    extension in it; a server-turn member has exactly one (at least one in
    the relaxed mode).  A member that is not a legal play of p is an error,
    not a False.
    """
    members = set(positions)

    def replay(history: History):
        state = p.initial
        for m in history:
            state = p.step(state, m)  # IllegalMoveError on bad members
        return state

    if () not in members:
        return False
    for history in members:
        state = replay(history)
        turn = p.turn(state)
        if turn == TERMINATED:
            continue
        extensions = [history + (m,) for m in p.moves(state)]
        inside = sum(1 for e in extensions if e in members)
        if turn == CLIENT and inside != len(extensions):
            return False
        if turn == SERVER:
            if at_least_one and inside < 1:
                return False
            if not at_least_one and inside != 1:
                return False
    return True


# ---------------------------------------------------------------- referee

class PlaySession:
    """Referee for one play: enforces legality, records the trace."""

    def __init__(self, p: Protocol) -> None:
        self.protocol = p
        self.state = p.initial
        self.history: list[Move] = []
        self.trace: list[tuple[str, str]] = []

    def turn(self) -> str:
        return self.protocol.turn(self.state)

    def legal_moves(self) -> tuple[Move, ...]:
        return self.protocol.moves(self.state)

    def status(self) -> str:
        turn = self.turn()
        if turn == TERMINATED:
            return "terminated"
        if not self.legal_moves():
            return "stuck"
        return "ongoing"

    def stuck_side(self) -> str | None:
        return self.turn() if self.status() == "stuck" else None

    def apply(self, move: Move) -> None:
        mover = self.turn()
        if mover == TERMINATED:
            raise IllegalMoveError("the play has already terminated")
        self.state = self.protocol.step(self.state, move)
        self.history.append(move)
        self.trace.append((mover, render_move(move)))

    def apply_rendered(self, text: str) -> Move:
        for m in self.legal_moves():
            if render_move(m) == text:
                self.apply(m)
                return m
        raise IllegalMoveError(f"no legal move renders as {text!r}")

    def trace_text(self) -> str:
        lines = [f"{i + 1}. {side} {move}"
                 for i, (side, move) in enumerate(self.trace)]
        lines.append(f"outcome: {self.status()}"
                     + (f" ({self.stuck_side()} stuck)"
                        if self.status() == "stuck" else ""))
        return "\n".join(lines)


def referee(p: Protocol) -> PlaySession:
    return PlaySession(p)


class Engine:
    """Move picker for the machine side of a refereed play.

    Plays the solved winning strategy when its side wins the game, and a
    seeded random legal move otherwise (or always, under mode "random").
    """

    def __init__(self, p: Protocol, side: str, mode: str = "solve",
                 seed: int = 0) -> None:
        if side not in (CLIENT, SERVER):
            raise ValueError(f"engine side must be client or server, got {side!r}")
        if mode not in ("solve", "random"):
            raise ValueError(f"engine mode must be solve or random, got {mode!r}")
        self.protocol = p
        self.side = side
        self.rng = random.Random(seed)
        self.strategy: Mapping | None = None
        if mode == "solve":
            solution = solve(p)
            if solution.winner == ("server" if side == SERVER else "client"):
                self.strategy = solution.strategy

    def pick(self, state) -> Move:
        if self.strategy is not None:
            move = self.strategy.get(state)
            if move is not None:
                return move
        moves = self.protocol.moves(state)
        if not moves:
            raise IllegalMoveError("engine is stuck: no legal move")
        return self.rng.choice(moves)


# ---------------------------------------------------------------- copycat

def copycat(tree: ExplicitTree) -> tuple[Protocol, Strategy]:
    """Echo strategy for the game (dual of g) par g.

    The server always repeats the client's latest unanswered move into the
    lagging component, so both components walk the same branch of the tree.
    States of the compound are path pairs; the lagging side is the shorter
    path, and the move to copy sits at its length in the longer path.
    """
    compound = interpret(fm.Par(fm.Dual(fm.Atom("a")), fm.Atom("a")),
                         {"a": tree})
    strategy: Strategy = {}
    queue = [compound.initial]
    seen = {compound.initial}
    while queue:
        state = queue.pop()
        turn = compound.turn(state)
        if turn == TERMINATED:
            continue
        if turn == CLIENT:
            nexts = [compound.apply(state, m) for m in compound.moves(state)]
        else:
            left, right = state
            if len(left) < len(right):
                move = InComponent("L", AtomMove(right[len(left)]))
            else:
                move = InComponent("R", AtomMove(left[len(right)]))
            strategy[state] = move
            nexts = [compound.step(state, move)]
        for n in nexts:
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return compound, strategy


# --------------------------------------------------- informed-server check

def _loc_build(f: fm.Formula, key: tuple):
    if isinstance(f, fm.Atom):
        return ("atom", key, f.name, True, ())
    if isinstance(f, fm.Dual):
        return ("atom", key, f.body.name, False, ())
    if isinstance(f, (fm.One, fm.Bot, fm.Top, fm.Zero)):
        return ("const",)
    if isinstance(f, (fm.Tensor, fm.Par)):
        return ("pair", _loc_build(f.left, key + ("L",)),
                _loc_build(f.right, key + ("R",)))
    if isinstance(f, (fm.With, fm.Plus)):
        return ("pick", f, key)
    if isinstance(f, (fm.Bang, fm.Quest)):
        return ("count", f, key)
    raise TypeError(f"cannot track {f!r}")


def _loc_route(loc, move: Move):
    """Advance the occurrence tracker by one move; returns (loc, hit).

    hit is (occurrence key, atom name, positive, local position before the
    move) when the move lands inside an atom occurrence, else None.
    """
    kind = loc[0]
    if kind == "atom":
        _, key, name, pos, history = loc
        return ("atom", key, name, pos, history + (move.label,)), \
            (key, name, pos, history)
    if kind == "pair":
        _, left, right = loc
        if move.side == "L":
            new, hit = _loc_route(left, move.inner)
            return ("pair", new, right), hit
        new, hit = _loc_route(right, move.inner)
        return ("pair", left, new), hit
    if kind == "pick":
        _, f, key = loc
        branch = f.left if move.side == "L" else f.right
        return _loc_build(branch, key + (move.side,)), None
    if kind == "count":
        _, f, key = loc
        copies = tuple(_loc_build(f.body, key + (i,)) for i in range(move.n))
        return ("copies", copies), None
    if kind == "copies":
        copies = list(loc[1])
        new, hit = _loc_route(copies[move.index], move.inner)
        copies[move.index] = new
        return ("copies", tuple(copies)), hit
    raise IllegalMoveError(f"move {render_move(move)} does not route")


def _loc_atoms(loc):
    kind = loc[0]
    if kind == "atom":
        yield loc
    elif kind == "pair":
        yield from _loc_atoms(loc[1])
        yield from _loc_atoms(loc[2])
    elif kind == "copies":
        for c in loc[1]:
            yield from _loc_atoms(c)


def lorenzen_uniform(p: Protocol, strategy: Mapping,
                     max_nodes: int = 200_000) -> bool:
    """Does the strategy only ever answer inside an atom it has been shown?

    Along every play consistent with the strategy, each strategy move that
    lands in an atom occurrence at local position h must find some opposite
    occurrence of the same atom whose local history strictly extends h: the
    client has already produced the move at position |h| over there.  Only
    protocols built by interpret carry the tracking this needs.
    """
    if not isinstance(p, InterpretedProtocol):
        raise TypeError("uniformity tracking needs a protocol built by interpret")
    root_loc = _loc_build(p.formula, ())
    visited = 0

    def admissible(loc, hit) -> bool:
        key, name, pos, history = hit
        for other in _loc_atoms(loc):
            _, okey, oname, opos, ohist = other
            if okey == key or oname != name or opos == pos:
                continue
            if len(ohist) > len(history) and ohist[:len(history)] == history:
                return True
        return False

    def walk(state, loc) -> bool:
        nonlocal visited
        visited += 1
        if visited > max_nodes:
            raise BudgetExceededError(
                f"uniformity walk exceeded {max_nodes} positions", max_nodes)
        turn = p.turn(state)
        if turn == TERMINATED:
            return True
        if turn == CLIENT:
            for m in p.moves(state):
                new_loc, _ = _loc_route(loc, m)
                if not walk(p.apply(state, m), new_loc):
                    return False
            return True
        if state not in strategy:
            raise KeyError(
                f"strategy has no move at server state {encode_state(state)}")
        m = strategy[state]
        new_loc, hit = _loc_route(loc, m)
        if hit is not None and not admissible(loc, hit):
            return False
        return walk(p.step(state, m), new_loc)

    with _deep_recursion(4 * p.depth_bound() + 200):
        return walk(p.initial, root_loc)
