"""Client/server protocols as lazy transition systems.

A protocol answers three questions about any reachable state: whose turn it
is ("c" client, "s" server, "t" terminated), which moves are legal, and what
state a move leads to.  States are hashable values with structural equality,
so solvers can memoize on them directly.  All protocols here are finite:
depth_bound() bounds the length of any play.

Compound turn discipline:

  * choice games (with/plus): the owning side picks a component, then play
    is exactly that component's protocol, moves unwrapped;
  * tensor: terminated when both components are; otherwise the server is due
    if it is due in any live component, and its legal moves come from the
    leftmost such component only; otherwise the client is due and may move
    in any live client-due component;
  * par, lolli, quest are defined by dualization;
  * bang: the client announces a copy count (0..cap), then the copies run
    under the tensor discipline generalized to n components, the client free
    to switch copies.  In "consistent" mode a server move in a copy whose
    local history is a strict prefix of another copy's history must repeat
    the move that copy made at that position; "stream" mode drops the rule.

The dual of a game swaps c and s everywhere and nothing else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import formula as fm

CLIENT = "c"
SERVER = "s"
TERMINATED = "t"

TURN_WORD = {CLIENT: "client", SERVER: "server", TERMINATED: "terminated"}


def swap_turn(turn: str) -> str:
    if turn == CLIENT:
        return SERVER
    if turn == SERVER:
        return CLIENT
    return turn


class IllegalMoveError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    """A node budget ran out; holds how many nodes had been produced."""

    def __init__(self, message: str, count: int) -> None:
        super().__init__(message)
        self.count = count


# ------------------------------------------------------------------- moves

class Move:
    __slots__ = ()


@dataclass(frozen=True)
class AtomMove(Move):
    label: str


@dataclass(frozen=True)
class Choice(Move):
    side: str  # "L" or "R"


@dataclass(frozen=True)
class Count(Move):
    n: int


@dataclass(frozen=True)
class InComponent(Move):
    side: str
    inner: Move


@dataclass(frozen=True)
class InCopy(Move):
    index: int
    inner: Move


def render_move(m: Move) -> str:
    if isinstance(m, AtomMove):
        return m.label
    if isinstance(m, Choice):
        return m.side
    if isinstance(m, Count):
        return f"n={m.n}"
    if isinstance(m, InComponent):
        return f"{m.side}:{render_move(m.inner)}"
    if isinstance(m, InCopy):
        return f"#{m.index}:{render_move(m.inner)}"
    raise TypeError(f"not a move: {m!r}")


def encode_state(state) -> str:
    """Deterministic text encoding of a state, for dumps and session logs."""
    if isinstance(state, tuple):
        return "(" + ",".join(encode_state(x) for x in state) + ")"
    if isinstance(state, Move):
        return render_move(state)
    return str(state)


# ----------------------------------------------------------- explicit trees

@dataclass(frozen=True)
class ExplicitTree:
    """A finite game tree: a turn label and labeled branches, in order."""

    turn: str
    moves: tuple[tuple[str, "ExplicitTree"], ...] = ()

    def __post_init__(self) -> None:
        if self.turn not in (CLIENT, SERVER, TERMINATED):
            raise ValueError(f"bad turn label {self.turn!r}")
        if self.turn == TERMINATED and self.moves:
            raise ValueError("terminated nodes cannot extend")
        labels = [lbl for lbl, _ in self.moves]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate move labels at one node")

    def child(self, label: str) -> "ExplicitTree":
        for lbl, sub in self.moves:
            if lbl == label:
                return sub
        raise KeyError(label)

    def node_count(self) -> int:
        return 1 + sum(sub.node_count() for _, sub in self.moves)

    def height(self) -> int:
        if not self.moves:
            return 0
        return 1 + max(sub.height() for _, sub in self.moves)


LEAF_C = ExplicitTree(CLIENT)
LEAF_S = ExplicitTree(SERVER)
LEAF_T = ExplicitTree(TERMINATED)


def tree_to_json(tree: ExplicitTree) -> dict:
    return {"turn": tree.turn,
            "moves": {lbl: tree_to_json(sub) for lbl, sub in tree.moves}}


def tree_from_json(data: Mapping) -> ExplicitTree:
    turn = data.get("turn")
    moves = data.get("moves", {})
    return ExplicitTree(turn, tuple((lbl, tree_from_json(sub))
                                    for lbl, sub in moves.items()))


def load_atom_env(source) -> dict[str, ExplicitTree]:
    """Read an atom environment: {"atoms": {name: tree}}; accepts a path or dict."""
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            source = json.load(fh)
    atoms = source.get("atoms", source)
    return {name: tree_from_json(tree) for name, tree in atoms.items()}


def dump_atom_env(env: Mapping[str, ExplicitTree]) -> dict:
    return {"atoms": {name: tree_to_json(tree) for name, tree in env.items()}}


def tree_to_dot(tree: ExplicitTree, graph_name: str = "protocol") -> str:
    """Graphviz text: nodes carry turn labels, edges carry move labels."""
    lines = [f"digraph {graph_name} {{", "  node [shape=circle];"]
    counter = [0]

    def visit(node: ExplicitTree) -> int:
        ident = counter[0]
        counter[0] += 1
        lines.append(f'  n{ident} [label="{node.turn}"];')
        for lbl, sub in node.moves:
            child = visit(sub)
            safe = lbl.replace('"', '\\"')
            lines.append(f'  n{ident} -> n{child} [label="{safe}"];')
        return ident

    visit(tree)
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------- protocols

class Protocol:
    """Lazy game: initial state plus turn/legal_moves/step on states."""

    initial = None

    def turn(self, state) -> str:
        raise NotImplementedError

    def moves(self, state) -> tuple[Move, ...]:
        raise NotImplementedError

    def apply(self, state, move: Move):
        raise NotImplementedError

    def step(self, state, move: Move):
        """Validated transition; raises IllegalMoveError for anything illegal."""
        if move not in self.moves(state):
            raise IllegalMoveError(
                f"move {render_move(move)} is not legal at {encode_state(state)}")
        return self.apply(state, move)

    def depth_bound(self) -> int:
        raise NotImplementedError


class AtomGame(Protocol):
    """A protocol given by an explicit tree.  States are paths from the root."""

    initial: tuple[str, ...] = ()

    def __init__(self, tree: ExplicitTree) -> None:
        self.tree = tree
        self._nodes: dict[tuple[str, ...], ExplicitTree] = {(): tree}

    def node(self, state: tuple[str, ...]) -> ExplicitTree:
        found = self._nodes.get(state)
        if found is None:
            found = self.node(state[:-1]).child(state[-1])
            self._nodes[state] = found
        return found

    def turn(self, state) -> str:
        return self.node(state).turn

    def moves(self, state) -> tuple[Move, ...]:
        return tuple(AtomMove(lbl) for lbl, _ in self.node(state).moves)

    def apply(self, state, move: Move):
        return state + (move.label,)

    def depth_bound(self) -> int:
        return self.tree.height()


class DualGame(Protocol):
    """Role interchange: same states and moves, turns swapped."""

    def __init__(self, inner: Protocol) -> None:
        self.inner = inner
        self.initial = inner.initial

    def turn(self, state) -> str:
        return swap_turn(self.inner.turn(state))

    def moves(self, state) -> tuple[Move, ...]:
        return self.inner.moves(state)

    def apply(self, state, move: Move):
        return self.inner.apply(state, move)

    def depth_bound(self) -> int:
        return self.inner.depth_bound()


def dual(p: Protocol) -> Protocol:
    if isinstance(p, InterpretedProtocol):
        p = p.inner
    if isinstance(p, DualGame):
        return p.inner
    return DualGame(p)


class ChoiceGame(Protocol):
    """One side picks a component, then play is exactly that component."""

    initial = ("pick",)

    def __init__(self, left: Protocol, right: Protocol, chooser: str) -> None:
        self.components = {"L": left, "R": right}
        self.chooser = chooser

    def turn(self, state) -> str:
        if state == self.initial:
            return self.chooser
        side, inner = state
        return self.components[side].turn(inner)

    def moves(self, state) -> tuple[Move, ...]:
        if state == self.initial:
            return (Choice("L"), Choice("R"))
        side, inner = state
        return self.components[side].moves(inner)

    def apply(self, state, move: Move):
        if state == self.initial:
            return (move.side, self.components[move.side].initial)
        side, inner = state
        return (side, self.components[side].apply(inner, move))

    def depth_bound(self) -> int:
        return 1 + max(c.depth_bound() for c in self.components.values())


class TensorGame(Protocol):
    """Both components played to completion, server moves serialized."""

    def __init__(self, left: Protocol, right: Protocol,
                 serialize: str = "leftmost") -> None:
        self.left = left
        self.right = right
        self.serialize = serialize
        self.initial = (left.initial, right.initial)

    def _turns(self, state) -> tuple[str, str]:
        return (self.left.turn(state[0]), self.right.turn(state[1]))

    def turn(self, state) -> str:
        turns = self._turns(state)
        if all(t == TERMINATED for t in turns):
            return TERMINATED
        if SERVER in turns:
            return SERVER
        return CLIENT

    def moves(self, state) -> tuple[Move, ...]:
        turns = self._turns(state)
        components = (("L", self.left, state[0]), ("R", self.right, state[1]))
        if SERVER in turns:
            due = [c for c, t in zip(components, turns) if t == SERVER]
            picked = due[0] if self.serialize == "leftmost" else due[-1]
            side, comp, inner = picked
            return tuple(InComponent(side, m) for m in comp.moves(inner))
        out = []
        for (side, comp, inner), t in zip(components, turns):
            if t == CLIENT:
                out.extend(InComponent(side, m) for m in comp.moves(inner))
        return tuple(out)

    def apply(self, state, move: Move):
        if move.side == "L":
            return (self.left.apply(state[0], move.inner), state[1])
        return (state[0], self.right.apply(state[1], move.inner))

    def depth_bound(self) -> int:
        return self.left.depth_bound() + self.right.depth_bound()


class BangGame(Protocol):
    """Client-announced number of interleaved copies of one protocol.

    States after the announcement hold each copy's local move history; local
    states are recovered by replay (cached).  The history is what the
    consistent-mode legality rule needs.
    """

    initial = ("n?",)

    def __init__(self, inner: Protocol, cap: int = 2, mode: str = "consistent",
                 serialize: str = "leftmost") -> None:
        if mode not in ("consistent", "stream"):
            raise ValueError(f"bad bang mode {mode!r}")
        self.inner = inner
        self.cap = cap
        self.mode = mode
        self.serialize = serialize
        self._replay: dict[tuple[Move, ...], object] = {(): inner.initial}

    def _local(self, history: tuple[Move, ...]):
        found = self._replay.get(history)
        if found is None:
            prev = self._local(history[:-1])
            found = self.inner.apply(prev, history[-1])
            self._replay[history] = found
        return found

    def turn(self, state) -> str:
        if state == self.initial:
            return CLIENT
        turns = [self.inner.turn(self._local(h)) for h in state[1]]
        if all(t == TERMINATED for t in turns):
            return TERMINATED
        if SERVER in turns:
            return SERVER
        return CLIENT

    def _consistent_filter(self, histories, i: int,
                           candidates: Iterable[Move]) -> tuple[Move, ...]:
        h = histories[i]
        forced = None
        for j, other in enumerate(histories):
            if j != i and len(other) > len(h) and other[:len(h)] == h:
                forced = other[len(h)]
                break
        if forced is None:
            return tuple(candidates)
        return tuple(m for m in candidates if m == forced)

    def moves(self, state) -> tuple[Move, ...]:
        if state == self.initial:
            return tuple(Count(n) for n in range(self.cap + 1))
        histories = state[1]
        turns = [self.inner.turn(self._local(h)) for h in histories]
        if SERVER in turns:
            due = [i for i, t in enumerate(turns) if t == SERVER]
            i = due[0] if self.serialize == "leftmost" else due[-1]
            candidates = self.inner.moves(self._local(histories[i]))
            if self.mode == "consistent":
                candidates = self._consistent_filter(histories, i, candidates)
            return tuple(InCopy(i, m) for m in candidates)
        out = []
        for i, t in enumerate(turns):
            if t == CLIENT:
                out.extend(InCopy(i, m)
                           for m in self.inner.moves(self._local(histories[i])))
        return tuple(out)

    def apply(self, state, move: Move):
        if state == self.initial:
            return ("run", ((),) * move.n)
        histories = list(state[1])
        histories[move.index] = histories[move.index] + (move.inner,)
        return ("run", tuple(histories))

    def depth_bound(self) -> int:
        return 1 + self.cap * self.inner.depth_bound()


# ------------------------------------------------------------- constructors

def atom_game(tree: ExplicitTree) -> Protocol:
    return AtomGame(tree)


def with_game(left: Protocol, right: Protocol) -> Protocol:
    return ChoiceGame(left, right, CLIENT)


def plus_game(left: Protocol, right: Protocol) -> Protocol:
    return ChoiceGame(left, right, SERVER)


def tensor_game(left: Protocol, right: Protocol,
                serialize: str = "leftmost") -> Protocol:
    return TensorGame(left, right, serialize)


def par_game(left: Protocol, right: Protocol,
             serialize: str = "leftmost") -> Protocol:
    return dual(TensorGame(dual(left), dual(right), serialize))


def lolli_game(left: Protocol, right: Protocol) -> Protocol:
    return par_game(dual(left), right)


def bang_game(inner: Protocol, cap: int = 2, mode: str = "consistent",
              serialize: str = "leftmost") -> Protocol:
    return BangGame(inner, cap, mode, serialize)


def quest_game(inner: Protocol, cap: int = 2, mode: str = "consistent",
               serialize: str = "leftmost") -> Protocol:
    return dual(BangGame(dual(inner), cap, mode, serialize))


def top_game() -> Protocol:
    return AtomGame(LEAF_C)


def zero_game() -> Protocol:
    return AtomGame(LEAF_S)


def one_game() -> Protocol:
    return AtomGame(LEAF_T)


def bot_game() -> Protocol:
    return AtomGame(LEAF_T)


# ---------------------------------------------------------------- interpret

class InterpretedProtocol(Protocol):
    """A protocol compiled from a formula; remembers what it was built from."""

    def __init__(self, inner: Protocol, normalized: fm.Formula,
                 env: Mapping[str, ExplicitTree], cap: int, mode: str) -> None:
        self.inner = inner
        self.formula = normalized
        self.env = dict(env)
        self.cap = cap
        self.mode = mode
        self.initial = inner.initial

    def turn(self, state) -> str:
        return self.inner.turn(state)

    def moves(self, state) -> tuple[Move, ...]:
        return self.inner.moves(state)

    def apply(self, state, move: Move):
        return self.inner.apply(state, move)

    def depth_bound(self) -> int:
        return self.inner.depth_bound()


def interpret(f: fm.Formula, env: Mapping[str, ExplicitTree] | None = None,
              cap: int = 2, mode: str = "consistent",
              serialize: str = "leftmost") -> InterpretedProtocol:
    """Compile a formula to a protocol over the given atom games."""
    env = dict(env or {})
    normalized = fm.normalize(f)

    def build(g: fm.Formula) -> Protocol:
        if isinstance(g, fm.Atom):
            if g.name not in env:
                raise KeyError(f"atom {g.name!r} has no game in the environment")
            return atom_game(env[g.name])
        if isinstance(g, fm.Dual):
            return dual(build(g.body))
        if isinstance(g, (fm.One, fm.Bot)):
            return one_game()
        if isinstance(g, fm.Top):
            return top_game()
        if isinstance(g, fm.Zero):
            return zero_game()
        if isinstance(g, fm.Tensor):
            return tensor_game(build(g.left), build(g.right), serialize)
        if isinstance(g, fm.Par):
            return par_game(build(g.left), build(g.right), serialize)
        if isinstance(g, fm.With):
            return with_game(build(g.left), build(g.right))
        if isinstance(g, fm.Plus):
            return plus_game(build(g.left), build(g.right))
        if isinstance(g, fm.Bang):
            return bang_game(build(g.body), cap, mode, serialize)
        if isinstance(g, fm.Quest):
            return quest_game(build(g.body), cap, mode, serialize)
        raise TypeError(f"cannot interpret {g!r}")

    return InterpretedProtocol(build(normalized), normalized, env, cap, mode)


# -------------------------------------------------------------- materialize

def materialize(p: Protocol, max_nodes: int = 100_000) -> ExplicitTree:
    """Unfold a protocol into an explicit tree; errors out past max_nodes."""
    budget = [max_nodes]

    def visit(state) -> ExplicitTree:
        if budget[0] <= 0:
            raise BudgetExceededError(
                f"materialization exceeded {max_nodes} nodes", max_nodes)
        budget[0] -= 1
        turn = p.turn(state)
        branches = tuple((render_move(m), visit(p.apply(state, m)))
                         for m in p.moves(state))
        return ExplicitTree(turn, branches)

    return visit(p.initial)
