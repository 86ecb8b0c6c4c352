"""Validity over pools of atom games, seeded generators, equivalence checks.

A formula is checked by quantifying its atoms over a pool of finite games:
interpret every assignment and ask the solver who wins.  Exhaustive when the
assignment space is small enough, seeded sampling past sample_limit.  The
verdict for a sampled check says so: it is validity over the pool, nothing
stronger, and that caveat is the point of the workbench.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field

from . import formula as fm
from .game import (
    CLIENT, SERVER, TERMINATED, ExplicitTree, LEAF_C, LEAF_S, LEAF_T,
    Protocol, interpret, materialize, tree_from_json, tree_to_json,
)
from .strategy import Solution, server_wins, solve

DEFAULT_BANG_CAP = 2
DEFAULT_BANG_MODE = "consistent"
DEFAULT_POOL_SIZE = 50
DEFAULT_POOL_SEED = 11
DEFAULT_POOL_DEPTH = 4
DEFAULT_POOL_BRANCHING = 3
DEFAULT_SAMPLE_LIMIT = 100
DEFAULT_NODE_BUDGET = 2_000_000

# random trees above this node count are redrawn; keeps products of pool
# games inside the solver's time budget
_POOL_NODE_CAP = 13


def describe_tree(g: ExplicitTree) -> str:
    if not g.moves:
        return f"{g.turn}-leaf"
    return f"{g.turn}-tree({g.node_count()} nodes, height {g.height()})"


# ------------------------------------------------------------------- pools

@dataclass
class AtomPool:
    name: str
    seed: int | None
    games: list[ExplicitTree] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "seed": self.seed,
                "games": [tree_to_json(g) for g in self.games]}


def load_pool(source) -> AtomPool:
    if isinstance(source, (str, bytes)):
        with open(source) as fh:
            source = json.load(fh)
    return AtomPool(source.get("name", "pool"), source.get("seed"),
                    [tree_from_json(g) for g in source["games"]])


def save_pool(pool: AtomPool, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(pool.to_json(), fh, indent=1)


def random_tree(depth: int, branching: int, seed: int | None = None,
                rng: random.Random | None = None,
                turn_weights: tuple[int, int, int] = (4, 4, 3)) -> ExplicitTree:
    """Seeded finite game tree, depth and branching bounded as given."""
    rng = rng or random.Random(seed)

    def gen(remaining: int) -> ExplicitTree:
        turn = rng.choices((CLIENT, SERVER, TERMINATED),
                           weights=turn_weights)[0]
        if turn == TERMINATED or remaining == 0:
            return ExplicitTree(turn, ())
        width = rng.choices(range(branching + 1),
                            weights=[1] + [4] * branching)[0]
        moves = tuple((f"e{i + 1}", gen(remaining - 1)) for i in range(width))
        return ExplicitTree(turn, moves)

    return gen(depth)


def standard_pool(size: int = DEFAULT_POOL_SIZE,
                  seed: int = DEFAULT_POOL_SEED,
                  depth: int = DEFAULT_POOL_DEPTH,
                  branching: int = DEFAULT_POOL_BRANCHING) -> AtomPool:
    """The three constant game shapes plus seeded random trees, small first.

    The terminated leaf covers both units (they are the same game), then the
    client-stuck and server-stuck leaves, then `size` random trees redrawn
    until small enough.
    """
    rng = random.Random(seed)
    games = [LEAF_T, LEAF_C, LEAF_S]
    while len(games) < size + 3:
        t = random_tree(depth, branching, rng=rng)
        if t.node_count() <= _POOL_NODE_CAP:
            games.append(t)
    return AtomPool("std", seed, games)


def random_formula(depth: int, atoms: list[str], seed: int | None = None,
                   rng: random.Random | None = None,
                   exponentials: bool = True) -> fm.Formula:
    """Seeded random formula over the given atom names, full surface syntax."""
    rng = rng or random.Random(seed)
    binaries = [fm.Tensor, fm.Par, fm.With, fm.Plus, fm.Lolli]
    unaries = [fm.Dual] + ([fm.Bang, fm.Quest] if exponentials else [])

    def leaf() -> fm.Formula:
        if rng.random() < 0.82:
            return fm.Atom(rng.choice(atoms))
        return rng.choice((fm.One(), fm.Bot(), fm.Top(), fm.Zero()))

    def gen(remaining: int) -> fm.Formula:
        if remaining == 0 or rng.random() < 0.18:
            return leaf()
        if rng.random() < 0.25:
            return rng.choice(unaries)(gen(remaining - 1))
        node = rng.choice(binaries)
        return node(gen(remaining - 1), gen(remaining - 1))

    return gen(depth)


# ---------------------------------------------------------------- verdicts

@dataclass
class Verdict:
    status: str                      # "valid" or "refuted"
    scope: str                       # "exhaustive" or "sampled"
    checked: int
    pool: str
    seed: int = 0
    countermodel: dict[str, ExplicitTree] | None = None
    evidence: Solution | None = None

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def summary(self) -> str:
        if self.valid:
            return (f"valid over pool {self.pool} "
                    f"({self.scope}, {self.checked} assignments)")
        names = ", ".join(f"{n}: {describe_tree(g)}" for n, g in
                          sorted(self.countermodel.items()))
        return f"refuted (assignment {{{names}}} after {self.checked} checks)"


def _assignments(names: list[str], pool: AtomPool, sample_limit: int,
                 seed: int):
    """Assignment stream: exhaustive when small, else leaves-first sampling.

    The sampled stream starts with the exhaustive product of the pool's leaf
    games (the degenerate corner cases, cheap and the likeliest refuters)
    and fills the remaining budget with seeded random draws from the whole
    pool.  Deterministic either way.
    """
    total = len(pool.games) ** len(names)
    if total <= sample_limit:
        combos = itertools.product(pool.games, repeat=len(names))
        return "exhaustive", (dict(zip(names, c)) for c in combos)
    leaves = list(dict.fromkeys(g for g in pool.games if not g.moves))
    rng = random.Random(seed)

    def sampled():
        produced = 0
        if leaves and len(leaves) ** len(names) <= sample_limit:
            for combo in itertools.product(leaves, repeat=len(names)):
                yield dict(zip(names, combo))
                produced += 1
        while produced < sample_limit:
            yield {n: rng.choice(pool.games) for n in names}
            produced += 1

    return "sampled", sampled()


def valid_naive(f: fm.Formula, pool: AtomPool | None = None,
                cap: int = DEFAULT_BANG_CAP, mode: str = DEFAULT_BANG_MODE,
                sample_limit: int = DEFAULT_SAMPLE_LIMIT, seed: int = 0,
                node_budget: int | None = DEFAULT_NODE_BUDGET) -> Verdict:
    """Quantify the formula's atoms over the pool and solve each instance.

    Refutation comes with the assignment and the client's winning strategy
    for it (the server strategy of the dual game).
    """
    pool = pool or standard_pool()
    names = sorted(fm.atom_names(fm.normalize(f)))
    scope, envs = _assignments(names, pool, sample_limit, seed)
    checked = 0
    for env in envs:
        checked += 1
        p = interpret(f, env, cap, mode)
        if not server_wins(p, node_budget):
            return Verdict("refuted", scope, checked, pool.name, seed,
                           countermodel=env, evidence=solve(p, node_budget))
    return Verdict("valid", scope, checked, pool.name, seed)


def entails(f: fm.Formula, g: fm.Formula, pool: AtomPool | None = None,
            **kwargs) -> Verdict:
    """Validity of f -o g; shared atom names get one game per assignment."""
    return valid_naive(fm.Lolli(f, g), pool, **kwargs)


def equiv(f: fm.Formula, g: fm.Formula, pool: AtomPool | None = None,
          **kwargs) -> tuple[Verdict, Verdict]:
    return (entails(f, g, pool, **kwargs), entails(g, f, pool, **kwargs))


def iso_check(p: Protocol, q: Protocol, max_nodes: int = 100_000) -> bool:
    """Structural equality of the materialized trees."""
    return materialize(p, max_nodes) == materialize(q, max_nodes)


# ------------------------------------------------- named reference formulas

def excluded_middle(name: str = "a") -> fm.Formula:
    """The dual-or-self choice the semantics validates but the calculus rejects."""
    return fm.Plus(fm.Dual(fm.Atom(name)), fm.Atom(name))


def choice_product() -> fm.Formula:
    return fm.parse("(a1 & a2) * (b1 & b2)")


def stepwise_product_expansion(corrected: bool = False) -> fm.Formula:
    """Expansion where the client commits one tensor constituent at a time.

    The default form repeats the third conjunct as the fourth, leaving the
    a2-with-both-bs branch out; corrected=True restores it.  Both variants
    satisfy the same provability chain.
    """
    fourth = "a2 * (b1 & b2)" if corrected else "a1 * (b1 & b2)"
    return fm.parse("((a1 & a2) * b1) & ((a1 & a2) * b2)"
                    f" & (a1 * (b1 & b2)) & ({fourth})")


def lockstep_product_expansion() -> fm.Formula:
    """Expansion where the client commits both constituents outright."""
    return fm.parse("(a1 * b1) & (a2 * b1) & (a1 * b2) & (a2 * b2)")


def three_bit_formula() -> fm.Formula:
    """Two nested binary choices plus a server echo: three moves of content."""
    return fm.parse("((a & b) + (c & d)) & ((e & f) + (g & h))")


def unit_env(f: fm.Formula) -> dict[str, ExplicitTree]:
    """Every atom of f mapped to the terminated leaf."""
    return {n: LEAF_T for n in fm.atom_names(fm.normalize(f))}
