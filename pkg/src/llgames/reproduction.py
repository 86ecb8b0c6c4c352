"""The acceptance suite: every headline claim as a self-contained check.

Each check returns a CriterionResult carrying a pass flag, a human-readable
detail line, and its wall-clock time.  The CLI demo prints them as a table;
the test suite asserts them one by one.  Checks with a stated time bound
fold the bound into the pass flag.

Seeds are fixed constants so every run examines the same games and formulas.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable

from . import formula as fm
from .formula import Sequent, dualize, normalize, parse, render
from .game import (
    BudgetExceededError, CLIENT, SERVER, TERMINATED, LEAF_C, LEAF_T,
    atom_game, bang_game, dual, interpret, materialize,
)
from .proofs import (
    ALL_RULES, THINNING, ProofError, check_proof, contraction_via_thinning,
    search,
)
from .semantics import (
    choice_product, entails, lockstep_product_expansion, random_formula,
    random_tree, standard_pool, stepwise_product_expansion,
    three_bit_formula, unit_env, valid_naive,
)
from .strategy import (
    _deep_recursion, copycat, extract_behavior, inconsistency_witness,
    is_behavior, replication_consistent_plays, server_wins,
    server_wins_naive, solve, strategy_wins,
)
from .strategy import _replication_divergence

DETERMINACY_SEED = 404
DETERMINACY_COUNT = 1000
FORMULA_SUITE_SEED = 811
FORMULA_SUITE_COUNT = 200
NAIVE_PLAY_BUDGET = 2_000_000
IDENTITY_SUITE_SEED = 1213
IDENTITY_SUITE_COUNT = 200
IDENTITY_NODE_BUDGET = 50_000
IDENTITY_ATOM_NODE_CAP = 7


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark:4}  {self.name:28} {self.elapsed:7.2f}s  {self.detail}"


def _suite_trees(count: int = DETERMINACY_COUNT) -> list:
    rng = random.Random(DETERMINACY_SEED)
    return [random_tree(depth=6, branching=3, rng=rng) for _ in range(count)]


def check_determinacy() -> CriterionResult:
    """One side always wins: serverWins(p) or serverWins(dual p)."""
    start = time.perf_counter()
    determined = 0
    trees = _suite_trees()
    for tree in trees:
        p = atom_game(tree)
        if server_wins(p) or server_wins(dual(p)):
            determined += 1
    elapsed = time.perf_counter() - start
    ok = determined == len(trees) and elapsed < 30.0
    return CriterionResult(
        "determinacy", ok,
        f"{determined}/{len(trees)} games determined (bound 30s)", elapsed)


def _naive_wins_budgeted(p, budget: int) -> bool:
    """The oracle recursion with a step counter so runaway play trees get
    resampled instead of hanging the suite."""
    steps = 0

    def walk(state) -> bool:
        nonlocal steps
        steps += 1
        if steps > budget:
            raise BudgetExceededError(
                f"naive walk exceeded {budget} positions", budget)
        turn = p.turn(state)
        if turn == TERMINATED:
            return True
        if turn == CLIENT:
            return all(walk(p.apply(state, m)) for m in p.moves(state))
        return any(walk(p.apply(state, m)) for m in p.moves(state))

    with _deep_recursion(4 * p.depth_bound() + 200):
        return walk(p.initial)


def check_solver_oracle() -> CriterionResult:
    """Memoized backward induction agrees with plain exhaustive recursion."""
    start = time.perf_counter()
    trees = _suite_trees()
    agree = sum(server_wins(atom_game(t)) == server_wins_naive(atom_game(t))
                for t in trees)

    pool = standard_pool()
    rng = random.Random(FORMULA_SUITE_SEED)
    checked = 0
    resampled = 0
    while checked < FORMULA_SUITE_COUNT:
        f = random_formula(depth=3, atoms=("a", "b", "c"), rng=rng)
        if fm.connective_count(f) > 6:
            continue
        # sorted so the draws are hash-seed independent across processes
        env = {name: rng.choice(pool.games)
               for name in sorted(fm.atom_names(f))}
        p = interpret(f, env, cap=2)
        try:
            naive = _naive_wins_budgeted(p, NAIVE_PLAY_BUDGET)
        except BudgetExceededError:
            resampled += 1
            continue
        if server_wins(p) == naive:
            agree += 1
        checked += 1
    elapsed = time.perf_counter() - start
    total = len(trees) + FORMULA_SUITE_COUNT
    return CriterionResult(
        "solver-oracle", agree == total,
        f"{agree}/{total} agreements "
        f"({len(trees)} trees + {FORMULA_SUITE_COUNT} formulas, "
        f"{resampled} resampled on budget)", elapsed)


def check_over_generation() -> CriterionResult:
    """Excluded middle: game-valid over the whole pool yet unprovable."""
    start = time.perf_counter()
    pool = standard_pool()
    f = fm.Plus(fm.Dual(fm.Atom("a")), fm.Atom("a"))
    won = sum(server_wins(interpret(f, {"a": tree})) for tree in pool.games)
    result = search(Sequent([normalize(f)]))
    elapsed = time.perf_counter() - start
    ok = (won == len(pool.games) and result.status == "unprovable"
          and elapsed < 10.0)
    return CriterionResult(
        "over-generation", ok,
        f"server wins a^ + a on {won}/{len(pool.games)} pool atoms; "
        f"search says {result.status} (bound 10s)", elapsed)


def check_copycat() -> CriterionResult:
    """The echo strategy is a behavior and never strands the server."""
    start = time.perf_counter()
    pool = standard_pool()
    good = 0
    for tree in pool.games:
        compound, strategy = copycat(tree)
        behavior = extract_behavior(compound, strategy)
        if is_behavior(compound, behavior) and strategy_wins(compound, strategy):
            good += 1
    elapsed = time.perf_counter() - start
    return CriterionResult(
        "copycat", good == len(pool.games),
        f"{good}/{len(pool.games)} pool atoms echoed without sticking",
        elapsed)


def _equiv_and_prove(left: str, right: str) -> tuple[bool, bool]:
    f, g = parse(left), parse(right)
    forward = valid_naive(fm.Lolli(f, g))
    backward = valid_naive(fm.Lolli(g, f))
    proved = all(
        search(Sequent([dualize(a), normalize(b)])).status == "proved"
        for a, b in ((f, g), (g, f)))
    return forward.valid and backward.valid, proved


def check_distributivity() -> CriterionResult:
    """Tensor distributes over plus, semantically and proof-theoretically."""
    start = time.perf_counter()
    two_ok, two_proved = _equiv_and_prove(
        "a * (b + c)", "(a * b) + (a * c)")
    four_ok, four_proved = _equiv_and_prove(
        "(a + b) * (c + d)", "(a*c) + (a*d) + (b*c) + (b*d)")
    elapsed = time.perf_counter() - start
    ok = two_ok and two_proved and four_ok and four_proved and elapsed < 10.0
    return CriterionResult(
        "distributivity", ok,
        f"two-way valid={two_ok} proved={two_proved}; "
        f"four-way valid={four_ok} proved={four_proved} (bound 10s)", elapsed)


def check_product_expansion_chain() -> CriterionResult:
    """product entails stepwise entails lockstep; neither step reverses in
    the proof system; semantics nevertheless validates stepwise -> product."""
    start = time.perf_counter()
    product = choice_product()
    stepwise = stepwise_product_expansion()
    lockstep = lockstep_product_expansion()

    def provable(a: fm.Formula, b: fm.Formula) -> bool:
        return search(Sequent([dualize(a), normalize(b)])).status == "proved"

    def refuted(a: fm.Formula, b: fm.Formula) -> bool:
        return search(Sequent([dualize(a), normalize(b)])).status == "unprovable"

    forward = provable(product, stepwise) and provable(stepwise, lockstep)
    converses = refuted(stepwise, product) and refuted(lockstep, stepwise)
    semantic = entails(stepwise, product)
    elapsed = time.perf_counter() - start
    ok = forward and converses and semantic.valid
    return CriterionResult(
        "product-expansion-chain", ok,
        f"forward proved={forward}, converses unprovable={converses}, "
        f"entails(stepwise, product) {semantic.summary()}", elapsed)


def check_thinning_countermodel() -> CriterionResult:
    """a^ par b^ par a is refuted, with the expected minimal countermodel."""
    start = time.perf_counter()
    verdict = valid_naive(parse("a^ @ b^ @ a"))
    expected = {"a": LEAF_T, "b": LEAF_C}
    got = dict(verdict.countermodel) if verdict.countermodel else None
    elapsed = time.perf_counter() - start
    ok = verdict.status == "refuted" and got == expected
    shown = ("{a -> terminated leaf, b -> client leaf}"
             if got == expected else repr(got))
    return CriterionResult(
        "thinning-countermodel", ok,
        f"status={verdict.status}, countermodel={shown}", elapsed)


def check_contraction_via_thinning() -> CriterionResult:
    """The derived contraction proof needs the thinning rule to check."""
    start = time.perf_counter()
    proof, hypotheses = contraction_via_thinning(
        fm.Atom("a"), (fm.Atom("b"),))
    with_thinning = True
    try:
        check_proof(proof, enabled=ALL_RULES, hypotheses=hypotheses)
    except ProofError:
        with_thinning = False
    without_thinning_fails = False
    try:
        check_proof(proof, enabled=ALL_RULES - {THINNING},
                    hypotheses=hypotheses)
    except ProofError:
        without_thinning_fails = True
    elapsed = time.perf_counter() - start
    ok = with_thinning and without_thinning_fails
    return CriterionResult(
        "contraction-via-thinning", ok,
        f"checks with thinning={with_thinning}, "
        f"rejected without={without_thinning_fails}", elapsed)


def _replication_candidates() -> list:
    """Pool atoms offering a client choice whose branches open with a
    server reply: the shape where cross-copy consistency has teeth."""
    pool = standard_pool()
    return [tree for tree in pool.games
            if tree.turn == CLIENT and len(tree.moves) >= 2
            and any(child.turn == SERVER and child.moves
                    for _, child in tree.moves)]


def check_replication_consistency() -> CriterionResult:
    """Consistent replication forces equal replies to equal prefixes;
    stream replication admits a winning strategy that answers unequally."""
    start = time.perf_counter()
    candidates = _replication_candidates()
    consistent_ok = bool(candidates) and all(
        replication_consistent_plays(bang_game(atom_game(t), cap=2,
                                               mode="consistent"))
        for t in candidates)
    stream_ok = False
    for tree in candidates:
        p = bang_game(atom_game(tree), cap=2, mode="stream")
        witness = inconsistency_witness(p)
        if witness is None:
            continue
        strategy, play = witness
        state = p.initial
        for move in play[:-1]:
            state = p.step(state, move)
        if (strategy_wins(p, strategy)
                and _replication_divergence(state, play[-1])):
            stream_ok = True
            break
    elapsed = time.perf_counter() - start
    ok = consistent_ok and stream_ok
    return CriterionResult(
        "replication-consistency", ok,
        f"{len(candidates)} candidate atoms; consistent mode clean="
        f"{consistent_ok}; stream witness found={stream_ok}", elapsed)


def _material_eq(f: fm.Formula, g: fm.Formula, env) -> bool:
    return (materialize(interpret(f, env), IDENTITY_NODE_BUDGET)
            == materialize(interpret(g, env), IDENTITY_NODE_BUDGET))


def check_structural_identities() -> CriterionResult:
    """Involution, the four dualities, and the collapsed constants hold as
    literal tree equalities, not just up to strategy."""
    start = time.perf_counter()
    pool = standard_pool()
    # big atoms only inflate the shared tree without exercising new
    # structure, so this suite sticks to the pool's small ones
    atoms = [t for t in pool.games
             if t.node_count() <= IDENTITY_ATOM_NODE_CAP]
    rng = random.Random(IDENTITY_SUITE_SEED)
    passed = 0
    resampled = 0
    checked = 0
    while checked < IDENTITY_SUITE_COUNT:
        f = random_formula(depth=2, atoms=("a", "b"), rng=rng)
        g = random_formula(depth=2, atoms=("a", "b"), rng=rng)
        names = sorted(fm.atom_names(f) | fm.atom_names(g))
        env = {name: rng.choice(atoms) for name in names}
        try:
            ok = (
                _material_eq(fm.Dual(fm.Dual(f)), f, env)
                and _material_eq(fm.Dual(fm.Tensor(f, g)),
                                 fm.Par(fm.Dual(f), fm.Dual(g)), env)
                and _material_eq(fm.Dual(fm.Par(f, g)),
                                 fm.Tensor(fm.Dual(f), fm.Dual(g)), env)
                and _material_eq(fm.Dual(fm.With(f, g)),
                                 fm.Plus(fm.Dual(f), fm.Dual(g)), env)
                and _material_eq(fm.Dual(fm.Plus(f, g)),
                                 fm.With(fm.Dual(f), fm.Dual(g)), env)
            )
        except BudgetExceededError:
            resampled += 1
            continue
        passed += ok
        checked += 1
    constants = (_material_eq(fm.One(), fm.Bot(), {})
                 and _material_eq(fm.Dual(fm.Top()), fm.Zero(), {}))
    elapsed = time.perf_counter() - start
    ok = passed == IDENTITY_SUITE_COUNT and constants
    return CriterionResult(
        "structural-identities", ok,
        f"{passed}/{IDENTITY_SUITE_COUNT} instances "
        f"({resampled} resampled on budget); constants={constants}", elapsed)


def check_three_bit_depth() -> CriterionResult:
    """The nested-choice example runs exactly three moves with unit atoms."""
    start = time.perf_counter()
    f = three_bit_formula()
    tree = materialize(interpret(f, unit_env(f)))
    elapsed = time.perf_counter() - start
    return CriterionResult(
        "three-bit-depth", tree.height() == 3,
        f"materialized height {tree.height()} for {render(f)}", elapsed)


ALL_CRITERIA: tuple[tuple[str, Callable[[], CriterionResult]], ...] = (
    ("determinacy", check_determinacy),
    ("solver-oracle", check_solver_oracle),
    ("over-generation", check_over_generation),
    ("copycat", check_copycat),
    ("distributivity", check_distributivity),
    ("product-expansion-chain", check_product_expansion_chain),
    ("thinning-countermodel", check_thinning_countermodel),
    ("contraction-via-thinning", check_contraction_via_thinning),
    ("replication-consistency", check_replication_consistency),
    ("structural-identities", check_structural_identities),
    ("three-bit-depth", check_three_bit_depth),
)


def run_all() -> list[CriterionResult]:
    return [check() for _, check in ALL_CRITERIA]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    total = sum(r.elapsed for r in results)
    verdict = "all criteria pass" if all(r.passed for r in results) else \
        f"{sum(not r.passed for r in results)} criteria FAILED"
    lines.append(f"{'':4}  {'total':28} {total:7.2f}s  {verdict}")
    return "\n".join(lines)
