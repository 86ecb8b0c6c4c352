"""One-sided sequent calculus for the multiplicative-additive fragment.

Rules (one-sided, formulas in negation normal form):

    axiom      |- A^, A                          (A any formula)
    cut        |- A,G   |- A^,D   =>  |- G,D     (checking only)
    tensor     |- A,G   |- B,D    =>  |- A*B,G,D
    par        |- A,B,G           =>  |- A@B,G
    with       |- A,G   |- B,G    =>  |- A&B,G
    plus1/2    |- Ai,G            =>  |- A1+A2,G
    one        |- 1
    bot        |- G               =>  |- bot,G
    top        |- top,G
    thinning   |- G               =>  |- A,G      (off by default)
    hyp        an assumed sequent, matched exactly

No rules touch ! or ?: such formulas can only sit in contexts.  Search is
cut-free and exhaustive: every rule strictly shrinks the total node count of
the sequent (tensor enumerates every context split), so the backward search
space is finite and "unprovable" is a certificate, not a timeout.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formula as fm
from .formula import Formula, Sequent, dualize, normalize, parse, render
from .game import BudgetExceededError

AXIOM = "axiom"
CUT = "cut"
TENSOR = "tensor"
PAR = "par"
WITH = "with"
PLUS1 = "plus1"
PLUS2 = "plus2"
ONE = "one"
BOT = "bot"
TOP = "top"
THINNING = "thinning"
HYP = "hyp"

ALL_RULES = frozenset({AXIOM, CUT, TENSOR, PAR, WITH, PLUS1, PLUS2,
                       ONE, BOT, TOP, THINNING, HYP})
DEFAULT_RULES = ALL_RULES - {THINNING}
SEARCH_RULES = DEFAULT_RULES - {CUT}


@dataclass(frozen=True)
class ProofTree:
    sequent: Sequent
    rule: str
    premises: tuple["ProofTree", ...] = ()
    index: int | None = None  # hypothesis number for hyp leaves

    def pretty(self, depth: int = 0) -> str:
        head = "  " * depth + f"{self.sequent}   [{self.rule}"
        head += f" {self.index}]" if self.index is not None else "]"
        return "\n".join([head] + [p.pretty(depth + 1) for p in self.premises])


class ProofError(ValueError):
    pass


def _is_nnf(f: Formula) -> bool:
    if isinstance(f, fm.Lolli):
        return False
    if isinstance(f, fm.Dual):
        return isinstance(f.body, fm.Atom)
    if isinstance(f, (fm.Atom, fm.One, fm.Bot, fm.Top, fm.Zero)):
        return True
    if isinstance(f, (fm.Bang, fm.Quest)):
        return _is_nnf(f.body)
    return _is_nnf(f.left) and _is_nnf(f.right)


def _remove_one(formulas: tuple[Formula, ...], f: Formula) -> tuple | None:
    for i, g in enumerate(formulas):
        if g == f:
            return formulas[:i] + formulas[i + 1:]
    return None


def _same_multiset(a: tuple[Formula, ...], b: tuple[Formula, ...]) -> bool:
    return Sequent(a) == Sequent(b)


# ----------------------------------------------------------------- checking

def check_proof(tree: ProofTree, enabled: frozenset | set | None = None,
                hypotheses: tuple[Sequent, ...] = (),
                _path: str = "root") -> None:
    """Validate every node; raises ProofError naming the offending node."""
    rules = frozenset(enabled) if enabled is not None else DEFAULT_RULES
    if tree.rule not in ALL_RULES:
        raise ProofError(f"{_path}: unknown rule {tree.rule!r}")
    if tree.rule not in rules:
        raise ProofError(f"{_path}: rule {tree.rule!r} is not enabled")
    seq = tree.sequent.formulas
    for f in seq:
        if not _is_nnf(f):
            raise ProofError(f"{_path}: formula {render(f)} is not in normal form")
    prem = tree.premises
    arity = {AXIOM: 0, ONE: 0, TOP: 0, HYP: 0,
             PAR: 1, PLUS1: 1, PLUS2: 1, BOT: 1, THINNING: 1,
             CUT: 2, TENSOR: 2, WITH: 2}[tree.rule]
    if len(prem) != arity:
        raise ProofError(f"{_path}: {tree.rule} wants {arity} premises, "
                         f"got {len(prem)}")
    if not _node_fits(tree, hypotheses):
        raise ProofError(f"{_path}: {tree.rule} does not derive {tree.sequent}")
    for i, p in enumerate(prem):
        check_proof(p, rules, hypotheses, f"{_path}.{i}")


def _node_fits(tree: ProofTree, hypotheses: tuple[Sequent, ...]) -> bool:
    seq = tree.sequent.formulas
    prem = tree.premises
    rule = tree.rule
    if rule == AXIOM:
        return len(seq) == 2 and dualize(seq[0]) == seq[1]
    if rule == ONE:
        return seq == (fm.One(),)
    if rule == TOP:
        return any(isinstance(f, fm.Top) for f in seq)
    if rule == HYP:
        if tree.index is None or not 0 <= tree.index < len(hypotheses):
            raise ProofError(f"hypothesis index {tree.index!r} out of range")
        return tree.sequent == hypotheses[tree.index]
    if rule == CUT:
        p0, p1 = prem[0].sequent.formulas, prem[1].sequent.formulas
        for a in set(p0):
            rest0 = _remove_one(p0, a)
            rest1 = _remove_one(p1, dualize(a))
            if rest1 is not None and _same_multiset(seq, rest0 + rest1):
                return True
        return False
    if rule == THINNING:
        p0 = prem[0].sequent.formulas
        return any(_remove_one(seq, f) is not None
                   and _same_multiset(_remove_one(seq, f), p0)
                   for f in set(seq))
    # remaining rules have one principal connective in the conclusion
    for i, f in enumerate(seq):
        rest = seq[:i] + seq[i + 1:]
        if rule == PAR and isinstance(f, fm.Par):
            if _same_multiset(prem[0].sequent.formulas,
                              rest + (f.left, f.right)):
                return True
        elif rule == WITH and isinstance(f, fm.With):
            if (_same_multiset(prem[0].sequent.formulas, rest + (f.left,))
                    and _same_multiset(prem[1].sequent.formulas,
                                       rest + (f.right,))):
                return True
        elif rule == PLUS1 and isinstance(f, fm.Plus):
            if _same_multiset(prem[0].sequent.formulas, rest + (f.left,)):
                return True
        elif rule == PLUS2 and isinstance(f, fm.Plus):
            if _same_multiset(prem[0].sequent.formulas, rest + (f.right,)):
                return True
        elif rule == BOT and isinstance(f, fm.Bot):
            if _same_multiset(prem[0].sequent.formulas, rest):
                return True
        elif rule == TENSOR and isinstance(f, fm.Tensor):
            p0 = _remove_one(prem[0].sequent.formulas, f.left)
            p1 = _remove_one(prem[1].sequent.formulas, f.right)
            if p0 is not None and p1 is not None \
                    and _same_multiset(rest, p0 + p1):
                return True
    return False


# ------------------------------------------------------------------- search

@dataclass
class SearchResult:
    status: str                   # "proved" | "unprovable" | "budget"
    proof: ProofTree | None
    explored: int
    bound: int | None = None

    def __bool__(self) -> bool:
        return self.status == "proved"


def search(seq: Sequent, enabled: frozenset | set | None = None,
           hypotheses: tuple[Sequent, ...] = (),
           max_sequents: int | None = None) -> SearchResult:
    """Exhaustive cut-free backward proof search, memoized and deterministic."""
    rules = frozenset(enabled) if enabled is not None else SEARCH_RULES
    if CUT in rules:
        raise ValueError("search is cut-free; enable cut for checking only")
    for f in seq.formulas:
        if not _is_nnf(f):
            raise ValueError(f"search needs normal-form input, got {render(f)}")
    memo: dict[Sequent, ProofTree | None] = {}

    class Bound(Exception):
        pass

    def attempt(s: Sequent) -> ProofTree | None:
        if s in memo:
            return memo[s]
        if max_sequents is not None and len(memo) >= max_sequents:
            raise Bound()
        memo[s] = None  # provisional; every rule shrinks s, no cycles
        proof = expand(s)
        memo[s] = proof
        return proof

    def expand(s: Sequent) -> ProofTree | None:
        fs = s.formulas
        if HYP in rules:
            for i, h in enumerate(hypotheses):
                if s == h:
                    return ProofTree(s, HYP, (), index=i)
        if AXIOM in rules and len(fs) == 2 and dualize(fs[0]) == fs[1]:
            return ProofTree(s, AXIOM)
        if ONE in rules and fs == (fm.One(),):
            return ProofTree(s, ONE)
        if TOP in rules and any(isinstance(f, fm.Top) for f in fs):
            return ProofTree(s, TOP)
        for i, f in enumerate(fs):
            rest = fs[:i] + fs[i + 1:]
            if isinstance(f, fm.Par) and PAR in rules:
                sub = attempt(Sequent(rest + (f.left, f.right)))
                if sub:
                    return ProofTree(s, PAR, (sub,))
            elif isinstance(f, fm.With) and WITH in rules:
                left = attempt(Sequent(rest + (f.left,)))
                if left:
                    right = attempt(Sequent(rest + (f.right,)))
                    if right:
                        return ProofTree(s, WITH, (left, right))
            elif isinstance(f, fm.Plus):
                if PLUS1 in rules:
                    sub = attempt(Sequent(rest + (f.left,)))
                    if sub:
                        return ProofTree(s, PLUS1, (sub,))
                if PLUS2 in rules:
                    sub = attempt(Sequent(rest + (f.right,)))
                    if sub:
                        return ProofTree(s, PLUS2, (sub,))
            elif isinstance(f, fm.Bot) and BOT in rules:
                sub = attempt(Sequent(rest))
                if sub:
                    return ProofTree(s, BOT, (sub,))
            elif isinstance(f, fm.Tensor) and TENSOR in rules:
                for mask in range(1 << len(rest)):
                    gamma = tuple(g for j, g in enumerate(rest)
                                  if mask >> j & 1)
                    delta = tuple(g for j, g in enumerate(rest)
                                  if not mask >> j & 1)
                    left = attempt(Sequent(gamma + (f.left,)))
                    if not left:
                        continue
                    right = attempt(Sequent(delta + (f.right,)))
                    if right:
                        return ProofTree(s, TENSOR, (left, right))
        if THINNING in rules:
            for i in range(len(fs)):
                sub = attempt(Sequent(fs[:i] + fs[i + 1:]))
                if sub:
                    return ProofTree(s, THINNING, (sub,))
        return None

    try:
        proof = attempt(seq)
    except Bound:
        return SearchResult("budget", None, len(memo), max_sequents)
    status = "proved" if proof else "unprovable"
    return SearchResult(status, proof, len(memo))


def prove_formula(f: Formula, **kwargs) -> SearchResult:
    return search(Sequent([normalize(f)]), **kwargs)


# ---------------------------------------------- contraction out of thinning

def contraction_via_thinning(a: Formula,
                             gamma: tuple[Formula, ...] = ()
                             ) -> tuple[ProofTree, tuple[Sequent, Sequent]]:
    """Derive |- A,G from |- A,A,G using thinning and the dual-or-self choice.

    Steps: thin the axiom |- A^,A up to |- A^,A,G; combine with the assumed
    |- A,A,G by the with rule into |- A&A^,A,G; cut that against the assumed
    |- A^+A, whose formula is exactly (A&A^)^.  Needs thinning enabled and
    both hypotheses supplied, and shows contraction comes for free once
    thinning and the dual-or-self choice are accepted.
    """
    a = normalize(a)
    gamma = tuple(normalize(g) for g in gamma)
    neg = dualize(a)
    hyp_double = Sequent((a, a) + gamma)
    hyp_choice = Sequent([fm.Plus(neg, a)])

    step = ProofTree(Sequent([neg, a]), AXIOM)
    grown: list[Formula] = [neg, a]
    for g in gamma:
        grown.append(g)
        step = ProofTree(Sequent(grown), THINNING, (step,))
    assumed = ProofTree(hyp_double, HYP, (), index=0)
    combined = ProofTree(Sequent([fm.With(a, neg), a] + list(gamma)),
                         WITH, (assumed, step))
    choice = ProofTree(hyp_choice, HYP, (), index=1)
    conclusion = ProofTree(Sequent((a,) + gamma), CUT, (combined, choice))
    return conclusion, (hyp_double, hyp_choice)


# -------------------------------------------------------------------- JSON

def proof_to_json(tree: ProofTree) -> dict:
    data = {"seq": [render(f) for f in tree.sequent.formulas],
            "rule": tree.rule,
            "premises": [proof_to_json(p) for p in tree.premises]}
    if tree.index is not None:
        data["index"] = tree.index
    return data


def proof_from_json(data: dict) -> ProofTree:
    return ProofTree(Sequent([parse(t) for t in data["seq"]]),
                     data["rule"],
                     tuple(proof_from_json(p) for p in data.get("premises", ())),
                     data.get("index"))
