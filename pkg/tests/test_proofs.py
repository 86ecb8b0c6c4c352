import random

import pytest

from llgames.formula import (
    Atom, Bot, Dual, One, Plus, Sequent, Tensor, Top, With, dualize,
    normalize, parse, parse_sequent, render,
)
from llgames.proofs import (
    ALL_RULES, AXIOM, BOT, CUT, DEFAULT_RULES, HYP, ONE, PAR, PLUS1, PLUS2,
    SEARCH_RULES, TENSOR, THINNING, TOP, WITH, ProofError, ProofTree,
    check_proof, contraction_via_thinning, proof_from_json, proof_to_json,
    prove_formula, search,
)


def seq(text: str) -> Sequent:
    return parse_sequent(text)


def leaf(sequent: Sequent, rule: str = AXIOM) -> ProofTree:
    return ProofTree(sequent, rule)


# ------------------------------------------------------------- check_proof

def test_axiom_checks():
    check_proof(leaf(seq("|- a^, a")))
    # any formula works, not just atoms
    check_proof(leaf(Sequent([parse("a^ @ b^"), parse("a * b")])))
    with pytest.raises(ProofError):
        check_proof(leaf(seq("|- a, a")))
    with pytest.raises(ProofError):
        check_proof(leaf(seq("|- a^, a, b")))


def test_one_top_leaves():
    check_proof(leaf(seq("|- 1"), ONE))
    with pytest.raises(ProofError):
        check_proof(leaf(seq("|- 1, a"), ONE))
    check_proof(leaf(seq("|- top, a, b"), TOP))
    with pytest.raises(ProofError):
        check_proof(leaf(seq("|- a, b"), TOP))


def test_bot_peels_one_unit():
    good = ProofTree(seq("|- bot, a^, a"), BOT, (leaf(seq("|- a^, a")),))
    check_proof(good)
    bad = ProofTree(seq("|- bot, a"), BOT, (leaf(seq("|- a^, a")),))
    with pytest.raises(ProofError):
        check_proof(bad)


def test_par_flattens():
    good = ProofTree(seq("|- a^ @ a"), PAR, (leaf(seq("|- a^, a")),))
    check_proof(good)
    wrong_premise = ProofTree(seq("|- a^ @ a"), PAR, (leaf(seq("|- a, a")),))
    with pytest.raises(ProofError):
        check_proof(wrong_premise)


def test_tensor_splits_context():
    good = ProofTree(
        seq("|- a * b, a^, b^"), TENSOR,
        (leaf(seq("|- a, a^")), leaf(seq("|- b, b^"))))
    check_proof(good)
    # premises must partition the context exactly
    bad = ProofTree(
        seq("|- a * b, a^, b^"), TENSOR,
        (leaf(seq("|- a, a^, b^")), leaf(seq("|- b, b^"))))
    with pytest.raises(ProofError):
        check_proof(bad)


def test_with_shares_context():
    good = ProofTree(
        seq("|- a & b, a^ + b^"), WITH,
        (ProofTree(seq("|- a, a^ + b^"), PLUS1, (leaf(seq("|- a, a^")),)),
         ProofTree(seq("|- b, a^ + b^"), PLUS2, (leaf(seq("|- b, b^")),))))
    check_proof(good)
    mismatched = ProofTree(
        seq("|- a & b, a^"), WITH,
        (leaf(seq("|- a, a^")), leaf(seq("|- b, b^"))))
    with pytest.raises(ProofError):
        check_proof(mismatched)


def test_plus_picks_component():
    check_proof(ProofTree(seq("|- a + b, a^"), PLUS1,
                          (leaf(seq("|- a, a^")),)))
    check_proof(ProofTree(seq("|- a + b, b^"), PLUS2,
                          (leaf(seq("|- b, b^")),)))
    with pytest.raises(ProofError):
        check_proof(ProofTree(seq("|- a + b, b^"), PLUS1,
                              (leaf(seq("|- b, b^")),)))


def test_cut_needs_dual_pair():
    premises = (seq("|- a^, b"), seq("|- b^, a"))
    good = ProofTree(
        seq("|- a^, a"), CUT,
        (ProofTree(premises[0], HYP, (), index=0),
         ProofTree(premises[1], HYP, (), index=1)))
    check_proof(good, hypotheses=premises)
    undual = (seq("|- a^, b"), seq("|- b, a"))
    bad = ProofTree(
        seq("|- a^, a"), CUT,
        (ProofTree(undual[0], HYP, (), index=0),
         ProofTree(undual[1], HYP, (), index=1)))
    with pytest.raises(ProofError):
        check_proof(bad, hypotheses=undual)


def test_thinning_gated_by_rule_set():
    tree = ProofTree(seq("|- a^, a, b"), THINNING, (leaf(seq("|- a^, a")),))
    check_proof(tree, enabled=ALL_RULES)
    with pytest.raises(ProofError):
        check_proof(tree)  # DEFAULT_RULES excludes thinning


def test_hyp_matches_exactly_by_index():
    h = seq("|- a, b")
    tree = ProofTree(h, HYP, (), index=0)
    check_proof(tree, hypotheses=(h,))
    with pytest.raises(ProofError):
        check_proof(tree, hypotheses=(seq("|- a"),))
    with pytest.raises(ProofError):
        check_proof(ProofTree(h, HYP, (), index=1), hypotheses=(h,))
    with pytest.raises(ProofError):
        check_proof(ProofTree(h, HYP, ()), hypotheses=(h,))


def test_malformed_nodes_rejected():
    with pytest.raises(ProofError):
        check_proof(leaf(seq("|- a^, a"), "modus-ponens"))
    with pytest.raises(ProofError):
        check_proof(ProofTree(seq("|- a^, a"), AXIOM, (leaf(seq("|- 1"), ONE),)))
    with pytest.raises(ProofError):
        check_proof(leaf(Sequent([parse("(a * b)^"), parse("a * b")])))


# ------------------------------------------------------------------ search

def test_search_basics():
    assert prove_formula(parse("a^ @ a")).status == "proved"
    assert prove_formula(parse("a^ + a")).status == "unprovable"
    assert prove_formula(parse("1")).status == "proved"
    assert prove_formula(parse("top")).status == "proved"
    assert prove_formula(parse("bot")).status == "unprovable"
    assert prove_formula(parse("a")).status == "unprovable"
    assert prove_formula(parse("1 @ bot")).status == "proved"


def test_search_result_truthiness():
    assert prove_formula(parse("a^ @ a"))
    assert not prove_formula(parse("a^ + a"))


def test_search_handles_tensor_splits():
    assert search(seq("|- a * b, a^, b^")).status == "proved"
    assert search(seq("|- a * b, b^, a^")).status == "proved"
    assert search(seq("|- a * a, a^")).status == "unprovable"


def test_search_additives():
    assert search(seq("|- a^ & b^, a + b")).status == "proved"
    # a plus on the left cannot serve both branches of a with
    assert search(seq("|- a^ & b^, a & b")).status == "unprovable"
    assert search(seq("|- top, 0")).status == "proved"


def test_searched_proofs_check_under_same_rules():
    rng = random.Random(61)
    from llgames.semantics import random_formula
    confirmed = 0
    tried = 0
    while confirmed < 20 and tried < 3000:
        tried += 1
        f = random_formula(depth=3, atoms=("a", "b"), rng=rng,
                           exponentials=False)
        result = prove_formula(f)
        if result.status != "proved":
            continue
        check_proof(result.proof, enabled=SEARCH_RULES)
        confirmed += 1
    assert confirmed == 20


def test_search_with_thinning_enabled():
    target = Sequent([One(), Atom("a")])
    assert search(target).status == "unprovable"
    extended = SEARCH_RULES | {THINNING}
    result = search(target, enabled=extended)
    assert result.status == "proved"
    check_proof(result.proof, enabled=extended)


def test_search_with_hypotheses():
    h = seq("|- c, c^, d")
    result = search(h, hypotheses=(h,))
    assert result.status == "proved"
    assert result.proof.rule == HYP
    assert result.proof.index == 0
    check_proof(result.proof, hypotheses=(h,))


def test_search_budget_outcome():
    big = seq("|- a^ @ (b^ & c^), (a * b) + (a * c)")
    assert search(big).status == "proved"
    result = search(big, max_sequents=3)
    assert result.status == "budget"
    assert not result
    assert result.bound == 3


def test_search_rejects_cut_and_non_nnf():
    with pytest.raises(ValueError):
        search(seq("|- a^, a"), enabled=SEARCH_RULES | {CUT})
    with pytest.raises(ValueError):
        search(Sequent([parse("(a * b)^")]))


def test_search_exchange_invariance():
    a = seq("|- a^ @ b^, a * b")
    b = seq("|- a * b, a^ @ b^")
    assert a == b
    ra, rb = search(a), search(b)
    assert ra.status == rb.status == "proved"
    assert ra.proof == rb.proof


def test_distributivity_sequents():
    pairs = [("a * (b + c)", "(a * b) + (a * c)"),
             ("(a + b) * (c + d)", "(a*c) + (a*d) + (b*c) + (b*d)")]
    for left, right in pairs:
        f, g = parse(left), parse(right)
        for x, y in ((f, g), (g, f)):
            result = search(Sequent([dualize(x), normalize(y)]))
            assert result.status == "proved", (render(x), render(y))


def test_product_expansion_chain_provability():
    from llgames.semantics import (
        choice_product, lockstep_product_expansion,
        stepwise_product_expansion)

    def status(a, b):
        return search(Sequent([dualize(a), normalize(b)])).status

    product = choice_product()
    x1 = stepwise_product_expansion()
    x2 = lockstep_product_expansion()
    assert status(product, x1) == "proved"
    assert status(x1, x2) == "proved"
    assert status(x1, product) == "unprovable"
    assert status(x2, x1) == "unprovable"


# ------------------------------------------------- contraction via thinning

def expected_contraction_tree() -> ProofTree:
    """The six-node derivation of |- a, b from the two hypotheses, written
    out by hand."""
    a, b = Atom("a"), Atom("b")
    neg = Dual(a)
    axiom = ProofTree(Sequent([neg, a]), AXIOM)
    thinned = ProofTree(Sequent([neg, a, b]), THINNING, (axiom,))
    assumed = ProofTree(Sequent([a, a, b]), HYP, (), index=0)
    combined = ProofTree(Sequent([With(a, neg), a, b]), WITH,
                         (assumed, thinned))
    choice = ProofTree(Sequent([Plus(neg, a)]), HYP, (), index=1)
    return ProofTree(Sequent([a, b]), CUT, (combined, choice))


def count_nodes(tree: ProofTree) -> int:
    return 1 + sum(count_nodes(p) for p in tree.premises)


def test_contraction_via_thinning_matches_hand_derivation():
    proof, hypotheses = contraction_via_thinning(Atom("a"), (Atom("b"),))
    assert proof == expected_contraction_tree()
    assert count_nodes(proof) == 6
    assert hypotheses == (Sequent([Atom("a"), Atom("a"), Atom("b")]),
                          Sequent([Plus(Dual(Atom("a")), Atom("a"))]))


def test_contraction_proof_needs_thinning():
    proof, hypotheses = contraction_via_thinning(Atom("a"), (Atom("b"),))
    check_proof(proof, enabled=ALL_RULES, hypotheses=hypotheses)
    with pytest.raises(ProofError):
        check_proof(proof, enabled=ALL_RULES - {THINNING},
                    hypotheses=hypotheses)
    with pytest.raises(ProofError):
        check_proof(proof, enabled=ALL_RULES)  # hypotheses missing


def test_contraction_with_empty_context():
    proof, hypotheses = contraction_via_thinning(parse("a * b"))
    check_proof(proof, enabled=ALL_RULES, hypotheses=hypotheses)
    assert count_nodes(proof) == 5  # no thinning steps needed


# -------------------------------------------------------------------- JSON

def test_proof_json_round_trip():
    proof, _ = contraction_via_thinning(Atom("a"), (Atom("b"),))
    assert proof_from_json(proof_to_json(proof)) == proof
    searched = prove_formula(parse("a^ @ a")).proof
    assert proof_from_json(proof_to_json(searched)) == searched


def test_proof_json_keeps_hypothesis_index():
    data = proof_to_json(ProofTree(seq("|- a"), HYP, (), index=3))
    assert data["index"] == 3
    assert proof_from_json(data).index == 3
