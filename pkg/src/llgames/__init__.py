"""Linear-logic game workbench.

Formulas compile to finite client/server protocols; a backward-induction
solver decides who wins; validity quantifies atoms over pools of games; a
one-sided sequent prover supplies the proof-theoretic side of the
comparison.  The headline fact the two sides disagree on: the choice
between an atom's dual and the atom itself is always won by the server,
yet no cut-free proof of it exists.
"""

from .formula import (
    Atom, Bang, Bot, Dual, Formula, Lolli, One, Par, ParseError, Plus, Quest,
    Sequent, Tensor, Top, With, Zero, atom_names, connective_count, dualize,
    node_count, normalize, parse, parse_sequent, render, sequent_to_formula,
    two_sided_to_one_sided,
)
from .game import (
    AtomMove, BudgetExceededError, Choice, Count, CLIENT, SERVER, TERMINATED,
    ExplicitTree, IllegalMoveError, InComponent, InCopy, InterpretedProtocol,
    Move, Protocol, atom_game, bang_game, bot_game, dual, dump_atom_env,
    encode_state, interpret, lolli_game, load_atom_env, materialize, one_game,
    par_game, plus_game, quest_game, render_move, tensor_game, top_game,
    tree_from_json, tree_to_dot, tree_to_json, with_game, zero_game,
)
from .strategy import (
    Engine, PlaySession, Solution, copycat, extract_behavior,
    inconsistency_witness, is_behavior, lorenzen_uniform, referee,
    replication_consistent_plays, server_wins, server_wins_naive, solve,
    strategy_wins,
)
from .semantics import (
    AtomPool, Verdict, choice_product, entails, equiv, excluded_middle,
    iso_check, load_pool, lockstep_product_expansion, random_formula,
    random_tree, save_pool, standard_pool, stepwise_product_expansion,
    three_bit_formula, unit_env, valid_naive,
)
from .proofs import (
    ProofError, ProofTree, SearchResult, check_proof,
    contraction_via_thinning, proof_from_json, proof_to_json, prove_formula,
    search,
)

__version__ = "0.1.0"
