import json
import random

import pytest

from llgames.formula import parse
from llgames.game import (
    CLIENT, SERVER, TERMINATED, LEAF_C, LEAF_S, LEAF_T, AtomMove,
    BudgetExceededError, Choice, Count, ExplicitTree, IllegalMoveError,
    InComponent, InCopy, atom_game, bang_game, bot_game, dual,
    dump_atom_env, encode_state, interpret, load_atom_env, materialize,
    one_game, par_game, plus_game, render_move, tensor_game, top_game,
    tree_from_json, tree_to_dot, tree_to_json, with_game, zero_game,
)
from llgames.semantics import random_tree
from llgames.strategy import server_wins


def walk_states(p, cap=100_000):
    seen = [p.initial]
    keys = {encode_state(p.initial)}
    at = 0
    while at < len(seen):
        state = seen[at]
        at += 1
        assert len(seen) <= cap
        for m in p.moves(state):
            nxt = p.apply(state, m)
            k = encode_state(nxt)
            if k not in keys:
                keys.add(k)
                seen.append(nxt)
    return seen


# ------------------------------------------------------------ explicit trees

def test_tree_validation():
    with pytest.raises(ValueError):
        ExplicitTree("x", ())
    with pytest.raises(ValueError):
        ExplicitTree(TERMINATED, (("m", LEAF_T),))
    with pytest.raises(ValueError):
        ExplicitTree(CLIENT, (("m", LEAF_T), ("m", LEAF_C)))


def test_tree_json_round_trip():
    tree = random_tree(depth=4, branching=3, seed=3)
    assert tree_from_json(tree_to_json(tree)) == tree


def test_atom_env_round_trip(tmp_path):
    env = {"a": random_tree(3, 2, seed=1), "b": LEAF_C}
    path = tmp_path / "env.json"
    path.write_text(json.dumps(dump_atom_env(env)))
    assert load_atom_env(str(path)) == env
    # bare mapping form, no wrapper key
    assert load_atom_env({"a": tree_to_json(LEAF_T)}) == {"a": LEAF_T}


def test_tree_to_dot_mentions_every_node():
    tree = ExplicitTree(CLIENT, (("x", LEAF_S), ("y", LEAF_T)))
    dot = tree_to_dot(tree)
    assert dot.startswith("digraph")
    assert dot.count("->") == 2
    assert '"x"' in dot and '"y"' in dot


# ---------------------------------------------------------------- disciplines

def test_constants():
    assert materialize(top_game()) == LEAF_C
    assert materialize(zero_game()) == LEAF_S
    assert materialize(one_game()) == LEAF_T
    assert materialize(one_game()) == materialize(bot_game())
    assert materialize(dual(top_game())) == materialize(zero_game())


def test_atom_game_replays_tree():
    tree = random_tree(4, 3, seed=9)
    assert materialize(atom_game(tree)) == tree


def test_choice_games_unwrap_chosen_component():
    left, right = LEAF_T, ExplicitTree(SERVER, (("m", LEAF_T),))
    w = with_game(atom_game(left), atom_game(right))
    assert w.turn(w.initial) == CLIENT
    state = w.apply(w.initial, Choice("R"))
    assert w.turn(state) == SERVER
    assert [render_move(m) for m in w.moves(state)] == ["m"]

    p = plus_game(atom_game(left), atom_game(right))
    assert p.turn(p.initial) == SERVER


def test_illegal_moves_rejected():
    w = with_game(atom_game(LEAF_T), atom_game(LEAF_T))
    with pytest.raises(IllegalMoveError):
        w.step(w.initial, AtomMove("nope"))
    state = w.apply(w.initial, Choice("L"))
    with pytest.raises(IllegalMoveError):
        w.step(state, Choice("L"))


def test_tensor_terminates_when_both_do():
    t = tensor_game(atom_game(LEAF_T), atom_game(LEAF_T))
    assert t.turn(t.initial) == TERMINATED
    half = tensor_game(atom_game(LEAF_T), atom_game(LEAF_C))
    assert half.turn(half.initial) == CLIENT


def test_tensor_server_priority_and_serialization():
    """With the server due in both components, only the leftmost is offered;
    the client may move in either."""
    server_due = ExplicitTree(SERVER, (("s1", LEAF_T), ("s2", LEAF_T)))
    t = tensor_game(atom_game(server_due), atom_game(server_due))
    assert t.turn(t.initial) == SERVER
    assert {render_move(m) for m in t.moves(t.initial)} == {"L:s1", "L:s2"}

    rt = tensor_game(atom_game(server_due), atom_game(server_due),
                     serialize="rightmost")
    assert {render_move(m) for m in rt.moves(rt.initial)} == {"R:s1", "R:s2"}

    client_due = ExplicitTree(CLIENT, (("c1", LEAF_T),))
    both = tensor_game(atom_game(client_due), atom_game(client_due))
    assert {render_move(m) for m in both.moves(both.initial)} == {
        "L:c1", "R:c1"}


def test_par_is_dual_discipline():
    """par swaps the scheduling: the server moves freely, the client is
    serialized."""
    client_due = ExplicitTree(CLIENT, (("c1", LEAF_T), ("c2", LEAF_T)))
    p = par_game(atom_game(client_due), atom_game(client_due))
    assert p.turn(p.initial) == CLIENT
    assert {render_move(m) for m in p.moves(p.initial)} == {"L:c1", "L:c2"}


def test_bang_opens_with_count_then_interleaves():
    inner = ExplicitTree(CLIENT, (("go", LEAF_T),))
    b = bang_game(atom_game(inner), cap=2)
    assert b.turn(b.initial) == CLIENT
    counts = {render_move(m) for m in b.moves(b.initial)}
    assert counts == {"n=0", "n=1", "n=2"}
    run = b.apply(b.initial, Count(2))
    assert {render_move(m) for m in b.moves(run)} == {"#0:go", "#1:go"}
    one_played = b.apply(run, InCopy(0, AtomMove("go")))
    assert {render_move(m) for m in b.moves(one_played)} == {"#1:go"}
    assert b.turn(b.apply(one_played, InCopy(1, AtomMove("go")))) == TERMINATED


def test_bang_count_zero_terminates():
    b = bang_game(atom_game(LEAF_C), cap=2)
    assert b.turn(b.apply(b.initial, Count(0))) == TERMINATED


def test_bang_consistent_mode_forces_equal_replies():
    """Once copy 0 answers the shared prefix, copy 1's reply is forced."""
    inner = ExplicitTree(
        CLIENT, (("q", ExplicitTree(SERVER, (("x", LEAF_T), ("y", LEAF_T)))),))
    b = bang_game(atom_game(inner), cap=2, mode="consistent")
    s = b.apply(b.initial, Count(2))
    s = b.apply(s, InCopy(0, AtomMove("q")))
    s = b.apply(s, InCopy(1, AtomMove("q")))
    s = b.apply(s, InCopy(0, AtomMove("x")))
    assert {render_move(m) for m in b.moves(s)} == {"#1:x"}

    stream = bang_game(atom_game(inner), cap=2, mode="stream")
    s = stream.apply(stream.initial, Count(2))
    s = stream.apply(s, InCopy(0, AtomMove("q")))
    s = stream.apply(s, InCopy(1, AtomMove("q")))
    s = stream.apply(s, InCopy(0, AtomMove("x")))
    assert {render_move(m) for m in stream.moves(s)} == {"#1:x", "#1:y"}


# ------------------------------------------------------------- reachability

@pytest.mark.parametrize("seed", range(12))
def test_reachable_states_sane(seed):
    """terminated states offer no moves; plays respect the depth bound."""
    from llgames.semantics import random_formula
    rng = random.Random(seed)
    f = random_formula(depth=2, atoms=("a", "b"), rng=rng)
    env = {n: random_tree(2, 2, rng=rng) for n in ("a", "b")}
    p = interpret(f, env, cap=2)
    bound = p.depth_bound()
    for state in walk_states(p):
        if p.turn(state) == TERMINATED:
            assert p.moves(state) == ()

    # longest play cannot exceed the bound
    def deepest(state, depth):
        moves = p.moves(state)
        assert depth <= bound
        for m in moves:
            deepest(p.apply(state, m), depth + 1)

    deepest(p.initial, 0)


def test_serialization_invariance_on_winner():
    """leftmost vs rightmost server serialization never changes the winner."""
    rng = random.Random(31)
    for _ in range(500):
        left = random_tree(3, 2, rng=rng)
        right = random_tree(3, 2, rng=rng)
        lt = tensor_game(atom_game(left), atom_game(right), "leftmost")
        rt = tensor_game(atom_game(left), atom_game(right), "rightmost")
        assert server_wins(lt) == server_wins(rt)


# ---------------------------------------------------------------- interpret

def test_interpret_requires_bound_atoms():
    with pytest.raises(KeyError):
        interpret(parse("a"), {})


def test_interpret_sugar_matches_normalized():
    env = {"a": random_tree(2, 2, seed=4), "b": random_tree(2, 2, seed=5)}
    sugar = interpret(parse("a -o b"), env)
    plain = interpret(parse("a^ @ b"), env)
    assert materialize(sugar) == materialize(plain)
    double = interpret(parse("a^^"), env)
    assert materialize(double) == materialize(interpret(parse("a"), env))


def test_interpret_remembers_what_it_built():
    env = {"a": LEAF_T}
    p = interpret(parse("!a"), env, cap=3, mode="stream")
    assert p.cap == 3
    assert p.mode == "stream"
    assert p.env == env


def test_materialize_budget():
    big = random_tree(6, 3, seed=8)
    p = tensor_game(atom_game(big), atom_game(big))
    with pytest.raises(BudgetExceededError):
        materialize(p, max_nodes=10)


def test_dual_involution_materialized():
    tree = random_tree(3, 2, seed=6)
    p = atom_game(tree)
    assert materialize(dual(dual(p))) == materialize(p)
