"""Command-line surface: parse, inspect, solve, validate, prove, play, serve.

Exit codes: 0 success, 1 refuted/unprovable/budget outcomes, 2 usage and
file errors.  Structured output (--json) is deterministic for fixed flags
and seeds: keys are sorted and wall-clock times are excluded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import formula as fm
from .formula import ParseError, Sequent, dualize, normalize, parse, \
    parse_sequent, render
from .game import (
    BudgetExceededError, CLIENT, SERVER, TURN_WORD, IllegalMoveError,
    interpret, load_atom_env, materialize, render_move, tree_to_dot,
    tree_to_json,
)
from .proofs import (
    ALL_RULES, DEFAULT_RULES, SEARCH_RULES, THINNING, ProofError,
    check_proof, proof_from_json, proof_to_json, search,
)
from .semantics import (
    DEFAULT_BANG_CAP, DEFAULT_BANG_MODE, DEFAULT_NODE_BUDGET,
    DEFAULT_POOL_SEED, DEFAULT_POOL_SIZE, DEFAULT_SAMPLE_LIMIT,
    AtomPool, Verdict, describe_tree, load_pool, standard_pool, unit_env,
    valid_naive,
)
from .strategy import Engine, PlaySession, solve
from .reproduction import format_table, run_all


@dataclass
class Config:
    """Knobs shared across commands; the defaults are the acceptance ones."""
    bang_cap: int = DEFAULT_BANG_CAP
    bang_mode: str = DEFAULT_BANG_MODE
    pool_path: str | None = None
    pool_size: int = DEFAULT_POOL_SIZE
    pool_seed: int = DEFAULT_POOL_SEED
    sample_limit: int = DEFAULT_SAMPLE_LIMIT
    node_budget: int = DEFAULT_NODE_BUDGET
    output_format: str = "text"

    @property
    def structured(self) -> bool:
        return self.output_format == "structured"

    def pool(self) -> AtomPool:
        if self.pool_path:
            return load_pool(self.pool_path)
        return standard_pool(self.pool_size, self.pool_seed)


class UsageError(Exception):
    pass


def _config(args: argparse.Namespace) -> Config:
    return Config(
        bang_cap=getattr(args, "bang_cap", DEFAULT_BANG_CAP),
        bang_mode=getattr(args, "bang_mode", DEFAULT_BANG_MODE),
        pool_path=getattr(args, "pool", None),
        pool_size=getattr(args, "pool_size", DEFAULT_POOL_SIZE),
        pool_seed=getattr(args, "pool_seed", DEFAULT_POOL_SEED),
        sample_limit=getattr(args, "sample_limit", DEFAULT_SAMPLE_LIMIT),
        node_budget=getattr(args, "node_budget", DEFAULT_NODE_BUDGET),
        output_format="structured" if getattr(args, "json", False) else "text",
    )


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _parse_formula(text: str) -> fm.Formula:
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from exc


def _resolve_atoms(spec: str | None, f: fm.Formula,
                   cfg: Config) -> dict | AtomPool:
    """An --atoms value is "unit", "pool/std", "pool/<file>", or an
    environment file; pools mean "run once per pool game"."""
    if spec is None or spec == "unit":
        return unit_env(f)
    if spec == "pool/std":
        return cfg.pool()
    if spec.startswith("pool/"):
        try:
            return load_pool(spec[len("pool/"):])
        except OSError as exc:
            raise UsageError(f"cannot read pool {spec!r}: {exc}") from exc
    try:
        return load_atom_env(spec)
    except OSError as exc:
        raise UsageError(f"cannot read atom environment {spec!r}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad atom environment {spec!r}: {exc}") from exc


def _interpret(f: fm.Formula, env: dict, cfg: Config):
    try:
        return interpret(f, env, cap=cfg.bang_cap, mode=cfg.bang_mode)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


# ---------------------------------------------------------------- commands

def cmd_parse(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.formula)
    n = normalize(f)
    if cfg.structured:
        _emit({
            "input": args.formula,
            "rendered": render(f),
            "normalized": render(n),
            "atoms": sorted(fm.atom_names(n)),
            "connectives": fm.connective_count(f),
        })
    else:
        print(f"rendered:   {render(f)}")
        print(f"normalized: {render(n)}")
        print(f"atoms:      {' '.join(sorted(fm.atom_names(n))) or '(none)'}")
    return 0


def _outline(tree, label: str = "", indent: str = "") -> list[str]:
    head = f"{indent}{label + ' ' if label else ''}[{TURN_WORD[tree.turn]}]"
    lines = [head]
    for move, child in tree.moves:
        lines.extend(_outline(child, move, indent + "  "))
    return lines


def cmd_game(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.formula)
    env = _resolve_atoms(args.atoms, f, cfg)
    if isinstance(env, AtomPool):
        raise UsageError("game needs a single atom environment, not a pool")
    p = _interpret(f, env, cfg)
    try:
        tree = materialize(p, args.max_nodes)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1
    if args.export == "dot":
        print(tree_to_dot(tree))
    elif args.export == "json" or cfg.structured:
        _emit({"formula": render(p.formula), "tree": tree_to_json(tree)})
    else:
        print("\n".join(_outline(tree)))
        print(f"nodes: {tree.node_count()}, height: {tree.height()}")
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.formula)
    env = _resolve_atoms(args.atoms, f, cfg)
    try:
        if isinstance(env, AtomPool):
            rows = []
            for i, tree in enumerate(env.games):
                one_env = {n: tree for n in fm.atom_names(normalize(f))}
                sol = solve(_interpret(f, one_env, cfg), cfg.node_budget)
                rows.append((i, describe_tree(tree), sol.winner))
            if cfg.structured:
                _emit({"winners": [
                    {"game": i, "atom": d, "winner": w} for i, d, w in rows]})
            else:
                for i, d, w in rows:
                    print(f"game {i:3} ({d}): winner: {w}")
            return 0
        sol = solve(_interpret(f, env, cfg), cfg.node_budget)
        if cfg.structured:
            _emit({"winner": sol.winner})
        else:
            print(f"winner: {sol.winner}")
        return 0
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1


def _verdict_exit(verdicts: list[Verdict], cfg: Config,
                  labels: list[str]) -> int:
    if cfg.structured:
        _emit({label: _verdict_json(v) for label, v in zip(labels, verdicts)})
    else:
        for label, v in zip(labels, verdicts):
            print(f"{label}: {v.summary()}")
    return 0 if all(v.valid for v in verdicts) else 1


def _verdict_json(v: Verdict) -> dict:
    data = {"status": v.status, "scope": v.scope, "checked": v.checked}
    if v.countermodel is not None:
        data["countermodel"] = {name: tree_to_json(tree)
                                for name, tree in sorted(v.countermodel.items())}
    return data


def cmd_valid(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.formula)
    try:
        v = valid_naive(f, cfg.pool(), cap=cfg.bang_cap, mode=cfg.bang_mode,
                        sample_limit=cfg.sample_limit, seed=args.seed,
                        node_budget=cfg.node_budget)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1
    return _verdict_exit([v], cfg, ["valid"])


def cmd_entails(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.left)
    g = _parse_formula(args.right)
    try:
        v = valid_naive(fm.Lolli(f, g), cfg.pool(), cap=cfg.bang_cap,
                        mode=cfg.bang_mode, sample_limit=cfg.sample_limit,
                        seed=args.seed, node_budget=cfg.node_budget)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1
    return _verdict_exit([v], cfg, ["entails"])


def cmd_equiv(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.left)
    g = _parse_formula(args.right)
    try:
        kwargs = dict(cap=cfg.bang_cap, mode=cfg.bang_mode,
                      sample_limit=cfg.sample_limit, seed=args.seed,
                      node_budget=cfg.node_budget)
        forward = valid_naive(fm.Lolli(f, g), cfg.pool(), **kwargs)
        backward = valid_naive(fm.Lolli(g, f), cfg.pool(), **kwargs)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 1
    return _verdict_exit([forward, backward], cfg, ["forward", "backward"])


def _target_sequent(text: str) -> Sequent:
    if "|-" in text or "⊢" in text:
        try:
            return parse_sequent(text)
        except ParseError as exc:
            raise UsageError(f"cannot parse sequent {text!r}: {exc}") from exc
    return Sequent([normalize(_parse_formula(text))])


def cmd_prove(args: argparse.Namespace) -> int:
    cfg = _config(args)
    seq = _target_sequent(args.target)
    rules = SEARCH_RULES | ({THINNING} if args.thinning else set())
    hypotheses = tuple(_target_sequent(h) for h in args.hyp or ())
    result = search(seq, enabled=rules, hypotheses=hypotheses,
                    max_sequents=args.max_sequents)
    if cfg.structured:
        _emit({
            "status": result.status,
            "explored": result.explored,
            "proof": proof_to_json(result.proof) if result.proof else None,
        })
    else:
        if result.status == "proved":
            print(result.proof.pretty())
        else:
            print(f"{result.status} (explored {result.explored} sequents)")
    return 0 if result.status == "proved" else 1


def cmd_check_proof(args: argparse.Namespace) -> int:
    cfg = _config(args)
    try:
        with open(args.file, encoding="utf-8") as fh:
            tree = proof_from_json(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read proof {args.file!r}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise UsageError(f"malformed proof file {args.file!r}: {exc}") from exc
    rules = (ALL_RULES if args.thinning else ALL_RULES - {THINNING})
    hypotheses = tuple(_target_sequent(h) for h in args.hyp or ())
    try:
        check_proof(tree, enabled=rules, hypotheses=hypotheses)
    except ProofError as exc:
        if cfg.structured:
            _emit({"ok": False, "error": str(exc)})
        else:
            print(f"rejected: {exc}")
        return 1
    if cfg.structured:
        _emit({"ok": True, "conclusion": str(tree.sequent)})
    else:
        print(f"checked: {str(tree.sequent)}")
    return 0


def cmd_play(args: argparse.Namespace) -> int:
    cfg = _config(args)
    f = _parse_formula(args.formula)
    env = _resolve_atoms(args.atoms, f, cfg)
    if isinstance(env, AtomPool):
        raise UsageError("play needs a single atom environment, not a pool")
    p = _interpret(f, env, cfg)
    human = CLIENT if args.side == "client" else SERVER
    engine_side = SERVER if human == CLIENT else CLIENT
    engine = Engine(p, engine_side, mode=args.engine, seed=args.seed)
    session = PlaySession(p)
    scripted = list(args.moves.split(",")) if args.moves else None

    def engine_turns() -> None:
        while session.status() == "ongoing" and session.turn() == engine_side:
            move = engine.pick(session.state)
            session.apply(move)
            print(f"engine ({TURN_WORD[engine_side]}) plays {render_move(move)}")

    engine_turns()
    while session.status() == "ongoing":
        legal = [render_move(m) for m in session.legal_moves()]
        print(f"your turn ({TURN_WORD[human]}); legal: {', '.join(legal)}")
        if scripted is not None:
            if not scripted:
                print("script exhausted before the play ended", file=sys.stderr)
                return 2
            text = scripted.pop(0).strip()
            print(f"> {text}")
        else:
            try:
                text = input("> ").strip()
            except EOFError:
                print("no more input; stopping")
                return 0
            if text in ("quit", "exit"):
                return 0
        try:
            session.apply_rendered(text)
        except IllegalMoveError as exc:
            if scripted is not None:
                print(f"illegal scripted move: {exc}", file=sys.stderr)
                return 2
            print(f"illegal: {exc}")
            continue
        engine_turns()
    print(session.trace_text())
    return 0


def cmd_demo(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if args.what != "paper":
        raise UsageError(f"unknown demo {args.what!r}; available: paper")
    results = run_all()
    if cfg.structured:
        _emit({"criteria": [
            {"name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results]})
    else:
        print(format_table(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn
    from .server import build_app
    cfg = _config(args)
    app = build_app(cfg, engine_mode=args.engine, engine_seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ----------------------------------------------------------------- parser

def _add_bang_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--bang-cap", type=int, default=DEFAULT_BANG_CAP,
                     help="replication bound for ! and ? (default 2)")
    sub.add_argument("--bang-mode", choices=("consistent", "stream"),
                     default=DEFAULT_BANG_MODE,
                     help="replication discipline (default consistent)")


def _add_pool_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--pool", help="atom pool file (default: built-in pool)")
    sub.add_argument("--pool-size", type=int, default=DEFAULT_POOL_SIZE)
    sub.add_argument("--pool-seed", type=int, default=DEFAULT_POOL_SEED)
    sub.add_argument("--sample-limit", type=int, default=DEFAULT_SAMPLE_LIMIT,
                     help="assignment cap before sampling kicks in")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for sampled assignments")


def _add_atoms_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--atoms", default=None,
                     help='"unit" (default), "pool/std", "pool/<file>", '
                          "or an atom environment JSON file")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="llgames",
        description="Game-semantics workbench for linear logic formulas.")
    top.add_argument("--json", action="store_true",
                     help="structured deterministic output")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and render a formula")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("game", help="materialize a formula's game tree")
    p.add_argument("formula")
    _add_atoms_flag(p)
    _add_bang_flags(p)
    p.add_argument("--export", choices=("text", "dot", "json"),
                   default="text")
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.set_defaults(fn=cmd_game)

    p = sub.add_parser("solve", help="compute the winner and strategy")
    p.add_argument("formula")
    _add_atoms_flag(p)
    _add_bang_flags(p)
    _add_pool_flags(p)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("valid", help="check validity over an atom pool")
    p.add_argument("formula")
    _add_bang_flags(p)
    _add_pool_flags(p)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(fn=cmd_valid)

    p = sub.add_parser("entails", help="check one formula entails another")
    p.add_argument("left")
    p.add_argument("right")
    _add_bang_flags(p)
    _add_pool_flags(p)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(fn=cmd_entails)

    p = sub.add_parser("equiv", help="check both entailment directions")
    p.add_argument("left")
    p.add_argument("right")
    _add_bang_flags(p)
    _add_pool_flags(p)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("prove", help="search for a sequent proof")
    p.add_argument("target", help='formula or sequent ("|- a, b")')
    p.add_argument("--thinning", action="store_true",
                   help="allow the thinning rule in search")
    p.add_argument("--hyp", action="append",
                   help="hypothesis sequent (repeatable)")
    p.add_argument("--max-sequents", type=int, default=200_000)
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("check-proof", help="check a proof tree file")
    p.add_argument("file")
    p.add_argument("--thinning", action="store_true",
                   help="allow the thinning rule")
    p.add_argument("--hyp", action="append",
                   help="hypothesis sequent (repeatable)")
    p.set_defaults(fn=cmd_check_proof)

    p = sub.add_parser("play", help="play a formula against the engine")
    p.add_argument("formula")
    p.add_argument("--side", choices=("client", "server"), default="client")
    _add_atoms_flag(p)
    _add_bang_flags(p)
    p.add_argument("--engine", choices=("solve", "random"), default="solve")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--moves", help="comma-separated scripted moves")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("demo", help="run the built-in reproduction suite")
    p.add_argument("what", nargs="?", default="paper")
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("serve", help="serve the session API for the arena")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8777)
    p.add_argument("--engine", choices=("solve", "random"), default="solve")
    p.add_argument("--seed", type=int, default=0)
    _add_bang_flags(p)
    p.set_defaults(fn=cmd_serve)

    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
