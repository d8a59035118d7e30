"""Command-line front end (``blp``)."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import errors as E
from .generate import FAMILIES, generate
from .instance import OPTIMISTIC, SATISFIED, load_instance, serialize_instance, validate_a1
from .numeric import format_rational, parse_rational
from .oracle import optimistic_oracle, pessimistic_1d_sweep, pessimistic_evaluate
from .optimistic import bilevel_feasible, require_a1, solve_optimistic
from .pessimistic import solve_pessimistic
from .reduction import load_graph, reduce_mis, reduce_mis_boxed, solve_mis_bruteforce
from .specialcase import is_minmax, is_minmin, solve_minmax, solve_minmin
from .valuefn import build_pwl, eval_phi_direct, solve_follower

OK, INFEASIBLE, UNBOUNDED, INPUT, REFUSED = 0, 1, 2, 3, 4


def _fmt(q):
    return None if q is None else format_rational(q)


def _vec(v):
    return None if v is None else [format_rational(q) for q in v]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_point(text: str) -> tuple:
    return tuple(parse_rational(t) for t in text.split(",")) if text.strip() else ()


# -- subcommands --------------------------------------------------------------

def cmd_validate(args) -> int:
    rep = validate_a1(load_instance(args.instance))
    _emit(_dump({
        "a1_status": rep.a1_status,
        "leader_set_nonempty": rep.leader_set_nonempty,
        "leader_set_bounded": rep.leader_set_bounded,
        "follower_recession_trivial": rep.follower_recession_trivial,
        "follower_nonempty_on_leader_vertices": rep.follower_nonempty_on_leader_vertices,
        "notes": list(rep.notes),
    }), None)
    if rep.a1_status != SATISFIED:
        print(f"assumption A1 is {rep.a1_status}", file=sys.stderr)
        return UNBOUNDED
    return OK


def _pick_method(inst, method: str) -> str:
    if method != "auto":
        return method
    if is_minmin(inst):
        return "minmin"
    if is_minmax(inst):
        return "minmax"
    return "thm1" if inst.sense == OPTIMISTIC else "thm2"


def _solve(inst, args):
    method = _pick_method(inst, args.method)
    if method in ("minmin", "minmax"):
        require_a1(inst, args.force)
        return solve_minmin(inst) if method == "minmin" else solve_minmax(inst)
    if method == "thm1":
        if inst.sense != OPTIMISTIC:
            raise E.PreconditionViolated("thm1 solves optimistic instances; use thm2")
        return solve_optimistic(inst, force=args.force)
    if method == "thm2":
        return solve_pessimistic(inst, space=args.space, strict_faces=args.strict_faces, force=args.force)
    if inst.sense == OPTIMISTIC:
        return optimistic_oracle(inst, force=args.force)
    if inst.n_l != 1:
        raise E.PreconditionViolated("the exact pessimistic oracle needs one leader variable")
    return pessimistic_1d_sweep(inst, force=args.force)


def solution_dict(inst, res) -> dict:
    out = {"status": res.status, "value": _fmt(res.value), "x": _vec(res.x)}
    pieces = None
    if hasattr(res, "winning_piece"):
        out["y_witness"] = _vec(res.y)
        cert = {"method": res.method, "piece_index": res.winning_piece, "cell_sign_vector": None, "bases": None}
        stats = {"lp_solves": res.lp_count, "cells": 0}
    else:
        y = solve_follower(inst, res.x)[1] if res.optimal else None
        out["y_witness"] = _vec(y)
        sv = None if res.cell_sign_vector is None else "".join("-0+"[s + 1] for s in res.cell_sign_vector)
        cert = {"method": res.method, "piece_index": res.piece_index, "cell_sign_vector": sv,
                "bases": [list(b) for b in res.active_bases]}
        stats = {"lp_solves": res.lp_solves, "cells": res.cells}
    try:
        pieces = len(build_pwl(inst).pieces)
    except E.BlpError:
        pass
    stats["pieces"] = pieces
    out["certificate"] = cert
    out["stats"] = stats
    return out


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    res = _solve(inst, args)
    _emit(_dump(solution_dict(inst, res)), args.output)
    return OK if res.optimal else INFEASIBLE


def cmd_value_fn(args) -> int:
    inst = load_instance(args.instance)
    pwl = build_pwl(inst)
    out = {"pieces": len(pwl.pieces)}
    if args.pieces:
        out["affine_pieces"] = [
            {"slope": _vec(s), "offset": _fmt(o), "dual": _vec(lam)}
            for (s, o), lam in zip(pwl.pieces, pwl.duals)
        ]
    if args.at is not None:
        x = _parse_point(args.at)
        out["x"] = _vec(x)
        out["phi"] = _fmt(pwl(x))
        out["phi_direct"] = _fmt(eval_phi_direct(inst, x))
        out["active_piece"] = pwl.active_piece(x)
    _emit(_dump(out), None)
    return OK


def cmd_reduce_mis(args) -> int:
    g = load_graph(args.graph)
    inst = reduce_mis_boxed(g) if args.box else reduce_mis(g)
    _emit(serialize_instance(inst).decode("utf-8"), args.output)
    return OK


def cmd_mis(args) -> int:
    res = solve_mis_bruteforce(load_graph(args.graph))
    out = {"size": res.size, "witness": list(res.witness)}
    if args.q is not None:
        out["q"] = args.q
        out["answer"] = "yes" if res.size >= args.q else "no"
    _emit(_dump(out), None)
    return OK


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    try:
        with open(args.solution, encoding="utf-8") as fh:
            sol = json.load(fh)
        status = sol["status"]
        x = tuple(parse_rational(v) for v in sol["x"]) if sol.get("x") is not None else None
        value = parse_rational(sol["value"]) if sol.get("value") is not None else None
        y = sol.get("y_witness")
        y = tuple(parse_rational(v) for v in y) if y is not None else None
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
        raise E.ParseError(f"bad solution file: {e}") from None
    if status != "optimal":
        _emit(_dump({"checked": False, "reason": f"status is {status}"}), None)
        return INFEASIBLE
    problems = []
    if inst.sense == OPTIMISTIC:
        if y is None or not bilevel_feasible(inst, x, y):
            problems.append("(x, y_witness) is not bilevel feasible")
        else:
            got = sum((a * b for a, b in zip(inst.leader_cost_x, x)), Fraction(0))
            got += sum((a * b for a, b in zip(inst.leader_cost_y, y)), Fraction(0))
            if got != value:
                problems.append(f"objective {format_rational(got)} differs from reported value")
    else:
        ev = pessimistic_evaluate(inst, x)
        if not ev.feasible:
            problems.append("x is not pessimistic feasible")
        elif ev.value != value:
            problems.append(f"objective {format_rational(ev.value)} differs from reported value")
    _emit(_dump({"checked": not problems, "problems": problems}), None)
    for p in problems:
        print(p, file=sys.stderr)
    return OK if not problems else INFEASIBLE


def cmd_gen(args) -> int:
    inst = generate(args.family, args.seed, args.nl, args.nf, args.ml, args.mf)
    _emit(serialize_instance(inst).decode("utf-8"), args.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blp", description="Exact solvers for bilevel linear programs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check assumption A1")
    s.add_argument("instance")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("--method", choices=("auto", "thm1", "thm2", "minmax", "minmin", "oracle"), default="auto")
    s.add_argument("--space", choices=("auto", "wt", "xt"), default="auto")
    s.add_argument("--strict-faces", action="store_true")
    s.add_argument("--force", action="store_true", help="skip the A1 check")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("value-fn", help="follower value function")
    s.add_argument("instance")
    s.add_argument("--pieces", action="store_true", help="list the affine pieces")
    s.add_argument("--at", help="comma-separated leader point")
    s.set_defaults(func=cmd_value_fn)

    s = sub.add_parser("reduce-mis", help="build the pessimistic instance for a graph")
    s.add_argument("graph")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--box", action="store_true", help="bound the follower variables")
    s.set_defaults(func=cmd_reduce_mis)

    s = sub.add_parser("mis", help="maximum independent set by brute force")
    s.add_argument("graph")
    s.add_argument("--q", type=int)
    s.set_defaults(func=cmd_mis)

    s = sub.add_parser("check", help="verify a solution file")
    s.add_argument("instance")
    s.add_argument("solution")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("gen", help="generate a random instance")
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--nl", type=int, default=2)
    s.add_argument("--nf", type=int, default=2)
    s.add_argument("--ml", type=int, default=2)
    s.add_argument("--mf", type=int, default=2)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (E.ParseError, E.DimensionError, OSError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return INPUT
    except (E.PreconditionViolated, E.SizeGuard, E.NoVertices) as e:
        print(f"refused: {e}", file=sys.stderr)
        return REFUSED
    except E.InfeasibleAt as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return INFEASIBLE
    except E.BlpError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return UNBOUNDED


if __name__ == "__main__":
    sys.exit(main())
