"""Command-line front end.

Exit codes: 0 success / yes, 1 a semantic "no" (not isomorphic, not ball
preserving, a failed self-check), 2 invalid space or usage error, 3 unreadable
or malformed input, 4 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import permutations
from pathlib import Path

from . import __version__
from .ballean import enumerate_ballean, hasse
from .ballmap import (
    PointBijection,
    brute_force_exists,
    exists_ball_preserving_bijection,
    find_isometry,
    is_ball_preserving,
)
from .generate import generate_random
from .isomorphism import CapExceeded, brute_force_tree_iso, digraph_to_tree, poset_isomorphism
from .metric import SpaceError, ValidationReport, format_scalar
from .reptree import build_rep_tree
from .selfcheck import run_selfcheck
from .spaceio import (
    InvalidSpace,
    dump_space,
    load_space,
    parse_space,
    tree_to_dot,
    tree_to_json,
    tree_to_newick,
)

EXIT_OK, EXIT_NO, EXIT_INVALID, EXIT_INPUT, EXIT_ORACLE = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load(path: str):
    try:
        return load_space(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def cmd_validate(args) -> int:
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    result = parse_space(text, "csv" if path.suffix.lower() == ".csv" else "json")
    if isinstance(result, ValidationReport):
        if args.json:
            _emit({
                "status": "fail",
                "violations": [
                    {
                        "kind": v.kind,
                        "points": [result.points[i] for i in v.indices],
                        "values": [format_scalar(x) for x in v.values],
                    }
                    for v in result.violations
                ],
            })
        else:
            print(f"{path}: not an ultrametric space")
            for line in result.lines():
                print(f"  {line}")
        return EXIT_INVALID
    if args.json:
        _emit({"status": "pass", "points": len(result)})
    else:
        print(f"{path}: valid ultrametric space on {len(result)} points")
    return EXIT_OK


def cmd_tree(args) -> int:
    t = build_rep_tree(_load(args.file))
    if args.format == "json":
        _emit(tree_to_json(t))
    elif args.format == "dot":
        sys.stdout.write(tree_to_dot(t))
    else:
        sys.stdout.write(tree_to_newick(t))
    return EXIT_OK


def cmd_ballean(args) -> int:
    s = _load(args.file)
    b = enumerate_ballean(s)
    h = hasse(b)
    names = [[s.points[x] for x in ball.members] for ball in b]
    if args.json:
        _emit({
            "balls": [
                {"id": i, "members": m, "radius": format_scalar(ball.radius)}
                for i, (m, ball) in enumerate(zip(names, b))
            ],
            "covers": sorted([list(a) for a in h.arcs]),
        })
        return EXIT_OK
    print(f"{len(b)} balls")
    for i, (m, ball) in enumerate(zip(names, b)):
        print(f"  [{i}] r={format_scalar(ball.radius)} {{{', '.join(m)}}}")
    print(f"{len(h.arcs)} cover arcs")
    for u, v in sorted(h.arcs):
        print(f"  [{u}] -> [{v}]")
    return EXIT_OK


def _brute_isometry(sx, sy, cap=7) -> bool:
    if len(sx) != len(sy):
        return False
    if len(sx) > cap:
        raise CapExceeded(f"{len(sx)} points exceeds brute-force cap {cap}")
    n = len(sx)
    return any(
        all(sx.dist[x][y] == sy.dist[p[x]][p[y]] for x in range(n) for y in range(n))
        for p in permutations(range(n))
    )


def cmd_iso(args) -> int:
    sx, sy = _load(args.a), _load(args.b)
    payload: dict = {"mode": args.mode}
    if args.mode == "ball":
        decision = exists_ball_preserving_bijection(sx, sy)
        found = decision.equivalent
        if found:
            payload["witness"] = decision.witness.to_names(sx, sy)
        oracle = (lambda: brute_force_exists(sx, sy).equivalent)
    elif args.mode == "isometry":
        phi = find_isometry(sx, sy)
        found = phi is not None
        if found:
            payload["witness"] = phi.to_names(sx, sy)
        oracle = (lambda: _brute_isometry(sx, sy))
    else:
        bx, by = enumerate_ballean(sx), enumerate_ballean(sy)
        hx, hy = hasse(bx), hasse(by)
        f = poset_isomorphism(hx, hy)
        found = f is not None
        if found:
            payload["witness"] = [
                [[sx.points[x] for x in bx.balls[u].members],
                 [sy.points[y] for y in by.balls[f[u]].members]]
                for u in range(len(bx))
            ]
        oracle = (lambda: brute_force_tree_iso(digraph_to_tree(hx), digraph_to_tree(hy)) is not None)
    if args.oracle:
        try:
            agree = oracle() == found
            payload["oracle"] = "agree" if agree else "disagree"
        except CapExceeded as exc:
            payload["oracle"] = f"skipped ({exc})"
            agree = True
        if not agree:
            print("oracle disagreement", file=sys.stderr)
            _emit(payload | {"isomorphic": found})
            return EXIT_ORACLE
    payload["isomorphic"] = found
    if not found:
        print("not isomorphic")
        if args.oracle:
            print(f"oracle: {payload['oracle']}")
        return EXIT_NO
    _emit(payload)
    return EXIT_OK


def cmd_check_map(args) -> int:
    sx, sy = _load(args.a), _load(args.b)
    try:
        mapping = json.loads(Path(args.map).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{args.map}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.map}: bad JSON: {exc}") from None
    if not isinstance(mapping, dict) or not all(isinstance(v, str) for v in mapping.values()):
        raise InputError(f"{args.map}: expected an object of point names")
    try:
        f = PointBijection.from_names(sx, sy, mapping)
    except ValueError as exc:
        raise InputError(f"{args.map}: {exc}") from None
    check = is_ball_preserving(f, sx, sy)
    if check:
        print("ball-preserving")
        return EXIT_OK
    print("not ball-preserving")
    if args.explain:
        space, word = (sx, "image") if check.direction == "image" else (sy, "preimage")
        ball = ", ".join(space.points[i] for i in check.ball)
        print(f"  the {word} of ball {{{ball}}} is not a ball")
    return EXIT_NO


def cmd_gen(args) -> int:
    pool = None
    if args.pool:
        pool = [x for x in args.pool.split(",") if x]
    s = generate_random(args.seed, args.n, args.depth, pool)
    text = dump_space(s, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    report = run_selfcheck(args.seed, args.count, args.max_n)
    if args.json:
        _emit(report.as_dict())
    else:
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"{status} {c.name}: {c.cases} cases"
            if not c.passed:
                line += f", {c.failures} failed; first: {c.first_failure}"
            print(line)
    return EXIT_OK if report.passed else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ultraballs",
        description="Representing trees, balleans and ball-preserving maps of finite ultrametric spaces.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("validate", help="check that a file holds an ultrametric space")
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_validate)

    c = sub.add_parser("tree", help="print the representing tree")
    c.add_argument("file")
    c.add_argument("--format", choices=["json", "dot", "newick"], default="json")
    c.set_defaults(func=cmd_tree)

    c = sub.add_parser("ballean", help="list balls and their cover arcs")
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_ballean)

    c = sub.add_parser("iso", help="decide equivalence of two spaces")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--mode", choices=["ball", "isometry", "poset"], default="ball")
    c.add_argument("--oracle", action="store_true", help="cross-check by brute force when small")
    c.set_defaults(func=cmd_iso)

    c = sub.add_parser("check-map", help="test whether a point map preserves balls")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("map")
    c.add_argument("--explain", action="store_true")
    c.set_defaults(func=cmd_check_map)

    c = sub.add_parser("gen", help="generate a random ultrametric space")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--depth", type=int, default=None)
    c.add_argument("--pool", default=None, help="comma-separated label values")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_gen)

    c = sub.add_parser("selfcheck", help="run the oracle-backed consistency suite")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--count", type=int, default=50)
    c.add_argument("--max-n", type=int, default=6)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_selfcheck)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidSpace as exc:
        print(f"invalid space: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpaceError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
