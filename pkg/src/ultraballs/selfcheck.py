"""Oracle-backed consistency checks over a seeded corpus of random spaces."""

from __future__ import annotations

import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .ballean import ballean_from_tree, check_ball_transitivity, enumerate_ballean, hasse, tree_digraph
from .ballmap import (
    brute_force_exists,
    exists_ball_preserving_bijection,
    is_ball_preserving,
    posets_isomorphic_iff_ballmap,
)
from .generate import generate_random
from .isomorphism import canonical_unlabeled, digraph_to_tree, poset_isomorphism, verify_digraph_bijection
from .metric import UltrametricSpace
from .reptree import build_rep_tree, distance_from_tree, gammas, strip_labels

__all__ = [
    "CheckResult",
    "corpus",
    "round_trip",
    "ball_count_identity",
    "hasse_tree_agreement",
    "cover_criterion",
    "tree_structure",
    "oracle_agreement",
    "poset_consistency",
    "run_selfcheck",
]

BRUTE_FORCE_CAP = 7


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0
    first_failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, detail: str = "") -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "cases": self.cases,
            "failures": self.failures,
            "first_failure": self.first_failure,
        }


def corpus(seed: int, count: int, max_n: int, min_n: int = 1) -> list[UltrametricSpace]:
    """``count`` random spaces with sizes drawn uniformly from ``[min_n, max_n]``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(min_n, max_n)
        out.append(generate_random(rng.getrandbits(32), n))
    return out


def round_trip(s: UltrametricSpace) -> tuple[bool, str]:
    t = build_rep_tree(s)
    n = len(s)
    for x in range(n):
        for y in range(n):
            if distance_from_tree(t, x, y) != s.dist[x][y]:
                return False, f"d({s.points[x]}, {s.points[y]}) not reproduced"
    return True, ""


def ball_count_identity(s: UltrametricSpace) -> tuple[bool, str]:
    t = build_rep_tree(s)
    direct = enumerate_ballean(s)
    via_tree = ballean_from_tree(t)
    if len(direct) != len(t):
        return False, f"{len(direct)} balls vs {len(t)} tree nodes"
    if direct.member_sets != via_tree.member_sets:
        return False, "ball families differ"
    return True, ""


def hasse_tree_agreement(s: UltrametricSpace) -> tuple[bool, str]:
    """Hasse digraph of the ballean vs child -> parent digraph of the tree."""
    h = hasse(enumerate_ballean(s))
    g = tree_digraph(strip_labels(build_rep_tree(s)))
    if canonical_unlabeled(digraph_to_tree(h)) != canonical_unlabeled(digraph_to_tree(g)):
        return False, "canonical forms differ"
    f = poset_isomorphism(h, g)
    if f is None or not verify_digraph_bijection(f, h, g):
        return False, "no verified arc-preserving bijection"
    return True, ""


def cover_criterion(s: UltrametricSpace) -> tuple[bool, str]:
    """``u`` is a child of ``v`` iff ``G(u) < G(v)`` with no ``G(w)`` strictly between."""
    t = build_rep_tree(s)
    sets = [frozenset(g) for g in gammas(t)]
    m = len(t)
    for u in range(m):
        for v in range(m):
            if u == v:
                continue
            covered = sets[u] <= sets[v] and not any(
                sets[u] < sets[w] < sets[v] for w in range(m)
            )
            if covered != (t.parent[u] == v):
                return False, f"nodes {u}, {v}"
    return True, ""


def tree_structure(s: UltrametricSpace) -> tuple[bool, str]:
    """Internal arity >= 2 and strictly decreasing labels away from the root."""
    t = build_rep_tree(s)
    for v in range(len(t)):
        kids = t.children[v]
        if len(kids) == 1:
            return False, f"node {v} has one child"
        for c in kids:
            if t.children[c] and not t.labels[c] < t.labels[v]:
                return False, f"label of node {c} not below its parent"
    return True, ""


def transitivity(s: UltrametricSpace) -> tuple[bool, str]:
    report = check_ball_transitivity(s)
    return report.passed, "" if report.passed else f"witness {report.witness}"


def oracle_agreement(sx: UltrametricSpace, sy: UltrametricSpace) -> tuple[bool, str]:
    fast = exists_ball_preserving_bijection(sx, sy)
    slow = brute_force_exists(sx, sy, cap=BRUTE_FORCE_CAP)
    if fast.equivalent != slow.equivalent:
        return False, f"tree says {fast.equivalent}, enumeration says {slow.equivalent}"
    for d in (fast, slow):
        if d.witness is not None and not is_ball_preserving(d.witness, sx, sy):
            return False, f"{d.method} witness fails the ball check"
    return True, ""


def poset_consistency(sx: UltrametricSpace, sy: UltrametricSpace) -> tuple[bool, str]:
    report = posets_isomorphic_iff_ballmap(sx, sy)
    return report.ok, report.detail


SINGLE: list[tuple[str, Callable[[UltrametricSpace], tuple[bool, str]]]] = [
    ("round-trip-distances", round_trip),
    ("ball-count-identity", ball_count_identity),
    ("tree-structure", tree_structure),
    ("hasse-tree-agreement", hasse_tree_agreement),
    ("ball-transitivity", transitivity),
    ("cover-criterion", cover_criterion),
]
PAIRED: list[tuple[str, Callable[[UltrametricSpace, UltrametricSpace], tuple[bool, str]]]] = [
    ("ballmap-oracle-agreement", oracle_agreement),
    ("poset-ballmap-consistency", poset_consistency),
]


@dataclass
class SelfcheckReport:
    seed: int
    count: int
    max_n: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "max_n": self.max_n,
            "status": "pass" if self.passed else "fail",
            "checks": [c.as_dict() for c in self.checks],
        }


def run_selfcheck(
    seed: int, count: int, max_n: int, spaces: Sequence[UltrametricSpace] | None = None
) -> SelfcheckReport:
    """Run every named check on each space and on each pair of spaces.

    Pair checks only use spaces within the brute-force cap.
    """
    spaces = corpus(seed, count, max_n) if spaces is None else list(spaces)
    report = SelfcheckReport(seed, count, max_n)
    for name, fn in SINGLE:
        result = CheckResult(name)
        for i, s in enumerate(spaces):
            ok, detail = fn(s)
            result.record(ok, f"space #{i}: {detail}")
        report.checks.append(result)
    small = [(i, s) for i, s in enumerate(spaces) if len(s) <= BRUTE_FORCE_CAP]
    for name, fn in PAIRED:
        result = CheckResult(name)
        for (i, sx), (j, sy) in combinations(small, 2):
            ok, detail = fn(sx, sy)
            result.record(ok, f"pair #{i}/#{j}: {detail}")
        report.checks.append(result)
    return report
