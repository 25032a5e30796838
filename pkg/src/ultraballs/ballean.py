"""Closed balls of a finite ultrametric space and their inclusion order."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .metric import UltrametricSpace
from .reptree import RepTree, RootedTree, gammas

__all__ = [
    "Ball",
    "Ballean",
    "HasseDigraph",
    "TransitivityReport",
    "enumerate_ballean",
    "ballean_from_tree",
    "hasse",
    "tree_digraph",
    "check_ball_transitivity",
    "EXHAUSTIVE_LIMIT",
]

EXHAUSTIVE_LIMIT = 8


@dataclass(frozen=True, order=True)
class Ball:
    members: tuple[int, ...]
    radius: Fraction

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Ballean:
    """All closed balls of a space, one entry per distinct member set.

    Balls are sorted by size, then by members, so ball ids are stable.
    """

    balls: tuple[Ball, ...]
    n: int

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    @cached_property
    def member_sets(self) -> frozenset[tuple[int, ...]]:
        return frozenset(b.members for b in self.balls)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {b.members: i for i, b in enumerate(self.balls)}

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Member sets as int bitmasks (bit ``x`` set for point ``x``)."""
        return tuple(sum(1 << x for x in b.members) for b in self.balls)

    def __contains__(self, members) -> bool:
        return tuple(sorted(members)) in self.member_sets


def _make(balls: dict[tuple[int, ...], Fraction], n: int) -> Ballean:
    ordered = sorted(balls.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return Ballean(tuple(Ball(m, r) for m, r in ordered), n)


def enumerate_ballean(s: UltrametricSpace) -> Ballean:
    """``B_r(t)`` for every point ``t`` and every ``r`` in the spectrum of ``t``.

    The radius stored for a ball is ``r``, which equals the ball's diameter
    because ``r`` is attained inside the ball.
    """
    ranks, values = s.ranks, s.values
    found: dict[tuple[int, ...], Fraction] = {}
    for t in range(len(s)):
        row = ranks[t]
        for r in np.unique(row):
            members = tuple(int(x) for x in np.flatnonzero(row <= r))
            found.setdefault(members, values[int(r)])
    return _make(found, len(s))


def ballean_from_tree(t: RepTree) -> Ballean:
    """Leaf sets of all nodes of a representing tree."""
    found = {}
    for v, members in enumerate(gammas(t)):
        found[members] = t.labels[v] if t.labels[v] is not None else Fraction(0)
    return _make(found, len(t.leaf_of))


@dataclass(frozen=True)
class HasseDigraph:
    """Cover digraph: arc ``(u, v)`` means ``u`` is covered by ``v``."""

    size: int
    arcs: frozenset[tuple[int, int]]

    def out_arcs(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.size)]
        for u, v in sorted(self.arcs):
            out[u].append(v)
        return out


def hasse(b: Ballean) -> HasseDigraph:
    """Cover relation of ``(b, subset)`` by pairwise inclusion tests.

    For each ball, collect its strict supersets and keep the minimal ones.
    Nothing here assumes the order is a tree.
    """
    masks = b.masks
    m = len(masks)
    arcs = set()
    for u in range(m):
        mu = masks[u]
        above = [v for v in range(m) if v != u and mu & masks[v] == mu]
        for v in above:
            mv = masks[v]
            if not any(w != v and masks[w] & mv == masks[w] for w in above):
                arcs.add((u, v))
    return HasseDigraph(m, frozenset(arcs))


def tree_digraph(t: RootedTree) -> HasseDigraph:
    """Child -> parent arcs of a rooted tree, on its node ids."""
    return HasseDigraph(len(t), t.arcs())


@dataclass(frozen=True)
class TransitivityReport:
    passed: bool
    checked: int
    exhaustive: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None  # (Y, Z)

    def __bool__(self) -> bool:
        return self.passed


def check_ball_transitivity(
    s: UltrametricSpace, samples: int = 16, seed: int = 0
) -> TransitivityReport:
    """Check that a ball of a ball ``Y`` (as a space on its own) is a ball of ``s``.

    Every ``Y`` is checked when ``len(s) <= EXHAUSTIVE_LIMIT``; otherwise
    ``samples`` balls are drawn with a seeded RNG.
    """
    bx = enumerate_ballean(s)
    ys = list(bx)
    exhaustive = len(s) <= EXHAUSTIVE_LIMIT
    if not exhaustive and samples < len(ys):
        ys = random.Random(seed).sample(ys, samples)
    checked = 0
    for y in ys:
        sub = s.restrict(y.members)
        for z in enumerate_ballean(sub):
            members = tuple(y.members[i] for i in z.members)
            checked += 1
            if members not in bx.member_sets:
                return TransitivityReport(False, checked, exhaustive, (y.members, members))
    return TransitivityReport(True, checked, exhaustive)

