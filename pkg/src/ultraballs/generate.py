"""Seeded random ultrametric spaces for property tests and benchmarks.

A random rooted tree is drawn first (every internal node has at least two
children, labels strictly decrease downward); distances are then read off the
tree as lowest-common-ancestor labels, so the output is ultrametric by
construction.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from .metric import UltrametricSpace, parse_scalar
from .reptree import NO_PARENT, RepTree

__all__ = ["DEFAULT_POOL", "random_tree", "generate_random", "space_from_tree"]

DEFAULT_POOL: tuple[Fraction, ...] = tuple(
    sorted({Fraction(k) for k in range(1, 9)} | {Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)})
)


def _pool(label_pool: Sequence[object] | None) -> list[Fraction]:
    pool = DEFAULT_POOL if label_pool is None else label_pool
    values = sorted({parse_scalar(x) for x in pool} - {Fraction(0)})
    if not values:
        raise ValueError("label pool needs a positive value")
    return values


def random_tree(
    seed: int,
    n: int,
    depth_bound: int | None = None,
    label_pool: Sequence[object] | None = None,
    max_arity: int = 4,
) -> RepTree:
    """Random representing-shaped tree with ``n`` leaves.

    At most ``min(depth_bound, len(label_pool))`` internal levels are used; a
    part that reaches the bound becomes a star.  Children of a node with
    ``m`` points number between 2 and ``min(m, max_arity)`` (a node at the
    bound may exceed ``max_arity``).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    pool = _pool(label_pool)
    levels = len(pool) if depth_bound is None else max(1, min(depth_bound, len(pool)))

    parent: list[int] = []
    children: list[list[int]] = []
    points: list[int | None] = []
    stack = [(0, n, NO_PARENT, levels)]
    while stack:
        lo, hi, par, left = stack.pop()
        v = len(parent)
        parent.append(par)
        children.append([])
        if par != NO_PARENT:
            children[par].append(v)
        m = hi - lo
        if m == 1:
            points.append(lo)
            continue
        points.append(None)
        if left == 1:
            k = m
        else:
            k = rng.randint(2, max(2, min(m, max_arity)))
        cuts = sorted(rng.sample(range(lo + 1, hi), k - 1))
        bounds = [lo, *cuts, hi]
        for a, b in reversed(list(zip(bounds, bounds[1:]))):
            stack.append((a, b, v, left - 1))

    # internal height, then labels top-down inside the feasible pool window
    size = len(parent)
    height = [0] * size
    for v in range(size - 1, -1, -1):
        if children[v]:
            height[v] = 1 + max((height[c] for c in children[v]), default=0)
    slot: list[int | None] = [None] * size
    for v in range(size):
        if not children[v]:
            continue
        top = len(pool) - 1 if parent[v] == NO_PARENT else slot[parent[v]] - 1
        slot[v] = rng.randint(height[v] - 1, top)
    labels = tuple(pool[s] if s is not None else None for s in slot)

    perm = list(range(n))
    rng.shuffle(perm)
    points = [perm[p] if p is not None else None for p in points]
    names = tuple(f"p{i}" for i in range(n))
    return RepTree(
        tuple(parent), tuple(tuple(c) for c in children), tuple(points), 0, labels, names
    )


def space_from_tree(t: RepTree) -> UltrametricSpace:
    """Distance matrix of a labeled tree: ``d(x, y)`` is the LCA label.

    Leaves are laid out in preorder so every subtree is a contiguous block;
    each node then writes only its cross-child blocks, n^2 cells in total.
    """
    values = tuple(sorted({lab for lab in t.labels if lab is not None} | {Fraction(0)}))
    rank_of = {v: i for i, v in enumerate(values)}
    n = len(t.leaf_of)
    count = [1] * len(t)
    for v in reversed(t.preorder):
        if t.children[v]:
            count[v] = sum(count[c] for c in t.children[v])
    lo = [0] * len(t)
    leaves = []
    for v in t.preorder:
        start = lo[v]
        for c in t.children[v]:
            lo[c] = start
            start += count[c]
        if not t.children[v]:
            leaves.append(t.points[v])
    block = np.zeros((n, n), dtype=np.int64)
    for v in t.preorder:
        kids = t.children[v]
        if not kids:
            continue
        r = rank_of[t.labels[v]]
        a, b = lo[v], lo[v] + count[v]
        for c in kids:
            ca, cb = lo[c], lo[c] + count[c]
            block[ca:cb, a:ca] = r
            block[ca:cb, cb:b] = r
    order = np.asarray(leaves)
    ranks = np.empty_like(block)
    ranks[np.ix_(order, order)] = block
    ranks.flags.writeable = False
    dist = tuple(tuple(map(values.__getitem__, row)) for row in ranks.tolist())
    names = t.names if len(t.names) == n else tuple(f"p{i}" for i in range(n))
    return UltrametricSpace(names, dist, (ranks, values))


def generate_random(
    seed: int,
    n: int,
    depth_bound: int | None = None,
    label_pool: Sequence[object] | None = None,
) -> UltrametricSpace:
    """Deterministic random ultrametric space on ``n`` points ``p0..p{n-1}``."""
    return space_from_tree(random_tree(seed, n, depth_bound, label_pool))
