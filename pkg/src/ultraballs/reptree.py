"""Representing trees of finite ultrametric spaces.

The tree of a space ``X`` is built by recursive diametral decomposition: the
root is labeled ``diam X``, its children are the parts of the diametral
partition, one-point parts become leaves and larger parts become internal
nodes labeled with their own diameter.

Trees are stored as parallel tuples indexed by dense node ids, which keeps
100k-node trees cheap to build and walk without recursion.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .metric import Subspace, UltrametricSpace

__all__ = [
    "RootedTree",
    "UnlabeledTree",
    "RepTree",
    "DiametralPartition",
    "diametral_partition",
    "build_rep_tree",
    "gamma",
    "gammas",
    "distance_from_tree",
    "strip_labels",
    "level_keys",
]

NO_PARENT = -1


@dataclass(frozen=True, eq=False)
class RootedTree:
    """Rooted tree with ordered children.

    ``points[v]`` is the point index carried by leaf ``v`` (``None`` for
    internal nodes, and for leaves of trees with no attached space).
    """

    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    points: tuple[int | None, ...]
    root: int

    def __len__(self) -> int:
        return len(self.parent)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def shape(self) -> tuple:
        return (self.parent, self.children, self.points, self.root)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.shape() == other.shape()

    def __hash__(self) -> int:
        return hash(self.shape())

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        order = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(order)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        depth = [0] * len(self.parent)
        for v in self.preorder:
            if v != self.root:
                depth[v] = depth[self.parent[v]] + 1
        return tuple(depth)

    @cached_property
    def leaf_of(self) -> dict[int, int]:
        """Point index -> leaf node id."""
        return {p: v for v, p in enumerate(self.points) if p is not None}

    def arcs(self) -> frozenset[tuple[int, int]]:
        """Child -> parent arcs."""
        return frozenset((v, p) for v, p in enumerate(self.parent) if p != NO_PARENT)

    def check(self) -> None:
        """Raise ``ValueError`` unless parent/children/root are consistent."""
        n = len(self.parent)
        if not (len(self.children) == len(self.points) == n) or not 0 <= self.root < n:
            raise ValueError("inconsistent node arrays")
        if self.parent[self.root] != NO_PARENT:
            raise ValueError("root has a parent")
        for v, kids in enumerate(self.children):
            for c in kids:
                if self.parent[c] != v:
                    raise ValueError(f"node {c} listed under {v} but parent is {self.parent[c]}")
        if len(self.preorder) != n:
            raise ValueError("tree is not connected")


UnlabeledTree = RootedTree


@dataclass(frozen=True, eq=False)
class RepTree(RootedTree):
    """Representing tree: internal nodes carry diameters, leaves carry points."""

    labels: tuple[Fraction | None, ...] = ()
    names: tuple[str, ...] = ()

    def shape(self) -> tuple:
        return super().shape() + (self.labels, self.names)

    def label(self, v: int) -> Fraction | None:
        return self.labels[v]


@dataclass(frozen=True)
class DiametralPartition:
    parts: tuple[tuple[int, ...], ...]
    diameter: Fraction

    def __len__(self) -> int:
        return len(self.parts)


def _split(ranks: np.ndarray, members: np.ndarray) -> tuple[int, list[np.ndarray]]:
    """Diameter rank and diametral parts of a ball.

    ``members`` must be a ball: any point of a ball is its center, so the
    diameter is the maximum of one row, and each part is the open ball of
    diameter radius around any of its points.
    """
    diam = int(ranks[members[0], members].max())
    parts = []
    rest = members
    while len(rest):
        inside = ranks[rest[0], rest] < diam
        parts.append(rest[inside])
        rest = rest[~inside]
    return diam, parts


def diametral_partition(s: Subspace) -> DiametralPartition:
    """Classes of ``d(u, v) < diam`` for a subspace with at least two points.

    Parts are listed by their smallest member.
    """
    if len(s) < 2:
        raise ValueError("diametral partition needs at least two points")
    ranks = s.parent.ranks
    idx = np.asarray(s.members)
    sub = ranks[np.ix_(idx, idx)]
    diam = int(sub.max())
    # an arbitrary subspace of an ultrametric space is ultrametric, so the
    # relation is an equivalence and one row scan per class suffices
    label = np.full(len(idx), -1)
    for i in range(len(idx)):
        if label[i] < 0:
            label[(sub[i] < diam) & (label < 0)] = i
    parts = [tuple(int(x) for x in idx[label == c]) for c in np.unique(label)]
    parts.sort()
    return DiametralPartition(tuple(parts), s.parent.values[diam])


def level_keys(
    children: Sequence[Sequence[int]],
    root: int,
    labels: Sequence[object] | None = None,
) -> list[tuple[int, int]]:
    """AHU isomorphism-class keys ``(height, rank)`` for every node.

    Nodes are processed height by height.  A node's signature is its label
    (when ``labels`` is given) plus the sorted keys of its children; the rank
    is the position of that signature among the distinct signatures of its
    height.  Two subtrees, of this tree or of another tree whose key tables
    coincide, get equal keys iff they are isomorphic.
    """
    n = len(children)
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(children[v])
    height = [0] * n
    for v in reversed(order):
        if children[v]:
            height[v] = 1 + max(height[c] for c in children[v])
    by_height: dict[int, list[int]] = {}
    for v in order:
        by_height.setdefault(height[v], []).append(v)
    keys: list[tuple[int, int]] = [(0, 0)] * n
    for h in sorted(by_height):
        nodes = by_height[h]
        sigs = []
        for v in nodes:
            kids = tuple(sorted(keys[c] for c in children[v]))
            sigs.append((labels[v], kids) if labels is not None else kids)
        rank = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        for v, sig in zip(nodes, sigs):
            keys[v] = (h, rank[sig])
    return keys


def build_rep_tree(s: UltrametricSpace) -> RepTree:
    """Representing tree of a validated space.

    Children are ordered by subtree shape (AHU key), ties broken by the
    smallest point name below them; node ids are then assigned in preorder.
    """
    ranks = s.ranks
    values = s.values
    n = len(s)
    # raw construction: ids in discovery order
    r_parent: list[int] = []
    r_children: list[list[int]] = []
    r_label: list[int | None] = []
    r_point: list[int | None] = []
    stack = [(np.arange(n), NO_PARENT)]
    while stack:
        members, par = stack.pop()
        v = len(r_parent)
        r_parent.append(par)
        r_children.append([])
        if par != NO_PARENT:
            r_children[par].append(v)
        if len(members) == 1:
            r_label.append(None)
            r_point.append(int(members[0]))
            continue
        diam, parts = _split(ranks, members)
        r_label.append(diam)
        r_point.append(None)
        for part in reversed(parts):
            stack.append((part, v))

    raw_root = 0
    keys = level_keys(r_children, raw_root)
    first_name: list[str] = [""] * len(r_parent)
    order = []
    walk = [raw_root]
    while walk:
        v = walk.pop()
        order.append(v)
        walk.extend(r_children[v])
    for v in reversed(order):
        if r_point[v] is not None:
            first_name[v] = s.points[r_point[v]]
        else:
            first_name[v] = min(first_name[c] for c in r_children[v])
    for v in order:
        r_children[v].sort(key=lambda c: (keys[c], first_name[c]))

    # renumber in canonical preorder
    new_id = [0] * len(r_parent)
    pre = []
    walk = [raw_root]
    while walk:
        v = walk.pop()
        new_id[v] = len(pre)
        pre.append(v)
        walk.extend(reversed(r_children[v]))
    parent = tuple(new_id[r_parent[v]] if r_parent[v] != NO_PARENT else NO_PARENT for v in pre)
    children = tuple(tuple(new_id[c] for c in r_children[v]) for v in pre)
    labels = tuple(values[r_label[v]] if r_label[v] is not None else None for v in pre)
    points = tuple(r_point[v] for v in pre)
    return RepTree(parent, children, points, 0, labels, s.points)


def _check_node(t: RootedTree, v: int) -> None:
    if not isinstance(v, (int, np.integer)) or not 0 <= v < len(t):
        raise KeyError(f"unknown node id {v!r}")


def gamma(t: RootedTree, v: int) -> frozenset[int]:
    """Points on the leaves of the subtree rooted at ``v``.

    For trees without attached points the leaf node ids are returned instead.
    """
    _check_node(t, v)
    out = []
    stack = [v]
    while stack:
        u = stack.pop()
        kids = t.children[u]
        if kids:
            stack.extend(kids)
        else:
            out.append(t.points[u] if t.points[u] is not None else u)
    return frozenset(out)


def gammas(t: RootedTree) -> list[tuple[int, ...]]:
    """Sorted leaf-point tuples for every node, computed in one bottom-up pass."""
    out: list[tuple[int, ...]] = [()] * len(t)
    for v in reversed(t.preorder):
        kids = t.children[v]
        if kids:
            out[v] = tuple(sorted(x for c in kids for x in out[c]))
        else:
            out[v] = (t.points[v] if t.points[v] is not None else v,)
    return out


def lca(t: RootedTree, u: int, v: int) -> int:
    depth, parent = t.depth, t.parent
    while depth[u] > depth[v]:
        u = parent[u]
    while depth[v] > depth[u]:
        v = parent[v]
    while u != v:
        u, v = parent[u], parent[v]
    return u


def distance_from_tree(t: RepTree, x: int, y: int) -> Fraction:
    """Distance between points as the label of their lowest common ancestor."""
    try:
        u, v = t.leaf_of[x], t.leaf_of[y]
    except KeyError as exc:
        raise KeyError(f"unknown point {exc.args[0]!r}") from None
    if u == v:
        return Fraction(0)
    return t.labels[lca(t, u, v)]


def strip_labels(t: RepTree) -> RootedTree:
    return RootedTree(t.parent, t.children, t.points, t.root)
