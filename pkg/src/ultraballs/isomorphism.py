"""Canonical forms and isomorphism witnesses for rooted trees and cover digraphs.

Canonical codes are AHU parenthesizations: a node is written as ``(``, its
label (labeled variant only), its children in canonical order, then ``)``.
Canonical child order comes from :func:`ultraballs.reptree.level_keys`, which
assigns isomorphism-class ranks height by height in O(n log n) instead of
comparing nested strings.

Leaf point identities never enter a code: ball equivalence and isometry are
both blind to point names, which only appear in witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ballean import HasseDigraph
from .reptree import NO_PARENT, RepTree, RootedTree, level_keys

__all__ = [
    "CanonicalForm",
    "NodeBijection",
    "NotTreeShaped",
    "CapExceeded",
    "canonical_unlabeled",
    "canonical_labeled",
    "tree_isomorphism",
    "verify_tree_bijection",
    "digraph_to_tree",
    "verify_digraph_bijection",
    "poset_isomorphism",
    "brute_force_tree_iso",
]


class NotTreeShaped(ValueError):
    """A digraph that is not the child -> parent digraph of a rooted tree."""


class CapExceeded(ValueError):
    """Input too large for an exhaustive oracle."""


@dataclass(frozen=True)
class CanonicalForm:
    code: bytes

    def __str__(self) -> str:
        return self.code.decode("ascii")


@dataclass(frozen=True)
class NodeBijection:
    """``forward[v]`` is the image in the second tree of node ``v`` of the first."""

    forward: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.forward[v]

    def __len__(self) -> int:
        return len(self.forward)


def _label_text(x: Fraction | None) -> str:
    return "" if x is None else f"{x.numerator}/{x.denominator}"


def _ordered_children(t: RootedTree, keys: list[tuple[int, int]]) -> list[list[int]]:
    # sorted() is stable: equal keys keep stored order
    return [sorted(kids, key=keys.__getitem__) for kids in t.children]


def _encode(t: RootedTree, keys, labels=None) -> bytes:
    kids = _ordered_children(t, keys)
    out: list[str] = []
    stack: list[int] = [t.root]
    while stack:
        v = stack.pop()
        if v < 0:
            out.append(")")
            continue
        out.append("(")
        if labels is not None:
            out.append(_label_text(labels[v]))
        stack.append(-1)
        stack.extend(reversed(kids[v]))
    return "".join(out).encode("ascii")


def canonical_unlabeled(t: RootedTree) -> CanonicalForm:
    """Shape code: equal for two trees iff they are isomorphic as rooted trees."""
    return CanonicalForm(_encode(t, level_keys(t.children, t.root)))


def canonical_labeled(t: RepTree) -> CanonicalForm:
    """Shape plus internal diameter labels; equal iff the spaces are isometric."""
    keys = level_keys(t.children, t.root, t.labels)
    return CanonicalForm(_encode(t, keys, t.labels))


def tree_isomorphism(
    t1: RootedTree, t2: RootedTree, labeled: bool = False
) -> NodeBijection | None:
    """Root-preserving isomorphism, or ``None``.

    With ``labeled=True`` both trees must be :class:`RepTree` and paired
    internal nodes carry equal labels.  The witness pairs children in
    canonical order; among children with equal subtree classes the stored
    order decides, so the result is deterministic but not unique.
    """
    if len(t1) != len(t2):
        return None
    labels1 = t1.labels if labeled else None
    labels2 = t2.labels if labeled else None
    keys1 = level_keys(t1.children, t1.root, labels1)
    keys2 = level_keys(t2.children, t2.root, labels2)
    if _encode(t1, keys1, labels1) != _encode(t2, keys2, labels2):
        return None
    kids1 = _ordered_children(t1, keys1)
    kids2 = _ordered_children(t2, keys2)
    forward = [0] * len(t1)
    stack = [(t1.root, t2.root)]
    while stack:
        a, b = stack.pop()
        forward[a] = b
        stack.extend(zip(kids1[a], kids2[b]))
    return NodeBijection(tuple(forward))


def verify_tree_bijection(
    f: NodeBijection, t1: RootedTree, t2: RootedTree, labeled: bool = False
) -> bool:
    """Check bijectivity, root to root, and child -> parent arcs in both directions."""
    n = len(t1)
    if len(t2) != n or len(f) != n or sorted(f.forward) != list(range(n)):
        return False
    if f[t1.root] != t2.root:
        return False
    if {(f[u], f[v]) for u, v in t1.arcs()} != set(t2.arcs()):
        return False
    if labeled and any(t1.labels[v] != t2.labels[f[v]] for v in range(n)):
        return False
    return True


def digraph_to_tree(h: HasseDigraph) -> RootedTree:
    """Read a cover digraph as a rooted tree (the unique maximum is the root).

    Raises :class:`NotTreeShaped` unless every vertex but one has exactly one
    out-arc and all vertices reach the sink.
    """
    if h.size == 0:
        raise NotTreeShaped("empty digraph")
    out = h.out_arcs()
    parent = [NO_PARENT] * h.size
    for u, targets in enumerate(out):
        if len(targets) > 1:
            raise NotTreeShaped(f"vertex {u} has {len(targets)} covers")
        if targets:
            parent[u] = targets[0]
    roots = [u for u in range(h.size) if parent[u] == NO_PARENT]
    if len(roots) != 1:
        raise NotTreeShaped(f"expected one maximal element, found {len(roots)}")
    children: list[list[int]] = [[] for _ in range(h.size)]
    for u, p in enumerate(parent):
        if p != NO_PARENT:
            children[p].append(u)
    tree = RootedTree(
        tuple(parent), tuple(tuple(c) for c in children), (None,) * h.size, roots[0]
    )
    if len(tree.preorder) != h.size:
        raise NotTreeShaped("digraph has a cycle")
    return tree


def verify_digraph_bijection(
    forward: tuple[int, ...], h1: HasseDigraph, h2: HasseDigraph
) -> bool:
    """``<x, y>`` is an arc of ``h1`` iff ``<F(x), F(y)>`` is an arc of ``h2``."""
    n = h1.size
    if h2.size != n or len(forward) != n or sorted(forward) != list(range(n)):
        return False
    return {(forward[u], forward[v]) for u, v in h1.arcs} == set(h2.arcs)


def poset_isomorphism(h1: HasseDigraph, h2: HasseDigraph) -> tuple[int, ...] | None:
    """Isomorphism of two tree-shaped cover digraphs, as vertex map ``h1 -> h2``."""
    t1, t2 = digraph_to_tree(h1), digraph_to_tree(h2)
    f = tree_isomorphism(t1, t2)
    return None if f is None else f.forward


def brute_force_tree_iso(
    t1: RootedTree, t2: RootedTree, size_cap: int = 10
) -> NodeBijection | None:
    """Exhaustive backtracking over root-preserving bijections.

    Nodes of ``t1`` are assigned in preorder; a candidate image must be unused,
    hang under the image of the parent, and have the same number of children.
    Independent of canonical codes, so it serves as their oracle.
    """
    if max(len(t1), len(t2)) > size_cap:
        raise CapExceeded(f"trees larger than {size_cap} nodes")
    if len(t1) != len(t2):
        return None
    order = [v for v in t1.preorder if v != t1.root]
    forward = {t1.root: t2.root}
    used = {t2.root}
    if len(t1.children[t1.root]) != len(t2.children[t2.root]):
        return None

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        arity = len(t1.children[v])
        for w in t2.children[forward[t1.parent[v]]]:
            if w in used or len(t2.children[w]) != arity:
                continue
            forward[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del forward[v]
            used.discard(w)
        return False

    if not extend(0):
        return None
    f = NodeBijection(tuple(forward[v] for v in range(len(t1))))
    assert verify_tree_bijection(f, t1, t2)
    return f
