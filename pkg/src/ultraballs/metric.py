"""Finite ultrametric spaces over exact rationals.

Distances are :class:`fractions.Fraction` values.  Every space also carries an
integer *rank matrix* (numpy) in which each distance is replaced by its
position among the distinct distance values of the space.  Ranks preserve
order and equality exactly, so all comparison-only work (partitions, balls,
validation) runs on machine integers.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import chain

import numpy as np

Scalar = Fraction

__all__ = [
    "Scalar",
    "SpaceError",
    "UltrametricSpace",
    "Subspace",
    "Violation",
    "ValidationReport",
    "parse_scalar",
    "format_scalar",
    "validate",
    "diameter",
    "spectrum",
]

_NUMBER = re.compile(r"^\s*(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$")
_RATIO = re.compile(r"^\s*\d+\s*/\s*\d+\s*$")


class SpaceError(ValueError):
    """Malformed input that cannot even be checked for ultrametricity.

    ``code`` is one of ``"empty"``, ``"duplicate-labels"``, ``"non-square"``
    or ``"unparsable-entry"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def parse_scalar(value: object) -> Fraction:
    """Parse a nonnegative exact rational.

    Accepts ints, Fractions, floats (through their shortest repr, so ``0.1``
    becomes ``1/10``) and strings in decimal or ``p/q`` form.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        out = value
    elif isinstance(value, int):
        out = Fraction(value)
    elif isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"not finite: {value!r}")
        out = Fraction(repr(value))
    elif isinstance(value, str):
        if not (_NUMBER.match(value) or _RATIO.match(value)):
            raise ValueError(f"not a nonnegative decimal or p/q: {value!r}")
        try:
            out = Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ValueError(f"zero denominator: {value!r}") from None
    else:
        raise ValueError(f"not a number: {value!r}")
    if out < 0:
        raise ValueError(f"negative: {value!r}")
    return out


def format_scalar(x: Fraction) -> str:
    """Decimal when the reduced denominator is a power of ten, else ``p/q``."""
    num, den = x.numerator, x.denominator
    digits = 0
    while den % 10 == 0:
        den //= 10
        digits += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    if digits == 0:
        return str(num)
    sign = "-" if num < 0 else ""
    s = str(abs(num)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _rank(flat: Sequence[Fraction]) -> tuple[np.ndarray, tuple[Fraction, ...]]:
    """Map values to dense ranks among the distinct values.

    Deduplicates by object identity first; generated and parsed matrices share
    Fraction objects heavily, which keeps hashing off the hot path.
    """
    ids = np.fromiter(map(id, flat), dtype=np.int64, count=len(flat))
    _, first, inverse = np.unique(ids, return_index=True, return_inverse=True)
    objs = [flat[k] for k in first]
    values = tuple(sorted(set(objs)))
    where = {v: i for i, v in enumerate(values)}
    obj_rank = np.array([where[o] for o in objs], dtype=np.int64)
    return obj_rank[inverse.reshape(-1)], values


@dataclass(frozen=True, eq=False)
class UltrametricSpace:
    """A finite space with point labels and an exact distance matrix.

    Build instances through :func:`validate` (or the readers in
    :mod:`ultraballs.spaceio`); the constructor itself trusts its input.
    """

    points: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    _prerank: tuple[np.ndarray, tuple[Fraction, ...]] | None = field(
        default=None, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UltrametricSpace):
            return NotImplemented
        return self.points == other.points and self.dist == other.dist

    def __hash__(self) -> int:
        return hash((self.points, self.dist))

    @cached_property
    def _ranked(self) -> tuple[np.ndarray, tuple[Fraction, ...]]:
        n = len(self.points)
        if self._prerank is not None:
            return self._prerank
        flat, values = _rank(list(chain.from_iterable(self.dist)))
        ranks = flat.reshape(n, n)
        ranks.flags.writeable = False
        return ranks, values

    @property
    def ranks(self) -> np.ndarray:
        """Read-only ``n x n`` int64 matrix of distance ranks (0 is distance 0)."""
        return self._ranked[0]

    @property
    def values(self) -> tuple[Fraction, ...]:
        """Sorted distinct distance values; ``values[ranks[i, j]] == dist[i][j]``."""
        return self._ranked[1]

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    def d(self, x: int, y: int) -> Fraction:
        return self.dist[x][y]

    def subspace(self, members: Iterable[int]) -> Subspace:
        return Subspace(self, tuple(sorted(set(members))))

    def whole(self) -> Subspace:
        return Subspace(self, tuple(range(len(self.points))))

    def restrict(self, members: Iterable[int]) -> UltrametricSpace:
        """The induced space on ``members``, as a standalone space."""
        idx = sorted(set(members))
        return UltrametricSpace(
            tuple(self.points[i] for i in idx),
            tuple(tuple(self.dist[i][j] for j in idx) for i in idx),
        )

    def relabel(self, names: Sequence[str]) -> UltrametricSpace:
        if len(set(names)) != len(names) or len(names) != len(self.points):
            raise SpaceError("duplicate-labels", "relabeling must be a bijection")
        return UltrametricSpace(tuple(names), self.dist, self._ranked)

    def permute(self, order: Sequence[int]) -> UltrametricSpace:
        """Same space with points listed in ``order``."""
        return UltrametricSpace(
            tuple(self.points[i] for i in order),
            tuple(tuple(self.dist[i][j] for j in order) for i in order),
        )

    def transform(self, fn) -> UltrametricSpace:
        """Apply ``fn`` to every nonzero distance (``fn`` must be positive)."""
        cache: dict[Fraction, Fraction] = {Fraction(0): Fraction(0)}
        for v in self.values:
            if v not in cache:
                cache[v] = Fraction(fn(v))
        return UltrametricSpace(
            self.points, tuple(tuple(cache[v] for v in row) for row in self.dist)
        )

    def scaled(self, factor) -> UltrametricSpace:
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return self.transform(lambda v: v * factor)


@dataclass(frozen=True)
class Subspace:
    parent: UltrametricSpace
    members: tuple[int, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("subspace must be nonempty")
        n = len(self.parent)
        if self.members[0] < 0 or self.members[-1] >= n:
            raise IndexError("subspace member out of range")

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Violation:
    kind: str  # asymmetry | nonzero-diagonal | zero-distance | strong-triangle
    indices: tuple[int, ...]
    values: tuple[Fraction, ...]

    def describe(self, points: Sequence[str]) -> str:
        names = ", ".join(points[i] for i in self.indices)
        vals = ", ".join(format_scalar(v) for v in self.values)
        if self.kind == "strong-triangle":
            dik, dkj, dij = self.values
            return (
                f"strong-triangle ({names}): d={format_scalar(dij)} > "
                f"max({format_scalar(dik)}, {format_scalar(dkj)})"
            )
        return f"{self.kind} ({names}): {vals}"


@dataclass(frozen=True)
class ValidationReport:
    """Failed validation: at most one witness per violation class."""

    points: tuple[str, ...]
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return False

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def lines(self) -> list[str]:
        return [v.describe(self.points) for v in self.violations]


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    return tuple(int(i) for i in hits[0]) if len(hits) else None


def _mst_edges(ranks: np.ndarray) -> list[tuple[int, int, int]]:
    """Prim's algorithm on the dense off-diagonal matrix; ``(w, u, v)`` edges."""
    n = ranks.shape[0]
    big = np.iinfo(np.int64).max
    best = ranks[0].astype(np.int64).copy()
    link = np.zeros(n, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    done[0] = True
    best[0] = big
    edges = []
    for _ in range(n - 1):
        v = int(np.argmin(best))
        edges.append((int(best[v]), int(link[v]), v))
        done[v] = True
        best[v] = big
        closer = (ranks[v] < best) & ~done
        best[closer] = ranks[v][closer]
        link[closer] = v
    return edges


def _tree_path(adj: list[list[int]], src: int, dst: int) -> list[int]:
    prev = {src: src}
    stack = [src]
    while stack:
        u = stack.pop()
        if u == dst:
            break
        for w in adj[u]:
            if w not in prev:
                prev[w] = u
                stack.append(w)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]


def _triangle_witness(ranks: np.ndarray) -> tuple[int, int, int] | None:
    """Find ``(i, k, j)`` with ``d(i,j) > max(d(i,k), d(k,j))`` in O(n^2).

    A symmetric matrix is ultrametric iff it equals its minimax-path
    (single-linkage) closure.  Kruskal over the MST finds a pair whose
    distance exceeds the minimax value; walking the MST path toward ``i``
    then yields a violating triple.
    """
    n = ranks.shape[0]
    if n < 3:
        return None
    edges = sorted(_mst_edges(ranks))
    adj: list[list[int]] = [[] for _ in range(n)]
    for _, u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    owner = list(range(n))
    groups = {i: [i] for i in range(n)}
    for w, u, v in edges:
        a, b = owner[u], owner[v]
        if len(groups[a]) < len(groups[b]):
            a, b = b, a
        ga, gb = groups[a], groups.pop(b)
        block = ranks[np.ix_(ga, gb)] > w
        if block.any():
            r, c = np.argwhere(block)[0]
            i, j = ga[int(r)], gb[int(c)]
            path = _tree_path(adj, i, j)
            while True:
                k = path[-2]
                if ranks[i, k] < ranks[i, j]:
                    return (i, k, j)
                path.pop()
                j = k
        for x in gb:
            owner[x] = a
        ga.extend(gb)
    return None


def _triangle_witness_dense(ranks: np.ndarray) -> tuple[int, int, int] | None:
    # no symmetry assumption; O(n^3), only used on already-invalid input
    n = ranks.shape[0]
    off = ~np.eye(n, dtype=bool)
    for k in range(n):
        bound = np.maximum.outer(ranks[:, k], ranks[k, :])
        bad = (ranks > bound) & off
        bad[k, :] = bad[:, k] = False
        hit = _first(bad)
        if hit is not None:
            return (hit[0], k, hit[1])
    return None


def validate(
    points: Sequence[str], matrix: Sequence[Sequence[object]]
) -> UltrametricSpace | ValidationReport:
    """Check a labeled matrix and return the space, or a violation report.

    Raises :class:`SpaceError` for inputs that are not a square matrix of
    parsable nonnegative numbers with distinct labels.
    """
    points = tuple(str(p) for p in points)
    n = len(points)
    if n == 0:
        raise SpaceError("empty", "a space needs at least one point")
    if len(set(points)) != n:
        seen = set()
        dup = next(p for p in points if p in seen or seen.add(p))
        raise SpaceError("duplicate-labels", f"label {dup!r} repeats")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise SpaceError("non-square", f"expected a {n}x{n} matrix")
    cache: dict[str, Fraction] = {}
    rows = []
    for i, row in enumerate(matrix):
        try:
            rows.append(tuple(map(cache.__getitem__, row)))
            continue
        except (KeyError, TypeError):
            pass
        out = []
        for j, raw in enumerate(row):
            try:
                val = parse_scalar(raw)
            except ValueError as exc:
                raise SpaceError("unparsable-entry", f"[{i}][{j}]: {exc}") from None
            if type(raw) is str:
                val = cache.setdefault(raw, val)
            out.append(val)
        rows.append(tuple(out))
    space = UltrametricSpace(points, tuple(rows))
    ranks = space.ranks
    dist = space.dist

    found: list[Violation] = []
    hit = _first(ranks != ranks.T)
    symmetric = hit is None
    if hit is not None:
        i, j = hit
        found.append(Violation("asymmetry", (i, j), (dist[i][j], dist[j][i])))
    diag = np.diagonal(ranks)
    nz = np.flatnonzero(diag)
    if len(nz):
        i = int(nz[0])
        found.append(Violation("nonzero-diagonal", (i,), (dist[i][i],)))
    hit = None
    if space.values[0] == 0:
        hit = _first((ranks == 0) & ~np.eye(n, dtype=bool))
    if hit is not None:
        i, j = hit
        found.append(Violation("zero-distance", (i, j), (dist[i][j],)))
    tri = _triangle_witness(ranks) if symmetric else _triangle_witness_dense(ranks)
    if tri is not None:
        i, k, j = tri
        found.append(
            Violation("strong-triangle", (i, k, j), (dist[i][k], dist[k][j], dist[i][j]))
        )
    if found:
        return ValidationReport(points, tuple(found))
    return space


def diameter(s: Subspace | UltrametricSpace) -> Fraction:
    """Largest pairwise distance; 0 for a single point."""
    if isinstance(s, UltrametricSpace):
        s = s.whole()
    idx = np.asarray(s.members)
    sub = s.parent.ranks[np.ix_(idx, idx)]
    return s.parent.values[int(sub.max())]


def spectrum(s: UltrametricSpace, t: int) -> tuple[Fraction, ...]:
    """Sorted distinct distances from point ``t`` (always starts with 0)."""
    if not 0 <= t < len(s):
        raise IndexError(f"point index {t} out of range")
    return tuple(s.values[int(r)] for r in np.unique(s.ranks[t]))
