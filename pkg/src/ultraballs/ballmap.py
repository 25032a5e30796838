"""Ball-preserving bijections between finite ultrametric spaces.

A bijection ``F: X -> Y`` preserves balls when the image of every ball of
``X`` is a ball of ``Y`` and the preimage of every ball of ``Y`` is a ball of
``X``.  Such a bijection exists exactly when the unlabeled representing trees
are isomorphic; :func:`exists_ball_preserving_bijection` decides it that way
and :func:`brute_force_exists` checks the same question by enumeration.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import permutations

from .ballean import Ballean, enumerate_ballean, hasse
from .isomorphism import (
    CapExceeded,
    canonical_labeled,
    poset_isomorphism,
    tree_isomorphism,
    verify_tree_bijection,
)
from .metric import UltrametricSpace
from .reptree import build_rep_tree, strip_labels

__all__ = [
    "PointBijection",
    "BallCheck",
    "BallDecision",
    "ConsistencyReport",
    "is_ball_preserving",
    "exists_ball_preserving_bijection",
    "brute_force_exists",
    "posets_isomorphic_iff_ballmap",
    "find_isometry",
]


@dataclass(frozen=True)
class PointBijection:
    """``forward[x]`` is the index in the target space of source point ``x``."""

    forward: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.forward) != list(range(len(self.forward))):
            raise ValueError("not a bijection")

    def __len__(self) -> int:
        return len(self.forward)

    def __getitem__(self, x: int) -> int:
        return self.forward[x]

    def inverse(self) -> PointBijection:
        back = [0] * len(self.forward)
        for x, y in enumerate(self.forward):
            back[y] = x
        return PointBijection(tuple(back))

    @classmethod
    def from_names(
        cls, sx: UltrametricSpace, sy: UltrametricSpace, mapping: Mapping[str, str]
    ) -> PointBijection:
        """Build from a ``{source name: target name}`` mapping."""
        if len(sx) != len(sy):
            raise ValueError(f"size mismatch: {len(sx)} vs {len(sy)} points")
        if set(mapping) != set(sx.points):
            missing = sorted(set(sx.points) - set(mapping))
            extra = sorted(set(mapping) - set(sx.points))
            raise ValueError(f"map domain mismatch (missing {missing}, unknown {extra})")
        try:
            forward = tuple(sy.index[mapping[p]] for p in sx.points)
        except KeyError as exc:
            raise ValueError(f"unknown target point {exc.args[0]!r}") from None
        return cls(forward)

    def to_names(self, sx: UltrametricSpace, sy: UltrametricSpace) -> dict[str, str]:
        return {sx.points[x]: sy.points[y] for x, y in enumerate(self.forward)}


@dataclass(frozen=True)
class BallCheck:
    """Outcome of :func:`is_ball_preserving`.

    On failure ``direction`` is ``"image"`` (``ball`` is a ball of the source
    whose image is not a ball) or ``"preimage"`` (``ball`` is a ball of the
    target whose preimage is not a ball).
    """

    ok: bool
    direction: str | None = None
    ball: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class BallDecision:
    equivalent: bool
    witness: PointBijection | None
    method: str  # "tree-reduction" | "brute-force"

    def __bool__(self) -> bool:
        return self.equivalent


def _masks_image(masks: tuple[int, ...], forward: tuple[int, ...]) -> list[int]:
    out = []
    for m in masks:
        img = 0
        x = 0
        while m:
            if m & 1:
                img |= 1 << forward[x]
            m >>= 1
            x += 1
        out.append(img)
    return out


def _first_failure(
    bx: Ballean, by: Ballean, forward: tuple[int, ...], backward: tuple[int, ...]
) -> BallCheck:
    targets = set(by.masks)
    for ball, img in zip(bx.balls, _masks_image(bx.masks, forward)):
        if img not in targets:
            return BallCheck(False, "image", ball.members)
    sources = set(bx.masks)
    for ball, pre in zip(by.balls, _masks_image(by.masks, backward)):
        if pre not in sources:
            return BallCheck(False, "preimage", ball.members)
    return BallCheck(True)


def is_ball_preserving(
    f: PointBijection,
    sx: UltrametricSpace,
    sy: UltrametricSpace,
    bx: Ballean | None = None,
    by: Ballean | None = None,
) -> BallCheck:
    """Check images and preimages of all balls; report the first violation.

    Balls of the source are tried first, in ballean order, then balls of the
    target.  Precomputed balleans may be passed to skip enumeration.
    """
    if len(sx) != len(sy) or len(f) != len(sx):
        raise ValueError(f"size mismatch: {len(sx)} -> {len(sy)} with a map on {len(f)}")
    bx = bx if bx is not None else enumerate_ballean(sx)
    by = by if by is not None else enumerate_ballean(sy)
    return _first_failure(bx, by, f.forward, f.inverse().forward)


def _leaf_restriction(tx, ty, forward: tuple[int, ...]) -> PointBijection:
    out = [0] * len(tx.leaf_of)
    for x, v in tx.leaf_of.items():
        out[x] = ty.points[forward[v]]
    return PointBijection(tuple(out))


def exists_ball_preserving_bijection(
    sx: UltrametricSpace, sy: UltrametricSpace
) -> BallDecision:
    """Decide via isomorphism of the unlabeled representing trees.

    The witness is the tree isomorphism restricted to leaves, and is re-checked
    with :func:`is_ball_preserving` before being returned.
    """
    tx, ty = build_rep_tree(sx), build_rep_tree(sy)
    psi = tree_isomorphism(strip_labels(tx), strip_labels(ty))
    if psi is None:
        return BallDecision(False, None, "tree-reduction")
    phi = _leaf_restriction(tx, ty, psi.forward)
    check = is_ball_preserving(phi, sx, sy)
    if not check:
        raise RuntimeError(f"tree witness failed ball check: {check}")
    return BallDecision(True, phi, "tree-reduction")


def brute_force_exists(
    sx: UltrametricSpace, sy: UltrametricSpace, cap: int = 7
) -> BallDecision:
    """First ball-preserving bijection in lexicographic order of target permutations."""
    if len(sx) != len(sy):
        return BallDecision(False, None, "brute-force")
    if len(sx) > cap:
        raise CapExceeded(f"{len(sx)} points exceeds brute-force cap {cap}")
    bx, by = enumerate_ballean(sx), enumerate_ballean(sy)
    targets, sources = set(by.masks), set(bx.masks)
    n = len(sx)
    for perm in permutations(range(n)):
        if not all(img in targets for img in _masks_image(bx.masks, perm)):
            continue
        back = [0] * n
        for x, y in enumerate(perm):
            back[y] = x
        if all(pre in sources for pre in _masks_image(by.masks, tuple(back))):
            return BallDecision(True, PointBijection(perm), "brute-force")
    return BallDecision(False, None, "brute-force")


@dataclass(frozen=True)
class ConsistencyReport:
    poset_isomorphic: bool
    ball_equivalent: bool
    inclusion_preserved: bool | None  # None when there is no witness
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.poset_isomorphic == self.ball_equivalent and self.inclusion_preserved is not False

    def __bool__(self) -> bool:
        return self.ok


def posets_isomorphic_iff_ballmap(
    sx: UltrametricSpace, sy: UltrametricSpace
) -> ConsistencyReport:
    """Compare ball-poset isomorphism with ball-map existence on one pair.

    For a witness ``F`` also checks ``B1 <= B2  iff  F(B1) <= F(B2)`` on all
    ball pairs and that ``B -> F(B)`` lands in the target ballean.
    """
    bx, by = enumerate_ballean(sx), enumerate_ballean(sy)
    poset = poset_isomorphism(hasse(bx), hasse(by)) is not None
    decision = exists_ball_preserving_bijection(sx, sy)
    inclusion = None
    detail = ""
    if decision.witness is not None:
        images = _masks_image(bx.masks, decision.witness.forward)
        inclusion = set(images) == set(by.masks)
        if not inclusion:
            detail = "image of the ballean is not the target ballean"
        for i, (a, fa) in enumerate(zip(bx.masks, images)):
            for b, fb in zip(bx.masks, images):
                if ((a & b) == a) != ((fa & fb) == fa):
                    inclusion = False
                    detail = f"inclusion not preserved at ball {bx.balls[i].members}"
                    break
            if inclusion is False:
                break
    if poset != decision.equivalent:
        detail = f"poset isomorphic={poset} but ball-equivalent={decision.equivalent}"
    return ConsistencyReport(poset, decision.equivalent, inclusion, detail)


def find_isometry(sx: UltrametricSpace, sy: UltrametricSpace) -> PointBijection | None:
    """Distance-preserving bijection via labeled representing-tree isomorphism."""
    tx, ty = build_rep_tree(sx), build_rep_tree(sy)
    if canonical_labeled(tx) != canonical_labeled(ty):
        return None
    psi = tree_isomorphism(tx, ty, labeled=True)
    assert psi is not None and verify_tree_bijection(psi, tx, ty, labeled=True)
    phi = _leaf_restriction(tx, ty, psi.forward)
    for x in range(len(sx)):
        for y in range(len(sx)):
            if sx.dist[x][y] != sy.dist[phi[x]][phi[y]]:
                raise RuntimeError("labeled tree witness is not an isometry")
    return phi
