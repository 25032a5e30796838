"""Finite ultrametric spaces: representing trees, balleans, ball-preserving maps."""

from .ballean import Ball, Ballean, HasseDigraph, ballean_from_tree, enumerate_ballean, hasse
from .ballmap import (
    BallDecision,
    PointBijection,
    brute_force_exists,
    exists_ball_preserving_bijection,
    find_isometry,
    is_ball_preserving,
    posets_isomorphic_iff_ballmap,
)
from .generate import generate_random, random_tree
from .isomorphism import (
    CanonicalForm,
    NodeBijection,
    brute_force_tree_iso,
    canonical_labeled,
    canonical_unlabeled,
    poset_isomorphism,
    tree_isomorphism,
)
from .metric import (
    Scalar,
    SpaceError,
    Subspace,
    UltrametricSpace,
    ValidationReport,
    diameter,
    spectrum,
    validate,
)
from .reptree import (
    RepTree,
    RootedTree,
    UnlabeledTree,
    build_rep_tree,
    diametral_partition,
    distance_from_tree,
    gamma,
    strip_labels,
)

__version__ = "0.1.0"
