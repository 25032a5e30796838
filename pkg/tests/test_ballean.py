from itertools import product

from hypothesis import given, settings
from hypothesis import strategies as st

from ultraballs import ballean_from_tree, build_rep_tree, enumerate_ballean, hasse, strip_labels
from ultraballs.ballean import check_ball_transitivity, tree_digraph
from ultraballs.generate import generate_random
from ultraballs.metric import diameter, spectrum
from ultraballs.reptree import gammas


def brute_balls(s):
    """Every B_r(t) over all centers and spectrum radii, as a set of frozensets."""
    n = len(s)
    return {
        frozenset(x for x in range(n) if s.dist[x][t] <= r)
        for t in range(n)
        for r in spectrum(s, t)
    }


def brute_covers(sets):
    """Cover pairs of a family of sets straight from the definition."""
    out = set()
    for u, v in product(range(len(sets)), repeat=2):
        if sets[u] < sets[v] and not any(sets[u] < w < sets[v] for w in sets):
            out.add((u, v))
    return out


def names(s, b):
    return {"".join(s.points[x] for x in ball.members) for ball in b}


def test_four_point_ballean(four):
    b = enumerate_ballean(four)
    assert len(b) == 7
    assert names(four, b) == {"a", "b", "c", "d", "ab", "abc", "abcd"}
    assert ballean_from_tree(build_rep_tree(four)).member_sets == b.member_sets


def test_small_balleans(singleton, tri5):
    assert len(enumerate_ballean(singleton)) == 1
    assert len(enumerate_ballean(tri5)) == 4
    assert len(ballean_from_tree(build_rep_tree(singleton))) == 1
    assert len(ballean_from_tree(build_rep_tree(tri5))) == 4


def test_radius_is_diameter(four):
    for ball in enumerate_ballean(four):
        assert ball.radius == diameter(four.subspace(ball.members))


def test_four_point_hasse(four):
    b = enumerate_ballean(four)
    h = hasse(b)
    label = ["".join(four.points[x] for x in ball.members) for ball in b]
    arcs = {(label[u], label[v]) for u, v in h.arcs}
    assert h.size == 7
    assert arcs == {
        ("a", "ab"), ("b", "ab"), ("ab", "abc"), ("c", "abc"), ("abc", "abcd"), ("d", "abcd"),
    }


def test_small_hasse(singleton, tri5):
    assert hasse(enumerate_ballean(singleton)).arcs == frozenset()
    h = hasse(enumerate_ballean(tri5))
    assert len(h.arcs) == 3
    assert {v for _, v in h.arcs} == {3}


def test_hasse_on_non_tree_family():
    # the cover computation is a general poset routine
    from ultraballs.ballean import Ball, Ballean

    fam = [(0,), (1,), (0, 1), (1, 2), (0, 1, 2)]
    b = Ballean(tuple(Ball(m, 0) for m in fam), 3)
    sets = [frozenset(m) for m in fam]
    assert set(hasse(b).arcs) == brute_covers(sets)


def test_transitivity_examples(four):
    r = check_ball_transitivity(four)
    assert r.passed and r.exhaustive
    # explicitly: balls of the subspace {a,b,c}
    sub = four.restrict([0, 1, 2])
    bx = enumerate_ballean(four)
    for z in enumerate_ballean(sub):
        assert z.members in bx.member_sets


def test_transitivity_sampled_above_limit():
    s = generate_random(3, 14)
    r = check_ball_transitivity(s, samples=5, seed=1)
    assert r.passed and not r.exhaustive


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 10))
def test_ballean_properties(seed, n):
    s = generate_random(seed, n)
    b = enumerate_ballean(s)
    t = build_rep_tree(s)
    assert {frozenset(m) for m in b.member_sets} == brute_balls(s)
    assert len(b) == len(t) <= 2 * n - 1
    assert ballean_from_tree(t).member_sets == b.member_sets
    # every point of a ball is a center of it
    for ball in b:
        for c in ball.members:
            assert tuple(x for x in range(n) if s.dist[x][c] <= ball.radius) == ball.members
    # cover arcs: definition oracle, and tree arcs relabeled through the leaf sets
    sets = [frozenset(ball.members) for ball in b]
    h = hasse(b)
    assert set(h.arcs) == brute_covers(sets)
    node_of = {g: v for v, g in enumerate(gammas(t))}
    relabeled = {(node_of[b.balls[u].members], node_of[b.balls[v].members]) for u, v in h.arcs}
    assert relabeled == set(tree_digraph(strip_labels(t)).arcs)
    assert check_ball_transitivity(s).passed
