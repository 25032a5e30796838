from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultraballs import SpaceError, UltrametricSpace, ValidationReport, diameter, spectrum, validate
from ultraballs.generate import generate_random
from ultraballs.metric import format_scalar, parse_scalar


def brute_triangle_ok(dist):
    n = len(dist)
    return all(
        dist[i][j] <= max(dist[i][k], dist[k][j]) for i, j, k in product(range(n), repeat=3)
    )


def test_three_point_space_is_valid(abc):
    assert isinstance(abc, UltrametricSpace)
    assert brute_triangle_ok(abc.dist)


def test_singleton_is_valid(singleton):
    assert len(singleton) == 1
    assert diameter(singleton) == 0


def test_triangle_violation_names_the_triple():
    r = validate("abc", [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert isinstance(r, ValidationReport)
    assert not r
    (v,) = r.violations
    assert v.kind == "strong-triangle"
    assert v.indices == (0, 1, 2)
    assert v.values == (1, 1, 3)
    assert r.lines() == ["strong-triangle (a, b, c): d=3 > max(1, 1)"]


def test_report_has_one_witness_per_class():
    r = validate("abcd", [
        [0, 1, 0, 5],
        [2, 0, 1, 1],
        [0, 1, 7, 1],
        [5, 1, 1, 0],
    ])
    assert sorted(v.kind for v in r.violations) == [
        "asymmetry", "nonzero-diagonal", "strong-triangle", "zero-distance",
    ]


@pytest.mark.parametrize(
    "points, rows, code",
    [
        ([], [], "empty"),
        (["a", "a"], [[0, 1], [1, 0]], "duplicate-labels"),
        (["a", "b"], [[0, 1]], "non-square"),
        (["a", "b"], [[0, 1], [1]], "non-square"),
        (["a", "b"], [[0, "x"], ["x", 0]], "unparsable-entry"),
        (["a", "b"], [[0, "-1"], ["-1", 0]], "unparsable-entry"),
        (["a", "b"], [[0, "1/0"], ["1/0", 0]], "unparsable-entry"),
        (["a", "b"], [[0, None], [None, 0]], "unparsable-entry"),
    ],
)
def test_malformed_input_error_codes(points, rows, code):
    with pytest.raises(SpaceError) as exc:
        validate(points, rows)
    assert exc.value.code == code


def test_decimal_and_ratio_parse_equal():
    assert parse_scalar("0.5") == parse_scalar("1/2") == Fraction(1, 2)
    assert parse_scalar(0.1) == Fraction(1, 10)
    assert parse_scalar("2.50e1") == 25
    s1 = validate("ab", [["0", "0.5"], ["0.5", "0"]])
    s2 = validate("ab", [["0", "1/2"], ["1/2", "0"]])
    assert s1 == s2


@pytest.mark.parametrize("raw", ["nan", "inf", "1/-2", "abc", "", True])
def test_parse_scalar_rejects(raw):
    with pytest.raises(ValueError):
        parse_scalar(raw)


@pytest.mark.parametrize(
    "value, text",
    [(Fraction(3), "3"), (Fraction(1, 2), "1/2"), (Fraction(1, 4), "1/4"),
     (Fraction(3, 10), "0.3"), (Fraction(123, 100), "1.23"), (Fraction(7, 1000), "0.007"),
     (Fraction(0), "0")],
)
def test_format_scalar(value, text):
    assert format_scalar(value) == text
    assert parse_scalar(text) == value


def test_diameter(abc):
    assert diameter(abc) == 2
    assert diameter(abc.subspace([0])) == 0
    assert diameter(abc.subspace([0, 1])) == 1


def test_spectrum(abc, singleton, tri5):
    assert spectrum(abc, 0) == (0, 1, 2)
    assert spectrum(singleton, 0) == (0,)
    for t in range(3):
        assert spectrum(tri5, t) == (0, 5)
    with pytest.raises(IndexError):
        spectrum(abc, 3)


def test_generate_singleton_and_determinism():
    assert len(generate_random(3, 1)) == 1
    assert generate_random(5, 9) == generate_random(5, 9)
    assert generate_random(5, 9) != generate_random(6, 9)


def test_rank_matrix_matches_distances():
    s = generate_random(2, 12)
    for i in range(12):
        for j in range(12):
            assert s.values[s.ranks[i, j]] == s.dist[i][j]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.one_of(st.none(), st.integers(1, 5)))
def test_generated_spaces_validate(seed, n, depth):
    s = generate_random(seed, n, depth)
    again = validate(s.points, [[format_scalar(x) for x in row] for row in s.dist])
    assert isinstance(again, UltrametricSpace)
    assert again == s
    assert brute_triangle_ok(s.dist)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_fast_validator_agrees_with_cubic_check(data):
    # symmetric positive matrices, small value range so ultrametrics occur often
    n = data.draw(st.integers(2, 7))
    vals = data.draw(st.lists(st.integers(1, 3), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    m = np.zeros((n, n), dtype=int)
    m[np.triu_indices(n, 1)] = vals
    m = m + m.T
    rows = m.tolist()
    result = validate([f"q{i}" for i in range(n)], rows)
    expected = brute_triangle_ok(rows)
    assert isinstance(result, UltrametricSpace) == expected
    if not expected:
        (v,) = result.violations
        i, k, j = v.indices
        assert rows[i][j] > max(rows[i][k], rows[k][j])


def test_generated_from_perturbation_is_rejected():
    s = generate_random(4, 6)
    rows = [list(r) for r in s.dist]
    # make one pair strictly larger than everything else: breaks the triangle
    rows[0][1] = rows[1][0] = max(max(r) for r in rows) + 1
    r = validate(s.points, rows)
    assert isinstance(r, ValidationReport)
    assert r.kinds() == {"strong-triangle"}


def test_scaling_and_transform(abc):
    s3 = abc.scaled(3)
    assert s3.dist[0][2] == 6
    with pytest.raises(ValueError):
        abc.scaled(0)
    sq = abc.transform(lambda v: v * v)
    assert sq.dist[0][2] == 4 and sq.dist[0][0] == 0
