import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markfield import PointPattern, build_graph


def brute_force_edges(pattern, c):
    """O(n^2) oracle: every unordered pair with d <= c."""
    out = []
    xs, ys = pattern.xs, pattern.ys
    for i in range(pattern.n):
        for j in range(i + 1, pattern.n):
            d = np.hypot(xs[i] - xs[j], ys[i] - ys[j])
            if d <= c:
                out.append((i, j, d))
    return out


def make_pattern(pts):
    pts = np.asarray(pts, dtype=float)
    marks = np.ones(len(pts), dtype=np.int64)
    marks[0] = 2
    return PointPattern(xs=pts[:, 0], ys=pts[:, 1], marks=marks, Q=2)


def test_two_points_inside_cutoff():
    g = build_graph(make_pattern([[0.1, 0.1], [0.15, 0.1]]), 0.1)
    assert g.n_edges == 1
    (i, j, d), = g.edges()
    assert (i, j) == (0, 1)
    assert d == pytest.approx(0.05)


def test_two_points_outside_cutoff():
    g = build_graph(make_pattern([[0.1, 0.1], [0.25, 0.1]]), 0.1)
    assert g.n_edges == 0


def test_boundary_distance_included():
    g = build_graph(make_pattern([[0.2, 0.2], [0.3, 0.2]]), 0.1)
    assert g.n_edges == 1


def test_matches_brute_force_uniform(rng):
    pts = rng.random((100, 2))
    pat = make_pattern(pts)
    g = build_graph(pat, 0.2)
    oracle = brute_force_edges(pat, 0.2)
    got = list(g.edges())
    assert len(got) == len(oracle)
    for (i, j, d), (oi, oj, od) in zip(got, sorted(oracle)):
        assert (i, j) == (oi, oj)
        assert d == od  # same arithmetic, bitwise equal


def test_adjacency_is_transpose_closure(rng):
    pat = make_pattern(rng.random((80, 2)))
    g = build_graph(pat, 0.15)
    seen = set()
    for i in range(pat.n):
        nbrs, dists = g.neighbors(i)
        for j, d in zip(nbrs, dists):
            assert j != i
            seen.add((min(i, j), max(i, j), d))
    assert seen == {(i, j, d) for i, j, d in g.edges()}
    assert g.indptr[-1] == 2 * g.n_edges


def test_no_duplicate_pairs(rng):
    pat = make_pattern(rng.random((120, 2)))
    g = build_graph(pat, 0.3)
    pairs = list(zip(g.edge_i, g.edge_j))
    assert len(pairs) == len(set(pairs))
    assert np.all(g.edge_i < g.edge_j)


def test_stored_distances_correct(rng):
    pat = make_pattern(rng.random((60, 2)))
    g = build_graph(pat, 0.25)
    for i, j, d in g.edges():
        assert d == pytest.approx(np.hypot(pat.xs[i] - pat.xs[j], pat.ys[i] - pat.ys[j]))
        assert d <= 0.25


def test_cutoff_monotonicity(rng):
    pat = make_pattern(rng.random((150, 2)))
    smaller = {(i, j) for i, j, _ in build_graph(pat, 0.08).edges()}
    larger = {(i, j) for i, j, _ in build_graph(pat, 0.2).edges()}
    assert smaller <= larger


def test_duplicate_coordinates_give_zero_distance_edge():
    pts = [[0.4, 0.4], [0.4, 0.4], [0.9, 0.9]]
    g = build_graph(make_pattern(pts), 0.1)
    assert g.n_edges == 1
    (i, j, d), = g.edges()
    assert d == 0.0


def test_invalid_cutoff_rejected(small_pattern):
    with pytest.raises(ValueError):
        build_graph(small_pattern, 0.0)
    with pytest.raises(ValueError):
        build_graph(small_pattern, -0.1)
    with pytest.raises(ValueError):
        build_graph(small_pattern, 2.0)


def test_full_cutoff_gives_complete_graph(rng):
    pat = make_pattern(rng.random((30, 2)))
    g = build_graph(pat, np.sqrt(2.0))
    assert g.n_edges == 30 * 29 // 2


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=60),
    c=st.floats(min_value=0.01, max_value=1.0),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_grid_equals_brute_force_property(n, c, seed):
    rng = np.random.default_rng(seed)
    pat = make_pattern(rng.random((n, 2)))
    g = build_graph(pat, c)
    oracle = brute_force_edges(pat, c)
    assert [(i, j) for i, j, _ in g.edges()] == [(i, j) for i, j, _ in sorted(oracle)]
