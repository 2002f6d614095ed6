"""Tests for random matching covers, dual graphs, signings, and the replacement ball."""

import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from octagap.covers import (
    NUM_COLORS,
    REPLACEMENT_SPECTRAL_RADIUS,
    CoverPresentation,
    DualGraph,
    Edge,
    Matching,
    adjacency_matrix,
    all_plus_signing,
    dirichlet_rho,
    dual_graph,
    export_edges_csv,
    export_spectra_csv,
    graph_lambda1,
    is_connected,
    lift_graph,
    replacement_ball,
    sample_cover,
    signing_hash,
    simple_switching,
    switching_walk,
    tangle_free_radius,
    two_cover_lambda1,
    two_cover_spectra,
    walk_summary,
)
from octagap.errors import DomainError

REPLACEMENT_SPHERES = (1, 4, 6, 12, 18, 36, 54, 108, 162, 324, 486, 972, 1458)
RHO_AT_RADIUS_12 = 3.8644306520169893


def _two_vertex_graph():
    """Two vertices joined by four parallel edges, one of each color."""
    return DualGraph(2, tuple(Edge(0, 1, c) for c in range(1, 5)))


def _disjoint_pair_graph():
    edges = tuple(Edge(0, 1, c) for c in range(1, 5)) + tuple(Edge(2, 3, c) for c in range(1, 5))
    return DualGraph(4, edges)


# -- matchings -------------------------------------------------------------------


def test_matching_accepts_fixed_point_free_involutions():
    m = Matching(np.array([1, 0, 3, 2]))
    assert m.num_points == 4
    assert m.pairs() == [(0, 1), (2, 3)]


def test_matching_rejects_degenerate_arrays():
    with pytest.raises(DomainError):
        Matching(np.array([0, 1, 2]))
    with pytest.raises(DomainError):
        Matching(np.array([0, 1, 3, 2]))
    with pytest.raises(DomainError):
        Matching(np.array([1, 2, 3, 0]))


def test_matching_array_is_immutable():
    m = Matching(np.array([1, 0]))
    with pytest.raises(ValueError):
        m.perm[0] = 0


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_sample_cover_draws_valid_presentations(n, seed):
    cover = sample_cover(n, seed)
    assert isinstance(cover, CoverPresentation)
    assert cover.n == n and cover.seed == seed
    assert len(cover.sigma) == NUM_COLORS
    for matching in cover.sigma:
        assert matching.num_points == 2 * n


def test_sample_cover_is_reproducible():
    a, b = sample_cover(25, 99), sample_cover(25, 99)
    for ma, mb in zip(a.sigma, b.sigma):
        assert np.array_equal(ma.perm, mb.perm)
    c = sample_cover(25, 100)
    assert any(not np.array_equal(ma.perm, mc.perm) for ma, mc in zip(a.sigma, c.sigma))


def test_sample_cover_without_a_seed_records_fresh_entropy():
    cover = sample_cover(5)
    assert cover.seed is not None


def test_matchings_on_six_points_are_close_to_uniform():
    """A chi-square test over the 15 matchings on 6 points at 2000 draws."""
    counts = {}
    for seed in range(2000):
        key = tuple(sample_cover(3, seed).sigma[0].pairs())
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 15
    result = scipy.stats.chisquare(list(counts.values()))
    assert result.pvalue > 0.001


# -- dual graphs -----------------------------------------------------------------


def test_dual_graph_of_a_cover_is_four_regular():
    graph = dual_graph(sample_cover(20, 7))
    assert graph.num_vertices == 40
    assert graph.num_edges == 80
    degrees = [0] * graph.num_vertices
    for edge in graph.edges:
        degrees[edge.u] += 1
        degrees[edge.v] += 1
    assert all(d == 4 for d in degrees)


def test_dual_graph_colors_partition_into_perfect_matchings():
    graph = dual_graph(sample_cover(15, 3))
    for color in range(1, 5):
        touched = [v for e in graph.edges if e.color == color for v in (e.u, e.v)]
        assert sorted(touched) == list(range(graph.num_vertices))


def test_dual_graph_validation():
    with pytest.raises(DomainError):
        DualGraph(2, (Edge(0, 0, 1),))
    with pytest.raises(DomainError):
        DualGraph(2, tuple(Edge(0, 1, c) for c in (1, 2, 3, 5)))
    with pytest.raises(DomainError):
        DualGraph(3, (Edge(0, 1, 1),))
    with pytest.raises(DomainError):
        DualGraph(2, (Edge(0, 1, 1), Edge(0, 1, 1)))


def test_adjacency_matrix_is_symmetric_with_row_sums_four():
    graph = dual_graph(sample_cover(12, 5))
    a = adjacency_matrix(graph)
    assert np.array_equal(a, a.T)
    assert np.all(a.sum(axis=0) == 4)
    signed = adjacency_matrix(graph, all_plus_signing(graph))
    assert np.array_equal(signed, a)


def test_connectivity_detection():
    assert is_connected(_two_vertex_graph())
    assert not is_connected(_disjoint_pair_graph())


def test_lambda1_vanishes_exactly_on_disconnected_graphs():
    assert graph_lambda1(_disjoint_pair_graph()) == 0.0
    assert graph_lambda1(_two_vertex_graph()) == pytest.approx(8.0, abs=1e-12)
    graph = dual_graph(sample_cover(30, 11))
    if is_connected(graph):
        assert graph_lambda1(graph) > 0.0


def test_lambda1_sparse_path_matches_the_dense_path():
    graph = dual_graph(sample_cover(1100, 4))
    sparse = graph_lambda1(graph)
    mu2 = float(np.linalg.eigvalsh(adjacency_matrix(graph).astype(float))[-2])
    assert sparse == pytest.approx(max(0.0, 4.0 - mu2), abs=1e-7)


# -- tangle-free radius ------------------------------------------------------------


def test_tangle_free_radius_on_known_graphs():
    assert tangle_free_radius(_two_vertex_graph()) == 0
    cycle = (6, [(k, (k + 1) % 6) for k in range(6)])
    assert tangle_free_radius(cycle) == 6
    assert tangle_free_radius(cycle, max_radius=3) == 3
    bowtie = (5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    assert tangle_free_radius(bowtie) == 0


def test_tangle_free_radius_of_a_long_subdivided_theta():
    """Two cycles joined by a long path stay tangle free below half the path."""
    path = [(k, k + 1) for k in range(20)]
    left = [(0, 21), (21, 0)]
    right = [(20, 22), (22, 20)]
    graph = (23, path + left + right)
    radius = tangle_free_radius(graph)
    assert 1 <= radius < 20


def test_tangle_free_radius_matches_on_sampled_covers():
    graph = dual_graph(sample_cover(200, 13))
    radius = tangle_free_radius(graph)
    assert isinstance(radius, int)
    assert radius >= 0


# -- signings and two-covers ---------------------------------------------------------


def test_all_plus_signing_and_switching():
    graph = dual_graph(sample_cover(10, 1))
    signing = all_plus_signing(graph)
    assert signing.num_edges == graph.num_edges
    assert np.all(signing.values == 1)
    switched = simple_switching(signing, 5)
    assert switched.values[5] == -1
    assert np.sum(switched.values != signing.values) == 1
    assert signing_hash(switched) != signing_hash(signing)
    assert signing_hash(simple_switching(switched, 5)) == signing_hash(signing)
    with pytest.raises(DomainError):
        simple_switching(signing, graph.num_edges)


def test_lift_of_the_trivial_signing_is_two_disjoint_copies():
    graph = dual_graph(sample_cover(14, 2))
    lift = lift_graph(graph, all_plus_signing(graph))
    assert lift.num_vertices == 2 * graph.num_vertices
    assert lift.num_edges == 2 * graph.num_edges
    assert not is_connected(lift)
    assert graph_lambda1(lift) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_two_cover_spectra_interlace_with_the_lift(seed):
    """Base-plus-new eigenvalues reproduce the lift spectrum exactly."""
    rng = np.random.default_rng(seed)
    graph = dual_graph(sample_cover(int(rng.integers(5, 30)), seed))
    signing_values = rng.choice([-1, 1], size=graph.num_edges)
    signing = simple_switching(all_plus_signing(graph), 0)
    for index, value in enumerate(signing_values):
        if value == -1 and signing.values[index] == 1:
            signing = simple_switching(signing, index)
        elif value == 1 and signing.values[index] == -1:
            signing = simple_switching(signing, index)
    old, new = two_cover_spectra(graph, signing)
    assert len(old) == len(new) == graph.num_vertices
    lift = lift_graph(graph, signing)
    lifted = np.linalg.eigvalsh(adjacency_matrix(lift).astype(float))
    combined = np.sort(np.concatenate([old, new]))
    assert np.max(np.abs(combined - lifted)) < 1e-8
    assert two_cover_lambda1(graph, signing) == pytest.approx(
        graph_lambda1(lift), abs=1e-9
    )


def test_switching_walk_is_reproducible_and_bounded():
    graph = dual_graph(sample_cover(12, 7))
    walk1 = switching_walk(graph, 10, seed=3)
    walk2 = switching_walk(graph, 10, seed=3)
    assert walk1 == walk2
    assert len(walk1) == 11
    assert walk1[0][0] == signing_hash(all_plus_signing(graph))
    assert walk1[0][1] == pytest.approx(0.0, abs=1e-9)
    assert all(0.0 <= gap <= 8.0 for _, gap in walk1)
    walk3 = switching_walk(graph, 10, seed=4)
    assert walk3 != walk1


def test_switching_walk_requires_at_least_one_step():
    graph = dual_graph(sample_cover(6, 7))
    with pytest.raises(DomainError):
        switching_walk(graph, 0, seed=1)


def test_walk_summary_histogram_accounts_for_every_step():
    graph = dual_graph(sample_cover(12, 7))
    walk = switching_walk(graph, 25, seed=3)
    summary = walk_summary(12, 3, walk, bins=10)
    assert summary["n"] == 12 and summary["seed"] == 3 and summary["steps"] == 25
    assert len(summary["lambda1_series"]) == 26
    assert len(summary["histogram"]["bin_edges"]) == 11
    assert sum(summary["histogram"]["counts"]) == 26


def test_single_switch_moves_lambda1_continuously():
    """One sign flip changes the two-cover gap by a bounded amount."""
    graph = dual_graph(sample_cover(40, 21))
    signing = all_plus_signing(graph)
    before = two_cover_lambda1(graph, signing)
    after = two_cover_lambda1(graph, simple_switching(signing, 0))
    assert abs(after - before) < 0.5


# -- the replacement ball -------------------------------------------------------------


def test_replacement_sphere_sizes_follow_the_growth_series():
    ball = replacement_ball(12)
    assert tuple(ball.sphere_sizes()) == REPLACEMENT_SPHERES
    assert ball.num_vertices == sum(REPLACEMENT_SPHERES) == 3641
    for k in range(3, len(REPLACEMENT_SPHERES)):
        assert REPLACEMENT_SPHERES[k] == 3 * REPLACEMENT_SPHERES[k - 2]


def test_replacement_rho_increases_to_the_frozen_value():
    values = [dirichlet_rho(replacement_ball(r)) for r in range(0, 13, 3)]
    assert values[0] == 0.0
    assert all(a < b for a, b in zip(values[1:], values[2:]))
    assert values[-1] == pytest.approx(RHO_AT_RADIUS_12, rel=1e-12)
    assert values[-1] <= REPLACEMENT_SPECTRAL_RADIUS


def test_replacement_radius_and_gap_constants_are_consistent():
    assert REPLACEMENT_SPECTRAL_RADIUS == pytest.approx(
        1.0 + math.sqrt(5.0 + 2.0 * math.sqrt(3.0)), rel=1e-15
    )
    assert 4.0 - REPLACEMENT_SPECTRAL_RADIUS == pytest.approx(0.0906871, abs=1e-7)


def test_replacement_ball_guards_its_radius():
    with pytest.raises(DomainError):
        replacement_ball(15)
    with pytest.raises(DomainError):
        replacement_ball(-1)


# -- exports ----------------------------------------------------------------------------


def test_export_edges_csv(tmp_path):
    graph = dual_graph(sample_cover(8, 3))
    path = tmp_path / "edges.csv"
    export_edges_csv(graph, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "u,v,color,sign"
    assert len(lines) == graph.num_edges + 1
    assert all(line.endswith(",1") for line in lines[1:])
    signing = simple_switching(all_plus_signing(graph), 0)
    export_edges_csv(graph, path, signing)
    lines = path.read_text().strip().splitlines()
    assert lines[1].endswith(",-1")


def test_export_spectra_csv(tmp_path):
    graph = dual_graph(sample_cover(8, 3))
    old, new = two_cover_spectra(graph, all_plus_signing(graph))
    path = tmp_path / "spectra.csv"
    export_spectra_csv(old, new, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "index,old,new"
    assert len(lines) == len(old) + 1
