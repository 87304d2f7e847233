from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meshrefine.mwis import BRUTE_FORCE_MAX, CapacityError, WeightedGraph, solve

from oracles import brute_force_mwis, random_graph

F = Fraction
FIG1_EDGES = [(0, 3), (1, 2), (1, 4), (2, 4), (2, 3)]  # a-d, b-c, b-e, c-e, c-d


def test_fig1_weighted():
    g = WeightedGraph(5, FIG1_EDGES, [F(1, 2), F(1, 3), F(1, 4), F(1, 3), F(1, 3)])
    chosen = solve(g)
    assert chosen == (0, 1)
    assert g.weight_of(chosen) == F(5, 6)


def test_edgeless_takes_everything():
    assert solve(WeightedGraph(4, [], [1, 2, 3, 4])) == (0, 1, 2, 3)


def test_path_of_three():
    g = WeightedGraph(3, [(0, 1), (1, 2)], [1, 3, 1])
    assert brute_force_mwis(3, [(0, 1), (1, 2)], [1, 3, 1]) == (3, (1,))
    assert solve(g) == (1,)


def test_empty_graph():
    assert solve(WeightedGraph(0, [], [])) == ()


def test_tie_break_lexicographic():
    # 0-1 path with equal weights: {0} beats {1}
    assert solve(WeightedGraph(2, [(0, 1)], [1, 1])) == (0,)
    # {0, 3} and {1, 2} tie on a 4-cycle 0-1-3-2-0 ... here 0-1, 1-3, 3-2, 2-0
    assert solve(WeightedGraph(4, [(0, 1), (1, 3), (3, 2), (2, 0)], [1, 1, 1, 1])) == (0, 3)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        solve(WeightedGraph(65, [], [1] * 65))
    with pytest.raises(CapacityError):
        solve(WeightedGraph(5, [], [1] * 5), limit=4)


@pytest.mark.parametrize("bad", [
    dict(order=2, edges=[(0, 0)], weights=[1, 1]),
    dict(order=2, edges=[(0, 2)], weights=[1, 1]),
    dict(order=2, edges=[], weights=[1, 0]),
    dict(order=2, edges=[], weights=[1]),
])
def test_weighted_graph_validation(bad):
    with pytest.raises(ValueError):
        WeightedGraph(**bad)


@pytest.mark.parametrize("order", [BRUTE_FORCE_MAX + 1, 14, 18])
@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_branch_and_bound_matches_oracle(order, p):
    rng = np.random.default_rng(order * 10 + int(p * 10))
    for _ in range(4):
        edges, weights = random_graph(rng, order, p)
        g = WeightedGraph(order, edges, weights)
        best, lex = brute_force_mwis(order, edges, weights)
        chosen = solve(g)
        assert g.is_independent(chosen)
        assert g.weight_of(chosen) == best
        assert chosen == lex


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 12), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_random_small_graphs(order, p, seed):
    rng = np.random.default_rng(seed)
    edges, weights = random_graph(rng, order, p)
    g = WeightedGraph(order, edges, weights)
    best, lex = brute_force_mwis(order, edges, weights)
    chosen = solve(g)
    assert g.is_independent(chosen)
    assert g.weight_of(chosen) == best
    assert chosen == lex


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 15), st.floats(0, 1), st.integers(0, 2**32 - 1),
       st.fractions(min_value=F(1, 100), max_value=10))
def test_isolated_vertex_adds_its_weight(order, p, seed, extra):
    rng = np.random.default_rng(seed)
    edges, weights = random_graph(rng, order, p)
    g = WeightedGraph(order, edges, weights)
    h = WeightedGraph(order + 1, edges, weights + [extra])
    assert h.weight_of(solve(h)) == g.weight_of(solve(g)) + extra
