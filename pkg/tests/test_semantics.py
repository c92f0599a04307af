import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvnabs import (
    ASYNC,
    SYNC,
    async_next,
    attractors,
    build_state_graph,
    parse_model,
    reachable,
    sync_step,
)
from mvnabs.oracle import random_model

PL2_ASYNC_EDGES = {
    ((0, 0), (0, 1)), ((0, 0), (1, 0)),
    ((1, 1), (0, 1)), ((1, 1), (1, 0)),
    ((1, 2), (0, 2)), ((1, 2), (1, 1)),
    ((0, 1), (0, 2)), ((0, 2), (0, 1)),
}

PL2_SYNC_EDGES = {
    ((0, 0), (1, 1)), ((1, 1), (0, 0)), ((1, 0), (1, 0)),
    ((1, 2), (0, 1)), ((0, 1), (0, 2)), ((0, 2), (0, 1)),
}


@pytest.mark.parametrize(
    "state,expected",
    [((1, 2), (0, 1)), ((1, 0), (1, 0)), ((0, 0), (1, 1))],
)
def test_sync_step(pl2, state, expected):
    assert sync_step(pl2, state) == expected


@pytest.mark.parametrize(
    "state,expected",
    [
        ((1, 2), {(0, 2), (1, 1)}),
        ((1, 0), set()),
        ((0, 0), {(1, 0), (0, 1)}),
    ],
)
def test_async_next(pl2, state, expected):
    assert async_next(pl2, state) == frozenset(expected)


def test_async_graph_edges_exact(pl2):
    assert build_state_graph(pl2, ASYNC).edge_set() == PL2_ASYNC_EDGES


def test_sync_graph_edges_exact(pl2):
    assert build_state_graph(pl2, SYNC).edge_set() == PL2_SYNC_EDGES


def test_identity_model_has_no_async_edges():
    model = parse_model(
        "mvn Id\nentity X : 0..2\nneighbourhood X = [X]\n"
        "table X:\n  0 -> 0\n  1 -> 1\n  2 -> 2\n"
    )
    assert build_state_graph(model, ASYNC).edge_count == 0


def test_pl2_async_attractors(pl2):
    result = attractors(build_state_graph(pl2, ASYNC))
    assert result.points() == {frozenset({(1, 0)})}
    sccs = [a for a in result.attractors if a.kind == "scc"]
    assert [a.states for a in sccs] == [frozenset({(0, 1), (0, 2)})]
    assert all(a.terminal for a in result.attractors)


def test_pl2_sync_attractors(pl2):
    result = attractors(build_state_graph(pl2, SYNC))
    assert result.state_sets() == {
        frozenset({(1, 0)}),
        frozenset({(0, 0), (1, 1)}),
        frozenset({(0, 1), (0, 2)}),
    }
    assert result.points() == {frozenset({(1, 0)})}


def test_mtrp_async_attractors(mtrp):
    result = attractors(build_state_graph(mtrp, ASYNC))
    assert result.points() == {
        frozenset({(0, 0, 1, 1)}),
        frozenset({(0, 1, 2, 2)}),
    }
    sccs = [a.states for a in result.attractors if a.kind == "scc"]
    assert sccs == [
        frozenset({(0, 0, 0, 0), (1, 0, 0, 0), (1, 0, 0, 1), (0, 0, 0, 1)})
    ]


def test_nonterminal_scc_is_reported_with_flag():
    # A 2-cycle whose states can also escape to a fixed point.
    model = parse_model(
        "mvn Leaky\nentity A : 0..1\nentity B : 0..1\n"
        "neighbourhood A = [A, B]\nneighbourhood B = [A, B]\n"
        "table A:\n  0 0 -> 1\n  0 1 -> 0\n  1 0 -> 1\n  1 1 -> 1\n"
        "table B:\n  0 0 -> 1\n  0 1 -> 0\n  1 0 -> 0\n  1 1 -> 1\n"
    )
    result = attractors(build_state_graph(model, ASYNC))
    sccs = [a for a in result.attractors if a.kind == "scc"]
    assert [a.states for a in sccs] == [frozenset({(0, 0), (0, 1)})]
    assert sccs[0].terminal is False


def test_reachable_with_witness(pl2):
    graph = build_state_graph(pl2, ASYNC)
    ok, path = reachable(graph, (1, 2), (0, 1))
    assert ok and path == ((1, 2), (0, 2), (0, 1))
    for a, b in zip(path, path[1:]):
        assert b in graph.succ[a]


def test_reachable_negative(pl2):
    graph = build_state_graph(pl2, ASYNC)
    assert reachable(graph, (1, 0), (0, 0)) == (False, None)


def test_reachable_self_is_empty_path(pl2):
    graph = build_state_graph(pl2, ASYNC)
    assert reachable(graph, (0, 1), (0, 1)) == (True, ())


def test_reachable_rejects_foreign_states(pl2):
    graph = build_state_graph(pl2, ASYNC)
    with pytest.raises(ValueError):
        reachable(graph, (9, 9), (0, 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_async_graph_invariants(seed):
    model = random_model(random.Random(seed))
    graph = build_state_graph(model, ASYNC)
    for u, v in graph.edges():
        assert u != v, "asynchronous steps must change the state"
        changed = [i for i in range(len(u)) if u[i] != v[i]]
        assert len(changed) == 1
        i = changed[0]
        assert not model.is_input(i)
        assert model.tables[i].rows[model.inputs_of(i, u)] == v[i]
    points = {s for s in graph.nodes if not graph.succ[s]}
    assert points == {s for s in graph.nodes if not async_next(model, s)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_sync_graph_invariants(seed):
    model = random_model(random.Random(seed))
    graph = build_state_graph(model, SYNC)
    assert all(len(graph.succ[s]) == 1 for s in graph.nodes)
    for s in graph.nodes:
        assert graph.succ[s][0] == sync_step(model, s)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_scc_partition_matches_mutual_reachability(seed):
    from mvnabs.semantics import reachable_set, strongly_connected_components

    model = random_model(random.Random(seed))
    graph = build_state_graph(model, ASYNC)
    reach = {s: reachable_set(graph, s) for s in graph.nodes}
    expected = {
        frozenset(v for v in graph.nodes if s in reach[v] and v in reach[s])
        for s in graph.nodes
    }
    computed = {frozenset(scc) for scc in strongly_connected_components(graph)}
    assert computed == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_attractor_invariants(seed):
    model = random_model(random.Random(seed))
    graph = build_state_graph(model, ASYNC)
    result = attractors(graph)
    seen = set()
    for a in result.attractors:
        assert not (a.states & seen), "attractors must be pairwise disjoint"
        seen |= a.states
        if a.terminal:
            for u in a.states:
                assert set(graph.succ[u]) <= a.states
