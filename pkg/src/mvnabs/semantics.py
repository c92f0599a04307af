"""Update semantics, state-graph construction, and attractor analysis.

Two update disciplines are supported.  Under the synchronous discipline
every entity updates simultaneously, so each state has exactly one
successor (self-loops allowed).  Under the asynchronous discipline one
entity updates at a time and only updates that actually change the
state count, so successors are the single-entity updates that differ
from the source and a state may have zero, one, or many of them.

Attractors are the long-run behaviours: under synchronous updates the
unique cycles that iteration eventually enters; under asynchronous
updates the states with no successors (point attractors) plus the
nontrivial strongly connected components of the state graph.

State graphs are materialised explicitly (dict of sorted successor
tuples).  This is deliberate: the models this package targets have tiny
state spaces and an explicit graph keeps every downstream analysis
trivially auditable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .model import GlobalState, Mvn, iter_states, require_valid

SYNC = "sync"
ASYNC = "async"


def sync_step(model: Mvn, state: GlobalState) -> GlobalState:
    """Simultaneously update every entity via its table.

    Input entities keep their current level.
    """
    out = []
    for i in range(len(model.entities)):
        if model.is_input(i):
            out.append(state[i])
        else:
            out.append(model.tables[i].rows[model.inputs_of(i, state)])
    return tuple(out)


def async_next(model: Mvn, state: GlobalState) -> frozenset[GlobalState]:
    """All single-entity updates of ``state`` that change it.

    Input entities never propose a change, and an update that leaves the
    entity's level unchanged is not a step.  An empty result means the
    state is a point attractor.
    """
    succs = set()
    for i in range(len(model.entities)):
        if model.is_input(i):
            continue
        level = model.tables[i].rows[model.inputs_of(i, state)]
        if level != state[i]:
            succs.add(state[:i] + (level,) + state[i + 1 :])
    return frozenset(succs)


@dataclass(frozen=True)
class StateGraph:
    """Explicit state graph of a model under one update discipline.

    ``nodes`` is the full state space in lexicographic order and
    ``succ`` maps every node to its sorted successor tuple, so all
    iteration over the graph is deterministic.
    """

    name: str
    semantics: str
    nodes: tuple[GlobalState, ...]
    succ: dict[GlobalState, tuple[GlobalState, ...]]

    def edges(self) -> Iterator[tuple[GlobalState, GlobalState]]:
        for u in self.nodes:
            for v in self.succ[u]:
                yield (u, v)

    @property
    def edge_count(self) -> int:
        return sum(len(self.succ[u]) for u in self.nodes)

    def edge_set(self) -> set[tuple[GlobalState, GlobalState]]:
        return set(self.edges())


def build_state_graph(model: Mvn, semantics: str) -> StateGraph:
    """Materialise the full state graph under the given discipline."""
    require_valid(model)
    if semantics not in (SYNC, ASYNC):
        raise ValueError(f"unknown semantics {semantics!r} (use {SYNC!r} or {ASYNC!r})")
    nodes = tuple(iter_states(model))
    if semantics == SYNC:
        succ = {s: (sync_step(model, s),) for s in nodes}
    else:
        succ = {s: tuple(sorted(async_next(model, s))) for s in nodes}
    return StateGraph(name=model.name, semantics=semantics, nodes=nodes, succ=succ)


@dataclass(frozen=True)
class Attractor:
    """One attractor: a state set, its kind, and whether it is exit-free.

    ``kind`` is ``"point"`` for a single state with no (effective)
    successors, ``"cycle"`` for a synchronous attractor cycle, and
    ``"scc"`` for a nontrivial strongly connected component of an
    asynchronous graph.  Nontrivial SCCs are reported even when they
    have outgoing edges; ``terminal`` distinguishes the exit-free ones.
    """

    kind: str
    states: frozenset[GlobalState]
    terminal: bool


@dataclass(frozen=True)
class AttractorSet:
    """All attractors of one state graph, sorted by smallest member."""

    semantics: str
    attractors: tuple[Attractor, ...]

    def state_sets(self) -> set[frozenset[GlobalState]]:
        return {a.states for a in self.attractors}

    def points(self) -> set[frozenset[GlobalState]]:
        return {a.states for a in self.attractors if a.kind == "point"}

    def all_states(self) -> frozenset[GlobalState]:
        out: set[GlobalState] = set()
        for a in self.attractors:
            out |= a.states
        return frozenset(out)


def strongly_connected_components(graph: StateGraph) -> list[list[GlobalState]]:
    """Tarjan's algorithm over the explicit graph.

    Iterative (explicit recursion stack) so deep graphs cannot hit the
    interpreter recursion limit.  Components come out in reverse
    topological order of the condensation; callers that need a stable
    order should sort the result.
    """
    index: dict[GlobalState, int] = {}
    lowlink: dict[GlobalState, int] = {}
    on_stack: set[GlobalState] = set()
    stack: list[GlobalState] = []
    sccs: list[list[GlobalState]] = []
    counter = 0

    for root in graph.nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, succ_i = work.pop()
            if succ_i == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            successors = graph.succ[node]
            while succ_i < len(successors):
                child = successors[succ_i]
                succ_i += 1
                if child not in index:
                    work.append((node, succ_i))
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            if lowlink[node] == index[node]:
                scc = []
                while True:
                    top = stack.pop()
                    on_stack.discard(top)
                    scc.append(top)
                    if top == node:
                        break
                sccs.append(scc)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return sccs


def attractors(graph: StateGraph) -> AttractorSet:
    """Find the attractors of a state graph.

    Asynchronous graphs: point attractors are exactly the states with no
    successors; every nontrivial SCC is reported as an ``"scc"``
    attractor with a ``terminal`` flag saying whether it has no exits.
    Synchronous graphs: iterate each state until a repeat; the unique
    cycles found are the attractors (``"point"`` when of length one).
    """
    found: list[Attractor] = []
    if graph.semantics == ASYNC:
        for s in graph.nodes:
            if not graph.succ[s]:
                found.append(Attractor("point", frozenset({s}), True))
        for scc in strongly_connected_components(graph):
            if len(scc) < 2:
                continue  # async graphs have no self-loops
            members = frozenset(scc)
            terminal = all(set(graph.succ[u]) <= members for u in members)
            found.append(Attractor("scc", members, terminal))
    else:
        seen_cycles: set[frozenset[GlobalState]] = set()
        for s in graph.nodes:
            path_pos: dict[GlobalState, int] = {}
            path: list[GlobalState] = []
            cur = s
            while cur not in path_pos:
                path_pos[cur] = len(path)
                path.append(cur)
                cur = graph.succ[cur][0]
            cycle = path[path_pos[cur] :]
            members = frozenset(cycle)
            if members not in seen_cycles:
                seen_cycles.add(members)
                kind = "point" if len(cycle) == 1 else "cycle"
                found.append(Attractor(kind, members, True))
    found.sort(key=lambda a: min(a.states))
    return AttractorSet(graph.semantics, tuple(found))


def reachable(
    graph: StateGraph, source: GlobalState, target: GlobalState
) -> tuple[bool, tuple[GlobalState, ...] | None]:
    """Decide whether ``target`` is reachable from ``source``.

    Paths of length zero count, so every state reaches itself (witness:
    the empty path).  For a positive answer the witness is the full
    state sequence of a shortest path, endpoints included.
    """
    if source not in graph.succ or target not in graph.succ:
        raise ValueError("both states must belong to the graph")
    if source == target:
        return True, ()
    parent: dict[GlobalState, GlobalState] = {source: source}
    frontier = [source]
    while frontier:
        nxt: list[GlobalState] = []
        for u in frontier:
            for v in graph.succ[u]:
                if v in parent:
                    continue
                parent[v] = u
                if v == target:
                    path = [v]
                    while path[-1] != source:
                        path.append(parent[path[-1]])
                    return True, tuple(reversed(path))
                nxt.append(v)
        frontier = nxt
    return False, None


def reachable_set(graph: StateGraph, source: GlobalState) -> frozenset[GlobalState]:
    """All states reachable from ``source`` (including itself)."""
    seen = {source}
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in graph.succ[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return frozenset(seen)
