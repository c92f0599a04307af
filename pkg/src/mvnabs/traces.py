"""Trace semantics: lasso representation and exhaustive enumeration.

A trace is a maximal run of a model: finite only if it ends at a state
with no successors, otherwise infinite.  Over a finite state space every
infinite trace we enumerate is eventually periodic, so traces are stored
as lassos: a finite ``prefix`` followed by a ``loop`` repeated forever
(empty loop = finite trace).

Lassos are kept in a canonical form that makes sequence equality decide
as plain value equality: the loop is primitive (not a repetition of a
shorter word) and the prefix is minimal (its last state never equals the
loop's last state, else the boundary could be rotated into the loop).
Two canonical lassos are equal exactly when they denote the same finite
or infinite state sequence.

Asynchronous trace sets can be infinite.  The enumerable case is pinned
down by :func:`trace_set_is_finite`: every state inside a nontrivial
strongly connected component must have out-degree exactly one.  If some
cycle state had a second successor, running the cycle n times before
branching away would produce infinitely many distinct traces; with the
criterion satisfied, a walk that revisits a state is trapped in a
deterministic cycle, so all branching happens on loop-free prefixes and
the walk tree is finite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InfiniteTraceSetError
from .model import GlobalState, Mvn
from .semantics import ASYNC, SYNC, StateGraph, build_state_graph, strongly_connected_components


@dataclass(frozen=True)
class LassoTrace:
    """A finite or eventually periodic state sequence.

    ``prefix`` then ``loop`` forever; an empty loop denotes the finite
    sequence ``prefix``.  Instances produced by this module are always
    canonical (see :func:`canonicalize`).
    """

    prefix: tuple[GlobalState, ...]
    loop: tuple[GlobalState, ...]

    @property
    def is_finite(self) -> bool:
        return not self.loop

    def unfold(self, n: int) -> tuple[GlobalState, ...]:
        """The first ``n`` states of the denoted sequence (fewer if finite)."""
        if self.is_finite:
            return self.prefix[:n]
        out = list(self.prefix[:n])
        while len(out) < n:
            out.extend(self.loop[: n - len(out)])
        return tuple(out)

    def start(self) -> GlobalState:
        return self.prefix[0] if self.prefix else self.loop[0]


TraceSet = frozenset[LassoTrace]


def _primitive_root(loop: tuple[GlobalState, ...]) -> tuple[GlobalState, ...]:
    n = len(loop)
    for d in range(1, n + 1):
        if n % d == 0 and loop == loop[:d] * (n // d):
            return loop[:d]
    return loop


def canonicalize(trace: LassoTrace) -> LassoTrace:
    """Rewrite a lasso into the unique normal form for its sequence.

    The loop is reduced to its primitive root, then trailing prefix
    states equal to the loop's last state are absorbed by rotating the
    loop right.  Finite traces are already canonical.
    """
    if trace.is_finite:
        return trace
    loop = _primitive_root(trace.loop)
    prefix = list(trace.prefix)
    while prefix and prefix[-1] == loop[-1]:
        prefix.pop()
        loop = loop[-1:] + loop[:-1]
    return LassoTrace(tuple(prefix), loop)


def sync_traces(model: Mvn, graph: StateGraph | None = None) -> TraceSet:
    """One deterministic trace per initial state.

    Iterate the synchronous step until a state repeats; the repetition
    closes the loop.
    """
    if graph is None:
        graph = build_state_graph(model, SYNC)
    traces = set()
    for s in graph.nodes:
        pos: dict[GlobalState, int] = {}
        path: list[GlobalState] = []
        cur = s
        while cur not in pos:
            pos[cur] = len(path)
            path.append(cur)
            cur = graph.succ[cur][0]
        i = pos[cur]
        traces.add(canonicalize(LassoTrace(tuple(path[:i]), tuple(path[i:]))))
    return frozenset(traces)


def trace_set_is_finite(graph: StateGraph) -> bool:
    """True iff the asynchronous trace set is finite (enumerable).

    Criterion: every state inside a nontrivial SCC has out-degree
    exactly one.
    """
    if graph.semantics != ASYNC:
        raise ValueError("finiteness criterion applies to asynchronous graphs")
    for scc in strongly_connected_components(graph):
        if len(scc) < 2:
            continue
        if any(len(graph.succ[s]) != 1 for s in scc):
            return False
    return True


def async_traces(model: Mvn, graph: StateGraph | None = None) -> TraceSet:
    """Every maximal asynchronous run, as canonical lassos.

    Requires a finite trace set (:class:`InfiniteTraceSetError`
    otherwise).  Runs a depth-first walk from every initial state; a
    walk ends at a successor-free state (finite trace) or closes into a
    lasso the first time it revisits a state on the current path, which
    is sound because cycle states are deterministic under the
    finiteness criterion.
    """
    if graph is None:
        graph = build_state_graph(model, ASYNC)
    if not trace_set_is_finite(graph):
        raise InfiniteTraceSetError(
            f"model {graph.name}: asynchronous trace set is infinite"
        )
    traces: set[LassoTrace] = set()
    for s0 in graph.nodes:
        if not graph.succ[s0]:
            traces.add(LassoTrace((s0,), ()))
            continue
        path = [s0]
        pos = {s0: 0}
        iters = [iter(graph.succ[s0])]
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                iters.pop()
                del pos[path.pop()]
                continue
            if nxt in pos:
                i = pos[nxt]
                traces.add(canonicalize(LassoTrace(tuple(path[:i]), tuple(path[i:]))))
                continue
            if not graph.succ[nxt]:
                traces.add(LassoTrace(tuple(path) + (nxt,), ()))
                continue
            pos[nxt] = len(path)
            path.append(nxt)
            iters.append(iter(graph.succ[nxt]))
    return frozenset(traces)


def is_trace_of(graph: StateGraph, trace: LassoTrace) -> bool:
    """Check that a lasso is a maximal run of the given graph."""
    seq = trace.prefix + trace.loop
    for a, b in zip(seq, seq[1:]):
        if b not in graph.succ[a]:
            return False
    if trace.is_finite:
        return bool(seq) and not graph.succ[seq[-1]]
    return trace.loop[0] in graph.succ[seq[-1]]
