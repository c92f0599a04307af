"""Independent brute-force verdicts for differential testing.

When both asynchronous trace sets are finite, abstraction can be decided
directly from the definition: enumerate the traces, abstract the
concrete ones, and test set inclusion of canonical lassos.  That path
shares nothing with the step-term checker beyond the update semantics,
so agreement between the two is strong evidence for both.

:func:`differential_suite` generates seeded random model/mapping/
candidate triples and checks that agreement on every instance the
oracle can decide.  Instances it cannot decide still run the checker
and get a bounded sanity check: every short abstract walk must be
realisable as the merged image of a concrete walk (a necessary
condition only).
"""

from __future__ import annotations

import itertools
import random
import warnings

from .abstraction import (
    AbstractionMapping,
    StateMapping,
    abstract_trace_set,
    enumerate_candidates,
    require_mapping_fits,
    require_same_structure,
)
from .checker import check_asyn_abs, concrete_class
from .errors import NonMonotoneMappingWarning, UnsupportedError
from .model import Entity, Mvn, Neighbourhood, NextStateTable
from .modelio import serialize_mapping, serialize_model
from .semantics import ASYNC, attractors, build_state_graph, reachable_set
from .traces import async_traces, trace_set_is_finite


def oracle_check(mv1: Mvn, mv2: Mvn, phi: AbstractionMapping) -> bool:
    """Decide abstraction by direct trace-set inclusion.

    Needs the concrete trace set to be finite (else
    :class:`UnsupportedError`: the image cannot be enumerated).  An
    infinite abstract trace set is decided without enumeration: it can
    never be included in the finite image.
    """
    require_same_structure(mv1, mv2)
    require_mapping_fits(phi, mv1, mv2)
    g1 = build_state_graph(mv1, ASYNC)
    g2 = build_state_graph(mv2, ASYNC)
    if not trace_set_is_finite(g2):
        raise UnsupportedError(
            "brute-force inclusion needs a finite concrete trace set"
        )
    if not trace_set_is_finite(g1):
        return False
    t1 = async_traces(mv1, g1)
    t2 = async_traces(mv2, g2)
    return t1 <= abstract_trace_set(phi, t2)


# ---------------------------------------------------------------------------
# Random instance generation


_SURJECTIVE_3_TO_2 = [
    (0, 0, 1),
    (0, 1, 0),
    (0, 1, 1),
    (1, 0, 0),
    (1, 0, 1),
    (1, 1, 0),
]


def random_model(rng: random.Random, name: str = "R") -> Mvn:
    """A small random model biased toward interesting dynamics.

    Two or three entities, levels at most 2, at least one ternary entity
    (so a compression mapping exists).  Models whose asynchronous graph
    has no edges at all are rejected and redrawn, so closures and
    collapsing loops actually get exercised downstream.
    """
    while True:
        n = rng.choice([2, 3])
        max_levels = [rng.choice([1, 2]) for _ in range(n)]
        if 2 not in max_levels:
            max_levels[rng.randrange(n)] = 2
        entities = tuple(Entity(f"X{i}", max_levels[i]) for i in range(n))
        neighbourhoods = []
        for i in range(n):
            if n > 2 and rng.random() < 0.15:
                neighbourhoods.append(Neighbourhood(i, ()))
                continue
            size = rng.choice([1, 2]) if n > 1 else 1
            inputs = tuple(sorted(rng.sample(range(n), min(size, n))))
            neighbourhoods.append(Neighbourhood(i, inputs))
        tables = []
        for i in range(n):
            if not neighbourhoods[i].inputs:
                tables.append(NextStateTable(i, {(): 0}))
                continue
            rows = {}
            for key in itertools.product(
                *(range(max_levels[j] + 1) for j in neighbourhoods[i].inputs)
            ):
                rows[key] = rng.randrange(max_levels[i] + 1)
            tables.append(NextStateTable(i, rows))
        model = Mvn(name, entities, tuple(neighbourhoods), tuple(tables))
        if build_state_graph(model, ASYNC).edge_count > 0:
            return model


def random_mapping(rng: random.Random, model: Mvn) -> AbstractionMapping:
    """A random proper mapping: compress a nonempty set of ternary entities."""
    ternary = [i for i, e in enumerate(model.entities) if e.max_level == 2]
    chosen = rng.sample(ternary, rng.randint(1, len(ternary)))
    slots: list[StateMapping | None] = [None] * len(model.entities)
    for i in chosen:
        slots[i] = StateMapping(i, rng.choice(_SURJECTIVE_3_TO_2))
    return AbstractionMapping(model.max_levels, tuple(slots))


def random_instance(
    rng: random.Random,
) -> tuple[Mvn, Mvn, AbstractionMapping]:
    """A (candidate abstraction, concrete model, mapping) triple.

    Half the time the abstract model is a clean candidate; otherwise one
    table entry is mutated so refutations are exercised too.
    """
    mv2 = random_model(rng)
    phi = random_mapping(rng, mv2)
    candidates = enumerate_candidates(mv2, phi).models
    mv1 = rng.choice(candidates)
    if rng.random() < 0.5:
        mutable = [i for i in range(len(mv1.entities)) if not mv1.is_input(i)]
        i = rng.choice(mutable)
        rows = dict(mv1.tables[i].rows)
        key = rng.choice(sorted(rows))
        options = [v for v in range(mv1.entities[i].max_level + 1) if v != rows[key]]
        rows[key] = rng.choice(options)
        tables = tuple(
            NextStateTable(j, rows) if j == i else mv1.tables[j]
            for j in range(len(mv1.tables))
        )
        mv1 = Mvn(mv1.name + "m", mv1.entities, mv1.neighbourhoods, tables)
    return mv1, mv2, phi


def _walk_prefixes(graph, max_len: int, cap: int = 50000):
    """Distinct walks of the graph up to ``max_len`` states (capped)."""
    out = set()
    for s in graph.nodes:
        stack = [(s,)]
        while stack:
            walk = stack.pop()
            out.add(walk)
            if len(out) >= cap:
                return out
            if len(walk) < max_len:
                for v in graph.succ[walk[-1]]:
                    stack.append(walk + (v,))
    return out


def _prefix_realizable(g2, phi: AbstractionMapping, prefix) -> bool:
    """Is ``prefix`` the merged image of some concrete walk?"""
    seen = {(u, 0) for u in g2.nodes if phi.apply(u) == prefix[0]}
    stack = list(seen)
    last = len(prefix) - 1
    while stack:
        u, i = stack.pop()
        if i == last:
            return True
        for v in g2.succ[u]:
            image = phi.apply(v)
            if image == prefix[i]:
                nxt = (v, i)
            elif image == prefix[i + 1]:
                nxt = (v, i + 1)
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return any(i == last for _, i in seen)


def differential_suite(seed: int, count: int, prefix_depth: int = 8) -> dict:
    """Run ``count`` random instances; compare checker and oracle verdicts.

    Returns a JSON-ready report.  Divergences carry the full model and
    mapping sources so any failure can be replayed verbatim.  Instances
    with infinite trace sets are recorded as unsupported; when the
    checker accepts one, every short abstract walk is additionally
    required to be realisable concretely (necessary condition only).
    """
    rng = random.Random(seed)
    instances = []
    divergences = []
    supported = 0
    both_finite = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonMonotoneMappingWarning)
        for index in range(count):
            mv1, mv2, phi = random_instance(rng)
            record = {
                "index": index,
                "mv1": serialize_model(mv1),
                "mv2": serialize_model(mv2),
                "mapping": serialize_mapping(phi, mv2),
            }
            verdict = check_asyn_abs(mv1, mv2, phi).holds
            record["checker"] = verdict
            try:
                expected = oracle_check(mv1, mv2, phi)
            except UnsupportedError:
                record["supported"] = False
                record["oracle"] = None
                if verdict:
                    g1 = build_state_graph(mv1, ASYNC)
                    g2 = build_state_graph(mv2, ASYNC)
                    ok = all(
                        _prefix_realizable(g2, phi, p)
                        for p in sorted(_walk_prefixes(g1, prefix_depth))
                    )
                    record["prefix_check"] = ok
                    if not ok:
                        divergences.append(dict(record, kind="prefix_condition"))
            else:
                supported += 1
                record["supported"] = True
                record["oracle"] = expected
                record["both_finite"] = trace_set_is_finite(
                    build_state_graph(mv1, ASYNC)
                )
                both_finite += record["both_finite"]
                if expected != verdict:
                    divergences.append(dict(record, kind="verdict"))
            instances.append(record)
    return {
        "seed": seed,
        "count": count,
        "supported": supported,
        "both_finite": both_finite,
        "divergences": divergences,
        "instances": instances,
    }


def reachability_soundness_suite(
    mv1: Mvn, mv2: Mvn, phi: AbstractionMapping
) -> dict:
    """Exhaustively check that abstract reachability is concretely realised.

    Requires the abstraction to hold.  For every ordered pair of
    abstract states where the second is reachable from the first, there
    must be concrete states with the matching images such that the
    second is reachable from the first in the concrete model.
    """
    if not check_asyn_abs(mv1, mv2, phi).holds:
        raise ValueError("the abstraction does not hold; nothing to verify")
    g1 = build_state_graph(mv1, ASYNC)
    g2 = build_state_graph(mv2, ASYNC)
    reach2 = {s: reachable_set(g2, s) for s in g2.nodes}
    pairs = 0
    failures = []
    for s1 in g1.nodes:
        for s2 in reachable_set(g1, s1):
            pairs += 1
            klass2 = concrete_class(phi, s2)
            if not any(
                klass2 & reach2[c1] for c1 in concrete_class(phi, s1)
            ):
                failures.append({"from": s1, "to": s2})
    return {"pairs_checked": pairs, "failures": failures}


def attractor_correspondence(mv1: Mvn, mv2: Mvn, phi: AbstractionMapping) -> dict:
    """Check that every abstract attractor is represented concretely.

    For each attractor of the abstract model there must be a single
    concrete attractor containing, for every abstract member state, at
    least one concrete state with that image.
    """
    a1 = attractors(build_state_graph(mv1, ASYNC))
    a2 = attractors(build_state_graph(mv2, ASYNC))
    checked = 0
    failures = []
    for att in a1.attractors:
        checked += 1
        hosts = [
            b
            for b in a2.attractors
            if all(concrete_class(phi, s) & b.states for s in att.states)
        ]
        if not hosts:
            failures.append({"attractor": sorted(att.states)})
    return {"attractors_checked": checked, "failures": failures}
