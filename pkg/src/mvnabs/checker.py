"""Step-term decision procedure for asynchronous abstraction checking.

Asynchronous trace sets can be infinite, so trace inclusion cannot be
tested directly.  This module decides it on the finite state graphs
instead.  The ingredients, for an abstract model ``mv1``, a concrete
model ``mv2`` and a mapping ``phi``:

* the concrete class of an abstract state S: every concrete state that
  maps to S;
* the consecutive closure E[S'] of a concrete state: the least set
  containing S' and closed under successors with the same abstract
  image (these are exactly the steps that vanish when abstracted traces
  merge duplicate states);
* a step term st(Gamma, S): one proposed way to realise S by a nonempty
  set Gamma of its concrete class, together with, for each abstract
  successor S_i of S, the derived set of concrete states reachable from
  the closures of Gamma in one visible step landing on S_i.  A term is
  valid when every derived successor set is nonempty and, if S has no
  abstract successors, every member of Gamma can *settle*: reach, while
  staying inside its own image class, a state with no successors at all
  or a cycle of same-image states.  A settled run is a maximal run whose
  merged image is just S, which is exactly what a trace ending at the
  abstract point attractor needs.  (Requiring the whole closure to be
  escape-free would be stronger and wrongly rejects members whose class
  has both an escape route and a settling one.)

The check starts from all valid step terms for every abstract state and
repeatedly removes terms that have, for some abstract successor S_i, no
surviving term of S_i drawn from inside the derived set T(S_i).  (The
subset test matters: T(S_i) collects *every* concrete state that can
realise the step, and a realisation through some of them is enough.
Requiring T(S_i) itself to survive would wrongly refute models where
T(S_i) also picks up states that cannot continue, because validity is
not monotone in Gamma.)  If any abstract state runs out of terms the
abstraction is refuted; if a sweep removes nothing, what remains is a
family that is nonempty everywhere and closed under step terms, which
certifies trace inclusion.  The surviving family at the fixpoint is the
greatest closed subfamily, so the verdict does not depend on sweep
order.  Successor sets are a pure function of (S, Gamma), so terms are
keyed by that pair and the closure test scans one family.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .abstraction import (
    AbstractionMapping,
    require_mapping_fits,
    require_same_structure,
)
from .errors import ClassTooLargeError, GammaOutOfClassError, NotClosedError
from .model import GlobalState, Mvn
from .semantics import ASYNC, StateGraph, build_state_graph

# Step terms are enumerated over all nonempty subsets of a concrete
# class, so class sizes beyond this would be hopeless anyway.
MAX_CLASS_SIZE = 20

StateSet = frozenset[GlobalState]


def concrete_class(phi: AbstractionMapping, state: GlobalState) -> StateSet:
    """All concrete states whose image is ``state``.

    Nonempty for every abstract state because each slot of the mapping
    is surjective.
    """
    if len(state) != len(phi.source_max_levels):
        raise ValueError("abstract state has the wrong number of entities")
    target_max = phi.target_max_levels
    if any(not (0 <= lvl <= target_max[i]) for i, lvl in enumerate(state)):
        raise ValueError(f"state {state} is outside the abstract state space")
    return frozenset(
        itertools.product(*(phi.preimage(i, lvl) for i, lvl in enumerate(state)))
    )


def _closure(graph: StateGraph, phi: AbstractionMapping, start: GlobalState) -> StateSet:
    image = phi.apply(start)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in graph.succ[u]:
                if v not in seen and phi.apply(v) == image:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return frozenset(seen)


def consec_closure(mv2: Mvn, phi: AbstractionMapping, state: GlobalState) -> StateSet:
    """Least set containing ``state`` and closed under same-image steps."""
    return _closure(build_state_graph(mv2, ASYNC), phi, state)


@dataclass(frozen=True)
class StepTerm:
    """One candidate realisation of an abstract state.

    ``successors`` pairs every abstract successor S_i with its derived
    concrete set T(S_i); it is fully determined by ``(state, gamma)``.
    Invalid terms are kept around for diagnostics but never enter the
    surviving families.
    """

    state: GlobalState
    gamma: StateSet
    successors: tuple[tuple[GlobalState, StateSet], ...]
    valid: bool
    invalid_reason: str | None = None

    def successor(self, abstract_succ: GlobalState) -> StateSet:
        for s, t in self.successors:
            if s == abstract_succ:
                return t
        raise KeyError(abstract_succ)


class _Context:
    """Shared per-check data: both graphs and memoised closures."""

    def __init__(self, mv1: Mvn, mv2: Mvn, phi: AbstractionMapping):
        require_same_structure(mv1, mv2)
        require_mapping_fits(phi, mv1, mv2)
        self.mv1 = mv1
        self.mv2 = mv2
        self.phi = phi
        self.g1 = build_state_graph(mv1, ASYNC)
        self.g2 = build_state_graph(mv2, ASYNC)
        self._closures: dict[GlobalState, StateSet] = {}
        self._settleable: dict[GlobalState, bool] = {}

    def closure(self, state: GlobalState) -> StateSet:
        if state not in self._closures:
            self._closures[state] = _closure(self.g2, self.phi, state)
        return self._closures[state]

    def settleable(self, state: GlobalState) -> bool:
        """Can a maximal run from ``state`` stay inside its image class?

        True when the class (all of it is reachable from ``state`` by
        construction) contains a dead end of the full graph or a cycle
        of same-image steps.
        """
        if state not in self._settleable:
            closure = self.closure(state)
            if any(not self.g2.succ[u] for u in closure):
                self._settleable[state] = True
            else:
                # Peel states with no same-image successors; anything
                # left lies on a same-image cycle.
                out = {u: 0 for u in closure}
                rev: dict[GlobalState, list[GlobalState]] = {u: [] for u in closure}
                for u in closure:
                    for v in self.g2.succ[u]:
                        if v in closure:
                            out[u] += 1
                            rev[v].append(u)
                queue = [u for u in closure if out[u] == 0]
                remaining = len(closure)
                while queue:
                    u = queue.pop()
                    remaining -= 1
                    for p in rev[u]:
                        out[p] -= 1
                        if out[p] == 0:
                            queue.append(p)
                self._settleable[state] = remaining > 0
        return self._settleable[state]

    def step_term(self, state: GlobalState, gamma: StateSet) -> StepTerm:
        klass = concrete_class(self.phi, state)
        if not gamma or not gamma <= klass:
            raise GammaOutOfClassError(
                f"{sorted(gamma)} is not a nonempty subset of the class of {state}"
            )
        abstract_succs = self.g1.succ[state]
        successors = []
        reason = None
        for s_i in abstract_succs:
            t = set()
            for g in gamma:
                for u in self.closure(g):
                    for v in self.g2.succ[u]:
                        if self.phi.apply(v) == s_i:
                            t.add(v)
            successors.append((s_i, frozenset(t)))
            if not t and reason is None:
                reason = f"no concrete step realises {state} -> {s_i}"
        if not abstract_succs and reason is None:
            for g in sorted(gamma):
                if not self.settleable(g):
                    reason = (
                        f"{state} is a point attractor but every maximal run "
                        f"from {g} leaves its image class"
                    )
                    break
        return StepTerm(
            state=state,
            gamma=gamma,
            successors=tuple(successors),
            valid=reason is None,
            invalid_reason=reason,
        )

    def all_step_terms(self, state: GlobalState) -> list[StepTerm]:
        klass = sorted(concrete_class(self.phi, state))
        if len(klass) > MAX_CLASS_SIZE:
            raise ClassTooLargeError(
                f"abstract state {state} has {len(klass)} concrete states; "
                f"subset enumeration is capped at {MAX_CLASS_SIZE}"
            )
        terms = []
        for r in range(1, len(klass) + 1):
            for combo in itertools.combinations(klass, r):
                term = self.step_term(state, frozenset(combo))
                if term.valid:
                    terms.append(term)
        return terms


def make_step_term(
    mv1: Mvn, mv2: Mvn, phi: AbstractionMapping, state: GlobalState, gamma
) -> StepTerm:
    """Build the step term for ``(state, gamma)``; check ``term.valid``."""
    return _Context(mv1, mv2, phi).step_term(state, frozenset(gamma))


def all_step_terms(
    mv1: Mvn, mv2: Mvn, phi: AbstractionMapping, state: GlobalState
) -> list[StepTerm]:
    """All valid step terms for one abstract state."""
    return _Context(mv1, mv2, phi).all_step_terms(state)


@dataclass(frozen=True)
class StepTermFamily:
    """Surviving step terms per abstract state, plus the check inputs
    (kept so witnesses can be reconstructed)."""

    mv1: Mvn
    mv2: Mvn
    phi: AbstractionMapping
    terms: dict[GlobalState, dict[StateSet, StepTerm]]

    def gammas(self, state: GlobalState) -> set[StateSet]:
        return set(self.terms[state])

    def term(self, state: GlobalState, gamma: StateSet) -> StepTerm:
        return self.terms[state][gamma]

    def check_closed(self) -> None:
        """Raise unless every set is nonempty and closed under step terms."""
        for state, by_gamma in self.terms.items():
            if not by_gamma:
                raise NotClosedError(f"no step terms left for abstract state {state}")
            for term in by_gamma.values():
                for s_i, t in term.successors:
                    if not _realizable(self.terms.get(s_i, {}), t):
                        raise NotClosedError(
                            f"term for {state} needs a realisation of {s_i} "
                            f"inside {sorted(t)}, and the family has none"
                        )


def _realizable(family_terms: dict, derived: StateSet) -> bool:
    """Does the family hold a term whose gamma lies inside ``derived``?"""
    if derived in family_terms:
        return True
    return any(gamma <= derived for gamma in family_terms)


@dataclass(frozen=True)
class Removal:
    """One pruning event: the term removed and the successor that failed."""

    state: GlobalState
    gamma: StateSet
    failed_successor: GlobalState
    missing_gamma: StateSet


@dataclass(frozen=True)
class FailureWitness:
    """Why the check refuted the abstraction."""

    state: GlobalState
    reason: str
    removals: tuple[Removal, ...]


@dataclass(frozen=True)
class CheckStats:
    abstract_states: int
    max_class_size: int
    initial_terms: int
    removed_terms: int
    iterations: int
    surviving_terms: dict[GlobalState, int] = field(default_factory=dict)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of the asynchronous abstraction check.

    ``family`` is the surviving closed family when the abstraction
    holds; ``witness`` explains the refutation otherwise.
    """

    holds: bool
    family: StepTermFamily | None
    witness: FailureWitness | None
    stats: CheckStats


def check_asyn_abs(
    mv1: Mvn,
    mv2: Mvn,
    phi: AbstractionMapping,
    *,
    sweep_rng: random.Random | None = None,
) -> CheckResult:
    """Decide whether ``mv1`` abstracts ``mv2`` asynchronously under ``phi``.

    Initialises every abstract state's family with all its valid step
    terms, then sweeps: a term is removed when, for some abstract
    successor S_i, no surviving term of S_i has its gamma inside the
    derived set T(S_i).  Refuted the moment any family empties
    (including at initialisation); proved at the first sweep with no
    removals.  The verdict and the surviving family are independent of
    sweep order; ``sweep_rng`` randomises the order and exists so tests
    can demonstrate exactly that.
    """
    ctx = _Context(mv1, mv2, phi)
    terms: dict[GlobalState, dict[StateSet, StepTerm]] = {}
    for state in ctx.g1.nodes:
        terms[state] = {t.gamma: t for t in ctx.all_step_terms(state)}

    initial = sum(len(v) for v in terms.values())
    max_class = max(len(concrete_class(phi, s)) for s in ctx.g1.nodes)
    removals: list[Removal] = []

    def stats(iterations: int) -> CheckStats:
        return CheckStats(
            abstract_states=len(ctx.g1.nodes),
            max_class_size=max_class,
            initial_terms=initial,
            removed_terms=len(removals),
            iterations=iterations,
            surviving_terms={s: len(v) for s, v in terms.items()},
        )

    def failure(state: GlobalState, reason: str, iterations: int) -> CheckResult:
        witness = FailureWitness(state=state, reason=reason, removals=tuple(removals))
        return CheckResult(False, None, witness, stats(iterations))

    for state in ctx.g1.nodes:
        if not terms[state]:
            return failure(state, "no valid step term realises this state", 0)

    iterations = 0
    while True:
        iterations += 1
        removed_this_sweep = False
        states = list(ctx.g1.nodes)
        if sweep_rng is not None:
            sweep_rng.shuffle(states)
        for state in states:
            gammas = sorted(terms[state], key=sorted)
            if sweep_rng is not None:
                sweep_rng.shuffle(gammas)
            for gamma in gammas:
                term = terms[state][gamma]
                for s_i, t in term.successors:
                    if not _realizable(terms[s_i], t):
                        del terms[state][gamma]
                        removals.append(Removal(state, gamma, s_i, t))
                        removed_this_sweep = True
                        break
            if not terms[state]:
                return failure(
                    state, "all step terms for this state were pruned", iterations
                )
        if not removed_this_sweep:
            break

    family = StepTermFamily(mv1=mv1, mv2=mv2, phi=phi, terms=terms)
    return CheckResult(True, family, None, stats(iterations))


def witness_path(
    family: StepTermFamily, gamma_path: tuple[GlobalState, ...]
) -> tuple[GlobalState, ...]:
    """Lift an abstract path to a concrete one through a closed family.

    ``gamma_path`` must be a path of the abstract model's asynchronous
    state graph.  The result is a concrete path whose abstracted,
    duplicate-merged image is exactly ``gamma_path``.  Works by chaining
    step terms forward (each step's derived successor set is the next
    state's realisation) and then pulling one concrete state back
    through each link, inserting the same-image bridge states that the
    closures absorbed.
    """
    if not gamma_path:
        raise ValueError("the abstract path must contain at least one state")
    family.check_closed()
    ctx = _Context(family.mv1, family.mv2, family.phi)
    for a, b in zip(gamma_path, gamma_path[1:]):
        if b not in ctx.g1.succ[a]:
            raise ValueError(f"{a} -> {b} is not an abstract asynchronous step")

    first = gamma_path[0]
    gammas: list[StateSet] = [min(family.gammas(first), key=sorted)]
    for i, nxt in enumerate(gamma_path[1:]):
        term = family.term(gamma_path[i], gammas[i])
        derived = term.successor(nxt)
        # Any surviving realisation drawn from the derived set will do;
        # closure guarantees one exists.
        gammas.append(
            min((g for g in family.gammas(nxt) if g <= derived), key=sorted)
        )

    # Backward concrete chaining, smallest states first for determinism.
    path: list[GlobalState] = [min(gammas[-1])]
    for i in range(len(gamma_path) - 2, -1, -1):
        target = path[0]
        bridge = None
        for a in sorted(gammas[i]):
            closure = ctx.closure(a)
            parent: dict[GlobalState, GlobalState | None] = {a: None}
            frontier = [a]
            hit = None
            while frontier and hit is None:
                nxt_frontier = []
                for u in frontier:
                    if target in ctx.g2.succ[u]:
                        hit = u
                        break
                    for v in ctx.g2.succ[u]:
                        if v in closure and v not in parent:
                            parent[v] = u
                            nxt_frontier.append(v)
                frontier = nxt_frontier
            if hit is not None:
                seg = [hit]
                while parent[seg[-1]] is not None:
                    seg.append(parent[seg[-1]])
                bridge = list(reversed(seg))
                break
        if bridge is None:  # impossible for a closed family, by construction
            raise NotClosedError(
                f"no member of {sorted(gammas[i])} reaches {target}"
            )
        path = bridge + path
    return tuple(path)
