"""Graph analyses over a PIM.

Reachability and dead-end detection, gate queries (must every path from the
initial state to a target pass through a given state?) and abstract test
generation with transition coverage.  All traversal uses lexicographic
neighbour order so reports and generated tests are byte-stable across runs.

Long-running callers can pass ``cancel``, a zero-argument callable checked
between BFS layers; a truthy return aborts with OperationCancelled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

from .convert import convert
from .errors import InvalidPim, OperationCancelled, TargetIsInitial, UnknownState
from .pim import PIM, Transition, validate_pim

if TYPE_CHECKING:
    from .prototype import Project

CancelToken = Callable[[], bool]


@dataclass
class AnalysisReport:
    reachable: set[str]
    unreachable: set[str]
    dead_ends: set[str]
    dangling_hotspots: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class GateCheck:
    """Result of a must-pass-through query.

    ``vacuous`` marks targets that were unreachable to begin with, where the
    property holds for lack of any path at all.
    """

    holds: bool
    vacuous: bool = False

    def __bool__(self) -> bool:
        return self.holds


@dataclass
class TestCase:
    id: str
    steps: list[tuple[str, str, str]]  # (state, behaviour, next state)
    covered_transitions: set[tuple[str, str]]  # (source, behaviour)


@dataclass
class TestSuite:
    tests: list[TestCase]
    uncovered_transitions: set[tuple[str, str]]

    def covered(self) -> set[tuple[str, str]]:
        out: set[tuple[str, str]] = set()
        for t in self.tests:
            out |= t.covered_transitions
        return out


def _require_valid(pim: PIM) -> None:
    violations = validate_pim(pim)
    if violations:
        first = violations[0]
        raise InvalidPim(f"PIM fails validation: {first.code}: {first.message}",
                         path=first.path, violations=violations)


def _successors(pim: PIM) -> dict[str, list[Transition]]:
    # Outgoing transitions per state, sorted by (behaviour, target).
    adj: dict[str, list[Transition]] = {name: [] for name in pim.state_names()}
    for t in pim.transitions:
        adj[t.source].append(t)
    for lst in adj.values():
        lst.sort(key=lambda t: (t.behaviour, t.target))
    return adj


def _check_cancel(cancel: CancelToken | None) -> None:
    if cancel is not None and cancel():
        raise OperationCancelled("analysis cancelled by caller")


def _reachable_from(pim: PIM, start: str, *, skip: str | None = None,
                    cancel: CancelToken | None = None) -> set[str]:
    """States reachable from ``start`` by BFS, optionally with one state
    deleted from the graph (used for gate queries)."""
    if start == skip:
        return set()
    adj = _successors(pim)
    seen = {start}
    layer = [start]
    while layer:
        _check_cancel(cancel)
        nxt: list[str] = []
        for state in sorted(layer):
            for t in adj[state]:
                if t.target == skip or t.target in seen:
                    continue
                seen.add(t.target)
                nxt.append(t.target)
        layer = nxt
    return seen


def reachability(pim: PIM, *, cancel: CancelToken | None = None) -> AnalysisReport:
    """Partition states into reachable and unreachable from the initial state,
    and flag dead ends (states with no outgoing transition)."""
    _require_valid(pim)
    reachable = _reachable_from(pim, pim.initial, cancel=cancel)
    all_names = set(pim.state_names())
    out_degree = {name: 0 for name in all_names}
    for t in pim.transitions:
        out_degree[t.source] += 1
    return AnalysisReport(
        reachable=reachable,
        unreachable=all_names - reachable,
        dead_ends={name for name, deg in out_degree.items() if deg == 0},
    )


def must_pass_through(pim: PIM, gate: str, target: str, *,
                      cancel: CancelToken | None = None) -> GateCheck:
    """Does every path from the initial state to ``target`` visit ``gate``?

    Decided structurally: the property holds iff deleting the gate makes the
    target unreachable.  Gated-access requirements ("X only after login")
    reduce to this with the login state as the gate.
    """
    _require_valid(pim)
    names = set(pim.state_names())
    if gate not in names:
        raise UnknownState(f"no state named {gate!r}")
    if target not in names:
        raise UnknownState(f"no state named {target!r}")
    if target == pim.initial:
        raise TargetIsInitial(f"target {target!r} is the initial state")

    base = _reachable_from(pim, pim.initial, cancel=cancel)
    if target not in base:
        return GateCheck(holds=True, vacuous=True)
    without_gate = _reachable_from(pim, pim.initial, skip=gate, cancel=cancel)
    return GateCheck(holds=target not in without_gate)


def _shortest_path_steps(pim: PIM, cancel: CancelToken | None = None
                         ) -> dict[str, list[tuple[str, str, str]]]:
    """BFS tree from the initial state: for every reachable state, the step
    list of one shortest path, with lexicographic (behaviour, target)
    tie-breaking so the choice is deterministic."""
    adj = _successors(pim)
    parent: dict[str, tuple[str, str]] = {}  # state -> (previous state, behaviour)
    seen = {pim.initial}
    layer = [pim.initial]
    while layer:
        _check_cancel(cancel)
        nxt: list[str] = []
        for state in sorted(layer):
            for t in adj[state]:
                if t.target in seen:
                    continue
                seen.add(t.target)
                parent[t.target] = (state, t.behaviour)
                nxt.append(t.target)
        layer = nxt

    paths: dict[str, list[tuple[str, str, str]]] = {}

    def path_to(state: str) -> list[tuple[str, str, str]]:
        if state in paths:
            return paths[state]
        if state == pim.initial:
            steps: list[tuple[str, str, str]] = []
        else:
            prev, behaviour = parent[state]
            steps = path_to(prev) + [(prev, behaviour, state)]
        paths[state] = steps
        return steps

    for state in seen:
        path_to(state)
    return paths


def generate_tests(pim: PIM, *, cancel: CancelToken | None = None) -> TestSuite:
    """Abstract test cases with transition coverage.

    One candidate per reachable transition: the shortest path from the
    initial state to the transition's source, extended by the transition
    itself.  Candidates whose coverage is contained in another candidate's
    are pruned (ties keep the earliest in (source, behaviour) order), so a
    chain collapses into its longest test while branches stay separate.
    Unreachable transitions are reported, never covered.
    """
    _require_valid(pim)
    paths = _shortest_path_steps(pim, cancel)
    reachable = set(paths)

    candidates: list[tuple[list[tuple[str, str, str]], set[tuple[str, str]]]] = []
    order = sorted((t for t in pim.transitions if t.source in reachable),
                   key=lambda t: (t.source, t.behaviour))
    for t in order:
        steps = paths[t.source] + [(t.source, t.behaviour, t.target)]
        covered = {(s, b) for s, b, _ in steps}
        candidates.append((steps, covered))

    tests: list[TestCase] = []
    for i, (steps, covered) in enumerate(candidates):
        _check_cancel(cancel)
        subsumed = False
        for j, (_, other) in enumerate(candidates):
            if j == i:
                continue
            if covered < other or (covered == other and j < i):
                subsumed = True
                break
        if not subsumed:
            tests.append(TestCase(id=f"t{len(tests) + 1}", steps=steps,
                                  covered_transitions=covered))

    uncovered = {(t.source, t.behaviour) for t in pim.transitions
                 if t.source not in reachable}
    return TestSuite(tests=tests, uncovered_transitions=uncovered)


def analyze_project(project: Project, *, cancel: CancelToken | None = None
                    ) -> AnalysisReport:
    """Convert a prototype and analyse it, folding in the hotspots that the
    conversion flagged as linking nowhere."""
    report = convert(project)
    analysis = reachability(report.pim, cancel=cancel)
    analysis.dangling_hotspots = [
        (s.id, h.id)
        for s in project.screens for h in s.hotspots if h.link_target is None
    ]
    return analysis
