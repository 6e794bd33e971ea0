"""Viewer-mode execution engine.

A session pins an immutable snapshot of the project, converts it once and
then walks the PIM: clicks resolve through hit-testing on the current
screen, headless callers step by behaviour name.  Every state change is
recorded in an append-only trace; folding the trace over the PIM from the
initial state always re-derives the current state, which is the invariant
the whole module is built around (no-op clicks are therefore not recorded).
"""

from __future__ import annotations

import enum
import time
import uuid
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .convert import ConversionReport, convert
from .errors import BehaviourNotEnabled

if TYPE_CHECKING:
    from .pim import PIM
    from .prototype import Hotspot, Project, Screen


class TraceKind(str, enum.Enum):
    NAVIGATE = "Navigate"
    S_BEHAVIOUR = "SBehaviour"
    RESET = "Reset"


@dataclass
class TraceEvent:
    kind: TraceKind
    source: str              # state before the event
    behaviour: str | None
    result: str              # state after the event
    hotspot_id: str | None
    seq: int


class SimulationSession:
    """One interactive run of a prototype."""

    def __init__(self, project: Project):
        self.id = uuid.uuid4().hex
        self.project = project.snapshot()
        self.report: ConversionReport = convert(self.project)
        self.pim: PIM = self.report.pim
        self.current: str = self.pim.initial
        self.trace: list[TraceEvent] = []
        self.created_at = time.time()
        self._screen_by_state = {state: sid
                                 for sid, state in self.report.name_map.states.items()}
        self._edges = {(t.source, t.behaviour): t.target
                       for t in self.pim.transitions}

    # -- views -------------------------------------------------------------

    def current_screen(self) -> Screen:
        return self.project.screen(self._screen_by_state[self.current])

    # -- interaction ---------------------------------------------------------

    def click(self, x: float, y: float) -> TraceEvent | None:
        """Resolve a viewer click.

        A linked hotspot navigates; an unlinked hotspot with S-behaviours
        raises a highlight event without changing state; anything else is a
        no-op and leaves no trace.
        """
        hotspot = self.current_screen().hit_test(x, y)
        if hotspot is None:
            return None
        if hotspot.link_target is not None:
            behaviour = self.report.name_map.behaviours[hotspot.id]
            return self._navigate(behaviour, hotspot)
        if hotspot.s_behaviours:
            event = TraceEvent(kind=TraceKind.S_BEHAVIOUR, source=self.current,
                               behaviour=hotspot.s_behaviours[0], result=self.current,
                               hotspot_id=hotspot.id, seq=self._next_seq())
            self.trace.append(event)
            return event
        return None

    def step(self, behaviour_name: str) -> TraceEvent:
        """Headless navigation by behaviour name (test replay, CLI traces)."""
        if (self.current, behaviour_name) not in self._edges:
            raise BehaviourNotEnabled(
                f"behaviour {behaviour_name!r} is not enabled in state {self.current!r}")
        return self._navigate(behaviour_name, None)

    def reset(self) -> TraceEvent:
        """Jump back to the initial state; the trace is never truncated."""
        event = TraceEvent(kind=TraceKind.RESET, source=self.current, behaviour=None,
                           result=self.pim.initial, hotspot_id=None,
                           seq=self._next_seq())
        self.trace.append(event)
        self.current = self.pim.initial
        return event

    def _navigate(self, behaviour: str, hotspot: Hotspot | None) -> TraceEvent:
        target = self._edges[(self.current, behaviour)]
        event = TraceEvent(kind=TraceKind.NAVIGATE, source=self.current,
                           behaviour=behaviour, result=target,
                           hotspot_id=hotspot.id if hotspot else None,
                           seq=self._next_seq())
        self.trace.append(event)
        self.current = target
        return event

    def _next_seq(self) -> int:
        return len(self.trace) + 1

    # -- invariants ------------------------------------------------------------

    def replay_current(self) -> str:
        """Fold the trace over the PIM from the initial state.

        Independent of the per-event ``result`` fields on purpose: replay
        re-resolves each navigation through the transition table so the
        determinism invariant is actually exercised.
        """
        state = self.pim.initial
        for event in self.trace:
            if event.kind is TraceKind.NAVIGATE:
                state = self._edges[(state, event.behaviour)]
            elif event.kind is TraceKind.RESET:
                state = self.pim.initial
        return state


def start_session(project: Project) -> SimulationSession:
    """Start viewing a prototype; converter errors propagate unchanged."""
    return SimulationSession(project)
