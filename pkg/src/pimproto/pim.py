"""Presentation models and the PIM automaton.

A presentation model (PM) describes a single user-interface state: the
widgets it offers and the behaviours attached to each widget.  I-behaviours
move the interface to another state; S-behaviours stand for functionality in
the underlying system and are carried along but never executed here.  A PIM
is a finite state automaton whose states are PMs and whose transitions are
I-behaviours triggerable from the source state.

The automaton is kept deterministic: no two transitions may share the same
(source, behaviour) pair.  One hotspot click leads to exactly one screen, so
anything the converter emits already satisfies this; for hand-authored
models ``validate_pim`` reports the violation instead.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace

from .errors import UnknownState

I_NAME_RE = re.compile(r"I_[A-Za-z0-9_]+\Z")
S_NAME_RE = re.compile(r"S_[A-Za-z0-9_]+\Z")
STATE_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class WidgetCategory(str, enum.Enum):
    ACTION_CONTROL = "ActionControl"
    VALUE_SELECTION_CONTROL = "ValueSelectionControl"
    BINARY_SELECTION_CONTROL = "BinarySelectionControl"
    DISPLAY = "Display"


@dataclass
class Behaviour:
    kind: str  # "I" or "S"
    name: str
    target: str | None = None  # destination state; I-behaviours only


@dataclass
class Widget:
    name: str
    category: WidgetCategory
    behaviours: list[Behaviour] = field(default_factory=list)

    def i_behaviours(self) -> list[Behaviour]:
        return [b for b in self.behaviours if b.kind == "I"]


@dataclass
class PresentationModel:
    name: str
    widgets: list[Widget] = field(default_factory=list)


@dataclass
class Transition:
    source: str
    target: str
    behaviour: str  # I-behaviour name


@dataclass
class PIM:
    name: str
    states: list[PresentationModel]
    initial: str
    transitions: list[Transition]

    def state_names(self) -> list[str]:
        return [s.name for s in self.states]

    def state(self, name: str) -> PresentationModel:
        for s in self.states:
            if s.name == name:
                return s
        raise UnknownState(f"no state named {name!r}")

    def outgoing(self, state_name: str) -> list[Transition]:
        return [t for t in self.transitions if t.source == state_name]


@dataclass
class Violation:
    code: str
    message: str
    path: str


def _name_is_token(name: str) -> bool:
    return bool(name) and not any(c.isspace() or ord(c) < 0x20 for c in name)


def validate_pim(pim: PIM) -> list[Violation]:
    """Check every structural invariant; an empty list means the PIM is valid.

    Violations are data, not exceptions: callers that need a hard failure
    wrap them in :class:`~pimproto.errors.InvalidPim`.
    """
    out: list[Violation] = []
    names = set(pim.state_names())
    seen_states: set[str] = set()
    for s in pim.states:
        path = f"states/{s.name}"
        if s.name in seen_states:
            out.append(Violation("DuplicateStateName",
                                 f"state name {s.name!r} used more than once", path))
        seen_states.add(s.name)
        if not STATE_NAME_RE.match(s.name):
            out.append(Violation("BadStateName",
                                 f"state name {s.name!r} is not a valid identifier", path))
        seen_widgets: set[str] = set()
        for w in s.widgets:
            wpath = f"{path}/widgets/{w.name}"
            if w.name in seen_widgets:
                out.append(Violation("DuplicateWidgetName",
                                     f"widget name {w.name!r} duplicated in state {s.name}",
                                     wpath))
            seen_widgets.add(w.name)
            if not _name_is_token(w.name):
                out.append(Violation("BadWidgetName",
                                     f"widget name {w.name!r} is empty or contains whitespace",
                                     wpath))
            if not isinstance(w.category, WidgetCategory):
                out.append(Violation("BadCategory",
                                     f"unknown widget category {w.category!r}", wpath))
            i_count = 0
            for b in w.behaviours:
                bpath = f"{wpath}/{b.name}"
                if b.kind == "I":
                    i_count += 1
                    if not I_NAME_RE.match(b.name):
                        out.append(Violation("BadBehaviourName",
                                             f"I-behaviour {b.name!r} must match I_[A-Za-z0-9_]+",
                                             bpath))
                    if b.target is None:
                        out.append(Violation("MissingBehaviourTarget",
                                             f"I-behaviour {b.name!r} carries no target state",
                                             bpath))
                    elif b.target not in names:
                        out.append(Violation("UnknownBehaviourTarget",
                                             f"I-behaviour {b.name!r} targets unknown state {b.target!r}",
                                             bpath))
                elif b.kind == "S":
                    if not S_NAME_RE.match(b.name):
                        out.append(Violation("BadBehaviourName",
                                             f"S-behaviour {b.name!r} must match S_[A-Za-z0-9_]+",
                                             bpath))
                    if b.target is not None:
                        out.append(Violation("UnexpectedBehaviourTarget",
                                             f"S-behaviour {b.name!r} must not carry a target",
                                             bpath))
                else:
                    out.append(Violation("BadBehaviourKind",
                                         f"behaviour kind {b.kind!r} is not I or S", bpath))
            # An action control is a single click target.
            if w.category is WidgetCategory.ACTION_CONTROL and i_count > 1:
                out.append(Violation("TooManyIBehaviours",
                                     f"action control {w.name!r} carries {i_count} I-behaviours",
                                     wpath))

    if pim.initial not in names:
        out.append(Violation("UnknownInitial",
                             f"initial state {pim.initial!r} does not exist", "initial"))

    seen_pairs: set[tuple[str, str]] = set()
    for t in pim.transitions:
        tpath = f"transitions/{t.source}->{t.target}[{t.behaviour}]"
        if t.source not in names:
            out.append(Violation("UnknownTransitionSource",
                                 f"transition source {t.source!r} does not exist", tpath))
            continue
        if t.target not in names:
            out.append(Violation("UnknownTransitionTarget",
                                 f"transition target {t.target!r} does not exist", tpath))
        if not I_NAME_RE.match(t.behaviour):
            out.append(Violation("BadBehaviourName",
                                 f"transition behaviour {t.behaviour!r} must match I_[A-Za-z0-9_]+",
                                 tpath))
        source = pim.state(t.source)
        carried = any(b.kind == "I" and b.name == t.behaviour and b.target == t.target
                      for w in source.widgets for b in w.behaviours)
        if not carried:
            out.append(Violation("OrphanTransitionBehaviour",
                                 f"behaviour {t.behaviour!r} appears on no widget of state {t.source}",
                                 tpath))
        pair = (t.source, t.behaviour)
        if pair in seen_pairs:
            out.append(Violation("NondeterministicState",
                                 f"state {t.source} has two transitions for {t.behaviour}",
                                 f"states/{t.source}"))
        seen_pairs.add(pair)
    return out


def enabled_behaviours(pim: PIM, state_name: str) -> list[str]:
    """Sorted, de-duplicated I-behaviour names triggerable from a state.

    A behaviour counts as enabled when it sits on one of the state's widgets
    and also labels an outgoing transition.
    """
    state = pim.state(state_name)
    on_widgets = {b.name for w in state.widgets for b in w.behaviours if b.kind == "I"}
    outgoing = {t.behaviour for t in pim.transitions if t.source == state_name}
    return sorted(on_widgets & outgoing)


def canonicalize(pim: PIM) -> PIM:
    """Return a copy in canonical order: states and widgets sorted by name,
    behaviours by (kind, name, target), transitions by (source, behaviour).

    Two PIMs are structurally equivalent iff their canonical forms compare
    equal; the text exporter emits canonical form.
    """
    states = []
    for s in sorted(pim.states, key=lambda s: s.name):
        widgets = []
        for w in sorted(s.widgets, key=lambda w: w.name):
            behaviours = sorted(w.behaviours,
                                key=lambda b: (b.kind, b.name, b.target or ""))
            widgets.append(replace(w, behaviours=list(behaviours)))
        states.append(replace(s, widgets=widgets))
    transitions = sorted(pim.transitions,
                         key=lambda t: (t.source, t.behaviour, t.target))
    return PIM(name=pim.name, states=states, initial=pim.initial,
               transitions=list(transitions))
