"""Prototype-to-PIM conversion.

Each screen becomes one automaton state and each hotspot one widget of that
state.  Hotspots only ever accept clicks, so every widget is emitted in the
ActionControl category.  A linked hotspot carries a generated I-behaviour
named after its destination state; because all hotspots on a screen that
point at the same destination share that name, their links collapse into a
single transition and the automaton stays deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import EmptyProject, NameCollision, NoInitialScreen
from .pim import PIM, Behaviour, PresentationModel, Transition, Widget, WidgetCategory

if TYPE_CHECKING:
    from .prototype import Project

_NON_IDENT_RE = re.compile(r"[^A-Za-z0-9_]")
_UNDERSCORE_RUN_RE = re.compile(r"_{2,}")


def sanitize_name(raw: str) -> str:
    """Turn an arbitrary name into a state identifier.

    Characters outside ``[A-Za-z0-9_]`` become ``_``, an ``S`` is prefixed
    when the result does not start with a letter, and runs of ``_`` collapse
    to one.  Never returns an empty string.  The mapping is lossy, so
    distinct inputs may collide; callers must check for that.
    """
    out = _NON_IDENT_RE.sub("_", raw)
    if not out or not out[0].isalpha():
        out = "S" + out
    return _UNDERSCORE_RUN_RE.sub("_", out)


@dataclass
class ConversionWarning:
    code: str
    message: str
    path: str


@dataclass
class NameMap:
    """Generated names by source element id; invertible for trace reporting."""

    states: dict[str, str] = field(default_factory=dict)    # screen id -> state
    widgets: dict[str, tuple[str, str]] = field(default_factory=dict)  # hotspot id -> (state, widget)
    behaviours: dict[str, str] = field(default_factory=dict)  # hotspot id -> I-behaviour

    def screen_for_state(self, state_name: str) -> str:
        for sid, name in self.states.items():
            if name == state_name:
                return sid
        raise KeyError(state_name)


@dataclass
class ConversionReport:
    pim: PIM
    warnings: list[ConversionWarning]
    name_map: NameMap


def convert(project: Project) -> ConversionReport:
    """Derive the PIM for a prototype.

    Raises EmptyProject / NoInitialScreen when the prototype cannot map to
    an automaton, and NameCollision when sanitized screen or hotspot names
    stop being unique (silently renaming would break the name map).
    """
    if not project.screens:
        raise EmptyProject("project has no screens")
    if project.initial_screen is None:
        raise NoInitialScreen("project has no initial screen")

    name_map = NameMap()
    assigned: dict[str, str] = {}  # state name -> screen id
    for screen in project.screens:
        state_name = sanitize_name(screen.name)
        if state_name in assigned:
            raise NameCollision(
                f"screens {assigned[state_name]!r} and {screen.id!r} both sanitize to "
                f"state name {state_name!r}",
                path=f"screens/{screen.id}")
        assigned[state_name] = screen.id
        name_map.states[screen.id] = state_name

    warnings: list[ConversionWarning] = []
    states: list[PresentationModel] = []
    transitions: list[Transition] = []
    link_targets: set[str] = set()  # screen ids that something links to

    for screen in project.screens:
        state_name = name_map.states[screen.id]
        if screen.image is None:
            warnings.append(ConversionWarning(
                "MissingImage", f"screen {screen.name!r} has no image",
                f"screens/{screen.id}"))
        widgets: list[Widget] = []
        widget_names: dict[str, str] = {}
        for hotspot in screen.hotspots:
            widget_name = sanitize_name(hotspot.name)
            if widget_name in widget_names:
                raise NameCollision(
                    f"hotspots {widget_names[widget_name]!r} and {hotspot.id!r} on screen "
                    f"{screen.name!r} both sanitize to widget name {widget_name!r}",
                    path=f"screens/{screen.id}/hotspots/{hotspot.id}")
            widget_names[widget_name] = hotspot.id
            name_map.widgets[hotspot.id] = (state_name, widget_name)

            behaviours: list[Behaviour] = []
            if hotspot.link_target is not None:
                target_state = name_map.states[hotspot.link_target]
                i_name = f"I_{target_state}"
                behaviours.append(Behaviour("I", i_name, target_state))
                name_map.behaviours[hotspot.id] = i_name
                link_targets.add(hotspot.link_target)
            else:
                warnings.append(ConversionWarning(
                    "UnlinkedHotspot",
                    f"hotspot {hotspot.name!r} on screen {screen.name!r} links nowhere",
                    f"screens/{screen.id}/hotspots/{hotspot.id}"))
            behaviours.extend(Behaviour("S", s_name) for s_name in hotspot.s_behaviours)
            widgets.append(Widget(widget_name, WidgetCategory.ACTION_CONTROL, behaviours))
        states.append(PresentationModel(state_name, widgets))

        targets = sorted({name_map.states[h.link_target]
                          for h in screen.hotspots if h.link_target is not None})
        for target_state in targets:
            transitions.append(Transition(state_name, target_state, f"I_{target_state}"))

    for screen in project.screens:
        if not screen.hotspots and screen.id in link_targets:
            warnings.append(ConversionWarning(
                "SinkScreen",
                f"screen {screen.name!r} is linked to but offers no way out",
                f"screens/{screen.id}"))

    pim = PIM(name=project.name, states=states,
              initial=name_map.states[project.initial_screen],
              transitions=transitions)
    return ConversionReport(pim=pim, warnings=warnings, name_map=name_map)
