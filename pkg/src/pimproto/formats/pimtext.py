"""Canonical PIM text format (``.pim``).

Line-oriented, UTF-8, LF endings:

    pim <name>
    initial <state>
    state <name>
      widget <name> <category>
        i <I_name> -> <target>
        s <S_name>

Transitions are not stored: they derive from the I-behaviours on each
state's widgets, so the file cannot drift out of sync with itself.  Export
emits canonical order (states and widgets sorted by name, I lines before S
lines, each sorted); parsing canonical output reproduces the input exactly.
"""

from __future__ import annotations

from ..errors import InvalidPim, InvariantViolation, ParseError
from ..pim import (
    PIM,
    Behaviour,
    PresentationModel,
    Transition,
    Widget,
    WidgetCategory,
    canonicalize,
    validate_pim,
)

_CATEGORIES = {c.value: c for c in WidgetCategory}


def export_pim_text(pim: PIM) -> bytes:
    violations = validate_pim(pim)
    if violations:
        first = violations[0]
        raise InvalidPim(f"cannot export invalid PIM: {first.code}: {first.message}",
                         path=first.path, violations=violations)
    if "\n" in pim.name or "\r" in pim.name:
        raise InvalidPim("PIM name must be a single line")

    ordered = canonicalize(pim)
    lines = [f"pim {ordered.name}", f"initial {ordered.initial}"]
    for state in ordered.states:
        lines.append(f"state {state.name}")
        for widget in state.widgets:
            lines.append(f"  widget {widget.name} {widget.category.value}")
            for b in widget.behaviours:
                if b.kind == "I":
                    lines.append(f"    i {b.name} -> {b.target}")
                else:
                    lines.append(f"    s {b.name}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_pim_text(data: bytes) -> PIM:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc.reason}") from exc

    name: str | None = None
    initial: str | None = None
    states: list[PresentationModel] = []
    state: PresentationModel | None = None
    widget: Widget | None = None

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        col = raw.index(keyword) + 1

        if name is None:
            if keyword != "pim" or len(tokens) < 2:
                raise ParseError("expected header: pim <name>", line=lineno, column=col)
            name = line[len("pim "):].strip()
            continue
        if initial is None:
            if keyword != "initial" or len(tokens) != 2:
                raise ParseError("expected: initial <state>", line=lineno, column=col)
            initial = tokens[1]
            continue

        if keyword == "state":
            if len(tokens) != 2:
                raise ParseError("expected: state <name>", line=lineno, column=col)
            state = PresentationModel(tokens[1])
            states.append(state)
            widget = None
        elif keyword == "widget":
            if state is None:
                raise ParseError("widget line outside a state block",
                                 line=lineno, column=col)
            if len(tokens) != 3:
                raise ParseError("expected: widget <name> <category>",
                                 line=lineno, column=col)
            category = _CATEGORIES.get(tokens[2])
            if category is None:
                raise ParseError(
                    f"unknown category {tokens[2]!r} (expected one of "
                    f"{', '.join(sorted(_CATEGORIES))})",
                    line=lineno, column=raw.index(tokens[2]) + 1)
            widget = Widget(tokens[1], category)
            state.widgets.append(widget)
        elif keyword == "i":
            if widget is None:
                raise ParseError("behaviour line outside a widget block",
                                 line=lineno, column=col)
            if len(tokens) != 4 or tokens[2] != "->":
                raise ParseError("expected: i <I_name> -> <target>",
                                 line=lineno, column=col)
            widget.behaviours.append(Behaviour("I", tokens[1], tokens[3]))
        elif keyword == "s":
            if widget is None:
                raise ParseError("behaviour line outside a widget block",
                                 line=lineno, column=col)
            if len(tokens) != 2:
                raise ParseError("expected: s <S_name>", line=lineno, column=col)
            widget.behaviours.append(Behaviour("S", tokens[1]))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", line=lineno, column=col)

    if name is None:
        raise ParseError("empty document; expected header: pim <name>")
    if initial is None:
        raise ParseError("missing line: initial <state>", line=2)

    pim = PIM(name=name, states=states, initial=initial,
              transitions=_derive_transitions(states))
    violations = validate_pim(pim)
    if violations:
        first = violations[0]
        raise InvariantViolation(f"{first.code}: {first.message}", path=first.path,
                                 violations=violations)
    return pim


def _derive_transitions(states: list[PresentationModel]) -> list[Transition]:
    transitions: list[Transition] = []
    seen: set[tuple[str, str, str]] = set()
    for state in states:
        for w in state.widgets:
            for b in w.behaviours:
                if b.kind != "I":
                    continue
                key = (state.name, b.name, b.target or "")
                if key in seen:
                    continue  # same-destination widgets merge into one transition
                seen.add(key)
                transitions.append(Transition(state.name, b.target or "", b.name))
    transitions.sort(key=lambda t: (t.source, t.behaviour, t.target))
    return transitions
