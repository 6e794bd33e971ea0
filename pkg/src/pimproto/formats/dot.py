"""DOT export for state-machine visualisation.

One node per state (the initial state drawn with a doubled border), one
edge per transition labelled with its behaviour name.  Emission order is
lexicographic so output is byte-stable.
"""

from __future__ import annotations

from ..errors import InvalidPim
from ..pim import PIM, validate_pim


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(pim: PIM) -> bytes:
    violations = validate_pim(pim)
    if violations:
        first = violations[0]
        raise InvalidPim(f"cannot export invalid PIM: {first.code}: {first.message}",
                         path=first.path, violations=violations)

    lines = [f"digraph {_quote(pim.name)} {{"]
    for name in sorted(pim.state_names()):
        if name == pim.initial:
            lines.append(f"  {_quote(name)} [peripheries=2];")
        else:
            lines.append(f"  {_quote(name)};")
    for t in sorted(pim.transitions, key=lambda t: (t.source, t.behaviour, t.target)):
        lines.append(f"  {_quote(t.source)} -> {_quote(t.target)} "
                     f"[label={_quote(t.behaviour)}];")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")
