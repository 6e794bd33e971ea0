"""JSON views of engine values.

The CLI's machine-readable output and the HTTP API responses are built from
these same dictionaries, so identical inputs produce identical payloads on
both surfaces.  Sets are rendered as sorted lists to keep output
deterministic.
"""

from __future__ import annotations

from .analysis import AnalysisReport, TestSuite
from .convert import ConversionReport
from .pim import PIM
from .simulate import SimulationSession, TraceEvent


def pim_to_dict(pim: PIM) -> dict:
    return {
        "name": pim.name,
        "initial": pim.initial,
        "states": [
            {
                "name": s.name,
                "widgets": [
                    {
                        "name": w.name,
                        "category": w.category.value,
                        "behaviours": [
                            {"kind": b.kind, "name": b.name, "target": b.target}
                            for b in w.behaviours
                        ],
                    }
                    for w in s.widgets
                ],
            }
            for s in pim.states
        ],
        "transitions": [
            {"source": t.source, "target": t.target, "behaviour": t.behaviour}
            for t in pim.transitions
        ],
    }


def conversion_report_to_dict(report: ConversionReport) -> dict:
    return {
        "pim": pim_to_dict(report.pim),
        "warnings": [
            {"code": w.code, "message": w.message, "path": w.path}
            for w in report.warnings
        ],
        "name_map": {
            "states": dict(sorted(report.name_map.states.items())),
            "widgets": {hid: list(pair)
                        for hid, pair in sorted(report.name_map.widgets.items())},
            "behaviours": dict(sorted(report.name_map.behaviours.items())),
        },
    }


def analysis_to_dict(report: AnalysisReport) -> dict:
    return {
        "reachable": sorted(report.reachable),
        "unreachable": sorted(report.unreachable),
        "dead_ends": sorted(report.dead_ends),
        "dangling_hotspots": [list(pair) for pair in report.dangling_hotspots],
    }


def test_suite_to_dict(suite: TestSuite) -> dict:
    return {
        "tests": [
            {
                "id": t.id,
                "steps": [list(step) for step in t.steps],
                "covered_transitions": sorted(list(pair)
                                              for pair in t.covered_transitions),
            }
            for t in suite.tests
        ],
        "uncovered_transitions": sorted(list(pair)
                                        for pair in suite.uncovered_transitions),
    }


def trace_event_to_dict(event: TraceEvent) -> dict:
    return {
        "kind": event.kind.value,
        "source": event.source,
        "behaviour": event.behaviour,
        "result": event.result,
        "hotspot_id": event.hotspot_id,
        "seq": event.seq,
    }


def session_to_dict(session: SimulationSession) -> dict:
    screen = session.current_screen()
    return {
        "id": session.id,
        "current": session.current,
        "screen_id": screen.id,
        "screen_name": screen.name,
        "image": screen.image.content_hash if screen.image else None,
        "hotspots": [
            {
                "id": h.id,
                "name": h.name,
                "rect": {"x": h.rect.x, "y": h.rect.y, "w": h.rect.w, "h": h.rect.h},
                "linked": h.link_target is not None,
                "s_behaviours": list(h.s_behaviours),
            }
            for h in screen.hotspots
        ],
        "trace": [trace_event_to_dict(e) for e in session.trace],
    }
