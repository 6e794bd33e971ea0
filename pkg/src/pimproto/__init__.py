"""pimproto: mock-up prototyping with a formal state-machine backbone.

Draw screens, hotspots and links; derive a Presentation Interaction Model
(a finite state automaton) from them; analyse reachability and gated
access; generate abstract test cases; play the prototype back.
"""

__version__ = "0.1.0"

from .analysis import (
    AnalysisReport,
    GateCheck,
    TestCase,
    TestSuite,
    analyze_project,
    generate_tests,
    must_pass_through,
    reachability,
)
from .convert import ConversionReport, convert, sanitize_name
from .pim import (
    PIM,
    Behaviour,
    PresentationModel,
    Transition,
    Violation,
    Widget,
    WidgetCategory,
    canonicalize,
    enabled_behaviours,
    validate_pim,
)
from .prototype import Hotspot, ImageRef, Project, Rect, Screen, create_project
from .simulate import SimulationSession, TraceEvent, TraceKind, start_session

__all__ = [
    "__version__",
    "AnalysisReport",
    "GateCheck",
    "TestCase",
    "TestSuite",
    "analyze_project",
    "generate_tests",
    "must_pass_through",
    "reachability",
    "ConversionReport",
    "convert",
    "sanitize_name",
    "PIM",
    "Behaviour",
    "PresentationModel",
    "Transition",
    "Violation",
    "Widget",
    "WidgetCategory",
    "canonicalize",
    "enabled_behaviours",
    "validate_pim",
    "Hotspot",
    "ImageRef",
    "Project",
    "Rect",
    "Screen",
    "create_project",
    "SimulationSession",
    "TraceEvent",
    "TraceKind",
    "start_session",
]
