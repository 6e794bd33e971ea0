"""Persistence and export formats.

``.pimproj`` project files, the canonical ``.pim`` text format, DOT export
and the content-addressed image store.  All text output is UTF-8 with LF
line endings and byte-deterministic for equal inputs.
"""

from .common import atomic_write_bytes, canonical_json
from .dot import export_dot
from .images import ImageStore, probe_dimensions
from .pimtext import export_pim_text, parse_pim_text
from .project import (
    hotspot_to_dict,
    load_project,
    project_from_dict,
    project_to_dict,
    save_project,
    screen_to_dict,
)

__all__ = [
    "atomic_write_bytes",
    "canonical_json",
    "export_dot",
    "ImageStore",
    "probe_dimensions",
    "export_pim_text",
    "parse_pim_text",
    "load_project",
    "project_from_dict",
    "project_to_dict",
    "save_project",
    "screen_to_dict",
    "hotspot_to_dict",
]
