"""Project file format (``.pimproj``).

A canonical JSON document: UTF-8, sorted keys, two-space indent, schema
version 1.  Saving the same project twice yields identical bytes.  Loading
is strict: unknown fields, wrong types and model-invariant breaks are all
rejected rather than repaired.
"""

from __future__ import annotations

import json
import re

from ..convert import sanitize_name
from ..errors import InvariantViolation, ParseError, VersionUnsupported
from ..prototype import MEDIA_TYPES, Hotspot, ImageRef, Project, Rect, Screen
from ..pim import S_NAME_RE
from .common import canonical_json

SCHEMA_VERSION = 1

_COUNTER_KEYS = ("screen", "hotspot", "hotspot_name")


def project_to_dict(project: Project) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "project": {
            "id": project.id,
            "name": project.name,
            "initial_screen": project.initial_screen,
            "next_auto_ids": dict(project.next_auto_ids),
            "screens": [screen_to_dict(s) for s in project.screens],
        },
    }


def screen_to_dict(screen: Screen) -> dict:
    return {
        "id": screen.id,
        "name": screen.name,
        "image": image_to_dict(screen.image) if screen.image else None,
        "hotspots": [hotspot_to_dict(h) for h in screen.hotspots],
    }


def image_to_dict(image: ImageRef) -> dict:
    return {
        "id": image.id,
        "media_type": image.media_type,
        "width": image.width,
        "height": image.height,
        "content_hash": image.content_hash,
    }


def hotspot_to_dict(hotspot: Hotspot) -> dict:
    return {
        "id": hotspot.id,
        "name": hotspot.name,
        "rect": {"x": hotspot.rect.x, "y": hotspot.rect.y,
                 "w": hotspot.rect.w, "h": hotspot.rect.h},
        "link_target": hotspot.link_target,
        "s_behaviours": list(hotspot.s_behaviours),
        "created_seq": hotspot.created_seq,
    }


def save_project(project: Project) -> bytes:
    return canonical_json(project_to_dict(project)).encode("utf-8")


def load_project(data: bytes) -> Project:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc.reason}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")

    version = _field(doc, "", "schema_version", int)
    if version != SCHEMA_VERSION:
        raise VersionUnsupported(
            f"schema_version {version} not supported (this build reads "
            f"version {SCHEMA_VERSION})")
    _reject_unknown(doc, "", {"schema_version", "project"})
    project = project_from_dict(_field(doc, "", "project", dict))
    _check_invariants(project)
    return project


def project_from_dict(data: dict, path: str = "project") -> Project:
    _reject_unknown(data, path,
                    {"id", "name", "initial_screen", "next_auto_ids", "screens"})
    counters = _field(data, path, "next_auto_ids", dict)
    _reject_unknown(counters, f"{path}/next_auto_ids", set(_COUNTER_KEYS))
    next_auto_ids = {key: _field(counters, f"{path}/next_auto_ids", key, int)
                     for key in _COUNTER_KEYS}
    screens = [_screen_from_dict(s, f"{path}/screens/{i}")
               for i, s in enumerate(_field(data, path, "screens", list))]
    initial = _field(data, path, "initial_screen", (str, type(None)))
    return Project(
        id=_field(data, path, "id", str),
        name=_field(data, path, "name", str),
        screens=screens,
        initial_screen=initial,
        next_auto_ids=next_auto_ids,
    )


def _screen_from_dict(data, path: str) -> Screen:
    if not isinstance(data, dict):
        raise ParseError(f"{path}: screen must be an object")
    _reject_unknown(data, path, {"id", "name", "image", "hotspots"})
    raw_image = _field(data, path, "image", (dict, type(None)))
    return Screen(
        id=_field(data, path, "id", str),
        name=_field(data, path, "name", str),
        image=_image_from_dict(raw_image, f"{path}/image") if raw_image else None,
        hotspots=[_hotspot_from_dict(h, f"{path}/hotspots/{i}")
                  for i, h in enumerate(_field(data, path, "hotspots", list))],
    )


def _image_from_dict(data: dict, path: str) -> ImageRef:
    _reject_unknown(data, path, {"id", "media_type", "width", "height", "content_hash"})
    return ImageRef(
        id=_field(data, path, "id", str),
        media_type=_field(data, path, "media_type", str),
        width=_field(data, path, "width", int),
        height=_field(data, path, "height", int),
        content_hash=_field(data, path, "content_hash", str),
    )


def _hotspot_from_dict(data, path: str) -> Hotspot:
    if not isinstance(data, dict):
        raise ParseError(f"{path}: hotspot must be an object")
    _reject_unknown(data, path,
                    {"id", "name", "rect", "link_target", "s_behaviours", "created_seq"})
    rect = _field(data, path, "rect", dict)
    _reject_unknown(rect, f"{path}/rect", {"x", "y", "w", "h"})
    behaviours = _field(data, path, "s_behaviours", list)
    if not all(isinstance(b, str) for b in behaviours):
        raise ParseError(f"{path}/s_behaviours: entries must be strings")
    return Hotspot(
        id=_field(data, path, "id", str),
        name=_field(data, path, "name", str),
        rect=Rect(**{k: _number(rect, f"{path}/rect", k) for k in ("x", "y", "w", "h")}),
        link_target=_field(data, path, "link_target", (str, type(None))),
        s_behaviours=list(behaviours),
        created_seq=_field(data, path, "created_seq", int),
    )


def _field(data: dict, path: str, key: str, types) -> object:
    where = f"{path}/{key}" if path else key
    if key not in data:
        raise ParseError(f"missing field {where}")
    value = data[key]
    allowed = types if isinstance(types, tuple) else (types,)
    if isinstance(value, bool) and bool not in allowed:
        raise ParseError(f"field {where} has the wrong type")
    if not isinstance(value, types):
        raise ParseError(f"field {where} has the wrong type")
    return value


def _number(data: dict, path: str, key: str) -> float:
    value = _field(data, path, key, (int, float))
    return float(value)


def _reject_unknown(data: dict, path: str, allowed: set[str]) -> None:
    for key in data:
        if key not in allowed:
            where = f"{path}/{key}" if path else key
            raise ParseError(f"unknown field {where}")


def _check_invariants(project: Project) -> None:
    """Everything the model guarantees by construction, re-checked on load."""
    screen_ids: set[str] = set()
    sanitized: dict[str, str] = {}
    hotspot_ids: set[str] = set()
    max_screen_n = 0
    max_hotspot_n = 0

    for screen in project.screens:
        if screen.id in screen_ids:
            raise InvariantViolation(f"duplicate screen id {screen.id!r}",
                                     path=f"screens/{screen.id}")
        screen_ids.add(screen.id)
        if not screen.name.strip():
            raise InvariantViolation(f"screen {screen.id!r} has an empty name",
                                     path=f"screens/{screen.id}")
        clean = sanitize_name(screen.name)
        if clean in sanitized:
            raise InvariantViolation(
                f"screen name {screen.name!r} collides with {sanitized[clean]!r}",
                path=f"screens/{screen.id}")
        sanitized[clean] = screen.name
        max_screen_n = max(max_screen_n, _id_number(screen.id, "s"))
        if screen.image is not None:
            if screen.image.media_type not in MEDIA_TYPES:
                raise InvariantViolation(
                    f"screen {screen.id!r} image has media type "
                    f"{screen.image.media_type!r}",
                    path=f"screens/{screen.id}/image")
            if screen.image.width <= 0 or screen.image.height <= 0:
                raise InvariantViolation(
                    f"screen {screen.id!r} image has non-positive dimensions",
                    path=f"screens/{screen.id}/image")
        names_on_screen: set[str] = set()
        for hotspot in screen.hotspots:
            hpath = f"screens/{screen.id}/hotspots/{hotspot.id}"
            if hotspot.id in hotspot_ids:
                raise InvariantViolation(f"duplicate hotspot id {hotspot.id!r}",
                                         path=hpath)
            hotspot_ids.add(hotspot.id)
            if hotspot.name in names_on_screen:
                raise InvariantViolation(
                    f"duplicate hotspot name {hotspot.name!r} on screen {screen.id!r}",
                    path=hpath)
            names_on_screen.add(hotspot.name)
            try:
                hotspot.rect.validate()
            except Exception as exc:
                raise InvariantViolation(f"hotspot {hotspot.id!r}: {exc}",
                                         path=hpath) from exc
            for b in hotspot.s_behaviours:
                if not S_NAME_RE.match(b):
                    raise InvariantViolation(
                        f"hotspot {hotspot.id!r} behaviour {b!r} is not a valid "
                        f"S-behaviour name", path=hpath)
            max_hotspot_n = max(max_hotspot_n, _id_number(hotspot.id, "h"),
                                hotspot.created_seq)

    for screen in project.screens:
        for hotspot in screen.hotspots:
            if hotspot.link_target is not None and hotspot.link_target not in screen_ids:
                raise InvariantViolation(
                    f"hotspot {hotspot.id!r} links to unknown screen "
                    f"{hotspot.link_target!r}",
                    path=f"screens/{screen.id}/hotspots/{hotspot.id}")

    if project.screens and project.initial_screen is None:
        raise InvariantViolation("project has screens but no initial screen",
                                 path="initial_screen")
    if project.initial_screen is not None and project.initial_screen not in screen_ids:
        raise InvariantViolation(
            f"initial screen {project.initial_screen!r} does not exist",
            path="initial_screen")

    # Hand-edited counters below the ids in use would recycle ids; bump them.
    project.next_auto_ids["screen"] = max(project.next_auto_ids["screen"],
                                          max_screen_n + 1)
    project.next_auto_ids["hotspot"] = max(project.next_auto_ids["hotspot"],
                                           max_hotspot_n + 1)


_ID_NUM_RE = re.compile(r"([a-z])(\d+)\Z")


def _id_number(identifier: str, prefix: str) -> int:
    m = _ID_NUM_RE.match(identifier)
    if m and m.group(1) == prefix:
        return int(m.group(2))
    return 0
