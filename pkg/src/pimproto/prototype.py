"""Mock-up prototype model: projects, screens, hotspots and links.

Hotspot coordinates are normalised to [0, 1] relative to the screen image,
so a prototype stays valid when an image is swapped for one of a different
resolution.  Mutations happen in place under the caller's exclusive access;
unmutated values are freely shareable across threads.

Identifiers and auto-names come from project-scoped counters that are never
reused after deletion, which keeps generated names stable for test traces
and makes operation sequences fully deterministic.
"""

from __future__ import annotations

import copy
import uuid
from dataclasses import dataclass, field

from .convert import sanitize_name
from .errors import (
    DuplicateHotspotName,
    DuplicateScreenName,
    EmptyName,
    InvalidBehaviourName,
    InvalidName,
    InvalidPoint,
    InvalidRect,
    UnknownHotspot,
    UnknownScreen,
)
from .pim import S_NAME_RE

MEDIA_TYPES = ("png", "jpeg", "gif", "svg")


@dataclass
class Rect:
    """Axis-aligned rectangle in image-relative unit coordinates."""

    x: float
    y: float
    w: float
    h: float

    def validate(self) -> None:
        ok = (0 <= self.x and 0 <= self.y and self.w > 0 and self.h > 0
              and self.x + self.w <= 1 and self.y + self.h <= 1)
        if not ok:
            raise InvalidRect(
                f"rect (x={self.x}, y={self.y}, w={self.w}, h={self.h}) is degenerate "
                f"or leaves the unit square")

    def contains(self, x: float, y: float) -> bool:
        # Boundary inclusive.
        return self.x <= x <= self.x + self.w and self.y <= y <= self.y + self.h


@dataclass
class ImageRef:
    """Content-addressed reference to a stored screen image."""

    id: str
    media_type: str
    width: int
    height: int
    content_hash: str


@dataclass
class Hotspot:
    id: str
    name: str
    rect: Rect
    link_target: str | None = None  # screen id; self-links allowed
    s_behaviours: list[str] = field(default_factory=list)
    created_seq: int = 0


@dataclass
class Screen:
    id: str
    name: str
    image: ImageRef | None = None
    hotspots: list[Hotspot] = field(default_factory=list)

    def hotspot(self, hotspot_id: str) -> Hotspot:
        for h in self.hotspots:
            if h.id == hotspot_id:
                return h
        raise UnknownHotspot(f"no hotspot {hotspot_id!r} on screen {self.id!r}")

    def hit_test(self, x: float, y: float) -> Hotspot | None:
        """Topmost hotspot containing the point, or None.

        Overlaps resolve by creation order: the most recently created
        hotspot wins, matching what the editor draws on top.
        """
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise InvalidPoint(f"point ({x}, {y}) outside the unit square")
        hits = [h for h in self.hotspots if h.rect.contains(x, y)]
        if not hits:
            return None
        return max(hits, key=lambda h: h.created_seq)


def _clean_name(raw: str, *, what: str) -> str:
    name = raw.strip()
    if not name:
        raise EmptyName(f"{what} name must not be empty")
    if any(ord(c) < 0x20 or ord(c) == 0x7F for c in name):
        raise InvalidName(f"{what} name must not contain control characters")
    return name


@dataclass
class Project:
    id: str
    name: str
    screens: list[Screen] = field(default_factory=list)
    initial_screen: str | None = None
    next_auto_ids: dict[str, int] = field(
        default_factory=lambda: {"screen": 1, "hotspot": 1, "hotspot_name": 1})

    # -- lookup ----------------------------------------------------------

    def screen(self, screen_id: str) -> Screen:
        for s in self.screens:
            if s.id == screen_id:
                return s
        raise UnknownScreen(f"no screen {screen_id!r} in project {self.id!r}")

    def find_hotspot(self, hotspot_id: str) -> tuple[Screen, Hotspot]:
        for s in self.screens:
            for h in s.hotspots:
                if h.id == hotspot_id:
                    return s, h
        raise UnknownHotspot(f"no hotspot {hotspot_id!r} in project {self.id!r}")

    # -- screen operations -------------------------------------------------

    def add_screen(self, name: str, image: ImageRef | None = None) -> Screen:
        name = _clean_name(name, what="screen")
        self._check_screen_name_free(name)
        sid = f"s{self.next_auto_ids['screen']}"
        self.next_auto_ids["screen"] += 1
        screen = Screen(id=sid, name=name, image=image)
        self.screens.append(screen)
        if self.initial_screen is None:
            self.initial_screen = sid
        return screen

    def rename_screen(self, screen_id: str, name: str) -> Screen:
        screen = self.screen(screen_id)
        name = _clean_name(name, what="screen")
        self._check_screen_name_free(name, ignore=screen_id)
        screen.name = name
        return screen

    def set_screen_image(self, screen_id: str, image: ImageRef | None) -> Screen:
        screen = self.screen(screen_id)
        screen.image = image
        return screen

    def set_initial_screen(self, screen_id: str) -> None:
        self.screen(screen_id)
        self.initial_screen = screen_id

    def delete_screen(self, screen_id: str) -> list[str]:
        """Remove a screen and clear every link that pointed at it.

        Returns the ids of hotspots on other screens whose link was cleared.
        """
        screen = self.screen(screen_id)
        self.screens.remove(screen)
        affected: list[str] = []
        for s in self.screens:
            for h in s.hotspots:
                if h.link_target == screen_id:
                    h.link_target = None
                    affected.append(h.id)
        if self.initial_screen == screen_id:
            self.initial_screen = self.screens[0].id if self.screens else None
        return affected

    def _check_screen_name_free(self, name: str, ignore: str | None = None) -> None:
        sanitized = sanitize_name(name)
        for s in self.screens:
            if s.id != ignore and sanitize_name(s.name) == sanitized:
                raise DuplicateScreenName(
                    f"screen name {name!r} collides with {s.name!r} "
                    f"(both sanitize to {sanitized!r})")

    # -- hotspot operations ------------------------------------------------

    def add_hotspot(self, screen_id: str, rect: Rect, name: str | None = None) -> Hotspot:
        screen = self.screen(screen_id)
        rect.validate()
        if name is None:
            # Consume counter values until one is free; never reuse.
            while True:
                candidate = f"hotspot_{self.next_auto_ids['hotspot_name']}"
                self.next_auto_ids["hotspot_name"] += 1
                if all(h.name != candidate for h in screen.hotspots):
                    name = candidate
                    break
        else:
            name = _clean_name(name, what="hotspot")
            self._check_hotspot_name_free(screen, name)
        seq = self.next_auto_ids["hotspot"]
        self.next_auto_ids["hotspot"] += 1
        hotspot = Hotspot(id=f"h{seq}", name=name, rect=rect, created_seq=seq)
        screen.hotspots.append(hotspot)
        return hotspot

    def rename_hotspot(self, screen_id: str, hotspot_id: str, name: str) -> Hotspot:
        screen = self.screen(screen_id)
        hotspot = screen.hotspot(hotspot_id)
        name = _clean_name(name, what="hotspot")
        if name != hotspot.name:
            self._check_hotspot_name_free(screen, name)
        hotspot.name = name
        return hotspot

    def set_hotspot_rect(self, screen_id: str, hotspot_id: str, rect: Rect) -> Hotspot:
        hotspot = self.screen(screen_id).hotspot(hotspot_id)
        rect.validate()
        hotspot.rect = rect
        return hotspot

    def set_hotspot_link(self, screen_id: str, hotspot_id: str,
                         target_screen_id: str | None) -> Hotspot:
        hotspot = self.screen(screen_id).hotspot(hotspot_id)
        if target_screen_id is not None:
            self.screen(target_screen_id)
        hotspot.link_target = target_screen_id
        return hotspot

    def set_hotspot_behaviours(self, screen_id: str, hotspot_id: str,
                               names: list[str]) -> Hotspot:
        hotspot = self.screen(screen_id).hotspot(hotspot_id)
        cleaned: list[str] = []
        for n in names:
            if not S_NAME_RE.match(n):
                raise InvalidBehaviourName(
                    f"{n!r} does not match S_[A-Za-z0-9_]+")
            if n not in cleaned:
                cleaned.append(n)
        hotspot.s_behaviours = cleaned
        return hotspot

    def delete_hotspot(self, screen_id: str, hotspot_id: str) -> None:
        screen = self.screen(screen_id)
        screen.hotspots.remove(screen.hotspot(hotspot_id))

    def _check_hotspot_name_free(self, screen: Screen, name: str) -> None:
        if any(h.name == name for h in screen.hotspots):
            raise DuplicateHotspotName(
                f"hotspot name {name!r} already used on screen {screen.name!r}")

    # -- whole-project helpers ----------------------------------------------

    def snapshot(self) -> Project:
        """Deep copy; simulation sessions pin one so later edits stay invisible."""
        return copy.deepcopy(self)


def create_project(name: str, project_id: str | None = None) -> Project:
    """New empty project.  The name is trimmed and must be non-empty."""
    name = _clean_name(name, what="project")
    return Project(id=project_id if project_id is not None else uuid.uuid4().hex,
                   name=name)
