"""Content-addressed image store.

Blobs live under one directory keyed by the SHA-256 of their bytes, with a
JSON sidecar carrying media type and pixel dimensions.  Storing the same
bytes twice dedupes to the same reference; writes are atomic so concurrent
readers never see partial blobs.
"""

from __future__ import annotations

import hashlib
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

from PIL import Image

from ..errors import CorruptImage, UnknownImage, UnsupportedMediaType
from ..prototype import MEDIA_TYPES, ImageRef
from .common import atomic_write_bytes, canonical_json

_PIL_FORMATS = {"png": "PNG", "jpeg": "JPEG", "gif": "GIF"}


def probe_dimensions(data: bytes, media_type: str) -> tuple[int, int]:
    """Pixel dimensions of an encoded image; CorruptImage when unreadable or
    when the bytes are not actually the declared format."""
    if media_type == "svg":
        return _svg_dimensions(data)
    try:
        with Image.open(io.BytesIO(data)) as img:
            if img.format != _PIL_FORMATS[media_type]:
                raise CorruptImage(
                    f"bytes decode as {img.format}, not {media_type}")
            width, height = img.size
    except CorruptImage:
        raise
    except Exception as exc:
        raise CorruptImage(f"cannot decode {media_type} image: {exc}") from exc
    if width <= 0 or height <= 0:
        raise CorruptImage("image has zero area")
    return width, height


def _svg_dimensions(data: bytes) -> tuple[int, int]:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise CorruptImage(f"cannot parse svg: {exc}") from exc
    if not root.tag.endswith("svg"):
        raise CorruptImage("root element is not <svg>")
    width = _svg_length(root.get("width"))
    height = _svg_length(root.get("height"))
    if width is None or height is None:
        viewbox = (root.get("viewBox") or "").split()
        if len(viewbox) == 4:
            width = _svg_length(viewbox[2])
            height = _svg_length(viewbox[3])
    if not width or not height or width <= 0 or height <= 0:
        raise CorruptImage("svg has no readable width/height or viewBox")
    return width, height


def _svg_length(value: str | None) -> int | None:
    if value is None:
        return None
    value = value.strip().removesuffix("px")
    try:
        return round(float(value))
    except ValueError:
        return None


class ImageStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _blob_path(self, digest: str) -> Path:
        return self.root / digest

    def _meta_path(self, digest: str) -> Path:
        return self.root / f"{digest}.json"

    def store(self, data: bytes, media_type: str) -> ImageRef:
        if media_type not in MEDIA_TYPES:
            raise UnsupportedMediaType(
                f"media type {media_type!r} not one of {', '.join(MEDIA_TYPES)}")
        width, height = probe_dimensions(data, media_type)
        digest = hashlib.sha256(data).hexdigest()
        ref = ImageRef(id=digest, media_type=media_type, width=width,
                       height=height, content_hash=digest)
        if not self._blob_path(digest).exists():
            atomic_write_bytes(self._blob_path(digest), data)
            atomic_write_bytes(self._meta_path(digest),
                               canonical_json(_meta_dict(ref)).encode("utf-8"))
        return ref

    def fetch(self, ref: ImageRef) -> bytes:
        data = self._read_blob(ref.content_hash)
        if hashlib.sha256(data).hexdigest() != ref.content_hash:
            raise CorruptImage(
                f"stored bytes for {ref.content_hash} fail their hash check")
        return data

    def load_ref(self, digest: str) -> ImageRef:
        path = self._meta_path(digest)
        if not path.exists():
            raise UnknownImage(f"no stored image {digest!r}")
        meta = json.loads(path.read_text("utf-8"))
        return ImageRef(id=digest, media_type=meta["media_type"],
                        width=meta["width"], height=meta["height"],
                        content_hash=digest)

    def _read_blob(self, digest: str) -> bytes:
        path = self._blob_path(digest)
        if not path.exists():
            raise UnknownImage(f"no stored image {digest!r}")
        return path.read_bytes()


def _meta_dict(ref: ImageRef) -> dict:
    return {"media_type": ref.media_type, "width": ref.width, "height": ref.height}
