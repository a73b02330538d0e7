"""Binary PGM (P5, maxval 255) segmentation map files; gray values are class ids."""

from pathlib import Path
from typing import List, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from app.exceptions import SegMapFormatError
from app.schema import SegMap


PathLike = Union[str, Path]


def _header_tokens(data: bytes, count: int) -> List[bytes]:
    """First `count` whitespace-separated header tokens, skipping # comments"""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count and pos < len(data):
        char = data[pos : pos + 1]
        if char == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif char.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    return tokens


def read_segmap(path: PathLike) -> SegMap:
    path = Path(path)
    try:
        head = path.read_bytes()[:512]
    except OSError as e:
        raise SegMapFormatError(f"Failed to read {path}: {e}") from None

    tokens = _header_tokens(head, 4)
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise SegMapFormatError(f"{path} is not a binary PGM (P5) file")
    if tokens[3] != b"255":
        raise SegMapFormatError(f"{path} must have maxval 255, got {tokens[3]!r}")

    try:
        with Image.open(path) as image:
            image.load()
            if image.mode != "L":
                raise SegMapFormatError(f"{path} decoded as mode {image.mode}")
            labels = np.asarray(image, dtype=np.uint8)
    except (OSError, UnidentifiedImageError) as e:
        raise SegMapFormatError(f"Failed to decode {path}: {e}") from None

    try:
        return SegMap.from_array(labels)
    except SegMapFormatError as e:
        raise SegMapFormatError(f"{path}: {e.message}") from None


def write_segmap(path: PathLike, segmap: SegMap) -> None:
    image = Image.fromarray(np.ascontiguousarray(segmap.labels, dtype=np.uint8))
    image.save(Path(path), format="PPM")
