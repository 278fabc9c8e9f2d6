"""PNG import and export for rendered stimuli (8-bit RGB only)."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from .renderer import AnaglyphImage


def to_png_bytes(img: AnaglyphImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def write_png(img: AnaglyphImage, path: Union[str, Path]) -> None:
    Path(path).write_bytes(to_png_bytes(img))


def read_png(source: Union[str, Path, bytes]) -> AnaglyphImage:
    if isinstance(source, bytes):
        handle = io.BytesIO(source)
    else:
        handle = Path(source)
    with Image.open(handle) as im:
        pixels = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return AnaglyphImage(width_px=pixels.shape[1], height_px=pixels.shape[0], pixels=pixels)
