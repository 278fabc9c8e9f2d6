"""Red/cyan random-dot stimulus construction.

The figure is a filled disk with a 90-degree wedge removed, visible only
through binocular disparity: the red channel draws the figure's dots
shifted rightward by a whole number of pixels (crossed disparity for an
observer wearing the red filter on the left eye), while the cyan channel
shows the same dot field unshifted. Regions uncovered by the shift are
refilled with fresh dots and background dots hidden by the displaced
figure are dropped, so neither channel contains a monocular outline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidGeometry, StimulusTooLarge
from .geometry import DisparityLevel, DisplayProfile, dot_size_px, stimulus_size_px

BLACK = (0, 0, 0)
RED = (255, 0, 0)
CYAN = (0, 255, 255)
WHITE = (255, 255, 255)

# Background margin around the figure, in dot sides.
MARGIN_DOTS = 10
DEFAULT_DOT_COVERAGE = 0.25


class Orientation(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"


ORIENTATIONS = (Orientation.UP, Orientation.DOWN, Orientation.LEFT, Orientation.RIGHT)


class Eye(str, Enum):
    LEFT_RED = "left_red"
    RIGHT_CYAN = "right_cyan"


@dataclass(frozen=True)
class StereogramSpec:
    """Complete parameterization of one stimulus."""

    profile: DisplayProfile
    distance_m: float
    level: DisparityLevel
    orientation: Orientation
    seed: int
    dot_coverage: float = DEFAULT_DOT_COVERAGE
    canvas_px: Optional[int] = None

    def __post_init__(self):
        if self.distance_m <= 0:
            raise InvalidGeometry(f"distance must be positive, got {self.distance_m}")
        if not 0.0 < self.dot_coverage < 1.0:
            raise InvalidGeometry(
                f"dot coverage must be in (0, 1), got {self.dot_coverage}"
            )
        if self.level.pixel_shift < 0:
            raise InvalidGeometry("pixel shift must be >= 0")
        if self.seed < 0:
            raise InvalidGeometry("seed must be a non-negative integer")

    @property
    def dot_px(self) -> int:
        return dot_size_px(self.profile, self.distance_m)

    @property
    def figure_px(self) -> int:
        return stimulus_size_px(self.profile)

    def resolved_canvas_px(self) -> int:
        if self.canvas_px is not None:
            return self.canvas_px
        return self.figure_px + 2 * MARGIN_DOTS * self.dot_px


@dataclass(frozen=True)
class FigureMask:
    """Boolean raster marking the gapped disk, plus the geometry behind it."""

    mask: np.ndarray
    orientation: Orientation
    diameter_px: int


@dataclass(frozen=True)
class AnaglyphImage:
    """Rendered 8-bit RGB raster; every pixel is background, red, cyan, or white."""

    width_px: int
    height_px: int
    pixels: np.ndarray


def gapped_disk_mask(canvas_px: int, diameter_px: int, orientation: Orientation) -> np.ndarray:
    """Filled disk with a 90-degree wedge removed, centered on the canvas.

    The wedge bisector points at the gap orientation (UP = toward image
    top). Boundary comparisons are inclusive on both wedge edges, which
    makes the four orientations exact 90-degree rotations of each other.
    """
    if diameter_px > canvas_px:
        raise StimulusTooLarge(
            f"disk of {diameter_px} px does not fit a {canvas_px} px canvas"
        )
    half = canvas_px / 2.0
    coords = np.arange(canvas_px, dtype=np.float64) + 0.5 - half
    dx = coords[np.newaxis, :]
    dy = coords[:, np.newaxis]
    radius = diameter_px / 2.0
    disk = dx * dx + dy * dy <= radius * radius
    if orientation is Orientation.UP:
        wedge = -dy >= np.abs(dx)
    elif orientation is Orientation.DOWN:
        wedge = dy >= np.abs(dx)
    elif orientation is Orientation.LEFT:
        wedge = -dx >= np.abs(dy)
    else:
        wedge = dx >= np.abs(dy)
    return disk & ~wedge


def ground_truth_mask(spec: StereogramSpec) -> FigureMask:
    """The figure region this spec renders, for verification and templates."""
    canvas = spec.resolved_canvas_px()
    diameter = spec.figure_px
    return FigureMask(
        mask=gapped_disk_mask(canvas, diameter, spec.orientation),
        orientation=spec.orientation,
        diameter_px=diameter,
    )


def _sample_dots(rng: np.random.Generator, canvas_px: int, dot_px: int, coverage: float):
    """Jittered-grid dot sample: one cell per dot side, each occupied with
    probability `coverage`, anchor jittered uniformly inside its cell."""
    n_cells = math.ceil(canvas_px / dot_px)
    present = rng.random((n_cells, n_cells)) < coverage
    jy = rng.integers(0, dot_px, size=(n_cells, n_cells))
    jx = rng.integers(0, dot_px, size=(n_cells, n_cells))
    origins = np.arange(n_cells, dtype=np.int64) * dot_px
    ay = (origins[:, np.newaxis] + jy)[present]
    ax = (origins[np.newaxis, :] + jx)[present]
    inside = (ay < canvas_px) & (ax < canvas_px)
    return ay[inside], ax[inside]


def _paint(canvas_px: int, ay: np.ndarray, ax: np.ndarray, dot_px: int) -> np.ndarray:
    """Paint dot_px x dot_px squares anchored at (ay, ax), clipped at edges."""
    points = np.zeros((canvas_px, canvas_px), dtype=bool)
    points[ay, ax] = True
    if dot_px == 1:
        return points
    horiz = points.copy()
    for k in range(1, dot_px):
        horiz[:, k:] |= points[:, :-k]
    out = horiz.copy()
    for k in range(1, dot_px):
        out[k:, :] |= horiz[:-k, :]
    return out


def _shift_right(mask: np.ndarray, shift: int) -> np.ndarray:
    if shift == 0:
        return mask
    out = np.zeros_like(mask)
    out[:, shift:] = mask[:, :-shift]
    return out


def render(spec: StereogramSpec) -> AnaglyphImage:
    """Render the anaglyph. Pure function of its arguments (seeded determinism).

    Construction, all in whole pixels:
      1. one base dot field is classified into figure dots (center inside
         the mask) and background dots;
      2. cyan draws the base field as is; red draws figure dots displaced
         +shift and drops background dots the displaced figure occludes;
      3. the strip the figure vacated in the red channel is refilled from
         a fresh dot field so its density matches everywhere else.
    """
    canvas = spec.resolved_canvas_px()
    dot = spec.dot_px
    shift = spec.level.pixel_shift
    figure = ground_truth_mask(spec)
    mask = figure.mask
    shifted_mask = _shift_right(mask, shift)

    rng = np.random.default_rng(spec.seed)
    ay, ax = _sample_dots(rng, canvas, dot, spec.dot_coverage)
    cy = np.minimum(ay + dot // 2, canvas - 1)
    cx = np.minimum(ax + dot // 2, canvas - 1)
    in_figure = mask[cy, cx]

    cyan = _paint(canvas, ay, ax, dot)

    # Red: background dots survive unless the displaced figure covers them.
    occluded = ~in_figure & shifted_mask[cy, cx]
    keep_bg = ~in_figure & ~occluded
    fig_ax = ax[in_figure] + shift
    fig_ay = ay[in_figure]
    fits = fig_ax < canvas
    red_ay = [ay[keep_bg], fig_ay[fits]]
    red_ax = [ax[keep_bg], fig_ax[fits]]

    # Refill the vacated strip just inside the figure's trailing border.
    vacated = mask & ~shifted_mask
    ry, rx = _sample_dots(rng, canvas, dot, spec.dot_coverage)
    rcy = np.minimum(ry + dot // 2, canvas - 1)
    rcx = np.minimum(rx + dot // 2, canvas - 1)
    in_vacated = vacated[rcy, rcx]
    red_ay.append(ry[in_vacated])
    red_ax.append(rx[in_vacated])

    red = _paint(canvas, np.concatenate(red_ay), np.concatenate(red_ax), dot)

    pixels = np.zeros((canvas, canvas, 3), dtype=np.uint8)
    pixels[..., 0][red] = 255
    pixels[..., 1][cyan] = 255
    pixels[..., 2][cyan] = 255
    return AnaglyphImage(width_px=canvas, height_px=canvas, pixels=pixels)


def channel(img: AnaglyphImage, eye: Eye) -> np.ndarray:
    """Boolean dot raster one eye sees through its filter."""
    px = img.pixels
    if eye is Eye.LEFT_RED:
        return px[..., 0] == 255
    return (px[..., 1] == 255) & (px[..., 2] == 255)
