"""Viewing geometry and the pixel-quantized disparity scale.

Converts integer pixel shifts on a known display into binocular disparity
in seconds of arc, builds the discrete level scale used by the adaptive
test, sizes dots and the figure so their visual angles stay constant
across viewing distances, and scores two-rod alignment measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Optional, Union

from .errors import (
    InvalidGeometry,
    InvalidProfile,
    NotIntegerMultiple,
    ProtocolViolation,
    StimulusTooLarge,
)
from .ol import OL, OutsideLimits

ARCSEC_PER_RADIAN = 648000.0 / math.pi
METERS_PER_INCH = 0.0254

# Dot side subtends 1.32 arcmin at every distance (0.125 logMAR detail);
# the figure subtends 1.88 deg at the 3 m test distance and keeps that
# physical size everywhere else.
DOT_ANGLE_ARCMIN = 1.32
FIGURE_ANGLE_DEG = 1.88
FIGURE_ANGLE_REFERENCE_M = 3.0

DEFAULT_REFERENCE_M = 0.5
DEFAULT_IPD_M = 0.06
DEFAULT_N_LEVELS = 10
DEFAULT_OL_LIMIT_ARCSEC = 66.0

_INTEGER_RATIO_TOL = 1e-9


def round_half_up(x: float) -> int:
    """Round a non-negative value to the nearest integer, halves up."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class DisplayProfile:
    """Physical screen description; pixel density fixes the disparity quantum."""

    ppi: float
    width_px: int = 2048
    height_px: int = 1536

    def __post_init__(self):
        if not (self.ppi > 0):
            raise InvalidProfile(f"pixel density must be positive, got {self.ppi}")
        if self.width_px <= 0 or self.height_px <= 0:
            raise InvalidProfile(
                f"resolution must be positive, got {self.width_px}x{self.height_px}"
            )


# Named presets; density is taken from configuration because this toolkit
# runs on arbitrary hosts rather than reading it off the device.
DISPLAY_PRESETS = {
    "ipad-retina-264": DisplayProfile(ppi=264.0, width_px=2048, height_px=1536),
    "264": DisplayProfile(ppi=264.0, width_px=2048, height_px=1536),
    "ipad-mini-326": DisplayProfile(ppi=326.0, width_px=2048, height_px=1536),
    "326": DisplayProfile(ppi=326.0, width_px=2048, height_px=1536),
}


@dataclass(frozen=True)
class ViewingGeometry:
    """Where the observer sits relative to the display."""

    distance_m: float
    reference_distance_m: float = DEFAULT_REFERENCE_M
    ipd_m: float = DEFAULT_IPD_M

    def __post_init__(self):
        if self.distance_m <= 0:
            raise InvalidGeometry(f"distance must be positive, got {self.distance_m}")
        if self.reference_distance_m <= 0:
            raise InvalidGeometry(
                f"reference distance must be positive, got {self.reference_distance_m}"
            )
        if self.ipd_m <= 0:
            raise InvalidGeometry(f"ipd must be positive, got {self.ipd_m}")


@dataclass(frozen=True)
class DisparityLevel:
    """One step of the disparity scale: an integer pixel shift and its angle."""

    index: int
    pixel_shift: int
    arcsec: float
    arcsec_rounded: int

    def __post_init__(self):
        if self.index < 1:
            raise InvalidGeometry(f"level index must be >= 1, got {self.index}")
        if self.pixel_shift < 0:
            raise InvalidGeometry(f"pixel shift must be >= 0, got {self.pixel_shift}")
        if self.arcsec < 0:
            raise InvalidGeometry(f"arcsec must be >= 0, got {self.arcsec}")


@dataclass(frozen=True)
class LevelTable:
    """Ordered disparity scale at one distance, finest level first."""

    distance_m: float
    levels: tuple[DisparityLevel, ...]
    scale_k: Optional[int] = None

    def __len__(self) -> int:
        return len(self.levels)

    def level(self, index: int) -> DisparityLevel:
        """1-based lookup; index 1 is the finest level."""
        if not 1 <= index <= len(self.levels):
            raise InvalidGeometry(f"level index {index} outside 1..{len(self.levels)}")
        return self.levels[index - 1]

    @property
    def finest(self) -> DisparityLevel:
        return self.levels[0]

    @property
    def coarsest(self) -> DisparityLevel:
        return self.levels[-1]

    def arcsec_values(self, rounded: bool = False) -> list:
        if rounded:
            return [lv.arcsec_rounded for lv in self.levels]
        return [lv.arcsec for lv in self.levels]


@dataclass(frozen=True)
class HdMeasurement:
    """Six signed rod offsets from one two-rod alignment session."""

    delta_z_m: tuple[float, ...]
    ipd_m: float = DEFAULT_IPD_M
    distance_m: float = 3.0


def pixel_pitch(profile: DisplayProfile) -> float:
    """Pixel pitch in meters."""
    if not (profile.ppi > 0):
        raise InvalidProfile(f"pixel density must be positive, got {profile.ppi}")
    return METERS_PER_INCH / profile.ppi


def disparity_arcsec(shift_px: int, profile: DisplayProfile, distance_m: float) -> float:
    """Disparity, in arcsec, of a lateral shift of `shift_px` pixels seen at `distance_m`.

    Small-angle form: the angle is shift * pitch / distance radians.
    """
    if distance_m <= 0:
        raise InvalidGeometry(f"distance must be positive, got {distance_m}")
    if shift_px < 0:
        raise InvalidGeometry(f"pixel shift must be >= 0, got {shift_px}")
    return shift_px * pixel_pitch(profile) / distance_m * ARCSEC_PER_RADIAN


def shift_for_arcsec(arcsec: float, profile: DisplayProfile, distance_m: float) -> int:
    """Inverse of disparity_arcsec, rounded to the nearest whole pixel."""
    return round_half_up(arcsec / disparity_arcsec(1, profile, distance_m))


def distance_scale_k(distance_m: float, reference_m: float) -> int:
    """Integer multiple relating a test distance to the reference distance."""
    if distance_m <= 0 or reference_m <= 0:
        raise InvalidGeometry("distances must be positive")
    ratio = distance_m / reference_m
    k = round(ratio)
    if k < 1 or abs(ratio - k) > _INTEGER_RATIO_TOL:
        raise NotIntegerMultiple(
            f"{distance_m} is not an integer multiple of {reference_m} (ratio {ratio})"
        )
    return int(k)


def build_level_table(
    profile: DisplayProfile,
    distance_m: float,
    n_levels: int = DEFAULT_N_LEVELS,
    reference_m: float = DEFAULT_REFERENCE_M,
) -> LevelTable:
    """Build the discrete scale at `distance_m`: level j carries a j-pixel shift.

    Angles are stored at full precision and rounded half-up separately;
    rounding happens only for display and ordinal recoding.
    """
    if n_levels < 1:
        raise InvalidGeometry(f"need at least one level, got {n_levels}")
    levels = []
    for j in range(1, n_levels + 1):
        arcsec = disparity_arcsec(j, profile, distance_m)
        levels.append(
            DisparityLevel(
                index=j,
                pixel_shift=j,
                arcsec=arcsec,
                arcsec_rounded=round_half_up(arcsec),
            )
        )
    try:
        scale_k = distance_scale_k(distance_m, reference_m)
    except NotIntegerMultiple:
        scale_k = None
    return LevelTable(distance_m=distance_m, levels=tuple(levels), scale_k=scale_k)


def hd_arcsec(ipd_m: float, delta_z_m: float, distance_m: float) -> float:
    """Two-rod disparity: ipd * |dz| / z^2 radians, reported in arcsec."""
    if ipd_m <= 0:
        raise InvalidGeometry(f"ipd must be positive, got {ipd_m}")
    if distance_m <= 0:
        raise InvalidGeometry(f"distance must be positive, got {distance_m}")
    return ipd_m * abs(delta_z_m) / (distance_m * distance_m) * ARCSEC_PER_RADIAN


def hd_protocol(
    m: HdMeasurement, ol_limit_arcsec: float = DEFAULT_OL_LIMIT_ARCSEC
) -> Union[float, OutsideLimits]:
    """Score a six-measure two-rod session.

    Averages the absolute rod offsets converted to arcsec; means beyond
    the instrument limit collapse to the OL sentinel.
    """
    if len(m.delta_z_m) != 6:
        raise ProtocolViolation(
            f"protocol takes exactly six measures, got {len(m.delta_z_m)}"
        )
    mean = fmean(hd_arcsec(m.ipd_m, dz, m.distance_m) for dz in m.delta_z_m)
    if mean > ol_limit_arcsec:
        return OL
    return mean


def dot_size_px(profile: DisplayProfile, distance_m: float) -> int:
    """Dot side in pixels so the dot subtends DOT_ANGLE_ARCMIN at `distance_m`."""
    if distance_m <= 0:
        raise InvalidGeometry(f"distance must be positive, got {distance_m}")
    side_m = distance_m * math.tan(math.radians(DOT_ANGLE_ARCMIN / 60.0))
    return max(1, round_half_up(side_m / pixel_pitch(profile)))


def figure_physical_m() -> float:
    """Physical figure diameter: fixed by its angular size at the far distance."""
    return 2.0 * FIGURE_ANGLE_REFERENCE_M * math.tan(math.radians(FIGURE_ANGLE_DEG / 2.0))


def stimulus_size_px(profile: DisplayProfile) -> int:
    """Figure diameter in pixels; constant physical size on a given display."""
    px = round_half_up(figure_physical_m() / pixel_pitch(profile))
    limit = min(profile.width_px, profile.height_px)
    if px > limit:
        raise StimulusTooLarge(
            f"figure needs {px} px but the display only has {limit} on its short side"
        )
    return px
