"""Image-domain disparity decoding.

Recovers the programmed pixel shift and gap orientation from a rendered
anaglyph by block-wise normalized cross-correlation between the two eye
rasters, without access to the renderer's dot bookkeeping. Used to verify
end to end that stimuli carry exactly the whole-pixel disparity their
level table promised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LowConfidence, NoFigure
from .renderer import (
    ORIENTATIONS,
    AnaglyphImage,
    Eye,
    FigureMask,
    Orientation,
    channel,
    gapped_disk_mask,
)

# Verification-harness constants: blocks span four dot sides with 50%
# overlap; a correlation peak under 0.5 marks a block as uninformative.
BLOCK_DOT_MULTIPLE = 4
CONFIDENCE_FLOOR = 0.5


@dataclass(frozen=True)
class DisparityMap:
    """Per-block horizontal lag estimates over a block grid."""

    lags: np.ndarray
    confidence: np.ndarray
    block_px: int
    stride_px: int
    search_range: int
    image_shape: tuple[int, int]


@dataclass(frozen=True)
class OrientationDetection:
    orientation: Orientation
    iou: float


def estimate_dot_px(raster: np.ndarray) -> int:
    """Dot side from the mode of interior horizontal run lengths."""
    h, w = raster.shape
    padded = np.zeros((h, w + 2), dtype=np.int8)
    padded[:, 1:-1] = raster
    diff = np.diff(padded, axis=1)
    start_r, start_c = np.nonzero(diff == 1)
    end_r, end_c = np.nonzero(diff == -1)
    lengths = end_c - start_c
    interior = (start_c > 0) & (end_c < w)
    lengths = lengths[interior]
    if lengths.size == 0:
        return 1
    return max(1, int(np.bincount(lengths).argmax()))


def _integral(a: np.ndarray) -> np.ndarray:
    ii = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(a, axis=0, dtype=np.int64), axis=1, out=ii[1:, 1:])
    return ii


def estimate_disparity(
    img: AnaglyphImage, search_range: int, block_px: int | None = None
) -> DisparityMap:
    """Best horizontal lag (red relative to cyan) per block.

    For every block the lag in [-search_range, +search_range] maximizing
    the Pearson correlation of the two binarized eye rasters wins; ties
    resolve toward the smaller absolute lag. Confidence is the peak
    correlation clamped to [0, 1].

    Block sums come from non-overlapping stride tiles aggregated 2x2 (the
    grid is pinned to a 50% overlap), so each lag costs one pass over the
    image; the lag-shifted right-channel sums reuse a single integral
    image with clipped column indices.
    """
    left = channel(img, Eye.LEFT_RED)
    right = channel(img, Eye.RIGHT_CYAN)
    if block_px is None:
        block_px = BLOCK_DOT_MULTIPLE * estimate_dot_px(left)
    stride = max(1, block_px // 2)
    block_px = 2 * stride
    h, w = left.shape
    if block_px > min(h, w):
        raise LowConfidence(f"block of {block_px} px exceeds the image")
    hc = (h // stride) * stride
    wc = (w // stride) * stride
    n_tile_y, n_tile_x = hc // stride, wc // stride
    ys = np.arange(n_tile_y - 1) * stride
    xs = np.arange(n_tile_x - 1) * stride
    n = block_px * block_px

    left_c = left[:hc, :wc]

    def block_sums_of(raster) -> np.ndarray:
        tiles = raster.reshape(n_tile_y, stride, n_tile_x, stride).sum(
            axis=(1, 3), dtype=np.int32
        )
        return tiles[:-1, :-1] + tiles[:-1, 1:] + tiles[1:, :-1] + tiles[1:, 1:]

    sum_l = block_sums_of(left_c).astype(np.float64)
    var_l = n * sum_l - sum_l * sum_l

    ii_right = _integral(right)
    row_hi = ys + block_px
    scratch = np.zeros((hc, wc), dtype=bool)
    best_r = np.full((ys.size, xs.size), -2.0)
    best_lag = np.zeros((ys.size, xs.size), dtype=np.int64)
    for lag in sorted(range(-search_range, search_range + 1), key=lambda l: (abs(l), l)):
        src_lo = max(0, -lag)
        src_hi = min(w, wc - lag)
        dst_lo, dst_hi = src_lo + lag, src_hi + lag

        x_lo = np.clip(xs - lag, 0, w)
        x_hi = np.clip(xs + block_px - lag, 0, w)
        sum_r = (
            ii_right[np.ix_(row_hi, x_hi)]
            - ii_right[np.ix_(ys, x_hi)]
            - ii_right[np.ix_(row_hi, x_lo)]
            + ii_right[np.ix_(ys, x_lo)]
        ).astype(np.float64)

        scratch[:, :dst_lo] = False
        scratch[:, dst_hi:] = False
        np.logical_and(
            left_c[:, dst_lo:dst_hi],
            right[:hc, src_lo:src_hi],
            out=scratch[:, dst_lo:dst_hi],
        )
        sum_lr = block_sums_of(scratch)

        num = n * sum_lr - sum_l * sum_r
        var_r = n * sum_r - sum_r * sum_r
        den = np.sqrt(var_l * var_r)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(den > 0, num / den, 0.0)
        better = r > best_r + 1e-12
        best_r[better] = r[better]
        best_lag[better] = lag

    confidence = np.clip(best_r, 0.0, 1.0)
    if np.mean(confidence < CONFIDENCE_FLOOR) > 0.5:
        raise LowConfidence("most blocks show no correlation peak")
    return DisparityMap(
        lags=best_lag,
        confidence=confidence,
        block_px=block_px,
        stride_px=stride,
        search_range=search_range,
        image_shape=(h, w),
    )


def _region_from_blocks(dmap: DisparityMap, hits: np.ndarray) -> np.ndarray:
    """Pixel raster where at least half the covering blocks are hits."""
    nby, nbx = hits.shape
    stride = dmap.stride_px
    hit_tiles = np.zeros((nby + 1, nbx + 1), dtype=np.int16)
    cover_tiles = np.zeros((nby + 1, nbx + 1), dtype=np.int16)
    for dy in (0, 1):
        for dx in (0, 1):
            hit_tiles[dy : dy + nby, dx : dx + nbx] += hits
            cover_tiles[dy : dy + nby, dx : dx + nbx] += 1
    tile_on = (2 * hit_tiles >= cover_tiles) & (hit_tiles > 0)
    h, w = dmap.image_shape
    region = np.zeros((h, w), dtype=bool)
    up = np.repeat(np.repeat(tile_on, stride, axis=0), stride, axis=1)
    region[: min(h, up.shape[0]), : min(w, up.shape[1])] = up[
        : min(h, up.shape[0]), : min(w, up.shape[1])
    ]
    return region


def _iou(a: np.ndarray, b: np.ndarray) -> float:
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 0.0
    return float(np.logical_and(a, b).sum() / union)


def segment_figure(dmap: DisparityMap, expected_shift: int) -> np.ndarray:
    """Pixels whose blocks confidently report the expected figure lag."""
    if expected_shift == 0:
        raise NoFigure("zero disparity leaves the figure indistinguishable")
    hits = (dmap.lags == expected_shift) & (dmap.confidence >= CONFIDENCE_FLOOR)
    if not hits.any():
        raise NoFigure(f"no block reports lag {expected_shift}")
    region = _region_from_blocks(dmap, hits)
    if not region.any():
        raise NoFigure(f"no pixel region supports lag {expected_shift}")
    return region


def detect_orientation(
    dmap: DisparityMap, expected_shift: int, truth: FigureMask
) -> OrientationDetection:
    """Segment the figure and classify its gap orientation.

    The segmented region is matched against the four wedge templates at
    the truth geometry; the reported IoU is against the truth mask.
    """
    region = segment_figure(dmap, expected_shift)
    canvas = truth.mask.shape[0]
    best, best_iou = None, -1.0
    for orientation in ORIENTATIONS:
        template = gapped_disk_mask(canvas, truth.diameter_px, orientation)
        score = _iou(region, template)
        if score > best_iou:
            best, best_iou = orientation, score
    return OrientationDetection(orientation=best, iou=_iou(region, truth.mask))


def dominant_figure_shift(dmap: DisparityMap) -> int:
    """Most common nonzero lag among confident blocks."""
    confident = dmap.confidence >= CONFIDENCE_FLOOR
    lags = dmap.lags[confident]
    lags = lags[lags != 0]
    if lags.size == 0:
        raise NoFigure("no confident block reports a nonzero lag")
    values, counts = np.unique(lags, return_counts=True)
    return int(values[np.argmax(counts)])


def infer_figure(dmap: DisparityMap) -> tuple[int, OrientationDetection]:
    """Recover shift and orientation with no ground truth at hand.

    Disk geometry is estimated from the segmented region: the diameter
    from its larger bounding-box side (the wedge never cuts both spans),
    the center from the bounding box under each candidate orientation.
    """
    shift = dominant_figure_shift(dmap)
    region = segment_figure(dmap, shift)
    rows = np.nonzero(region.any(axis=1))[0]
    cols = np.nonzero(region.any(axis=0))[0]
    y0, y1 = int(rows[0]), int(rows[-1]) + 1
    x0, x1 = int(cols[0]), int(cols[-1]) + 1
    diameter = max(y1 - y0, x1 - x0)
    radius = diameter / 2.0
    canvas = dmap.image_shape[0]

    centers = {
        Orientation.UP: ((x0 + x1) / 2.0, y1 - radius),
        Orientation.DOWN: ((x0 + x1) / 2.0, y0 + radius),
        Orientation.LEFT: (x1 - radius, (y0 + y1) / 2.0),
        Orientation.RIGHT: (x0 + radius, (y0 + y1) / 2.0),
    }
    best, best_iou = None, -1.0
    for orientation, (cx, cy) in centers.items():
        template = _gapped_disk_at(canvas, diameter, orientation, cx, cy)
        score = _iou(region, template)
        if score > best_iou:
            best, best_iou = orientation, score
    return shift, OrientationDetection(orientation=best, iou=best_iou)


def _gapped_disk_at(
    canvas_px: int, diameter_px: int, orientation: Orientation, cx: float, cy: float
) -> np.ndarray:
    ys = np.arange(canvas_px, dtype=np.float64)[:, np.newaxis] + 0.5 - cy
    xs = np.arange(canvas_px, dtype=np.float64)[np.newaxis, :] + 0.5 - cx
    radius = diameter_px / 2.0
    disk = xs * xs + ys * ys <= radius * radius
    if orientation is Orientation.UP:
        wedge = -ys >= np.abs(xs)
    elif orientation is Orientation.DOWN:
        wedge = ys >= np.abs(xs)
    elif orientation is Orientation.LEFT:
        wedge = -xs >= np.abs(ys)
    else:
        wedge = xs >= np.abs(ys)
    return disk & ~wedge
