import numpy as np
import pytest

from stereoacuity.decoder import (
    detect_orientation,
    dominant_figure_shift,
    estimate_disparity,
    estimate_dot_px,
    infer_figure,
    segment_figure,
)
from stereoacuity.errors import LowConfidence, NoFigure
from stereoacuity.renderer import (
    AnaglyphImage,
    Eye,
    Orientation,
    channel,
    ground_truth_mask,
    render,
)
from tests.test_renderer import make_spec


def test_estimate_dot_px(ipad):
    near = render(make_spec(ipad, 0.5, 0, seed=1))
    assert estimate_dot_px(channel(near, Eye.LEFT_RED)) == 2
    far = render(make_spec(ipad, 3.0, 0, seed=1))
    assert estimate_dot_px(channel(far, Eye.LEFT_RED)) == 12


def test_zero_disparity_all_lag_zero(ipad):
    img = render(make_spec(ipad, 0.5, 0, seed=2))
    dmap = estimate_disparity(img, search_range=6)
    confident = dmap.confidence >= 0.5
    assert confident.mean() > 0.9
    assert (dmap.lags[confident] == 0).all()
    with pytest.raises(NoFigure):
        dominant_figure_shift(dmap)


@pytest.mark.parametrize("distance,shift", [(0.5, 3), (0.5, 9), (3.0, 2), (3.0, 7)])
def test_round_trip_shift(ipad, distance, shift):
    spec = make_spec(ipad, distance, shift, orientation=Orientation.LEFT, seed=31)
    dmap = estimate_disparity(render(spec), search_range=12)
    assert dominant_figure_shift(dmap) == shift

    truth = ground_truth_mask(spec)
    detection = detect_orientation(dmap, shift, truth)
    assert detection.orientation is Orientation.LEFT
    assert detection.iou >= 0.6


def test_round_trip_all_orientations(ipad):
    for orientation in Orientation:
        spec = make_spec(ipad, 0.5, 5, orientation=orientation, seed=13)
        dmap = estimate_disparity(render(spec), search_range=12)
        detection = detect_orientation(dmap, 5, ground_truth_mask(spec))
        assert detection.orientation is orientation
        assert detection.iou >= 0.6


def test_uncorrelated_channels_low_confidence(ipad):
    # Two independently seeded dot fields in the two channels.
    a = render(make_spec(ipad, 0.5, 0, seed=100))
    b = render(make_spec(ipad, 0.5, 0, seed=200))
    pixels = np.zeros_like(a.pixels)
    pixels[..., 0] = a.pixels[..., 0]
    pixels[..., 1] = b.pixels[..., 1]
    pixels[..., 2] = b.pixels[..., 2]
    mixed = AnaglyphImage(a.width_px, a.height_px, pixels)
    with pytest.raises(LowConfidence):
        estimate_disparity(mixed, search_range=6)


def test_detect_orientation_zero_shift_is_no_figure(ipad):
    spec = make_spec(ipad, 0.5, 0, seed=4)
    dmap = estimate_disparity(render(spec), search_range=6)
    with pytest.raises(NoFigure):
        detect_orientation(dmap, 0, ground_truth_mask(spec))


def test_segment_requires_matching_blocks(ipad):
    spec = make_spec(ipad, 0.5, 4, seed=6)
    dmap = estimate_disparity(render(spec), search_range=12)
    with pytest.raises(NoFigure):
        segment_figure(dmap, 11)  # no block carries that lag


def test_decoder_deterministic(ipad):
    img = render(make_spec(ipad, 0.5, 6, seed=77))
    a = estimate_disparity(img, search_range=10)
    b = estimate_disparity(img, search_range=10)
    assert np.array_equal(a.lags, b.lags)
    assert np.array_equal(a.confidence, b.confidence)


def test_infer_figure_without_truth(ipad):
    spec = make_spec(ipad, 0.5, 7, orientation=Orientation.DOWN, seed=19)
    dmap = estimate_disparity(render(spec), search_range=12)
    shift, detection = infer_figure(dmap)
    assert shift == 7
    assert detection.orientation is Orientation.DOWN
    assert detection.iou >= 0.6


def test_figure_blocks_report_programmed_lag(ipad):
    shift = 5
    spec = make_spec(ipad, 3.0, shift, seed=3)
    img = render(spec)
    dmap = estimate_disparity(img, search_range=12)
    mask = ground_truth_mask(spec).mask

    # Blocks wholly inside the figure (clear of borders by one block plus
    # the shift) must report exactly the programmed lag; blocks wholly
    # outside must report zero.
    b, s = dmap.block_px, dmap.stride_px
    pad = b + shift
    nby, nbx = dmap.lags.shape
    inside = np.zeros_like(dmap.lags, dtype=bool)
    outside = np.zeros_like(inside)
    for by in range(nby):
        for bx in range(nbx):
            y0, x0 = by * s, bx * s
            window = mask[max(0, y0 - pad) : y0 + b + pad, max(0, x0 - pad) : x0 + b + pad]
            if window.all():
                inside[by, bx] = True
            elif not window.any():
                outside[by, bx] = True
    assert inside.sum() > 20
    assert outside.sum() > 20
    assert (dmap.lags[inside] == shift).all()
    assert (dmap.lags[outside] == 0).all()
