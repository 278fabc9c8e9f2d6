import pytest
from hypothesis import given
from hypothesis import strategies as st

from stereoacuity.errors import (
    InvalidGeometry,
    InvalidProfile,
    NotIntegerMultiple,
    ProtocolViolation,
    StimulusTooLarge,
)
from stereoacuity.geometry import (
    DisplayProfile,
    HdMeasurement,
    build_level_table,
    disparity_arcsec,
    distance_scale_k,
    dot_size_px,
    hd_arcsec,
    hd_protocol,
    pixel_pitch,
    round_half_up,
    shift_for_arcsec,
    stimulus_size_px,
)
from stereoacuity.ol import is_ol


def test_pixel_pitch_values():
    assert pixel_pitch(DisplayProfile(ppi=264)) == pytest.approx(9.6212e-5, rel=1e-4)
    assert pixel_pitch(DisplayProfile(ppi=326)) == pytest.approx(7.7914e-5, rel=1e-4)


def test_invalid_profile_rejected():
    with pytest.raises(InvalidProfile):
        DisplayProfile(ppi=0)
    with pytest.raises(InvalidProfile):
        DisplayProfile(ppi=-264)
    with pytest.raises(InvalidProfile):
        DisplayProfile(ppi=264, width_px=0)


def test_viewing_geometry_validation():
    from stereoacuity.geometry import ViewingGeometry

    geometry = ViewingGeometry(distance_m=3.0)
    assert geometry.reference_distance_m == 0.5
    assert geometry.ipd_m == 0.06
    for bad in (
        dict(distance_m=0.0),
        dict(distance_m=3.0, reference_distance_m=-1.0),
        dict(distance_m=3.0, ipd_m=0.0),
    ):
        with pytest.raises(InvalidGeometry):
            ViewingGeometry(**bad)


def test_single_pixel_disparity(ipad):
    assert disparity_arcsec(1, ipad, 0.5) == pytest.approx(39.69, abs=0.005)
    assert round_half_up(disparity_arcsec(1, ipad, 0.5)) == 40
    iphone = DisplayProfile(ppi=326)
    assert disparity_arcsec(1, iphone, 0.5) == pytest.approx(32.1, abs=0.05)
    assert round_half_up(disparity_arcsec(1, iphone, 0.5)) == 32
    assert disparity_arcsec(0, ipad, 3.0) == 0.0


def test_disparity_rejects_bad_distance(ipad):
    with pytest.raises(InvalidGeometry):
        disparity_arcsec(1, ipad, 0.0)
    with pytest.raises(InvalidGeometry):
        disparity_arcsec(1, ipad, -1.0)


def test_far_table_matches_published_column(far_table):
    assert far_table.arcsec_values(rounded=True) == [7, 13, 20, 26, 33, 40, 46, 53, 60, 66]
    assert far_table.scale_k == 6


def test_near_table_matches_published_column(near_table):
    # Level 5 computes 198.45 -> 198; the printed column says 199 there.
    assert near_table.arcsec_values(rounded=True) == [
        40, 79, 119, 159, 198, 238, 278, 318, 357, 397,
    ]
    assert near_table.scale_k == 1


def test_single_level_table(ipad):
    table = build_level_table(ipad, 0.5, n_levels=1)
    assert len(table) == 1
    assert table.finest.arcsec_rounded == 40


def test_table_monotonic(near_table, far_table):
    for table in (near_table, far_table):
        values = table.arcsec_values()
        assert all(a < b for a, b in zip(values, values[1:]))
        assert [lv.pixel_shift for lv in table.levels] == [lv.index for lv in table.levels]


def test_distance_scale_k():
    assert distance_scale_k(3.0, 0.5) == 6
    assert distance_scale_k(0.5, 0.5) == 1
    with pytest.raises(NotIntegerMultiple):
        distance_scale_k(0.4, 0.5)
    with pytest.raises(InvalidGeometry):
        distance_scale_k(-1.0, 0.5)


def test_hd_arcsec_examples():
    assert hd_arcsec(0.06, 0.01, 3.0) == pytest.approx(13.75, abs=0.005)
    assert hd_arcsec(0.06, 0.0, 3.0) == 0.0
    assert hd_arcsec(0.062, 0.03, 3.0) == pytest.approx(42.6, abs=0.05)
    with pytest.raises(InvalidGeometry):
        hd_arcsec(0.0, 0.01, 3.0)


def test_hd_protocol():
    flat = HdMeasurement(delta_z_m=(0.0,) * 6, ipd_m=0.06, distance_m=3.0)
    assert hd_protocol(flat) == 0.0

    alternating = HdMeasurement(
        delta_z_m=(0.01, -0.01, 0.01, -0.01, 0.01, -0.01), ipd_m=0.06, distance_m=3.0
    )
    assert hd_protocol(alternating) == pytest.approx(13.75, abs=0.005)

    coarse = HdMeasurement(delta_z_m=(0.05,) * 6, ipd_m=0.06, distance_m=3.0)
    assert is_ol(hd_protocol(coarse))

    with pytest.raises(ProtocolViolation):
        hd_protocol(HdMeasurement(delta_z_m=(0.01,) * 5))


def test_dot_size(ipad):
    assert dot_size_px(ipad, 0.5) == 2
    assert dot_size_px(ipad, 3.0) == 12
    assert dot_size_px(ipad, 0.05) == 1  # clamp floor


def test_stimulus_size(ipad):
    assert stimulus_size_px(ipad) == 1023
    assert stimulus_size_px(DisplayProfile(ppi=326)) == 1264
    with pytest.raises(StimulusTooLarge):
        stimulus_size_px(DisplayProfile(ppi=264, width_px=2048, height_px=800))


@given(shift=st.integers(0, 50), k=st.integers(0, 20))
def test_disparity_linear_in_shift(ipad, shift, k):
    single = disparity_arcsec(shift, ipad, 0.5)
    scaled = disparity_arcsec(k * shift, ipad, 0.5)
    assert scaled == pytest.approx(k * single, rel=1e-9, abs=1e-12)


@given(shift=st.integers(1, 20), k=st.integers(1, 12))
def test_distance_scaling_constancy(ipad, shift, k):
    # k times the shift at k times the distance is the same angle.
    base = disparity_arcsec(shift, ipad, 0.5)
    scaled = disparity_arcsec(k * shift, ipad, k * 0.5)
    assert scaled == pytest.approx(base, rel=1e-9)


@given(
    signs=st.lists(st.sampled_from([-1.0, 1.0]), min_size=6, max_size=6),
    magnitudes=st.lists(st.floats(0.0, 0.04), min_size=6, max_size=6),
)
def test_hd_protocol_sign_invariance(signs, magnitudes):
    base = HdMeasurement(delta_z_m=tuple(magnitudes), ipd_m=0.06, distance_m=3.0)
    flipped = HdMeasurement(
        delta_z_m=tuple(s * m for s, m in zip(signs, magnitudes)),
        ipd_m=0.06,
        distance_m=3.0,
    )
    a, b = hd_protocol(base), hd_protocol(flipped)
    if is_ol(a) or is_ol(b):
        assert is_ol(a) and is_ol(b)
    else:
        assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("distance", [0.5, 1.0, 1.5, 3.0])
def test_arcsec_round_trip(ipad, distance):
    table = build_level_table(ipad, distance)
    for level in table.levels:
        assert shift_for_arcsec(level.arcsec, ipad, distance) == level.pixel_shift
