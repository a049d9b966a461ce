"""Ground-truth channel model tests.

Expected values are computed in-test by independent means: term-by-term
summation with python scalars for the end-to-end gains, closed-form
trigonometry for plane waves, and Monte-Carlo sample means for the fading
statistics.
"""

import cmath

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chanzo.channels import (
    CascadedChannel,
    PathSet,
    Position,
    RisPhases,
    gen_cascaded_channel,
    gen_path_set,
    ma_channel,
    ris_end_to_end,
)


# ---------------------------------------------------------------- generators


def test_gen_cascaded_deterministic():
    a = gen_cascaded_channel(32, seed=7, include_direct=True)
    b = gen_cascaded_channel(32, seed=7, include_direct=True)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert a.direct == b.direct


def test_gen_cascaded_seed_changes_draw():
    a = gen_cascaded_channel(32, seed=7)
    b = gen_cascaded_channel(32, seed=8)
    assert not np.array_equal(a.coeffs, b.coeffs)


def test_gen_cascaded_without_direct_is_exactly_zero():
    chan = gen_cascaded_channel(16, seed=3)
    assert chan.direct == 0j


def test_gen_cascaded_fading_variance():
    # sample mean of |c|^2 over many elements approaches the fading variance
    for fading in (1.0, 4.0):
        chan = gen_cascaded_channel(20000, seed=11, fading=fading)
        assert_allclose(np.mean(np.abs(chan.coeffs) ** 2), fading, rtol=0.05)


def test_gen_cascaded_direct_fading_scale():
    # direct gains across seeds have the requested variance
    draws = [
        gen_cascaded_channel(1, seed=s, include_direct=True, direct_fading=9.0).direct
        for s in range(4000)
    ]
    assert_allclose(np.mean(np.abs(draws) ** 2), 9.0, rtol=0.1)


def test_gen_cascaded_rejects_bad_args():
    with pytest.raises(ValueError):
        gen_cascaded_channel(0, seed=1)
    with pytest.raises(ValueError):
        gen_cascaded_channel(4, seed=1, fading=0.0)


def test_gen_path_set_deterministic():
    a = gen_path_set(5, seed=2)
    b = gen_path_set(5, seed=2)
    assert np.array_equal(a.gains, b.gains)
    assert np.array_equal(a.elevations, b.elevations)
    assert np.array_equal(a.azimuths, b.azimuths)


def test_gen_path_set_total_gain_normalization():
    # E[sum |gain|^2] = 1 regardless of K
    for k in (1, 8):
        tot = [np.sum(np.abs(gen_path_set(k, seed=s).gains) ** 2) for s in range(5000)]
        assert_allclose(np.mean(tot), 1.0, rtol=0.05)


def test_gen_path_set_angles_in_range():
    ps = gen_path_set(64, seed=9)
    assert np.all(np.abs(ps.elevations) <= np.pi / 2)
    assert np.all(np.abs(ps.azimuths) <= np.pi)


def test_gen_path_set_rejects_zero_paths():
    with pytest.raises(ValueError):
        gen_path_set(0, seed=1)


# ------------------------------------------------------------ type contracts


def test_cascaded_channel_rejects_nonfinite():
    with pytest.raises(ValueError):
        CascadedChannel(np.array([1.0 + 0j, np.nan + 0j]))
    with pytest.raises(ValueError):
        CascadedChannel(np.array([1.0 + 0j]), direct=complex("inf"))


def test_ris_phases_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        RisPhases(np.array([]))
    with pytest.raises(ValueError):
        RisPhases(np.array([0.0, np.inf]))


def test_path_set_empty_is_allowed():
    # K = 0 is a valid estimator output ("no detectable paths")
    ps = PathSet(np.zeros(0, dtype=complex), np.zeros(0), np.zeros(0))
    assert ps.k == 0
    assert ps.directions.shape == (0, 2)
    assert ma_channel(ps, Position(np.zeros(2))) == 0j


def test_path_set_rejects_angle_out_of_range():
    with pytest.raises(ValueError):
        PathSet(np.array([1.0 + 0j]), np.array([2.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        PathSet(np.array([1.0 + 0j]), np.array([0.0]), np.array([4.0]))


def test_path_set_direction_norms_at_most_one():
    ps = gen_path_set(200, seed=4)
    assert np.all(np.linalg.norm(ps.directions, axis=1) <= 1.0 + 1e-12)


def test_position_reshapes_and_validates():
    p = Position([1.0, 2.0])
    assert p.xy.shape == (2,)
    with pytest.raises(ValueError):
        Position(np.array([np.nan, 0.0]))


# ------------------------------------------------------- end-to-end RIS gain


def test_ris_end_to_end_single_element_identity():
    chan = CascadedChannel(np.array([1.0 + 0j]))
    assert ris_end_to_end(chan, RisPhases(np.zeros(1))) == 1.0 + 0j


def test_ris_end_to_end_two_element_alignment():
    # coeffs [1, j] with phases [0, -pi/2]: 1 + j*e^{-j pi/2} = 1 + 1 = 2
    chan = CascadedChannel(np.array([1.0 + 0j, 1.0j]))
    h = ris_end_to_end(chan, RisPhases(np.array([0.0, -np.pi / 2])))
    assert_allclose(h, 2.0 + 0j, atol=1e-12)


def test_ris_end_to_end_matches_scalar_summation():
    # independent oracle: plain python complex arithmetic, term by term
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(1, 9))
        coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        direct = complex(rng.standard_normal(), rng.standard_normal())
        phases = rng.uniform(0, 2 * np.pi, m)
        chan = CascadedChannel(coeffs, direct)
        expected = direct
        for cm, pm in zip(coeffs, phases):
            expected += complex(cm) * cmath.exp(1j * float(pm))
        assert_allclose(ris_end_to_end(chan, RisPhases(phases)), expected, rtol=1e-12)


def test_ris_end_to_end_length_mismatch():
    chan = CascadedChannel(np.array([1.0 + 0j, 1.0j]))
    with pytest.raises(ValueError):
        ris_end_to_end(chan, RisPhases(np.zeros(3)))


def test_ris_end_to_end_triangle_bound():
    # |direct + sum c e^{j phi}| <= |direct| + sum |c| for random phases
    rng = np.random.default_rng(1)
    chan = gen_cascaded_channel(24, seed=5, include_direct=True)
    bound = abs(chan.direct) + np.sum(np.abs(chan.coeffs))
    for _ in range(1000):
        phases = RisPhases(rng.uniform(0, 2 * np.pi, 24))
        assert abs(ris_end_to_end(chan, phases)) <= bound + 1e-9


def test_ris_end_to_end_linearity_in_coefficients():
    rng = np.random.default_rng(2)
    a = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    b = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    phases = RisPhases(rng.uniform(0, 2 * np.pi, 6))
    ha = ris_end_to_end(CascadedChannel(a), phases)
    hb = ris_end_to_end(CascadedChannel(b), phases)
    hab = ris_end_to_end(CascadedChannel(a + b), phases)
    assert_allclose(hab, ha + hb, rtol=1e-12)


# ------------------------------------------------------ movable-antenna gain


def test_ma_channel_at_origin_is_gain_sum():
    ps = gen_path_set(5, seed=6)
    assert_allclose(ma_channel(ps, Position(np.zeros(2))), np.sum(ps.gains), rtol=1e-12)


def test_ma_channel_matches_scalar_summation():
    # independent oracle: per-path python complex arithmetic
    rng = np.random.default_rng(3)
    ps = gen_path_set(7, seed=8, wavelength=0.5)
    for _ in range(20):
        pos = rng.uniform(-1.0, 1.0, 2)
        expected = 0j
        for g, u in zip(ps.gains, ps.directions):
            expected += complex(g) * cmath.exp(1j * 2 * np.pi / 0.5 * float(u @ pos))
        assert_allclose(ma_channel(ps, Position(pos)), expected, rtol=1e-12)


def test_ma_channel_single_path_constant_magnitude():
    ps = PathSet(np.array([0.6 - 0.2j]), np.array([0.3]), np.array([1.1]))
    mag0 = abs(ps.gains[0])
    rng = np.random.default_rng(4)
    for _ in range(50):
        pos = Position(rng.uniform(0, 2.0, 2))
        assert_allclose(abs(ma_channel(ps, pos)), mag0, rtol=1e-12)


def test_ma_channel_wavelength_periodicity():
    # moving by one wavelength along the path direction leaves h unchanged
    lam = 0.75
    ps = PathSet(np.array([1.0 + 0.5j]), np.array([0.4]), np.array([-0.9]), wavelength=lam)
    u = ps.directions[0]
    p0 = np.array([0.2, 0.3])
    h0 = ma_channel(ps, Position(p0))
    h1 = ma_channel(ps, Position(p0 + lam * u / np.dot(u, u)))
    assert_allclose(h1, h0, rtol=1e-9)


def test_ma_channel_magnitude_bound():
    ps = gen_path_set(6, seed=10)
    bound = np.sum(np.abs(ps.gains))
    rng = np.random.default_rng(5)
    for _ in range(1000):
        pos = Position(rng.uniform(-2.0, 2.0, 2))
        assert abs(ma_channel(ps, pos)) <= bound + 1e-9
