"""Initial two-photon waveshapes: sech products, rotation, chirp, presets."""

import math

import numpy as np
import pytest

from cpcsim.grids import Axis
from cpcsim.waveshapes import (
    PRESETS,
    SupportClippedError,
    WaveshapeSpec,
    apply_chirp,
    build_preset,
    build_sech_product,
    build_waveshape,
    rotate,
)


@pytest.fixture
def axes():
    ax = Axis.from_range(-6.0, 6.0, 0.05)
    return ax, ax


def test_spec_validation():
    with pytest.raises(ValueError):
        WaveshapeSpec(tau_s=0.0)
    with pytest.raises(ValueError):
        WaveshapeSpec(tau_i=-1.0)


def test_sech_ratio_at_one_width(axes):
    grid = build_sech_product(WaveshapeSpec(), *axes)
    i0 = grid.eta_axis.index_of(0.0)
    i1 = grid.eta_axis.index_of(1.0)
    ratio = abs(grid.values[i1, i0]) / abs(grid.values[i0, i0])
    assert ratio == pytest.approx(1 / math.cosh(1.0), abs=1e-12)
    assert ratio == pytest.approx(0.64805, abs=1e-4)
    assert abs(grid.values).argmax() == i0 * grid.nu_axis.count + i0


def test_sech_product_separable(axes):
    grid = build_sech_product(WaveshapeSpec(tau_s=1.0, tau_i=0.5, t_i0=0.5), *axes)
    marg_s = grid.values[:, grid.nu_axis.index_of(0.5)]
    marg_i = grid.values[grid.eta_axis.index_of(0.0), :]
    outer = np.outer(marg_s, marg_i) / grid.values[
        grid.eta_axis.index_of(0.0), grid.nu_axis.index_of(0.5)
    ]
    assert np.allclose(outer, grid.values, atol=1e-12)


def test_presets_unit_norm(axes):
    for name in PRESETS:
        assert build_preset(name, *axes).norm2() == pytest.approx(1.0, abs=1e-10)


def test_unknown_preset(axes):
    with pytest.raises(KeyError):
        build_preset("S9", *axes)


def test_rotate_identity(axes):
    grid = build_preset("S2", *axes)
    out = rotate(grid, 0.0)
    assert np.allclose(out.values, grid.values, atol=1e-12)


def test_rotate_twice_is_point_reflection(axes):
    # An asymmetric shape rotated by pi/2 twice equals its point reflection
    # through the centroid (here the grid center for t_s0 = t_i0 = 0).
    grid = build_waveshape(WaveshapeSpec(tau_s=1.0, tau_i=0.4), *axes)
    out = rotate(rotate(grid, math.pi / 2), math.pi / 2)
    reflected = grid.values[::-1, ::-1]
    assert np.abs(out.values - reflected).max() < 1e-3  # interpolation tol


def test_s2_covariance_axes_on_diagonals(axes):
    grid = build_preset("S2", *axes)
    w = np.abs(grid.values) ** 2
    e = grid.eta_axis.points()[:, None]
    n = grid.nu_axis.points()[None, :]
    m = w.sum()
    ce, cn = (w * e).sum() / m, (w * n).sum() / m
    cov = np.array(
        [
            [(w * (e - ce) ** 2).sum(), (w * (e - ce) * (n - cn)).sum()],
            [(w * (e - ce) * (n - cn)).sum(), (w * (n - cn) ** 2).sum()],
        ]
    ) / m
    _, vecs = np.linalg.eigh(cov)
    for v in vecs.T:
        angle = math.degrees(math.atan2(v[1], v[0])) % 180.0
        assert min(abs(angle - 45.0), abs(angle - 135.0)) < 1.0


def test_chirp_identity_and_modulus(axes):
    grid = build_preset("S1", *axes)
    assert np.array_equal(apply_chirp(grid, 0.0, 0.0).values, grid.values)
    chirped = apply_chirp(grid, 10.0, 20.0)
    assert np.allclose(np.abs(chirped.values), np.abs(grid.values), atol=1e-14)
    assert chirped.norm2() == pytest.approx(grid.norm2(), abs=1e-12)


def test_s4_modulus_equals_s1(axes):
    s1 = build_preset("S1", *axes)
    s4 = build_preset("S4", *axes)
    assert np.allclose(np.abs(s4.values), np.abs(s1.values), atol=1e-12)


def test_s1_swap_symmetric(axes):
    s1 = build_preset("S1", *axes)
    assert np.allclose(s1.values, s1.values.T, atol=1e-12)


def test_s3_mirror_of_s2(axes):
    s2 = build_preset("S2", *axes)
    s3 = build_preset("S3", *axes)
    assert np.abs(np.abs(s3.values) - np.abs(s2.values[:, ::-1])).max() < 1e-10


def test_s4_chirp_phase_gradient_violates_slowness():
    # Finite-difference phase gradient of the S4 chirp: ~2 C_i t at the
    # pulse edge, far above the 1/sigma slowness bound for sigma = 0.05.
    # Needs fine sampling: the phase advances 2 C_i t dt ~ 0.8 rad per cell
    # at spacing 0.01 and would alias at the default spacing.
    fine = Axis.from_range(-6.0, 6.0, 0.01)
    s4 = build_preset("S4", fine, fine)
    ax = s4.nu_axis
    i0 = s4.eta_axis.index_of(0.0)
    j = ax.index_of(2.0)
    phase = np.unwrap(np.angle(s4.values[i0, :]))
    grad = (phase[j + 1] - phase[j - 1]) / (2 * ax.spacing)
    assert abs(grad) == pytest.approx(2 * 20.0 * 2.0, rel=0.05)
    assert abs(grad) > 1.0 / 0.05


def test_support_clipped_error():
    ax = Axis.from_range(-2.0, 2.0, 0.05)  # sech(2) is far from negligible
    with pytest.raises(SupportClippedError):
        build_waveshape(WaveshapeSpec(), ax, ax)


def test_rotation_support_check():
    # A cigar hugging one edge: fine as-is, but any rotation about its
    # centroid would swing the long axis out of the grid.
    ax = Axis.from_range(-6.0, 6.0, 0.05)
    from cpcsim.grids import ComplexGrid2D

    e = ax.points()[:, None]
    n = ax.points()[None, :]
    vals = np.exp(-(e**2) / (2 * 1.8**2) - ((n - 4.5) ** 2) / (2 * 0.2**2))
    grid = ComplexGrid2D(ax, ax, vals.astype(complex))
    with pytest.raises(SupportClippedError):
        rotate(grid, math.pi / 2)
