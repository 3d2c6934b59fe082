"""Direct sampling index, aperture kernel, and diagnostics."""

import numpy as np
import pytest

from lapdsm.dsm import (
    IndexField,
    average_and_normalize,
    bessel_j0_kernel,
    dominant_peaks,
    green_far_field,
    green_norm_on_aperture,
    green_probing_set,
    index_classical,
    kernel_gamma,
    relative_norm,
)
from lapdsm.errors import ValidationError
from lapdsm.numerics import arc_norm, bessel_j
from lapdsm.presets import config1_aperture, config2_aperture
from lapdsm.rng import CounterRng
from lapdsm.scene import ApertureSet, Arc, Box, FarFieldData, SamplingGrid, full_circle

K = 8.0
DOMAIN = Box(-1.0, 1.0, -1.0, 1.0)


class TestGreenFarField:
    def test_amplitude_and_phase(self):
        v = green_far_field((0.0, 0.0), 0.0, K)
        assert v == pytest.approx(np.exp(1j * np.pi / 4) / np.sqrt(8 * K * np.pi))

    def test_translation_phase(self):
        z = np.array([0.3, -0.5])
        theta = 1.1
        xhat = np.array([np.cos(theta), np.sin(theta)])
        v = green_far_field(z, theta, K)
        v0 = green_far_field((0.0, 0.0), theta, K)
        assert v == pytest.approx(v0 * np.exp(-1j * K * xhat @ z))

    def test_probing_set_matches_pointwise(self):
        ap = config1_aperture(receivers=16)
        grid = SamplingGrid(DOMAIN, 4)
        probing = green_probing_set(grid, ap, K)
        angles = ap.receiver_angles()
        for i in (0, 7, 15):
            np.testing.assert_allclose(
                probing.samples[i], green_far_field(grid.points[i], angles, K), rtol=1e-13
            )


class TestKernel:
    def test_full_circle_reduces_to_bessel(self):
        ap = full_circle(8)
        rng = CounterRng(100)
        pts = rng.uniform_box(100, -1, 1, -1, 1)
        pts2 = rng.uniform_box(100, -1, 1, -1, 1)
        for z, y in zip(pts, pts2):
            expect = bessel_j0_kernel(K, np.hypot(*(z - y)))
            assert abs(kernel_gamma(z, y, ap, K) - expect) < 1e-10

    def test_coincident_limit_is_measure_over_8kpi_times_2(self):
        # |K(z, z)| = |Gamma| / (8 k pi) = alpha / (4 k pi) for one arc of half-width alpha
        for alpha in (np.pi / 8, np.pi / 3, 2 * np.pi / 5):
            ap = ApertureSet((Arc(alpha=alpha, beta=0.7, receivers=8),))
            v = kernel_gamma((0.2, -0.1), (0.2, -0.1), ap, K)
            assert abs(abs(v) - alpha / (4 * K * np.pi)) < 1e-8
        ap = ApertureSet((Arc(alpha=np.pi / 3, beta=0.0, receivers=8),))
        assert abs(kernel_gamma((0, 0), (0, 0), ap, K)) == pytest.approx(1.0 / 96.0, abs=1e-10)

    def test_decay_bound_along_arbitrary_directions(self):
        # |K(z, y)| <= 5 k^{-3/2} R^{-1/2} for the stationary-phase regime
        ap = ApertureSet((Arc(alpha=np.pi / 3, beta=0.0, receivers=8),))
        for beta in (0.0, np.pi / 4, np.pi / 2, 2.1):
            for radius in (0.5, 1.0, 2.0):
                y = radius * np.array([np.cos(beta), np.sin(beta)])
                v = abs(kernel_gamma((0.0, 0.0), y, ap, K))
                assert v <= 5.0 * K ** (-1.5) * radius ** (-0.5)

    def test_maximum_at_coincidence(self):
        ap = ApertureSet((Arc(alpha=np.pi / 3, beta=0.0, receivers=8),))
        peak = abs(kernel_gamma((0, 0), (0, 0), ap, K))
        for radius in np.linspace(0.05, 2.0, 30):
            for beta in (0.0, 0.8, 2.0):
                y = radius * np.array([np.cos(beta), np.sin(beta)])
                assert abs(kernel_gamma((0, 0), y, ap, K)) < peak

    def test_hermitian_symmetry(self):
        ap = config2_aperture()
        v = kernel_gamma((0.1, 0.2), (-0.4, 0.5), ap, K)
        w = kernel_gamma((-0.4, 0.5), (0.1, 0.2), ap, K)
        assert v == pytest.approx(np.conj(w), abs=1e-14)


class TestIndexClassical:
    def test_point_source_data_peaks_at_source(self):
        # far-field of a point source at y0 restricted to the aperture
        ap = config1_aperture()
        angles = ap.receiver_angles()
        y0 = np.array([0.3, -0.4])
        xhat = np.column_stack([np.cos(angles), np.sin(angles)])
        data = FarFieldData(np.exp(-1j * K * xhat @ y0)[None, :], ap)
        grid = SamplingGrid(DOMAIN, 64)
        field = index_classical(data, None, ap, grid, k=K)
        best = grid.points[np.argmax(field.values)]
        assert np.hypot(*(best - y0)) < 0.1

    def test_full_circle_index_is_bessel_kernel(self):
        # with u_inf = G_inf(y0, .), the index is |K_{S^1}(z, y0)| = |J0(k|z-y0|)|/(4k)
        ap = full_circle(512)
        angles = ap.receiver_angles()
        y0 = np.array([-0.2, 0.1])
        pre = np.exp(1j * np.pi / 4) / np.sqrt(8 * K * np.pi)
        xhat = np.column_stack([np.cos(angles), np.sin(angles)])
        data = FarFieldData(pre * np.exp(-1j * K * xhat @ y0)[None, :], ap)
        grid = SamplingGrid(DOMAIN, 32)
        field = index_classical(data, None, ap, grid, k=K)
        dist = np.hypot(grid.points[:, 0] - y0[0], grid.points[:, 1] - y0[1])
        expect = np.abs(bessel_j(0, K * dist)) / (4 * K)
        np.testing.assert_allclose(field.values, expect, atol=1e-6)

    def test_phase_invariance(self):
        ap = config1_aperture()
        u = np.exp(1j * np.linspace(0, 3, 100))
        grid = SamplingGrid(DOMAIN, 16)
        a = index_classical(FarFieldData(u[None, :], ap), None, ap, grid, k=K)
        b = index_classical(FarFieldData((1j * u)[None, :], ap), None, ap, grid, k=K)
        np.testing.assert_allclose(a.values, b.values, rtol=1e-12)

    def test_stability_bound_is_cauchy_schwarz(self):
        # |I(z) - I_delta(z)| <= ||G_inf(z,.)||_Gamma * ||u - u_delta||_Gamma pointwise
        ap = full_circle(128)
        grid = SamplingGrid(DOMAIN, 24)
        rng = CounterRng(55)
        u = rng.normals(128) + 1j * rng.normals(128)
        pert = u + 0.1 * (rng.normals(128) + 1j * rng.normals(128))
        fa = index_classical(FarFieldData(u[None, :], ap), None, ap, grid, k=K)
        fb = index_classical(FarFieldData(pert[None, :], ap), None, ap, grid, k=K)
        bound = green_norm_on_aperture(ap, K) * arc_norm(u - pert, ap)
        assert np.max(np.abs(fa.values - fb.values)) <= bound + 1e-13

    def test_green_norm_value(self):
        assert green_norm_on_aperture(full_circle(8), K) == pytest.approx(1.0 / (2 * np.sqrt(K)))
        ap = config1_aperture()
        assert green_norm_on_aperture(ap, K) == pytest.approx(np.sqrt(ap.measure / (8 * K * np.pi)))


class TestRelativeNorm:
    def test_classical_probe_has_unit_relative_norm(self):
        ap = config1_aperture()
        grid = SamplingGrid(DOMAIN, 8)
        field = relative_norm(green_probing_set(grid, ap, K), ap, K, grid)
        np.testing.assert_allclose(field.values, 1.0, rtol=1e-12)


class TestAverageAndPeaks:
    def test_average_and_normalize(self):
        grid = SamplingGrid(DOMAIN, 4)
        a = IndexField(grid, np.full(16, 2.0))
        b = IndexField(grid, np.full(16, 4.0))
        out = average_and_normalize([a, b])
        np.testing.assert_allclose(out.values, 1.0)
        assert out.normalized

    def test_all_zero_rejected(self):
        grid = SamplingGrid(DOMAIN, 4)
        with pytest.raises(ValidationError):
            average_and_normalize([IndexField(grid, np.zeros(16))])

    def test_dominant_peaks_finds_separated_bumps(self):
        grid = SamplingGrid(DOMAIN, 64)
        pts = grid.points
        centers = [(-0.6, 0.0), (0.5, 0.4)]
        v = np.zeros(len(pts))
        for cx, cy in centers:
            v += np.exp(-40 * ((pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2))
        peaks = dominant_peaks(IndexField(grid, v / v.max()), min_separation=0.3, threshold=0.5)
        assert len(peaks) == 2
        found = sorted((round(p[0], 1), round(p[1], 1)) for p in peaks)
        assert found == sorted(centers)

    def test_close_bumps_suppressed(self):
        grid = SamplingGrid(DOMAIN, 64)
        pts = grid.points
        v = np.zeros(len(pts))
        for cx, cy in [(-0.05, 0.0), (0.05, 0.0)]:
            v += np.exp(-200 * ((pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2))
        peaks = dominant_peaks(IndexField(grid, v / v.max()), min_separation=0.3, threshold=0.5)
        assert len(peaks) == 1
