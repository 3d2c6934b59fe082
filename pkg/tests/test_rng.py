"""Counter-based generator: determinism, chunking invariance, distributions."""

import numpy as np
import pytest

from lapdsm.rng import CounterRng


def test_same_seed_same_sequence():
    a = CounterRng(123).uniforms(1000)
    b = CounterRng(123).uniforms(1000)
    np.testing.assert_array_equal(a, b)


def test_chunking_does_not_matter():
    whole = CounterRng(7).uniforms(100)
    r = CounterRng(7)
    pieces = np.concatenate([r.uniforms(13), r.uniforms(50), r.uniforms(37)])
    np.testing.assert_array_equal(whole, pieces)


def test_streams_are_independent():
    a = CounterRng(5, stream=0).uniforms(200)
    b = CounterRng(5, stream=1).uniforms(200)
    assert not np.allclose(a, b)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.2


def test_spawn_differs_from_parent():
    parent = CounterRng(9)
    child = parent.spawn(0)
    grandchild = child.spawn(0)
    seqs = [CounterRng(9).uniforms(100), child.uniforms(100), grandchild.uniforms(100)]
    assert not np.allclose(seqs[0], seqs[1])
    assert not np.allclose(seqs[1], seqs[2])


def test_uniform_range_and_moments():
    u = CounterRng(42).uniforms(200_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert np.mean(u) == pytest.approx(0.5, abs=5e-3)
    assert np.var(u) == pytest.approx(1.0 / 12.0, abs=5e-3)


def test_uniforms_open_never_zero():
    u = CounterRng(1).uniforms_open(100_000)
    assert u.min() > 0.0 and u.max() <= 1.0


def test_normals_moments():
    g = CounterRng(11).normals(200_000)
    assert np.mean(g) == pytest.approx(0.0, abs=1e-2)
    assert np.var(g) == pytest.approx(1.0, abs=1e-2)
    # symmetry of tails
    assert np.mean(g > 1.96) == pytest.approx(0.025, abs=3e-3)
    assert np.mean(g < -1.96) == pytest.approx(0.025, abs=3e-3)


def test_normals_odd_count():
    g = CounterRng(3).normals(7)
    assert g.shape == (7,)
    full = CounterRng(3).normals(8)
    np.testing.assert_array_equal(g, full[:7])


def test_uniform_box_bounds():
    pts = CounterRng(8).uniform_box(5000, -2.0, 1.0, 0.5, 3.0)
    assert pts.shape == (5000, 2)
    assert pts[:, 0].min() >= -2.0 and pts[:, 0].max() <= 1.0
    assert pts[:, 1].min() >= 0.5 and pts[:, 1].max() <= 3.0
    assert np.mean(pts[:, 0]) == pytest.approx(-0.5, abs=0.05)


def test_seed_sensitivity():
    a = CounterRng(1000).uniforms(50)
    b = CounterRng(1001).uniforms(50)
    assert not np.allclose(a, b)
