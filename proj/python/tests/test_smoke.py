import cmath
import math

import numpy as np
import pytest

import aniso_gabor as ag


def test_catalog_and_gaussian_stft():
    assert "chirp2" in ag.oracle_catalog()
    g = ag.generate_oracle("gaussian").signal
    v = ag.stft(g, 0.7, 1.3)
    assert abs(v - complex(0.207788798105859886, -0.101657918059411040)) < 1e-12
    grid = ag.stft_grid(g, [-1.0, 0.0, 2.0], [0.0, 1.0])
    assert grid.shape == (3, 2)
    expected = math.exp(-(4 + 1) / 4) / math.sqrt(2 * math.pi)
    assert abs(abs(grid[2, 1]) - expected) < 1e-12


def test_geometry():
    lam = ag.solve_lambda(2.0, 4.0, 2.0)
    assert lam == pytest.approx(2.5440392990281379, rel=1e-13)
    px, pxi = ag.project(2.0, 4.0, 2.0)
    assert math.hypot(px, pxi) == pytest.approx(1.0, abs=1e-12)


def test_chirp_wavefront_matches_truth():
    o = ag.generate_oracle("chirp2")
    est = ag.estimate_wavefront(o.signal, 1.0)
    rep = ag.compare(ag.DirSet.from_estimate(est), ag.DirSet.from_truth(o.truth(1.0)), "equal")
    assert rep.passed, rep.summary()
    assert est.count(ag.DirClass.Inconclusive) == 0
    assert '"schema"' in est.to_json()


def test_config_roundtrip(tmp_path):
    c = ag.RunConfig()
    c.s = 0.5
    c.sphere_res = 180
    p = tmp_path / "run.toml"
    c.save(str(p))
    assert ag.RunConfig.load(str(p)) == c
    with pytest.raises(ValueError):
        ag.RunConfig.from_json('{"bogus": 1}')


def test_weyl_product_and_quantize():
    x, xi = ag.Poly.term(1, 0), ag.Poly.term(0, 1)
    prod = ag.weyl_product(x, xi)
    assert prod.approx_equal(ag.Poly.term(1, 1) + ag.Poly.term(0, 0, 0.5j), 1e-15)
    M = ag.quantize(ag.Poly.term(2, 0), 0.5, 8.0, 64)
    assert M.shape == (64, 64)
    assert np.allclose(M, np.diag(np.diag(M)), atol=1e-10)


def test_char_set_airy():
    a = ag.Poly.term(0, 1) - ag.Poly.term(2, 0)
    cs = ag.char_set(a, 2.0, 2.0)
    assert sorted(round(t) for t in cs.characteristic_angles()) == [37, 38, 39, 141, 142, 143]
    assert ag.check_membership(a, 2.0, 2.0).bounded
    assert not ag.check_membership(a, 1.0, 1.0).bounded


def test_sampled_signal_and_errors():
    t = np.arange(-512, 512) * 0.05
    u = ag.sampled_signal(float(t[0]), 0.05, np.exp(-t**2 / 2).astype(complex))
    v = ag.stft(u, 0.0, 0.0)
    # unnormalized Gaussian against the L2-normalized window
    assert abs(v - math.pi**0.25 / math.sqrt(2 * math.pi)) < 1e-9
    with pytest.raises(Exception):
        ag.generate_oracle("no_such_oracle")
    with pytest.raises(ValueError):
        ag.solve_lambda(1.0, 1.0, -1.0)
