import math

import numpy as np
import pytest

import chaoslab


def test_sampling_is_reproducible():
    a = chaoslab.sample("weibull", 1.5, 10000, seed=3)
    b = chaoslab.sample("weibull", 1.5, 10000, seed=3)
    c = chaoslab.sample("weibull", 1.5, 10000, seed=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    # E|xi|^2 = Gamma(1 + 2/alpha)
    assert abs(np.mean(a**2) - math.gamma(1 + 2 / 1.5)) < 0.05


def test_standardized_gaussian_variance():
    x = chaoslab.sample("gaussian", 2.0, 200000, seed=1, standardized=True)
    assert abs(x.var() - 1) < 0.02


def test_convolution_matches_numpy_fft():
    rng = np.random.default_rng(0)
    z, x = rng.standard_normal(37), rng.standard_normal(37)
    ref = np.real(np.fft.ifft(np.fft.fft(z) * np.fft.fft(x)))
    assert np.allclose(chaoslab.circular_convolve(z, x), ref, atol=1e-12)


def test_partial_circulant_rows():
    rng = np.random.default_rng(1)
    z = rng.standard_normal(8)
    omega = [0, 3, 5]
    phi = chaoslab.partial_circulant(z, omega)
    full = np.array([[z[(i - k) % 8] for k in range(8)] for i in range(8)])
    assert np.allclose(phi, full[omega] / math.sqrt(3))


def test_vx_exchange_identity():
    rng = np.random.default_rng(2)
    x, eta = rng.standard_normal(16), rng.standard_normal(16)
    omega = list(range(6))
    lhs = chaoslab.vx_circulant(x, omega) @ eta
    rhs = chaoslab.partial_circulant(eta, omega) @ x
    assert np.allclose(lhs, rhs)


def test_gabor_columns_are_unit_norm_for_unit_window():
    h = np.exp(2j * np.pi * np.arange(5) / 7) / math.sqrt(5)
    g = chaoslab.gabor_matrix(h)
    assert g.shape == (5, 25)
    assert np.allclose(np.linalg.norm(g, axis=0), 1)


def test_norms():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((20, 12))
    n = chaoslab.exact_norms(a)
    assert n["frobenius"] == pytest.approx(np.linalg.norm(a))
    assert n["l2_to_inf"] == pytest.approx(np.linalg.norm(a, axis=1).max())
    assert chaoslab.spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-8)
    iv = chaoslab.dual_pair_norm_interval(a, 2.0)
    assert iv["lo"] <= np.linalg.norm(a, 2) * (1 + 1e-8)
    assert iv["hi"] >= np.linalg.norm(a, 2) * (1 - 1e-8)


def test_chaos_variance_for_identity():
    n = 8
    v = chaoslab.chaos_samples(np.eye(n), "gaussian", 2.0, 100000, seed=5)
    assert abs(v.mean()) < 0.05
    assert abs(v.var() / (2 * n) - 1) < 0.05
    f = chaoslab.decoupled_moment_formula(np.eye(n), 2.0, 2.0)
    assert f["two_term"] <= 5 * f["five_term"]
    assert chaoslab.hw_phi2(np.eye(n), 2.0, 0.5) > 0


def test_gamma_and_complexity():
    g = chaoslab.dudley_gamma(2.0, "sparse_ball", 1.0, s=3, n=100)
    assert g > 0
    assert chaoslab.closed_form_gamma(2.0, 4, 1024, 64) > 0
    c = chaoslab.sample_complexity(2.0, 4, 1024, 0.5)
    assert c["f1"] == pytest.approx(4 * math.log(4) ** 2 * math.log(1024) ** 2)


def test_delta_s():
    assert chaoslab.delta_s(np.eye(5), 2)["delta"] == 0.0
    a = np.eye(3, 4)
    a[:, 3] = a[:, 0]
    r = chaoslab.delta_s(a, 2)
    assert r["delta"] == 1.0
    assert r["support"] == [0, 3]
    rng = np.random.default_rng(4)
    phi = rng.standard_normal((6, 12)) / math.sqrt(6)
    assert chaoslab.delta_s(phi, 2, mc_trials=20)["delta"] <= chaoslab.delta_s(phi, 2)["delta"]


def test_basis_pursuit_recovers_sparse_vector():
    rng = np.random.default_rng(6)
    phi = rng.standard_normal((30, 60)) / math.sqrt(30)
    x = np.zeros(60)
    x[[4, 17, 40]] = [1.0, -0.5, 2.0]
    r = chaoslab.basis_pursuit(phi, phi @ x)
    assert r["converged"]
    assert np.linalg.norm(r["solution"] - x) < 1e-4


def test_phase_transition_layout():
    rows = chaoslab.phase_transition("dense", 32, [8, 24], [1, 2], 4, seed=1)
    assert [(r["m"], r["s"]) for r in rows] == [(8, 1), (8, 2), (24, 1), (24, 2)]
    assert all(r["trials"] == 4 for r in rows)


def test_git_blob_hash():
    assert chaoslab.git_blob_sha256(b"hello\n").startswith("2cf8d83d")
