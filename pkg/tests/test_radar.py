import numpy as np
import pytest

from conftest import random_hermitian, random_unit, reference_scene
from dfrcbeam import (
    ArrayGeometry,
    ChannelSet,
    Scene,
    TransmitCovariance,
    avg_radar_sinr,
    channel_matrix,
    cu_sinr,
    interference_covariance,
    mvdr_receiver,
    radar_gain_matrix,
    radar_sinr_of_beams,
)
from dfrcbeam.errors import DegenerateSteeringError, DimensionMismatchError
from dfrcbeam.radar import beams_to_covariance


def _random_scene(rng, n_int=2):
    interferers = [(float(rng.uniform(-1.2, 1.2)), float(rng.uniform(0.5, 50))) for _ in range(n_int)]
    return Scene(float(rng.uniform(-0.8, 0.8)), float(rng.uniform(0.5, 20)), interferers)


def test_sigma_zero_covariance_is_identity(geom8, scene):
    assert np.allclose(interference_covariance(scene, np.zeros((8, 8)), geom8), np.eye(8))


def test_sigma_no_interferers_is_identity(geom8):
    bare = Scene(0.1, 5.0, [])
    r = random_hermitian(np.random.default_rng(0), 8, psd=True)
    assert np.allclose(interference_covariance(bare, r, geom8), np.eye(8))


def test_sigma_single_interferer_rank_one_update():
    geom = ArrayGeometry(6, 5)
    rng = np.random.default_rng(1)
    theta_i, p_i = 0.4, 3.0
    sc = Scene(0.0, 1.0, [(theta_i, p_i)])
    u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    sigma = interference_covariance(sc, np.outer(u, u.conj()), geom)
    au = channel_matrix(geom, theta_i) @ u
    assert np.allclose(sigma, p_i * np.outer(au, au.conj()) + np.eye(5))
    assert np.min(np.linalg.eigvalsh(sigma)) == pytest.approx(1.0)


def test_sigma_always_dominates_identity():
    rng = np.random.default_rng(2)
    geom = ArrayGeometry(7, 6)
    for _ in range(50):
        sc = _random_scene(rng)
        r = random_hermitian(rng, 7, psd=True)
        sigma = interference_covariance(sc, r, geom)
        assert np.min(np.linalg.eigvalsh(sigma)) >= 1.0 - 1e-9


def test_phi_no_interferers_rank_one(geom8):
    bare = Scene(0.25, 4.0, [])
    phi = radar_gain_matrix(bare, np.zeros((8, 8)), geom8)
    w = np.linalg.eigvalsh(phi)
    assert np.trace(phi).real == pytest.approx(4.0 * 64, rel=1e-12)
    assert np.all(w[:-1] < 1e-9 * w[-1])


def test_phi_interferer_cannot_help_aligned_beam():
    geom = ArrayGeometry(6, 6)
    theta_i = 0.5
    clean = Scene(0.0, 1.0, [])
    loaded = Scene(0.0, 1.0, [(theta_i, 100.0)])
    u = channel_matrix(geom, theta_i).conj().T @ np.ones(6)  # aligned with the interferer
    r = np.outer(u, u.conj())
    before = np.real(u.conj() @ radar_gain_matrix(clean, r, geom) @ u)
    after = np.real(u.conj() @ radar_gain_matrix(loaded, r, geom) @ u)
    assert after < before


def test_mvdr_distortionless(geom8, scene):
    rng = np.random.default_rng(3)
    u = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    w = mvdr_receiver(scene, np.outer(u, u.conj()), geom8, u)
    a0u = channel_matrix(geom8, scene.target_angle) @ u
    assert np.abs(w.conj() @ a0u - 1.0) <= 1e-9


def test_mvdr_no_interferers_distortionless():
    geom = ArrayGeometry(4, 6)
    bare = Scene(0.2, 1.0, [])
    x = np.ones(4, dtype=complex)
    w = mvdr_receiver(bare, np.zeros((4, 4)), geom, x)
    assert np.abs(w.conj() @ channel_matrix(geom, 0.2) @ x - 1.0) <= 1e-12


def test_mvdr_degenerate_steering_rejected():
    geom = ArrayGeometry(4, 4)
    sc = Scene(np.pi / 6, 1.0, [])
    # a_t(30deg) = [1, -j, -1, j]; x chosen orthogonal to it under the
    # non-conjugated product a_t^T x.
    x = np.array([1.0, -1j, 1.0, -1j])
    assert abs(channel_matrix(geom, np.pi / 6)[0] @ x) < 1e-12
    with pytest.raises(DegenerateSteeringError):
        mvdr_receiver(sc, np.eye(4), geom, x)


def test_mvdr_beats_random_receivers_and_matches_phi():
    rng = np.random.default_rng(4)
    geom = ArrayGeometry(6, 6)
    for _ in range(1000):
        sc = _random_scene(rng, n_int=int(rng.integers(0, 3)))
        u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        r = np.outer(u, u.conj())
        x = u
        sigma = interference_covariance(sc, r, geom)
        a0x = channel_matrix(geom, sc.target_angle) @ x

        def quotient(w):
            num = sc.target_power * np.abs(w.conj() @ a0x) ** 2
            return float(num / np.real(w.conj() @ sigma @ w))

        w_star = mvdr_receiver(sc, r, geom, x)
        best = quotient(w_star)
        phi = radar_gain_matrix(sc, r, geom)
        assert best == pytest.approx(float(np.real(x.conj() @ phi @ x)), rel=1e-9)
        competitors = rng.standard_normal((100, 6)) + 1j * rng.standard_normal((100, 6))
        for w in competitors:
            assert quotient(w) <= best * (1 + 1e-9)


def test_avg_radar_sinr_zero_and_closed_form(geom8):
    sc = Scene(0.0, 10.0, [])
    phi = radar_gain_matrix(sc, np.zeros((8, 8)), geom8)
    assert avg_radar_sinr(phi, np.zeros((8, 8))) == 0.0
    g_hat = np.ones(8) / np.sqrt(8)  # conj(a_t(0)) normalized
    r = 100.0 * np.outer(g_hat, g_hat.conj())
    value = avg_radar_sinr(phi, r)
    assert value == pytest.approx(64000.0, rel=1e-10)
    assert 10 * np.log10(value) == pytest.approx(48.06, abs=0.01)


def test_avg_radar_sinr_additivity_and_rotation_invariance():
    rng = np.random.default_rng(5)
    phi = random_hermitian(rng, 6, psd=True)
    r1 = random_hermitian(rng, 6, psd=True)
    r2 = random_hermitian(rng, 6, psd=True)
    assert avg_radar_sinr(phi, r1 + r2) == pytest.approx(
        avg_radar_sinr(phi, r1) + avg_radar_sinr(phi, r2), rel=1e-12
    )
    # gamma depends on R only: rotating the factorization leaves tr(Phi R) alone
    w, v = np.linalg.eigh(r1)
    factors = v * np.sqrt(np.maximum(w, 0.0))
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    rotated = (factors @ q) @ (factors @ q).conj().T
    assert avg_radar_sinr(phi, rotated) == pytest.approx(avg_radar_sinr(phi, r1), rel=1e-9)


def test_avg_radar_sinr_shape_check():
    with pytest.raises(DimensionMismatchError):
        avg_radar_sinr(np.eye(3), np.eye(4))


def test_cu_sinr_matched_filter():
    rng = np.random.default_rng(6)
    h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    ch = ChannelSet(h[None, :])
    u = np.sqrt(100.0) * h / np.linalg.norm(h)
    assert cu_sinr(ch, [u])[0] == pytest.approx(100.0 * np.linalg.norm(h) ** 2, rel=1e-12)


def test_cu_sinr_orthogonal_two_users():
    h1 = np.array([1.0, 0, 0, 0], dtype=complex)
    h2 = np.array([0, 1.0, 0, 0], dtype=complex)
    u1 = np.array([2.0, 0, 0, 0], dtype=complex)
    u2 = np.array([0, 3.0, 0, 0], dtype=complex)
    vals = cu_sinr(ChannelSet(np.array([h1, h2])), [u1, u2])
    assert vals[0] == pytest.approx(4.0)
    assert vals[1] == pytest.approx(9.0)


def test_cu_sinr_brute_force_oracle():
    rng = np.random.default_rng(7)
    h = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    beams = [rng.standard_normal(6) + 1j * rng.standard_normal(6) for _ in range(3)]
    probe = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    got_cancel = cu_sinr(ChannelSet(h), beams, cancel_probe=True, probe=probe)
    got_raw = cu_sinr(ChannelSet(h), beams, cancel_probe=False, probe=probe)
    for k in range(3):
        num = abs(h[k].conj() @ beams[k]) ** 2
        interf = sum(abs(h[k].conj() @ beams[j]) ** 2 for j in range(3) if j != k)
        assert got_cancel[k] == pytest.approx(num / (1 + interf), rel=1e-12)
        probe_leak = abs(h[k].conj() @ probe) ** 2
        assert got_raw[k] == pytest.approx(num / (1 + interf + probe_leak), rel=1e-12)


def test_transmit_covariance_validation_and_budget():
    rng = np.random.default_rng(8)
    beams = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(2)]
    cov = TransmitCovariance.from_beams(beams)
    assert cov.total_power == pytest.approx(sum(np.linalg.norm(u) ** 2 for u in beams))
    with pytest.raises(ValueError):
        TransmitCovariance(-np.eye(3))


def test_self_consistent_sinr(geom8):
    sc = reference_scene()
    rng = np.random.default_rng(9)
    beams = [rng.standard_normal(8) + 1j * rng.standard_normal(8) for _ in range(2)]
    gamma = radar_sinr_of_beams(sc, geom8, beams)
    r = beams_to_covariance(beams)
    assert gamma == pytest.approx(avg_radar_sinr(radar_gain_matrix(sc, r, geom8), r), rel=1e-12)
