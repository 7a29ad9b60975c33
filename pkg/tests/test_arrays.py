import numpy as np
import pytest

from dfrcbeam import ArrayGeometry, ChannelSet, Scene, channel_matrix, steering_rx, steering_tx
from dfrcbeam.errors import DimensionMismatchError


def test_tx_broadside_is_all_ones():
    geom = ArrayGeometry(8, 8)
    assert np.allclose(steering_tx(geom, 0.0), np.ones(8))


def test_tx_endfire_alternates():
    geom = ArrayGeometry(4, 4)
    assert np.allclose(steering_tx(geom, np.pi / 2), [1, -1, 1, -1], atol=1e-12)


def test_tx_thirty_degrees_quarter_turns():
    geom = ArrayGeometry(4, 4)
    assert np.allclose(steering_tx(geom, np.pi / 6), [1, -1j, -1, 1j], atol=1e-12)


def test_rx_broadside_and_endfire():
    geom = ArrayGeometry(8, 2)
    assert np.allclose(steering_rx(ArrayGeometry(2, 8), 0.0), np.ones(8))
    assert np.allclose(steering_rx(ArrayGeometry(2, 2), np.pi / 2), [1, -1], atol=1e-12)


def test_steering_conjugate_symmetry():
    geom = ArrayGeometry(5, 7)
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-1.5, 1.5, size=25):
        assert np.allclose(steering_rx(geom, -theta), steering_rx(geom, theta).conj())
        assert np.allclose(steering_tx(geom, -theta), steering_tx(geom, theta).conj())


def test_steering_norms():
    geom = ArrayGeometry(6, 9)
    for theta in np.linspace(-1.5, 1.5, 31):
        assert np.linalg.norm(steering_tx(geom, theta)) ** 2 == pytest.approx(6)
        assert np.linalg.norm(steering_rx(geom, theta)) ** 2 == pytest.approx(9)


def test_channel_matrix_broadside_all_ones():
    geom = ArrayGeometry(4, 3)
    assert np.allclose(channel_matrix(geom, 0.0), np.ones((3, 4)))
    assert channel_matrix(geom, 0.3)[0, 0] == pytest.approx(1.0)


def test_channel_matrix_rank_one_singular_value():
    geom = ArrayGeometry(5, 3)
    for theta in (0.1, -0.7, 1.2):
        a = channel_matrix(geom, theta)
        s = np.linalg.svd(a, compute_uv=False)
        assert s[0] == pytest.approx(np.sqrt(15), rel=1e-12)
        assert np.all(s[1:] < 1e-12)
        assert np.linalg.norm(a) ** 2 == pytest.approx(15)


def test_channel_matrix_two_by_two_endfire():
    geom = ArrayGeometry(2, 2)
    assert np.allclose(channel_matrix(geom, np.pi / 2), [[1, -1], [-1, 1]], atol=1e-12)


def test_geometry_validation():
    with pytest.raises(ValueError):
        ArrayGeometry(0, 4)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 4, spacing_tx=-0.1)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 4, spacing_rx=float("nan"))


def test_scene_validation():
    Scene(0.0, 1.0, [])  # no interferers is a valid degenerate scene
    with pytest.raises(ValueError):
        Scene(np.pi / 2, 1.0)
    with pytest.raises(ValueError):
        Scene(0.0, -1.0)
    with pytest.raises(ValueError):
        Scene(0.0, 1.0, [(0.1, -5.0)])


def test_channel_set_validation():
    ch = ChannelSet(np.ones((2, 4), dtype=complex))
    assert ch.k == 2 and ch.n_tx == 4
    with pytest.raises(ValueError):
        ChannelSet(np.array([[np.nan + 0j, 0, 0, 0]]))
    with pytest.raises(DimensionMismatchError):
        ChannelSet(np.ones((0, 4)))
