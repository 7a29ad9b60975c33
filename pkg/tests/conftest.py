import numpy as np
import pytest

from dfrcbeam import ArrayGeometry, ChannelSet, Scene

# Reference single-user channel (8 antennas) of the tradeoff and
# beampattern scenarios.
H_REF8 = np.array([
    0.21 - 0.02j, -0.56 + 0.65j, 0.57 - 0.23j, -0.93 + 0.47j,
    -0.19 + 1.35j, -0.19 + 0.11j, 1.05 - 0.21j, 1.02 - 0.35j,
])

# Reference six-antenna channels of the convergence scenario.
H_REF6 = [
    np.array([-0.33 - 1.17j, -0.47 - 0.61j, 0.42 - 0.82j, 0.22 - 0.71j, 0.21 + 0.58j, -0.19 + 0.13j]),
    np.array([-0.69 + 0.67j, -0.38 + 0.79j, -0.32 + 1.09j, 1.04 - 0.02j, -0.17 + 0.05j, -2.01 - 0.60j]),
    np.array([0.80 - 0.48j, -0.68 - 0.23j, 0.10 - 0.17j, -0.01 - 0.19j, 0.06 + 0.62j, -0.34 - 0.03j]),
]

INTERFERER_ANGLES_DEG = (-60.0, -30.0, 30.0, 60.0)
P0 = 100.0  # 20 dBm in unit-noise normalization


def reference_scene(target_power=1.0, interferer_power=1000.0):
    return Scene(
        target_angle=0.0,
        target_power=target_power,
        interferers=[(np.deg2rad(a), interferer_power) for a in INTERFERER_ANGLES_DEG],
    )


@pytest.fixture
def scene():
    return reference_scene()


@pytest.fixture
def geom8():
    return ArrayGeometry(8, 8)


@pytest.fixture
def geom6():
    return ArrayGeometry(6, 6)


@pytest.fixture
def ref6_channels():
    return ChannelSet(np.array(H_REF6))


def random_hermitian(rng, n, psd=False, rank=None):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if psd:
        if rank is not None:
            m = m[:, :rank]
        return m @ m.conj().T
    return 0.5 * (m + m.conj().T)


def random_unit(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)
