"""Array geometry, ULA steering vectors, effective channels, and the radar scene."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class ArrayGeometry:
    """Transmit/receive uniform linear arrays.

    Spacings are normalized by the carrier wavelength; 0.5 is the usual
    half-wavelength deployment.
    """

    n_tx: int
    n_rx: int
    spacing_tx: float = 0.5
    spacing_rx: float = 0.5

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("antenna counts must be >= 1")
        for s in (self.spacing_tx, self.spacing_rx):
            if not np.isfinite(s) or s < 0:
                raise ValueError("antenna spacings must be finite and non-negative")


@dataclass(frozen=True)
class Scene:
    """Radar environment: one point target plus fixed angular interferers.

    Angles are radians in (-pi/2, pi/2); powers are linear (|amplitude|^2).
    Only the powers enter the covariance formulas, so complex phases are not
    stored here; the symbol-level simulator draws them per run.
    """

    target_angle: float
    target_power: float
    interferers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "interferers", tuple((float(a), float(p)) for a, p in self.interferers))
        angles = [self.target_angle] + [a for a, _ in self.interferers]
        if any(not np.isfinite(a) or abs(a) >= HALF_PI for a in angles):
            raise ValueError("angles must lie in (-pi/2, pi/2)")
        powers = [self.target_power] + [p for _, p in self.interferers]
        if any(not np.isfinite(p) or p < 0 for p in powers):
            raise ValueError("powers must be finite and non-negative")


@dataclass(frozen=True)
class ChannelSet:
    """Downlink channel vectors of the K single-antenna users, stacked (K, n_tx)."""

    channels: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.atleast_2d(np.asarray(self.channels, dtype=complex))
        if h.ndim != 2 or h.shape[0] < 1:
            raise DimensionMismatchError("channels must form a (K, n_tx) array with K >= 1")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel entries must be finite")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "channels", h)

    @property
    def k(self):
        return self.channels.shape[0]

    @property
    def n_tx(self):
        return self.channels.shape[1]

    def __iter__(self):
        return iter(self.channels)


def _ula_steering(n, spacing, angle):
    return np.exp(-2j * np.pi * spacing * np.arange(n) * np.sin(angle))


def steering_tx(geom: ArrayGeometry, angle: float) -> np.ndarray:
    """Transmit steering vector; entry n is exp(-j*2*pi*n*spacing_tx*sin(angle))."""
    return _ula_steering(geom.n_tx, geom.spacing_tx, angle)


def steering_rx(geom: ArrayGeometry, angle: float) -> np.ndarray:
    """Receive steering vector; entry n is exp(-j*2*pi*n*spacing_rx*sin(angle))."""
    return _ula_steering(geom.n_rx, geom.spacing_rx, angle)


def channel_matrix(geom: ArrayGeometry, angle: float) -> np.ndarray:
    """Rank-1 effective scatterer channel a_rx(angle) a_tx(angle)^T (no conjugate)."""
    return np.outer(steering_rx(geom, angle), steering_tx(geom, angle))
