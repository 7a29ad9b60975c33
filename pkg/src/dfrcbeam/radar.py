"""Interference covariances, MVDR receive beamforming, and analytic SINR formulas.

The four covariance/gain families of the beamforming problems differ only in
which rank-1 outer products compose the transmit covariance R, so everything
here is written once over R: with beams {u_k} and optional probing beam v,
R = sum_k u_k u_k^H + v v^H.
"""

from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry, ChannelSet, Scene, channel_matrix, steering_tx
from .errors import DegenerateSteeringError, DimensionMismatchError
from .linalg import check_hermitian, solve_hpd

PSD_RTOL = 1e-10


def beams_to_covariance(beams, probe=None) -> np.ndarray:
    """Transmit covariance sum_k u_k u_k^H (+ v v^H)."""
    beams = [np.asarray(u, dtype=complex) for u in beams]
    if probe is not None:
        beams = beams + [np.asarray(probe, dtype=complex)]
    if not beams:
        raise DimensionMismatchError("at least one beamforming vector is required")
    n = beams[0].shape[0]
    r = np.zeros((n, n), dtype=complex)
    for u in beams:
        if u.shape != (n,):
            raise DimensionMismatchError("all beamforming vectors must share one length")
        r += np.outer(u, u.conj())
    return r


@dataclass(frozen=True)
class TransmitCovariance:
    """PSD transmit covariance of the composite downlink signal."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = check_hermitian(self.matrix)
        trace = float(np.trace(m).real)
        if np.min(np.linalg.eigvalsh(m)) < -PSD_RTOL * max(trace, 1.0):
            raise ValueError("transmit covariance must be positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_beams(cls, beams, probe=None):
        return cls(beams_to_covariance(beams, probe))

    @property
    def total_power(self):
        return float(np.trace(self.matrix).real)


def _as_cov(r) -> np.ndarray:
    if isinstance(r, TransmitCovariance):
        return r.matrix
    return np.asarray(r, dtype=complex)


def interference_covariance(scene: Scene, r, geom: ArrayGeometry) -> np.ndarray:
    """Interference-plus-noise covariance at the radar receiver for covariance R.

    Sigma(R) = sum_i p_i A(theta_i) R A(theta_i)^H + I, which is Hermitian and
    >= I. With no interferers (or R = 0) it reduces to the identity.
    """
    r = _as_cov(r)
    if r.shape != (geom.n_tx, geom.n_tx):
        raise DimensionMismatchError("covariance must be n_tx x n_tx")
    sigma = np.eye(geom.n_rx, dtype=complex)
    for angle, power in scene.interferers:
        a = channel_matrix(geom, angle)
        sigma += power * (a @ r @ a.conj().T)
    return 0.5 * (sigma + sigma.conj().T)


def radar_gain_matrix(scene: Scene, r, geom: ArrayGeometry) -> np.ndarray:
    """Radar gain matrix p0 * A(theta0)^H Sigma(R)^{-1} A(theta0).

    The average radar SINR of any transmit covariance R' against the
    environment induced by R is tr(Phi(R) R').
    """
    a0 = channel_matrix(geom, scene.target_angle)
    sigma = interference_covariance(scene, r, geom)
    phi = scene.target_power * (a0.conj().T @ solve_hpd(sigma, a0))
    return 0.5 * (phi + phi.conj().T)


def mvdr_receiver(scene: Scene, r, geom: ArrayGeometry, x: np.ndarray) -> np.ndarray:
    """MVDR receive beamformer for transmit signal x against Sigma(R).

    Returns w = Sigma^{-1} A0 x / (x^H A0^H Sigma^{-1} A0 x); the distortionless
    response w^H A0 x = 1 holds by construction.
    """
    x = np.asarray(x, dtype=complex)
    a0 = channel_matrix(geom, scene.target_angle)
    a0x = a0 @ x
    nx = np.linalg.norm(x)
    if nx == 0.0 or np.linalg.norm(a0x) < 1e-12 * nx:
        raise DegenerateSteeringError("target channel applied to x is numerically zero")
    sigma = interference_covariance(scene, r, geom)
    s_inv_a0x = solve_hpd(sigma, a0x)
    denom = a0x.conj() @ s_inv_a0x
    return s_inv_a0x / denom


def receive_beam(scene: Scene, geom: ArrayGeometry, r, x_ref: np.ndarray) -> np.ndarray:
    """MVDR receive beam for x_ref, falling back to a probe toward the target.

    The conjugated transmit steering vector always couples to the target, so
    the fallback is well-defined even when the transmit signal happens to put
    a null on it (the receive beam is scale-free either way).
    """
    try:
        return mvdr_receiver(scene, r, geom, x_ref)
    except DegenerateSteeringError:
        return mvdr_receiver(scene, r, geom, steering_tx(geom, scene.target_angle).conj())


def avg_radar_sinr(phi: np.ndarray, r) -> float:
    """Average radar SINR tr(Phi R); linear in R and non-negative for PSD inputs."""
    phi = np.asarray(phi, dtype=complex)
    r = _as_cov(r)
    if phi.shape != r.shape:
        raise DimensionMismatchError("gain matrix and covariance shapes differ")
    return float(np.trace(phi @ r).real)


def radar_sinr_of_beams(scene: Scene, geom: ArrayGeometry, beams, probe=None) -> float:
    """Self-consistent average radar SINR tr(Phi(R) R) of a beam set."""
    r = beams_to_covariance(beams, probe)
    return avg_radar_sinr(radar_gain_matrix(scene, r, geom), r)


def cu_sinr(channels: ChannelSet, beams, cancel_probe: bool = True, probe=None):
    """Per-user downlink SINR |h_k^H u_k|^2 / (1 + sum_{j!=k} |h_k^H u_j|^2 [+ |h_k^H v|^2]).

    The probing term enters user k's denominator only when the user does not
    cancel it (cancel_probe=False) and a probe beam is present.
    """
    h = channels.channels
    beams = [np.asarray(u, dtype=complex) for u in beams]
    if len(beams) != channels.k:
        raise DimensionMismatchError("one beam per user is required")
    if any(u.shape != (channels.n_tx,) for u in beams):
        raise DimensionMismatchError("beam length must equal n_tx")
    gains = np.abs(h.conj() @ np.column_stack(beams)) ** 2  # (K users) x (K beams)
    out = []
    for k in range(channels.k):
        interf = float(np.sum(gains[k])) - float(gains[k, k])
        if probe is not None and not cancel_probe:
            interf += float(np.abs(h[k].conj() @ np.asarray(probe, dtype=complex)) ** 2)
        out.append(float(gains[k, k]) / (1.0 + interf))
    return out


@dataclass
class BeamformingSolution:
    """Converged output of a beamforming solver.

    ``trace`` holds the per-outer-iteration average radar SINR, starting from
    the initialization, so its length is iterations + 1.
    """

    comm_beams: list
    rx_beam: np.ndarray
    radar_sinr: float
    cu_sinrs: list
    probe_beam: np.ndarray | None = None
    probe_power_fraction: float = 0.0
    iterations: int = 0
    trace: list = field(default_factory=list)

    @property
    def covariance(self) -> np.ndarray:
        return beams_to_covariance(self.comm_beams, self.probe_beam)

    @property
    def total_power(self) -> float:
        p = sum(float(np.linalg.norm(u) ** 2) for u in self.comm_beams)
        if self.probe_beam is not None:
            p += float(np.linalg.norm(self.probe_beam) ** 2)
        return p
