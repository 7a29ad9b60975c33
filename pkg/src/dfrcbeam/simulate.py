"""Symbol-level Monte Carlo oracle for the analytic SINR formulas.

Draws i.i.d. Gaussian symbols, interference/target phases, and receiver
noise, then measures empirical SINRs from the separated signal components
(the analytic quantities are ratios of ensemble powers, so components are
kept apart rather than re-estimated from the mixture).
"""

from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, ChannelSet, Scene, channel_matrix


@dataclass(frozen=True)
class SimConfig:
    n_symbols: int = 100_000
    seed: int = 0
    draw_interferer_phase: bool = True

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")


def _cn_samples(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _transmit_matrix(solution):
    cols = list(solution.comm_beams)
    if solution.probe_beam is not None:
        cols.append(solution.probe_beam)
    return np.column_stack(cols)


def simulate_radar_sinr(scene: Scene, geom: ArrayGeometry, solution, cfg: SimConfig) -> float:
    """Empirical radar SINR at the solution's receive beam.

    Per symbol: x = sum_k u_k s_k (+ v s0); the target, interference, and
    noise contributions to w^H y are formed separately and the ratio of
    average powers is returned.
    """
    rng = np.random.default_rng(cfg.seed)
    b = _transmit_matrix(solution)
    s = _cn_samples(rng, (b.shape[1], cfg.n_symbols))
    x = b @ s

    def amp(power):
        phase = rng.uniform(0.0, 2.0 * np.pi) if cfg.draw_interferer_phase else 0.0
        return np.sqrt(power) * np.exp(1j * phase)

    w = solution.rx_beam
    target = amp(scene.target_power) * (channel_matrix(geom, scene.target_angle) @ x)
    interference = np.zeros_like(target)
    for angle, power in scene.interferers:
        interference += amp(power) * (channel_matrix(geom, angle) @ x)
    noise = _cn_samples(rng, (geom.n_rx, cfg.n_symbols))
    sig = np.abs(w.conj() @ target) ** 2
    dist = np.abs(w.conj() @ (interference + noise)) ** 2
    return float(np.mean(sig) / np.mean(dist))


def simulate_cu_sinr(channels: ChannelSet, solution, cfg: SimConfig, cancel_probe: bool = True):
    """Empirical per-user SINR; the probe is subtracted exactly when cancelled."""
    rng = np.random.default_rng(cfg.seed)
    k = channels.k
    s = _cn_samples(rng, (k, cfg.n_symbols))
    s0 = _cn_samples(rng, cfg.n_symbols) if solution.probe_beam is not None else None
    noise = _cn_samples(rng, (k, cfg.n_symbols))
    beams = solution.comm_beams
    gains = channels.channels.conj() @ np.column_stack(beams)  # (K users) x (K beams)
    out = []
    for i in range(k):
        sig = gains[i, i] * s[i]
        interf = np.zeros(cfg.n_symbols, dtype=complex)
        for j in range(k):
            if j != i:
                interf += gains[i, j] * s[j]
        if s0 is not None and not cancel_probe:
            interf += (channels.channels[i].conj() @ solution.probe_beam) * s0
        out.append(float(np.mean(np.abs(sig) ** 2) / np.mean(np.abs(interf + noise[i]) ** 2)))
    return out
