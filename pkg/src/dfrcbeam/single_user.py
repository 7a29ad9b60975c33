"""Closed-form single-user transmit design and its sequential refinement loop.

With a single user the inner problem (maximize u^H Phi0 u subject to
|h^H u|^2 >= gamma and ||u||^2 <= p0) has a closed-form optimum built from the
dominant eigenvector g of Phi0:

* constraint inactive (gamma <= p0 |h^H g_hat|^2): full power on g_hat;
* constraint active (p0 ||h||^2 >= gamma > p0 |h^H g_hat|^2): split the power
  between the channel direction h_hat (just enough for the constraint) and the
  in-plane direction orthogonal to it, phase-aligned with g's components;
* gamma > p0 ||h||^2: infeasible even with maximum ratio transmission.
"""

from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry, ChannelSet, Scene
from .errors import InfeasibleError, NoConvergenceError
from .linalg import dominant_eigpair
from .radar import (
    BeamformingSolution,
    beams_to_covariance,
    cu_sinr,
    radar_gain_matrix,
    radar_sinr_of_beams,
    receive_beam,
)

FEASIBILITY_RTOL = 1e-12


@dataclass(frozen=True)
class SingleCuProblem:
    scene: Scene
    geom: ArrayGeometry
    h: np.ndarray = field(repr=False)
    gamma: float = 0.0
    p0: float = 1.0
    convergence_delta: float = 1e-3
    max_iters: int = 50

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.shape != (self.geom.n_tx,):
            raise ValueError("channel length must equal n_tx")
        object.__setattr__(self, "h", h)
        if self.gamma < 0 or self.p0 <= 0:
            raise ValueError("gamma must be >= 0 and p0 > 0")

    @property
    def max_feasible_gamma(self) -> float:
        return self.p0 * float(np.linalg.norm(self.h) ** 2)

    def check_feasible(self):
        if self.gamma > self.max_feasible_gamma * (1 + FEASIBILITY_RTOL):
            raise InfeasibleError(
                f"gamma={self.gamma:.6g} exceeds p0*||h||^2={self.max_feasible_gamma:.6g}"
            )


def closed_form_beam(phi0: np.ndarray, h: np.ndarray, gamma: float, p0: float) -> np.ndarray:
    """Optimal transmit beam for a fixed gain matrix phi0 (see module docstring)."""
    h = np.asarray(h, dtype=complex)
    h_norm_sq = float(np.linalg.norm(h) ** 2)
    if gamma > p0 * h_norm_sq * (1 + FEASIBILITY_RTOL):
        raise InfeasibleError("SINR target unreachable even with maximum ratio transmission")
    _, g_hat = dominant_eigpair(phi0)
    # Regime test first: it guards the g_perp construction against h parallel to g.
    if gamma <= p0 * abs(h.conj() @ g_hat) ** 2:
        return np.sqrt(p0) * g_hat
    h_hat = h / np.sqrt(h_norm_sq)
    alpha_g = h_hat.conj() @ g_hat
    g_perp = g_hat - alpha_g * h_hat
    beta_g = np.linalg.norm(g_perp)
    g_perp_hat = g_perp / beta_g
    alpha = np.sqrt(gamma / h_norm_sq) * alpha_g / abs(alpha_g)
    beta = np.sqrt(max(p0 - gamma / h_norm_sq, 0.0)) * beta_g / abs(beta_g)
    return alpha * h_hat + beta * g_perp_hat


def _finish(problem, u, trace, iterations) -> BeamformingSolution:
    r = beams_to_covariance([u])
    w = receive_beam(problem.scene, problem.geom, r, u)
    channels = ChannelSet(problem.h[None, :])
    return BeamformingSolution(
        comm_beams=[u],
        rx_beam=w,
        radar_sinr=trace[-1],
        cu_sinrs=cu_sinr(channels, [u]),
        probe_beam=None,
        probe_power_fraction=0.0,
        iterations=iterations,
        trace=list(trace),
    )


def optimize_single_cu(problem: SingleCuProblem) -> BeamformingSolution:
    """Sequential optimization: refresh Phi from the last beam, re-solve in closed form.

    Stops when the average radar SINR moves by at most convergence_delta
    between consecutive outer iterations.
    """
    problem.check_feasible()
    scene, geom = problem.scene, problem.geom
    u = np.ones(geom.n_tx, dtype=complex) * np.sqrt(problem.p0 / geom.n_tx)
    trace = [radar_sinr_of_beams(scene, geom, [u])]
    for m in range(1, problem.max_iters + 1):
        phi0 = radar_gain_matrix(scene, beams_to_covariance([u]), geom)
        u = closed_form_beam(phi0, problem.h, problem.gamma, problem.p0)
        trace.append(radar_sinr_of_beams(scene, geom, [u]))
        if abs(trace[-1] - trace[-2]) <= problem.convergence_delta:
            return _finish(problem, u, trace, m)
    raise NoConvergenceError(
        f"no convergence within {problem.max_iters} iterations",
        solution=_finish(problem, u, trace, problem.max_iters),
    )


def optimize_single_cu_dedicated(problem: SingleCuProblem) -> BeamformingSolution:
    """Single-user design allowing a dedicated probing beam.

    Splitting any power fraction into a probing beam can only shrink what the
    communication beam may carry, and the combined optimum coincides with the
    probe-free one, so the optimal probe is zero. Exposed as its own entry
    point so the equivalence is directly testable.
    """
    solution = optimize_single_cu(problem)
    solution.probe_beam = None
    solution.probe_power_fraction = 0.0
    return solution
