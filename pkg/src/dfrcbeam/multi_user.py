"""Sequential multi-user beamforming on top of the SDP engine.

Each outer iteration freezes the radar gain matrix at the previous beams,
solves the relaxed design (with or without a dedicated probing block), and
recovers rank-1 beams. The stop rule compares consecutive self-consistent
average radar SINRs.
"""

from dataclasses import dataclass, field

import numpy as np

from .arrays import ArrayGeometry, ChannelSet, Scene
from .errors import InfeasibleError, NoConvergenceError, NumericalBreakdownError, RankDeficiencyError
from .radar import (
    BeamformingSolution,
    beams_to_covariance,
    cu_sinr,
    radar_gain_matrix,
    radar_sinr_of_beams,
    receive_beam,
)
from .sdp import build_p33, build_p43, extract_rank1, rank_reduce, solve_sdp

SINR_RECHECK_RTOL = 1e-5


@dataclass(frozen=True)
class MultiCuProblem:
    scene: Scene
    geom: ArrayGeometry
    channels: ChannelSet
    gammas: tuple
    p0: float
    convergence_delta: float = 1e-3
    max_iters: int = 50
    dedicated: bool = False

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "gammas", gammas)
        if len(gammas) != self.channels.k:
            raise ValueError("one SINR target per user is required")
        if any(g <= 0 for g in gammas):
            raise ValueError("SINR targets must be positive")
        if self.channels.n_tx != self.geom.n_tx:
            raise ValueError("channel length must equal n_tx")
        if self.p0 <= 0:
            raise ValueError("p0 must be positive")

    def check_necessary_feasibility(self):
        """Cheap reject: no user may need more than full-power MRT ignoring others."""
        for g, h in zip(self.gammas, self.channels):
            if g > self.p0 * float(np.linalg.norm(h) ** 2) * (1 + 1e-12):
                raise InfeasibleError(
                    "a user's target exceeds its full-power maximum-ratio SINR"
                )


def _solution(problem, beams, probe, trace, iterations) -> BeamformingSolution:
    r = beams_to_covariance(beams, probe)
    x_ref = sum(beams) + (probe if probe is not None else 0.0)
    w = receive_beam(problem.scene, problem.geom, r, x_ref)
    tau = 0.0
    if probe is not None:
        tau = float(np.linalg.norm(probe) ** 2) / problem.p0
    return BeamformingSolution(
        comm_beams=list(beams),
        rx_beam=w,
        radar_sinr=trace[-1],
        cu_sinrs=cu_sinr(problem.channels, beams, cancel_probe=True, probe=probe),
        probe_beam=probe,
        probe_power_fraction=tau,
        iterations=iterations,
        trace=list(trace),
    )


def _merge_probe_single_user(blocks, instance):
    """Fold the probe block into the single user's block and re-purify.

    With one user the probe never helps: moving its power into the
    communication block keeps the objective and can only add slack to the
    SINR row, and the rank-reduction step then restores a rank-1 block. This
    mirrors the single-user no-probe result on the relaxed problem.
    """
    merged = [b.copy() for b in blocks]
    merged[0] = merged[0] + merged[-1]
    merged[-1] = np.zeros_like(merged[-1])
    return rank_reduce(merged, instance)


def _rescale_for_targets(problem, beams, probe):
    """Nudge beams up within the leftover power budget if a target is missed.

    Extraction is exact for exactly rank-1 blocks, so this only has to absorb
    tiny numerical violations.
    """
    beams = [u.copy() for u in beams]
    for _ in range(4):
        sinrs = cu_sinr(problem.channels, beams, cancel_probe=True, probe=probe)
        deficits = [
            (g / s, k)
            for k, (s, g) in enumerate(zip(sinrs, problem.gammas))
            if s < g * (1 - SINR_RECHECK_RTOL)
        ]
        if not deficits:
            return beams
        used = sum(float(np.linalg.norm(u) ** 2) for u in beams)
        if probe is not None:
            used += float(np.linalg.norm(probe) ** 2)
        slack = problem.p0 * (1 + 1e-12) - used
        ratio, k = max(deficits)
        bump = np.sqrt(ratio)
        extra = (bump**2 - 1.0) * float(np.linalg.norm(beams[k]) ** 2)
        if extra > slack + 1e-9 * problem.p0:
            raise RankDeficiencyError(
                "recovered beams violate a SINR target beyond the repairable budget"
            )
        beams[k] = beams[k] * bump
    sinrs = cu_sinr(problem.channels, beams, cancel_probe=True, probe=probe)
    if any(s < g * (1 - SINR_RECHECK_RTOL) for s, g in zip(sinrs, problem.gammas)):
        raise RankDeficiencyError("SINR recheck failed after rescaling")
    return beams


def optimize_multi_cu(problem: MultiCuProblem) -> BeamformingSolution:
    """Sequential optimization for the multi-user design (both signalling cases)."""
    problem.check_necessary_feasibility()
    scene, geom, channels = problem.scene, problem.geom, problem.channels
    k, n = channels.k, geom.n_tx
    streams = k + 1 if problem.dedicated else k
    amp = np.sqrt(problem.p0 / (streams * n))
    beams = [np.ones(n, dtype=complex) * amp for _ in range(k)]
    probe = np.ones(n, dtype=complex) * amp if problem.dedicated else None

    trace = [radar_sinr_of_beams(scene, geom, beams, probe)]
    for m in range(1, problem.max_iters + 1):
        phi0 = radar_gain_matrix(scene, beams_to_covariance(beams, probe), geom)
        if problem.dedicated:
            instance = build_p43(phi0, channels, problem.gammas, problem.p0)
        else:
            instance = build_p33(phi0, channels, problem.gammas, problem.p0)
        sol = solve_sdp(instance)
        if sol.status == "infeasible":
            raise InfeasibleError("SINR targets are jointly unreachable within the power budget")
        if sol.status != "optimal":
            raise NumericalBreakdownError(
                f"interior-point solve stalled (status {sol.status})"
            )
        blocks = sol.primal_blocks
        if problem.dedicated and k == 1:
            probe_trace = float(np.trace(blocks[-1]).real)
            if probe_trace > 1e-8 * problem.p0:
                blocks = _merge_probe_single_user(blocks, instance)
                sol.primal_blocks = blocks
        beams, probe = extract_rank1(sol, instance)
        beams = _rescale_for_targets(problem, beams, probe)
        trace.append(radar_sinr_of_beams(scene, geom, beams, probe))
        if abs(trace[-1] - trace[-2]) <= problem.convergence_delta:
            return _solution(problem, beams, probe, trace, m)
    raise NoConvergenceError(
        f"no convergence within {problem.max_iters} outer iterations",
        solution=_solution(problem, beams, probe, trace, problem.max_iters),
    )
