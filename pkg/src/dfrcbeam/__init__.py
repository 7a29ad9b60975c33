"""Joint transmit/receive beamforming for a dual-function radar-communication BS.

The library covers the full pipeline: array geometry and steering vectors,
interference-plus-noise covariances and MVDR receive beamforming, closed-form
single-user transmit design, semidefinite-relaxation based multi-user design
with rank-1 recovery, a symbol-level Monte Carlo oracle, and experiment
drivers that emit CSV/JSON results.
"""

from .arrays import ArrayGeometry, ChannelSet, Scene, channel_matrix, steering_rx, steering_tx
from .errors import (
    DegenerateSteeringError,
    DimensionMismatchError,
    InfeasibleError,
    NoConvergenceError,
    NotPositiveDefiniteError,
    NumericalBreakdownError,
    RankDeficiencyError,
)
from .linalg import dominant_eigpair, eig_hermitian, solve_hpd
from .radar import (
    BeamformingSolution,
    TransmitCovariance,
    avg_radar_sinr,
    cu_sinr,
    interference_covariance,
    mvdr_receiver,
    radar_gain_matrix,
    radar_sinr_of_beams,
)
from .sdp import SdpInstance, SdpSolution, build_p33, build_p43, extract_rank1, solve_sdp
from .simulate import SimConfig, simulate_cu_sinr, simulate_radar_sinr
from .single_user import SingleCuProblem, closed_form_beam, optimize_single_cu, optimize_single_cu_dedicated
from .multi_user import MultiCuProblem, optimize_multi_cu

__all__ = [
    "ArrayGeometry",
    "Scene",
    "ChannelSet",
    "steering_tx",
    "steering_rx",
    "channel_matrix",
    "solve_hpd",
    "dominant_eigpair",
    "eig_hermitian",
    "TransmitCovariance",
    "BeamformingSolution",
    "interference_covariance",
    "radar_gain_matrix",
    "mvdr_receiver",
    "avg_radar_sinr",
    "cu_sinr",
    "radar_sinr_of_beams",
    "SingleCuProblem",
    "closed_form_beam",
    "optimize_single_cu",
    "optimize_single_cu_dedicated",
    "SdpInstance",
    "SdpSolution",
    "build_p33",
    "build_p43",
    "solve_sdp",
    "extract_rank1",
    "MultiCuProblem",
    "optimize_multi_cu",
    "SimConfig",
    "simulate_radar_sinr",
    "simulate_cu_sinr",
    "DimensionMismatchError",
    "NotPositiveDefiniteError",
    "DegenerateSteeringError",
    "InfeasibleError",
    "NoConvergenceError",
    "NumericalBreakdownError",
    "RankDeficiencyError",
]

__version__ = "0.1.0"
