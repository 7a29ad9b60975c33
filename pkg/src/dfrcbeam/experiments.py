"""Experiment drivers: tradeoff sweeps, beampatterns, convergence traces, and
Monte Carlo channel sweeps, all emitting deterministic CSV/JSON row tables."""

import csv
import io
import json

import numpy as np

from .arrays import ChannelSet, steering_rx, steering_tx
from .config import ScenarioConfig, linear_to_db
from .errors import InfeasibleError, NoConvergenceError, NumericalBreakdownError
from .multi_user import MultiCuProblem, optimize_multi_cu
from .radar import beams_to_covariance
from .simulate import SimConfig, simulate_radar_sinr
from .single_user import SingleCuProblem, optimize_single_cu, optimize_single_cu_dedicated


class InfeasibleSweepError(RuntimeError):
    """Every point of a sweep was infeasible."""


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt(v) for v in value)
    return str(value)


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def write_rows(rows, path, fmt="csv"):
    """Serialize rows (list of dicts) deterministically; returns the text written."""
    rows = [{k: _plain(v) for k, v in row.items()} for row in rows]
    if fmt == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) if c in row else "" for c in columns])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def _solve_point(config, scene, geom, channels, gamma_linear, dedicated):
    k = channels.k
    if k == 1:
        problem = SingleCuProblem(
            scene, geom, channels.channels[0], gamma=gamma_linear, p0=config.p0,
            convergence_delta=config.convergence_delta, max_iters=config.max_iters,
        )
        return optimize_single_cu_dedicated(problem) if dedicated else optimize_single_cu(problem)
    problem = MultiCuProblem(
        scene, geom, channels, (gamma_linear,) * k, config.p0,
        convergence_delta=config.convergence_delta, max_iters=config.max_iters,
        dedicated=dedicated,
    )
    return optimize_multi_cu(problem)


def _modes(config):
    return ("non-dedicated", "dedicated") if config.mode == "both" else (config.mode,)


def timeshare_chord_db(gamma_db, bench_cu_db, bench_radar_db, edge_cu_db, edge_radar_db):
    """Straight-line time-sharing reference in the (CU dB, radar dB) plane.

    Below the radar benchmark's own CU SINR the chord is flat (pure radar
    mode already satisfies the constraint); beyond the feasibility edge it is
    undefined.
    """
    if gamma_db <= bench_cu_db:
        return bench_radar_db
    if gamma_db > edge_cu_db + 1e-12:
        return float("nan")
    t = (gamma_db - bench_cu_db) / (edge_cu_db - bench_cu_db)
    return bench_radar_db + t * (edge_radar_db - bench_radar_db)


def run_tradeoff(config: ScenarioConfig):
    """Sweep the SINR constraint; emit benchmark endpoints and the chord (K=1)."""
    scene = config.resolve_scene()
    geom = config.resolve_geometry()
    channels = config.explicit_channels()
    k = channels.k
    sim_cfg = SimConfig(**config.sim) if config.empirical else None

    rows = []
    bench = edge = None
    if k == 1:
        h = channels.channels[0]
        bench_sol = optimize_single_cu(SingleCuProblem(scene, geom, h, 0.0, config.p0,
                                                       config.convergence_delta, config.max_iters))
        gamma_edge = config.p0 * float(np.linalg.norm(h) ** 2)
        edge_sol = optimize_single_cu(SingleCuProblem(scene, geom, h, gamma_edge, config.p0,
                                                      config.convergence_delta, config.max_iters))
        bench = (linear_to_db(bench_sol.cu_sinrs[0]), linear_to_db(bench_sol.radar_sinr))
        edge = (linear_to_db(edge_sol.cu_sinrs[0]), linear_to_db(edge_sol.radar_sinr))
        for label, sol, cu_db in (("radar-benchmark", bench_sol, bench[0]),
                                  ("comm-benchmark", edge_sol, edge[0])):
            rows.append(_tradeoff_row(config, geom, label, "non-dedicated", cu_db, sol,
                                      scene, sim_cfg, bench, edge))

    feasible_points = 0
    for gamma_db in config.gamma_values_db():
        for mode in _modes(config):
            try:
                sol = _solve_point(config, scene, geom, channels, 10 ** (gamma_db / 10.0),
                                   dedicated=(mode == "dedicated"))
            except InfeasibleError:
                rows.append({
                    "scenario": config.name, "kind": "tradeoff", "point": "sweep",
                    "mode": mode, "k": k, "n_tx": geom.n_tx, "n_rx": geom.n_rx,
                    "gamma_db": float(gamma_db), "feasible": False,
                })
                continue
            feasible_points += 1
            rows.append(_tradeoff_row(config, geom, "sweep", mode, float(gamma_db), sol,
                                      scene, sim_cfg, bench, edge))
    if feasible_points == 0 and not any(r.get("point", "").endswith("benchmark") for r in rows):
        raise InfeasibleSweepError("no feasible sweep point")
    return rows


def _tradeoff_row(config, geom, point, mode, gamma_db, sol, scene, sim_cfg, bench, edge):
    row = {
        "scenario": config.name, "kind": "tradeoff", "point": point, "mode": mode,
        "k": len(sol.comm_beams), "n_tx": geom.n_tx, "n_rx": geom.n_rx,
        "gamma_db": gamma_db,
        "radar_sinr_db": linear_to_db(sol.radar_sinr),
        "radar_sinr_linear": sol.radar_sinr,
        "cu_sinrs_db": [linear_to_db(c) for c in sol.cu_sinrs],
        "tau": sol.probe_power_fraction,
        "iterations": sol.iterations,
        "feasible": True,
    }
    if bench is not None and edge is not None:
        row["timeshare_radar_sinr_db"] = timeshare_chord_db(gamma_db, *bench, *edge)
    if sim_cfg is not None:
        row["empirical_radar_sinr_db"] = linear_to_db(
            simulate_radar_sinr(scene, geom, sol, sim_cfg)
        )
    return row


def pattern_angles_deg(config):
    g = config.angle_grid_deg
    grid = []
    v = float(g["start"])
    while v <= float(g["stop"]) + 1e-9:
        grid.append(round(v, 9))
        v += float(g["step"])
    return grid


def transmit_pattern(geom, r, angle):
    a_t = steering_tx(geom, angle)
    return float(np.real(a_t @ r @ a_t.conj()))


def joint_pattern(geom, r, w, angle):
    a_r = steering_rx(geom, angle)
    return transmit_pattern(geom, r, angle) * float(np.abs(w.conj() @ a_r) ** 2)


def run_beampattern(config: ScenarioConfig, angle_grid_deg=None):
    """Emit normalized transmit-covariance and joint transmit-receive patterns."""
    scene = config.resolve_scene()
    angles = angle_grid_deg if angle_grid_deg is not None else pattern_angles_deg(config)
    variants = config.antenna_variants or (None,)
    rows = []
    solved_any = False
    for variant in variants:
        geom = config.resolve_geometry(variant["n"] if variant else None)
        channels = config.explicit_channels(variant)
        for gamma_db in config.gamma_values_db():
            for mode in _modes(config):
                try:
                    sol = _solve_point(config, scene, geom, channels, 10 ** (gamma_db / 10.0),
                                       dedicated=(mode == "dedicated"))
                except InfeasibleError:
                    continue
                solved_any = True
                r = beams_to_covariance(sol.comm_beams, sol.probe_beam)
                tx = np.array([transmit_pattern(geom, r, np.deg2rad(a)) for a in angles])
                joint = np.array([joint_pattern(geom, r, sol.rx_beam, np.deg2rad(a)) for a in angles])
                tx_db = linear_to_db(np.maximum(tx, 1e-300) / np.max(tx))
                joint_db = linear_to_db(np.maximum(joint, 1e-300) / np.max(joint))
                for a, tdb, jdb in zip(angles, tx_db, joint_db):
                    rows.append({
                        "scenario": config.name, "kind": "beampattern", "mode": mode,
                        "k": channels.k, "n_tx": geom.n_tx, "n_rx": geom.n_rx,
                        "gamma_db": float(gamma_db), "angle_deg": float(a),
                        "tx_pattern_db": float(tdb), "joint_pattern_db": float(jdb),
                    })
    if not solved_any:
        raise InfeasibleSweepError("no feasible beampattern point")
    return rows


def run_convergence(config: ScenarioConfig):
    """Per-outer-iteration radar SINR traces for the three solver paths."""
    scene = config.resolve_scene()
    geom = config.resolve_geometry()
    channels = config.explicit_channels()
    gamma_db = config.gamma_values_db()[0]
    gamma = 10 ** (gamma_db / 10.0)
    k_values = config.k_sweep or (channels.k,)
    rows = []
    converged_any = False

    def emit(algorithm, k, mode, sol, feasible):
        nonlocal converged_any
        if not feasible:
            rows.append({
                "scenario": config.name, "kind": "convergence", "algorithm": algorithm,
                "k": k, "mode": mode, "gamma_db": float(gamma_db), "feasible": False,
            })
            return
        converged_any = True
        for it, value in enumerate(sol.trace):
            rows.append({
                "scenario": config.name, "kind": "convergence", "algorithm": algorithm,
                "k": k, "mode": mode, "gamma_db": float(gamma_db), "feasible": True,
                "iteration": it, "radar_sinr_db": linear_to_db(value),
                "radar_sinr_linear": float(value),
            })

    h1 = channels.channels[0]
    sol1 = optimize_single_cu(SingleCuProblem(scene, geom, h1, gamma, config.p0,
                                              config.convergence_delta, config.max_iters))
    emit("single-closed-form", 1, "non-dedicated", sol1, True)
    for k in k_values:
        sub = ChannelSet(channels.channels[:k])
        for mode in _modes(config):
            dedicated = mode == "dedicated"
            algorithm = "multi-sdp-dedicated" if dedicated else "multi-sdp"
            try:
                sol = optimize_multi_cu(MultiCuProblem(
                    scene, geom, sub, (gamma,) * k, config.p0,
                    config.convergence_delta, config.max_iters, dedicated=dedicated))
            except InfeasibleError:
                emit(algorithm, k, mode, None, False)
                continue
            emit(algorithm, k, mode, sol, True)
    if not converged_any:
        raise InfeasibleSweepError("no feasible convergence run")
    return rows


def run_mc_sweep(config: ScenarioConfig, seed=None):
    """Rayleigh Monte Carlo over (gamma, K, N): dB-domain averages per mode plus
    paired dedicated-minus-non-dedicated gain statistics."""
    if config.rayleigh is None:
        raise InfeasibleSweepError("mc sweep requires rayleigh channels")
    scene = config.resolve_scene()
    trials = int(config.mc_trials)
    k_values = config.k_sweep or (int(config.rayleigh.get("k", 1)),)
    n_values = config.antenna_sweep or (None,)
    modes = _modes(config)
    rows = []
    any_feasible = False
    point_index = 0
    for n in n_values:
        geom = config.resolve_geometry(n)
        for k in k_values:
            for gamma_db in config.gamma_values_db():
                gamma = 10 ** (gamma_db / 10.0)
                per_mode = {m: [] for m in modes}
                infeasible = 0
                failures = 0
                for trial in range(trials):
                    channels = config.draw_channels(geom.n_tx, k, point_index, trial, seed=seed)
                    try:
                        sols = {
                            m: _solve_point(config, scene, geom, channels, gamma,
                                            dedicated=(m == "dedicated"))
                            for m in modes
                        }
                    except InfeasibleError:
                        infeasible += 1
                        continue
                    except (NumericalBreakdownError, NoConvergenceError):
                        failures += 1
                        continue
                    for m, sol in sols.items():
                        per_mode[m].append(sol.radar_sinr)
                base = {
                    "scenario": config.name, "kind": "mc", "k": k,
                    "n_tx": geom.n_tx, "n_rx": geom.n_rx, "gamma_db": float(gamma_db),
                    "trials": trials, "feasible_trials": trials - infeasible - failures,
                    "infeasible_trials": infeasible, "solver_failures": failures,
                }
                for m in modes:
                    vals = np.asarray(per_mode[m])
                    row = dict(base)
                    row["mode"] = m
                    if vals.size:
                        any_feasible = True
                        row["mean_radar_sinr_db"] = float(np.mean(linear_to_db(vals)))
                        row["mean_radar_sinr_linear"] = float(np.mean(vals))
                    rows.append(row)
                if len(modes) == 2 and per_mode["dedicated"]:
                    gain = linear_to_db(np.asarray(per_mode["dedicated"])) - linear_to_db(
                        np.asarray(per_mode["non-dedicated"])
                    )
                    row = dict(base)
                    row["mode"] = "gain"
                    row["mean_gain_db"] = float(np.mean(gain))
                    row["min_gain_db"] = float(np.min(gain))
                    row["max_gain_db"] = float(np.max(gain))
                    rows.append(row)
                point_index += 1
    if not any_feasible:
        raise InfeasibleSweepError("every Monte Carlo trial was infeasible")
    return rows
