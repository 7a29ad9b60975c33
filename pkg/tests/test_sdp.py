import io

import numpy as np
import pytest

from conftest import P0, random_hermitian, reference_scene
from dfrcbeam import ArrayGeometry, ChannelSet, closed_form_beam, dominant_eigpair
from dfrcbeam.errors import InfeasibleError
from dfrcbeam.radar import beams_to_covariance, radar_gain_matrix
from dfrcbeam.sdp import (
    GE,
    LE,
    SdpConstraint,
    SdpInstance,
    build_p33,
    build_p43,
    dump_instance,
    eig_ratio,
    embed_hermitian,
    extract_rank1,
    rank_reduce,
    solve_sdp,
    unembed_symmetric,
)


def _rank1_phi(rng, n, scale=10.0):
    return random_hermitian(rng, n, psd=True, rank=1) * scale


def _channels(rng, k, n):
    return ChannelSet((rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))) / np.sqrt(2))


def test_build_p33_row_counts_and_shapes():
    rng = np.random.default_rng(0)
    phi0 = _rank1_phi(rng, 6)
    one = build_p33(phi0, _channels(rng, 1, 6), [10.0], P0)
    assert one.n_blocks == 1 and one.n_constraints == 2
    two = build_p33(phi0, _channels(rng, 2, 6), [10.0, 5.0], P0)
    assert two.n_blocks == 2 and two.n_constraints == 3
    assert two.constraints[0].sense == GE and two.constraints[2].sense == LE


def test_build_p33_objective_round_trip():
    rng = np.random.default_rng(1)
    phi0 = _rank1_phi(rng, 5)
    ch = _channels(rng, 3, 5)
    inst = build_p33(phi0, ch, [2.0, 3.0, 4.0], P0)
    beams = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(3)]
    blocks = [np.outer(u, u.conj()) for u in beams]
    want = sum(np.real(u.conj() @ phi0 @ u) for u in beams)
    assert inst.objective_value(blocks) == pytest.approx(want, rel=1e-12)


def test_build_p43_probe_block_placement():
    rng = np.random.default_rng(2)
    phi0 = _rank1_phi(rng, 4)
    ch = _channels(rng, 2, 4)
    inst = build_p43(phi0, ch, [2.0, 2.0], P0)
    assert inst.n_blocks == 3
    assert inst.labels["probe"] == 2
    for m, con in enumerate(inst.constraints):
        if con.sense == GE:
            assert con.blocks[2] is None  # probe never enters SINR rows
        else:
            assert np.allclose(con.blocks[2], np.eye(4))


def test_p43_with_zero_probe_matches_p33():
    rng = np.random.default_rng(3)
    phi0 = _rank1_phi(rng, 5)
    ch = _channels(rng, 2, 5)
    p33 = build_p33(phi0, ch, [3.0, 3.0], P0)
    p43 = build_p43(phi0, ch, [3.0, 3.0], P0)
    beams = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(2)]
    blocks = [np.outer(u, u.conj()) for u in beams]
    zero = np.zeros((5, 5), dtype=complex)
    assert p43.objective_value(blocks + [zero]) == pytest.approx(p33.objective_value(blocks))
    for m in range(p33.n_constraints):
        assert p43.row_value(m, blocks + [zero]) == pytest.approx(p33.row_value(m, blocks))


def test_zero_channel_rejected_at_build():
    rng = np.random.default_rng(4)
    phi0 = _rank1_phi(rng, 4)
    ch = ChannelSet(np.zeros((1, 4), dtype=complex))
    with pytest.raises(InfeasibleError):
        build_p33(phi0, ch, [1.0], P0)


def test_power_only_instance_hits_eigenvalue_bound():
    rng = np.random.default_rng(5)
    phi0 = random_hermitian(rng, 6, psd=True)  # general PSD is fine here
    inst = SdpInstance(
        block_dims=(6,),
        objective=(phi0,),
        constraints=(SdpConstraint((np.eye(6, dtype=complex),), LE, P0),),
        labels={"comm": [0], "probe": None, "p0": P0},
    )
    sol = solve_sdp(inst)
    lam1, g_hat = dominant_eigpair(phi0)
    assert sol.status == "optimal"
    assert sol.primal_objective == pytest.approx(P0 * lam1, rel=1e-7)
    u = extract_rank1(sol, inst)[0][0]
    assert abs(g_hat.conj() @ u) ** 2 == pytest.approx(np.linalg.norm(u) ** 2, rel=1e-6)


def test_equality_row_instance():
    rng = np.random.default_rng(15)
    phi0 = random_hermitian(rng, 5, psd=True)
    inst = SdpInstance(
        block_dims=(5,),
        objective=(phi0,),
        constraints=(SdpConstraint((np.eye(5, dtype=complex),), "==", P0),),
        labels={"comm": [0], "probe": None, "p0": P0},
    )
    sol = solve_sdp(inst)
    assert sol.status == "optimal"
    assert sol.primal_objective == pytest.approx(P0 * np.max(np.linalg.eigvalsh(phi0)), rel=1e-7)
    assert np.trace(sol.primal_blocks[0]).real == pytest.approx(P0, rel=1e-9)


def test_k1_matches_closed_form():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n = int(rng.integers(4, 9))
        phi0 = _rank1_phi(rng, n, scale=float(rng.uniform(1, 50)))
        ch = _channels(rng, 1, n)
        h = ch.channels[0]
        _, g_hat = dominant_eigpair(phi0)
        lo = P0 * abs(h.conj() @ g_hat) ** 2
        hi = P0 * np.linalg.norm(h) ** 2
        gamma = float(rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo)))
        sol = solve_sdp(build_p33(phi0, ch, [gamma], P0))
        u = closed_form_beam(phi0, h, gamma, P0)
        want = float(np.real(u.conj() @ phi0 @ u))
        assert sol.status == "optimal"
        assert sol.primal_objective == pytest.approx(want, rel=1e-4)


def test_infeasible_single_user_detected():
    rng = np.random.default_rng(7)
    phi0 = _rank1_phi(rng, 6)
    ch = _channels(rng, 1, 6)
    gamma = 1.5 * P0 * np.linalg.norm(ch.channels[0]) ** 2
    sol = solve_sdp(build_p33(phi0, ch, [gamma], P0))
    assert sol.status == "infeasible"
    assert sol.improving_ray is not None
    # the reported multipliers form a valid certificate of the maximize-form:
    # lam/mu >= 0 with mu*P0 - sum(lam) < 0 along the ray
    lam, mu = sol.improving_ray[0], sol.improving_ray[1]
    assert lam >= -1e-12 and mu >= -1e-12
    assert mu * P0 - lam * gamma / gamma < 0 or lam > 0


def test_weak_duality_and_kkt_certificates():
    rng = np.random.default_rng(8)
    for _ in range(10):
        phi0 = _rank1_phi(rng, 6, scale=float(rng.uniform(1, 30)))
        ch = _channels(rng, 2, 6)
        inst = build_p43(phi0, ch, [4.0, 4.0], P0)
        sol = solve_sdp(inst)
        assert sol.status == "optimal"
        assert sol.primal_objective <= sol.dual_objective + 1e-7 * (1 + abs(sol.primal_objective))
        report = sol.kkt_residuals(inst)
        assert report["max_dual_slack_eig"] <= 1e-6
        assert report["rel_gap"] <= 1e-7
        assert report["complementarity"] <= 1e-6
        assert report["constraint_violation"] <= 1e-7
        # power-row dual dominates the top gain eigenvalue
        mu = sol.duals[inst.labels["power_row"]]
        assert mu >= np.max(np.linalg.eigvalsh(phi0)) - 1e-6 * (1 + mu)


def test_real_embedding_fidelity():
    rng = np.random.default_rng(9)
    phi0 = _rank1_phi(rng, 5)
    ch = _channels(rng, 2, 5)
    inst = build_p33(phi0, ch, [3.0, 3.0], P0)
    real_inst = SdpInstance(
        block_dims=tuple(2 * d for d in inst.block_dims),
        objective=tuple(embed_hermitian(b) for b in inst.objective),
        constraints=tuple(
            SdpConstraint(tuple(None if c is None else embed_hermitian(c) for c in con.blocks),
                          con.sense, 2.0 * con.rhs)
            for con in inst.constraints
        ),
        labels={},
    )
    a = solve_sdp(inst)
    b = solve_sdp(real_inst)
    assert a.status == b.status == "optimal"
    assert b.primal_objective == pytest.approx(2.0 * a.primal_objective, rel=1e-8)


def test_embedding_round_trip():
    rng = np.random.default_rng(10)
    h = random_hermitian(rng, 5)
    y = embed_hermitian(h)
    assert np.allclose(y, y.T)
    assert np.allclose(unembed_symmetric(y), h)
    assert np.trace(y) == pytest.approx(2 * np.trace(h).real)


def test_extract_rank1_exact_blocks():
    rng = np.random.default_rng(11)
    phi0 = _rank1_phi(rng, 5)
    ch = _channels(rng, 2, 5)
    inst = build_p43(phi0, ch, [3.0, 3.0], P0)
    beams = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(2)]
    probe = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    blocks = [np.outer(u, u.conj()) for u in beams + [probe]]
    sol = solve_sdp(inst)
    sol.primal_blocks = blocks
    got_beams, got_probe = extract_rank1(sol, inst)
    for u, v in zip(beams, got_beams):
        assert abs(np.linalg.norm(v) ** 2 - np.linalg.norm(u) ** 2) <= 1e-10 * np.linalg.norm(u) ** 2
        assert abs(abs(u.conj() @ v) - np.linalg.norm(u) * np.linalg.norm(v)) <= 1e-8


def test_extracted_probe_aligns_with_dominant_eigenvector():
    # Loose single-user constraint: the optimal face lets power flow to the
    # probe block, which must then align with the top eigenvector of the gain.
    rng = np.random.default_rng(12)
    phi0 = _rank1_phi(rng, 6)
    ch = _channels(rng, 1, 6)
    h = ch.channels[0]
    gamma = 0.1 * P0 * abs(h.conj() @ (dominant_eigpair(phi0)[1])) ** 2
    inst = build_p43(phi0, ch, [gamma], P0)
    sol = solve_sdp(inst)
    assert sol.status == "optimal"
    beams, probe = extract_rank1(sol, inst)
    if probe is not None:
        _, g_hat = dominant_eigpair(phi0)
        assert abs(g_hat.conj() @ probe) / np.linalg.norm(probe) >= 1 - 1e-6
    # plug-back: rank-1 vectors reproduce the SDP objective
    got = sum(np.real(u.conj() @ phi0 @ u) for u in beams)
    if probe is not None:
        got += float(np.real(probe.conj() @ phi0 @ probe))
    assert got == pytest.approx(sol.primal_objective, rel=1e-4)


def test_rank_reduce_restores_rank_one_on_degenerate_face():
    # With an identity gain every full-power covariance is optimal; the
    # interior-point center is full-rank and the reduction step must bring it
    # back to the separable rank bound while preserving all row values.
    rng = np.random.default_rng(13)
    ch = _channels(rng, 1, 4)
    inst = build_p33(np.eye(4, dtype=complex), ch, [1.0], P0)
    sol = solve_sdp(inst)
    assert sol.status == "optimal"
    before = [b.copy() for b in sol.primal_blocks]
    rows_before = [inst.row_value(m, before) for m in range(inst.n_constraints)]
    obj_before = inst.objective_value(before)
    reduced = rank_reduce(before, inst)
    assert eig_ratio(reduced[0]) <= 1e-8
    assert inst.objective_value(reduced) == pytest.approx(obj_before, rel=1e-8)
    for m, want in enumerate(rows_before):
        assert inst.row_value(m, reduced) == pytest.approx(want, rel=1e-7, abs=1e-7)


def test_dump_instance_lists_everything():
    rng = np.random.default_rng(14)
    phi0 = _rank1_phi(rng, 3)
    ch = _channels(rng, 1, 3)
    inst = build_p33(phi0, ch, [2.0], P0)
    buf = io.StringIO()
    text = dump_instance(inst, buf)
    assert buf.getvalue() == text
    assert "objective block 0" in text
    assert "constraint 1: sense <=" in text
