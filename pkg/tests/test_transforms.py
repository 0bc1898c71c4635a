from __future__ import annotations

import numpy as np
import pytest

from permclass.classifier import classify_circuit
from permclass.core import Block, Circuit, ClassLabel, Gate, GateKind, Permutation, QubitPartition, resource_counts
from permclass.errors import PipelineError
from permclass.transforms import (
    PASSES, get_pass, is_controlled_by, restrict_zero, run_pipeline, t1_boundary_relative,
    t2_conjugation_relative, t3_wasting_elision, t4_clean_control_simplify, t5_tail_aux_removal,
    t6_reset_finalize, units,
)
from permclass.unitary import unitary_of, witness_states
from permclass import zoo

K = GateKind


def mct(k):
    return Permutation.mct(k + 1)


def minimal(c, k):
    return [x.name for x in classify_circuit(c, mct(k)).minimal_classes]


# --- helpers


def test_units_follow_outermost_atomic_blocks():
    x = zoo.expand(zoo.barenco_ladder(3))
    us = units(x)
    assert len(us) == 4 and all(e - s == 15 for s, e in us)


def test_control_detection_and_restriction():
    cx = np.eye(4)[:, [0, 1, 3, 2]]
    assert is_controlled_by(cx, (0, 1), 0)
    assert not is_controlled_by(cx, (0, 1), 1)
    assert is_controlled_by(cx, (0, 1), 7)
    qs, U0 = restrict_zero(cx, (0, 1), [0])
    assert qs == (1,) and np.allclose(U0, np.eye(2))


# --- T1


def test_t1_saves_three_cnots_per_toffoli():
    x = zoo.expand(zoo.barenco_ladder(5))
    res = t1_boundary_relative(x)
    assert len(res.diff) == 12
    saved = resource_counts(x).cnot_count - resource_counts(res.circuit).cnot_count
    assert saved == 3 * len(res.diff)


def test_t1_without_permutation_blocks_is_identity():
    c = Circuit(QubitPartition(2), (Gate(K.H, (0,)), Gate(K.H, (1,))))
    res = t1_boundary_relative(c)
    assert res.circuit == c and res.diagnostics[0].startswith("NoEligibleBlocks")


def test_t1_only_touches_boundary_runs():
    gates = (Gate(K.CCX, (0, 1, 2)), Gate(K.H, (0,)), Gate(K.CCX, (0, 1, 2)), Gate(K.H, (0,)), Gate(K.CCX, (1, 0, 2)))
    res = t1_boundary_relative(Circuit(QubitPartition(3), gates))
    assert [g.kind for g in res.circuit.gates] == [K.MARGOLUS, K.H, K.CCX, K.H, K.MARGOLUS]


def test_t1_vchain_clean_becomes_relative_clean():
    res = t1_boundary_relative(zoo.vchain(5, False))
    assert minimal(res.circuit, 5) == ["R-C-NW"]


def test_t1_relativizes_three_control_blocks():
    c = Circuit(QubitPartition(4), (Gate(K.MCX, (0, 1, 2, 3)),))
    res = t1_boundary_relative(c)
    assert res.circuit.gates[0].kind is K.RC3X
    assert minimal(res.circuit, 3) == ["R-D-NW"]


# --- T2


def test_t2_preserves_unitary_on_ladder():
    c = zoo.barenco_ladder(5)
    res = t2_conjugation_relative(c)
    assert sum(g.kind is K.MARGOLUS for g in res.circuit.gates) == 6
    assert np.max(np.abs(unitary_of(res.circuit) - unitary_of(c))) < 1e-9
    assert minimal(res.circuit, 5) == ["S-D-NW"]


def test_t2_on_expanded_blocks():
    c = zoo.expand(zoo.strict_vchain(4))
    res = t2_conjugation_relative(c)
    assert np.max(np.abs(unitary_of(res.circuit) - unitary_of(c))) < 1e-9
    assert resource_counts(res.circuit).cnot_count == resource_counts(c).cnot_count - 12


def _triple(u_gate):
    gates = (Gate(K.CCX, (0, 1, 2)), u_gate, Gate(K.CCX, (0, 1, 2)))
    return Circuit(QubitPartition(4), gates, (Block(0, 1, "V:a"), Block(1, 2, "U:a"), Block(2, 3, "Vdg:a")))


def test_t2_skips_when_v_targets_a_non_control():
    res = t2_conjugation_relative(_triple(Gate(K.H, (2,))))
    assert res.circuit.gates[0].kind is K.CCX
    assert res.diagnostics[0].startswith("IneligibleTriple")


def test_t2_accepts_control_and_ignored_qubits():
    res = t2_conjugation_relative(_triple(Gate(K.CX, (2, 3))))
    assert res.circuit.gates[0].kind is K.MARGOLUS and res.circuit.gates[2].kind is K.MARGOLUS


def test_t2_rejects_mismatched_inverse():
    gates = (Gate(K.CCX, (0, 1, 2)), Gate(K.CX, (2, 3)), Gate(K.CCX, (1, 2, 0)))
    c = Circuit(QubitPartition(4), gates, (Block(0, 1, "V:a"), Block(1, 2, "U:a"), Block(2, 3, "Vdg:a")))
    res = t2_conjugation_relative(c)
    assert res.circuit == c and "inverse" in res.diagnostics[0]


def test_t2_keeps_rc3x_adjoint_pairing():
    gates = (Gate(K.MCX, (0, 1, 2, 3)), Gate(K.CX, (3, 4)), Gate(K.MCX, (0, 1, 2, 3)))
    c = Circuit(QubitPartition(5), gates, (Block(0, 1, "V:a"), Block(1, 2, "U:a"), Block(2, 3, "Vdg:a")))
    res = t2_conjugation_relative(c)
    assert [g.name for g in res.circuit.gates] == ["rc3x", "cx", "rc3xdg"]
    assert np.max(np.abs(unitary_of(res.circuit) - unitary_of(c))) < 1e-9


# --- T3


def test_t3_ladder_to_dirty_entangled():
    res = t3_wasting_elision(zoo.barenco_ladder(5))
    assert len(res.circuit) == 7
    assert minimal(res.circuit, 5) == ["D-WE"]


def test_t3_stops_at_main_target():
    c = Circuit(QubitPartition(3), (Gate(K.CCX, (0, 1, 2)),))
    res = t3_wasting_elision(c)
    assert res.circuit == c and not res.diff


# --- T4


def test_t4_clean_ladder_drops_five_toffolis():
    res = t4_clean_control_simplify(zoo.barenco_ladder(5), non_wasting=True)
    assert len(res.circuit) == 7
    assert minimal(res.circuit, 5) == ["S-C-NW"]


def test_t4_forward_only_keeps_trailing_gates():
    res = t4_clean_control_simplify(zoo.barenco_ladder(5), non_wasting=False)
    assert len(res.circuit) == 9


def test_t4_deletes_aux_controlled_x():
    c = Circuit(QubitPartition(1, 1), (Gate(K.CX, (1, 0)), Gate(K.X, (0,))))
    res = t4_clean_control_simplify(c, non_wasting=False)
    assert [g.kind for g in res.circuit.gates] == [K.X]


def test_t4_dirty_misuse_breaks_dirty_membership():
    out = t4_clean_control_simplify(zoo.barenco_ladder(5), non_wasting=True).circuit
    report = classify_circuit(out, mct(5))
    assert report.is_member("S-C-NW") and not report.is_member("S-D-NW")


# --- T5 and T6


def test_t5_fragment_saves_two_t_gates():
    frag = zoo.expand(zoo.strict_vchain(4))
    res = t5_tail_aux_removal(frag)
    assert resource_counts(frag).t_count - resource_counts(res.circuit).t_count == 2
    assert minimal(res.circuit, 4) == ["S-C-WS"]
    # the main-register action is unchanged on the clean subspace
    w0 = witness_states(unitary_of(frag), mct(4), 4)[:, 0]
    w1 = witness_states(unitary_of(res.circuit), mct(4), 4)[:, 0]
    assert np.allclose(np.linalg.norm(w0, axis=1), np.linalg.norm(w1, axis=1))


def test_t5_no_trailing_aux_gates():
    c = zoo.barenco_ladder(3)
    assert t5_tail_aux_removal(c).circuit == c


def test_t6_idempotent():
    c = zoo.strict_vchain(4)
    once = t6_reset_finalize(c).circuit
    twice = t6_reset_finalize(once).circuit
    assert once == twice and len(once) == len(c) + 2


# --- pipeline


def test_pipeline_reproduces_cwe_and_dwe():
    lad = zoo.barenco_ladder(5)
    clean = run_pipeline(lad, ["t4", "t3", "t1"], mct(5), assume="S-C-NW")
    assert clean.circuit.gates == zoo.cwe_mct(5).gates
    assert clean.guaranteed_class.name == "C-WE" and clean.guarantee_holds
    dirty = run_pipeline(lad, ["t3", "t1"], mct(5))
    assert dirty.circuit.gates == zoo.dwe_mct(5).gates
    assert dirty.guaranteed_class.name == "D-WE" and dirty.guarantee_holds


def test_empty_pipeline_is_identity():
    c = zoo.barenco_ladder(3)
    res = run_pipeline(c, [], mct(3))
    assert res.circuit == c and res.guaranteed_class.name == "S-D-NW" and not res.stages


def test_pipeline_join_and_tracking():
    frag = zoo.expand(zoo.strict_vchain(4))
    res = run_pipeline(frag, ["t5", "t6"], mct(4))
    assert res.guaranteed_class.name == "S-C-WS"
    assert res.final_stage_class.name == "S-C-NW"
    assert res.report.is_member("S-C-NW")
    assert res.stages[0].expanded_delta["t_count"] == -2


def test_pipeline_aborts_with_stage_index():
    with pytest.raises(PipelineError) as info:
        run_pipeline(zoo.barenco_ladder(4), ["t3", "t5"], mct(4))
    assert info.value.stage == 1 and info.value.pass_id == "T5_tail_aux_removal"


def test_pipeline_needs_a_starting_class():
    with pytest.raises(ValueError):
        run_pipeline(zoo.barenco_ladder(3), ["t1"])
    res = run_pipeline(zoo.barenco_ladder(3), ["t1"], assume=ClassLabel.parse("S-D-NW"))
    assert res.report is None and res.guarantee_holds is None


def test_pass_lookup():
    assert get_pass("T3_wasting_elision") is PASSES["t3"]
    with pytest.raises(KeyError):
        get_pass("t9")


REMOVAL = ["t3", "t4", "t5"]
TALLIES = ("gate_count", "cnot_count", "t_count", "h_count", "depth")


@pytest.mark.parametrize("name", REMOVAL)
def test_removal_passes_never_increase_resources(name):
    for c in (zoo.barenco_ladder(4), zoo.expand(zoo.strict_vchain(4)), zoo.expand(zoo.vchain(5, False))):
        p = PASSES[name]
        out = p.rewrite(c, ClassLabel.parse("S-C-NW")).circuit
        before, after = resource_counts(c).as_dict(), resource_counts(out).as_dict()
        assert all(after[t] <= before[t] for t in TALLIES)


@pytest.mark.parametrize("name", ["t1", "t2"])
def test_substitution_passes_never_increase_resources_as_written(name):
    for c in (zoo.barenco_ladder(4), zoo.strict_vchain(4), zoo.vchain(5, False)):
        out = PASSES[name].rewrite(c, ClassLabel.parse("S-C-NW")).circuit
        before, after = resource_counts(c).as_dict(), resource_counts(out).as_dict()
        assert all(after[t] <= before[t] for t in TALLIES)


@pytest.mark.parametrize("name", ["t1", "t2"])
def test_substitution_passes_cut_expanded_cnot_and_t(name):
    # The Ry-based relative Toffoli trades CNOTs and T gates for extra
    # single-qubit Cliffords, so only these two tallies drop after expansion.
    for c in (zoo.barenco_ladder(4), zoo.strict_vchain(4), zoo.vchain(5, False)):
        out = PASSES[name].rewrite(c, ClassLabel.parse("S-C-NW")).circuit
        before, after = resource_counts(zoo.expand(c)), resource_counts(zoo.expand(out))
        assert after.cnot_count <= before.cnot_count and after.t_count <= before.t_count
