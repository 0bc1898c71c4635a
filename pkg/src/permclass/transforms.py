"""Class-preserving rewrite passes and the pipeline that tracks their guarantees.

Passes work on *units*: an outermost atomic block (any block that is not a
conjugation part) or a single unannotated gate. Whether a unit is controlled
by a qubit is decided from its local unitary: it must commute with Z on that
qubit, i.e. be block diagonal over the qubit's value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Callable, Sequence

import numpy as np

from .classifier import VerificationReport, classify_circuit
from .core import (
    LATTICE, Ancilla, Circuit, ClassLabel, Edit, Gate, GateKind, Permutation, QubitPartition,
    ResourceCounts, Waste, canonical_label, resource_counts, splice,
)
from .errors import ContainsReset, PipelineError, PreconditionError
from .gates import definition
from .unitary import ATOL, unitary_of

K = GateKind
_DIAGONAL_KINDS = frozenset({K.Z, K.S, K.SDG, K.T, K.TDG, K.CZ})
_GENPERM_KINDS = frozenset({K.X, K.CX, K.CCX, K.MCX, K.RCCX, K.RC3X, K.MARGOLUS}) | _DIAGONAL_KINDS


@dataclass
class PassResult:
    circuit: Circuit
    diff: list[dict] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


# --- unit analysis -----------------------------------------------------------


def units(c: Circuit) -> list[tuple[int, int]]:
    """Cover the gate list with outermost atomic blocks and single gates."""
    atomic = [b for b in c.blocks if b.conj_role is None]
    out, i = [], 0
    while i < len(c.gates):
        best = max((b for b in atomic if b.start == i), key=len, default=None)
        end = best.end if best else i + 1
        out.append((i, end))
        i = end
    return out


def _qubits(gates: Sequence[Gate]) -> tuple[int, ...]:
    return tuple(sorted({q for g in gates for q in g.qubits}))


@lru_cache(maxsize=4096)
def _local(gates: tuple[Gate, ...]) -> tuple[tuple[int, ...], np.ndarray]:
    qs = _qubits(gates)
    index = {q: i for i, q in enumerate(qs)}
    mini = Circuit(QubitPartition(len(qs), 0, cap=max(len(qs), 1)), tuple(g.remap(index) for g in gates))
    M = unitary_of(mini, cap=len(qs))
    M.setflags(write=False)
    return qs, M


def _split(M: np.ndarray, n: int, i: int) -> np.ndarray:
    lo, hi = 2**i, 2 ** (n - i - 1)
    return M.reshape(lo, 2, hi, lo, 2, hi)


def is_controlled_by(M: np.ndarray, qs: Sequence[int], q: int, atol: float = ATOL) -> bool:
    """True if ``M`` (on ``qs``) is block diagonal over the value of qubit ``q``."""
    if q not in qs:
        return True
    t = _split(M, len(qs), list(qs).index(q))
    return bool(np.abs(t[:, 0, :, :, 1, :]).max() <= atol and np.abs(t[:, 1, :, :, 0, :]).max() <= atol)


def restrict_zero(M: np.ndarray, qs: Sequence[int], zeros: Sequence[int]) -> tuple[tuple[int, ...], np.ndarray]:
    """Action of ``M`` when each qubit in ``zeros`` holds ``|0>``; returns remaining qubits."""
    qs = list(qs)
    for q in zeros:
        i = qs.index(q)
        t = _split(M, len(qs), i)[:, 0, :, :, 0, :]
        d = M.shape[0] // 2
        M = t.reshape(d, d)
        qs.pop(i)
    return tuple(qs), M


def _proportional_to_identity(M: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.abs(M - M[0, 0] * np.eye(M.shape[0])).max() <= atol and abs(abs(M[0, 0]) - 1) <= atol)


def _is_generalized_permutation(M: np.ndarray, atol: float = ATOL) -> bool:
    mags = np.abs(M)
    big = mags > 0.5
    return bool(
        np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1)
        and np.abs(mags[big] - 1).max() <= atol and mags[~big].max(initial=0.0) <= atol
    )


def _mcx_local(n: int, t: int) -> np.ndarray:
    """MCX on ``n`` qubits, target at position ``t``, all other positions controls."""
    d = 2**n
    perm = np.arange(d)
    ctrl = (d - 1) ^ (1 << (n - 1 - t))
    perm[ctrl], perm[d - 1] = d - 1, ctrl
    return np.eye(d)[:, perm]


def _as_mcx(gates: tuple[Gate, ...], atol: float = ATOL) -> Gate | None:
    """The MCX gate a unit implements exactly, if any."""
    if len(gates) == 1:
        g = gates[0]
        return g if g.kind in (K.CCX, K.MCX, K.CX, K.X) else None
    qs, M = _local(gates)
    for t in range(len(qs)):
        if np.abs(M - _mcx_local(len(qs), t)).max() <= atol:
            return Gate(K.MCX, tuple(q for i, q in enumerate(qs) if i != t) + (qs[t],))
    return None


def relative_variant(g: Gate) -> Gate | None:
    """Registered relative-phase replacement: two controls to MARGOLUS, three to RC3X."""
    if g.kind not in (K.CCX, K.MCX):
        return None
    if len(g.qubits) == 3:
        return Gate(K.MARGOLUS, g.qubits)
    if len(g.qubits) == 4:
        return Gate(K.RC3X, g.qubits)
    return None


def _shaped(rel: Gate, expanded: bool) -> tuple[tuple[Gate, ...], str | None]:
    """Replacement gates in the same granularity as the unit they replace."""
    if expanded:
        return tuple(definition(rel)), rel.name
    return (rel,), None


def _unit_is_genperm(gates: tuple[Gate, ...]) -> bool:
    if len(gates) == 1:
        return gates[0].kind in _GENPERM_KINDS
    return _is_generalized_permutation(_local(gates)[1])


def _fmt(gates: Sequence[Gate]) -> list[str]:
    return [str(g) for g in gates]


def _require_no_reset(c: Circuit, pass_id: str) -> None:
    if c.has_reset:
        raise ContainsReset(f"{pass_id} does not accept circuits with reset")


def _substitute(c: Circuit, subs: dict[tuple[int, int], tuple[tuple[Gate, ...], str | None]]) -> PassResult:
    edits = [Edit(s, e, gates, tag) for (s, e), (gates, tag) in sorted(subs.items())]
    diff = [
        {"op": "substitute", "start": e.start, "end": e.end,
         "before": _fmt(c.gates[e.start:e.end]), "after": _fmt(e.gates)}
        for e in edits
    ]
    return PassResult(splice(c, edits), diff)


def _remove(c: Circuit, ranges: Sequence[tuple[int, int]]) -> PassResult:
    ranges = sorted(ranges)
    diff = [{"op": "remove", "start": s, "end": e, "before": _fmt(c.gates[s:e])} for s, e in ranges]
    return PassResult(splice(c, [Edit(s, e) for s, e in ranges]), diff)


# --- the six passes ----------------------------------------------------------


def t1_boundary_relative(c: Circuit) -> PassResult:
    """Relativize permutation blocks in the generalized-permutation prefix and suffix runs.

    Prefix phases can be pushed to the circuit input and suffix phases to its
    output, where they only change the computational-basis phases.
    """
    _require_no_reset(c, "T1")
    us = units(c)
    gp = [_unit_is_genperm(c.gates[s:e]) for s, e in us]
    head = next((i for i, ok in enumerate(gp) if not ok), len(us))
    tail = next((i for i, ok in enumerate(reversed(gp)) if not ok), len(us))
    chosen = us[:head] + us[max(head, len(us) - tail):]
    subs = {}
    for s, e in chosen:
        gates = c.gates[s:e]
        m = _as_mcx(gates)
        rel = relative_variant(m) if m is not None else None
        if rel is not None:
            subs[(s, e)] = _shaped(rel, e - s > 1)
    if not subs:
        return PassResult(c, [], ["NoEligibleBlocks: no strict permutation block with a relative variant at the boundary"])
    return _substitute(c, subs)


def t2_conjugation_relative(c: Circuit) -> PassResult:
    """Relativize ``V`` and ``V^dagger`` in annotated conjugations ``V U V^dagger``.

    Eligible when every qubit of ``V`` is untouched by ``U`` or controls it, so
    the relative phases of the pair cancel; the unitary is unchanged.
    """
    _require_no_reset(c, "T2")
    subs, notes = {}, []
    for ident, V, U, Vdg in c.conjugation_triples():
        vg, ug, wg = c.gates[V.start:V.end], c.gates[U.start:U.end], c.gates[Vdg.start:Vdg.end]
        m = _as_mcx(vg)
        rel = relative_variant(m) if m is not None else None
        if rel is None:
            already = len(vg) == 1 and vg[0].kind in (K.RCCX, K.RC3X, K.MARGOLUS)
            notes.append(f"{'AlreadyRelative' if already else 'IneligibleTriple'}: {ident} "
                         f"(V is not a strict permutation block with a relative variant)")
            continue
        vq, vm = _local(vg)
        wq, wm = _local(wg)
        if vq != wq or np.abs(wm - vm.conj().T).max() > ATOL:
            notes.append(f"IneligibleTriple: {ident} (second block is not the inverse of V)")
            continue
        uq, um = _local(ug)
        if not all(is_controlled_by(um, uq, q) for q in vq):
            notes.append(f"IneligibleTriple: {ident} (V acts on a non-control qubit of U)")
            continue
        subs[(V.start, V.end)] = _shaped(rel, len(vg) > 1)
        subs[(Vdg.start, Vdg.end)] = _shaped(rel.inverse(), len(wg) > 1)
    if not subs:
        return PassResult(c, [], notes or ["NoEligibleBlocks: no conjugation triples annotated"])
    res = _substitute(c, subs)
    res.diagnostics = notes
    return res


def t3_wasting_elision(c: Circuit) -> PassResult:
    """Drop the trailing units whose main-register qubits are all controls."""
    _require_no_reset(c, "T3")
    part = c.partition
    removed = []
    for s, e in reversed(units(c)):
        qs, M = _local(c.gates[s:e])
        if not all(is_controlled_by(M, qs, q) for q in qs if not part.is_aux(q)):
            break
        removed.append((s, e))
    if not removed:
        return PassResult(c, [], ["NothingRemoved: last unit changes a main-register qubit"])
    return _remove(c, removed)


def _clean_sweep(c: Circuit, order: Sequence[tuple[int, int]], notes: list[str]) -> list[tuple[int, int]]:
    known = set(c.partition.aux_qubits)
    dead = []
    for s, e in order:
        qs, M = _local(c.gates[s:e])
        zeros = [q for q in qs if q in known and is_controlled_by(M, qs, q)]
        if zeros:
            _, U0 = restrict_zero(M, qs, zeros)
            if _proportional_to_identity(U0):
                dead.append((s, e))
                continue
            notes.append(f"Kept: unit [{s}, {e}) acts nontrivially with its zero controls at |0>")
        known -= {q for q in qs if not is_controlled_by(M, qs, q)}
    return dead


def t4_clean_control_simplify(c: Circuit, non_wasting: bool) -> PassResult:
    """Delete units that act trivially because a controlling auxiliary qubit is still ``|0>``.

    The forward sweep tracks auxiliary qubits known to be ``|0>`` from the
    start; with ``non_wasting`` a backward sweep does the same from the end,
    where every auxiliary qubit is known to be returned to ``|0>``.
    """
    _require_no_reset(c, "T4")
    notes: list[str] = []
    diff: list[dict] = []
    dead = _clean_sweep(c, units(c), notes)
    if dead:
        res = _remove(c, dead)
        c, diff = res.circuit, res.diff
    if non_wasting:
        dead = _clean_sweep(c, list(reversed(units(c))), notes)
        if dead:
            res = _remove(c, dead)
            c = res.circuit
            diff += [dict(d, sweep="backward") for d in res.diff]
    if not diff:
        notes.append("NothingRemoved: no unit is controlled by a known-zero auxiliary qubit")
    return PassResult(c, diff, notes)


def t5_tail_aux_removal(c: Circuit) -> PassResult:
    """Remove gates that touch only auxiliary qubits and have no later gate on their wires."""
    _require_no_reset(c, "T5")
    part = c.partition
    blocked: set[int] = set()
    removed = []
    for i in range(len(c.gates) - 1, -1, -1):
        qs = c.gates[i].qubits
        if all(part.is_aux(q) for q in qs) and not blocked.intersection(qs):
            removed.append((i, i + 1))
        else:
            blocked.update(qs)
    if not removed:
        return PassResult(c, [], ["NothingRemoved: no trailing auxiliary-only gates"])
    return _remove(c, removed)


def t6_reset_finalize(c: Circuit) -> PassResult:
    """Append a reset on every auxiliary qubit that is not already reset at the end."""
    _, already = c.split_resets()
    missing = [q for q in c.partition.aux_qubits if q not in already]
    if not missing:
        return PassResult(c, [], ["AlreadyReset"] if already or not c.partition.num_aux else ["NoAuxiliary"])
    c2 = c.append(*(Gate(K.RESET, (q,)) for q in missing))
    return PassResult(c2, [{"op": "append", "start": len(c.gates), "end": len(c.gates),
                            "after": _fmt(c2.gates[len(c.gates):])}])


# --- guarantees and registry ---------------------------------------------------

_CWS_TOP = ClassLabel.parse("R-C-WS")


def _g_t1(lab: ClassLabel) -> ClassLabel:
    if lab.waste is Waste.NON_WASTING:
        return ClassLabel.parse("R-C-NW")
    return canonical_label(lab.phase, lab.ancilla, Waste.WASTING_ENTANGLED)


def _g_t3(lab: ClassLabel) -> ClassLabel:
    return canonical_label(lab.phase, lab.ancilla, Waste.WASTING_ENTANGLED)


def _g_t4(lab: ClassLabel) -> ClassLabel:
    return canonical_label(lab.phase, Ancilla.CLEAN, lab.waste)


def _g_clean_ws(waste: Waste) -> Callable[[ClassLabel], ClassLabel]:
    def g(lab: ClassLabel) -> ClassLabel:
        if not LATTICE.leq(lab, _CWS_TOP):
            raise PreconditionError(f"needs a clean wasting-separable input, got {lab.name}")
        return canonical_label(lab.phase, Ancilla.CLEAN, waste)
    return g


@dataclass(frozen=True)
class TransformPass:
    id: str
    short: str
    rewrite: Callable[[Circuit, ClassLabel], PassResult]
    guarantee: Callable[[ClassLabel], ClassLabel]

    def apply(self, c: Circuit, input_class: ClassLabel) -> tuple[PassResult, ClassLabel]:
        out_class = self.guarantee(input_class)
        return self.rewrite(c, input_class), out_class


PASSES: dict[str, TransformPass] = {
    p.short: p
    for p in (
        TransformPass("T1_boundary_relative", "t1", lambda c, _: t1_boundary_relative(c), _g_t1),
        TransformPass("T2_conjugation_relative", "t2", lambda c, _: t2_conjugation_relative(c), lambda lab: lab),
        TransformPass("T3_wasting_elision", "t3", lambda c, _: t3_wasting_elision(c), _g_t3),
        TransformPass(
            "T4_clean_control_simplify", "t4",
            lambda c, lab: t4_clean_control_simplify(c, lab.waste is Waste.NON_WASTING), _g_t4,
        ),
        TransformPass("T5_tail_aux_removal", "t5", lambda c, _: t5_tail_aux_removal(c),
                      _g_clean_ws(Waste.WASTING_SEPARABLE)),
        TransformPass("T6_reset_finalize", "t6", lambda c, _: t6_reset_finalize(c),
                      _g_clean_ws(Waste.NON_WASTING)),
    )
}


def get_pass(name: str) -> TransformPass:
    key = name.strip().lower()
    for p in PASSES.values():
        if key in (p.short, p.id.lower()):
            return p
    raise KeyError(f"unknown pass {name!r}; choose from {', '.join(PASSES)}")


# --- pipeline ----------------------------------------------------------------


def _expanded_counts(c: Circuit) -> ResourceCounts:
    from .zoo import expand

    return resource_counts(expand(c))


@dataclass
class StageRecord:
    index: int
    pass_id: str
    input_class: ClassLabel
    guaranteed_class: ClassLabel
    delta: dict
    expanded_delta: dict
    diff: list[dict]
    diagnostics: list[str]

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "pass": self.pass_id,
            "input_class": self.input_class.name,
            "guaranteed_class": self.guaranteed_class.name,
            "delta": self.delta,
            "expanded_delta": self.expanded_delta,
            "diff": self.diff,
            "diagnostics": self.diagnostics,
        }


@dataclass
class PipelineResult:
    circuit: Circuit
    input_class: ClassLabel
    stages: list[StageRecord]
    guaranteed_class: ClassLabel  # join of the stage guarantees
    final_stage_class: ClassLabel  # guarantee tracked through the last stage
    report: VerificationReport | None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def guarantee_holds(self) -> bool | None:
        if self.report is None:
            return None
        return self.report.is_member(self.guaranteed_class)

    def as_dict(self) -> dict:
        return {
            "input_class": self.input_class.name,
            "stages": [s.as_dict() for s in self.stages],
            "guaranteed_class": self.guaranteed_class.name,
            "final_stage_class": self.final_stage_class.name,
            "guarantee_holds": self.guarantee_holds,
            "report": self.report.as_dict() if self.report else None,
            "diagnostics": self.diagnostics,
        }


def run_pipeline(
    c: Circuit,
    passes: Sequence[str | TransformPass],
    perm: Permutation | None = None,
    *,
    assume: ClassLabel | str | None = None,
    atol: float = ATOL,
) -> PipelineResult:
    """Apply passes in order while tracking the guaranteed class.

    The starting class is ``assume`` if given, otherwise the minimal class of
    ``c`` for ``perm``. With a permutation the output is reclassified, so the
    result records whether the guarantee actually holds.
    """
    plist = [p if isinstance(p, TransformPass) else get_pass(p) for p in passes]
    notes: list[str] = []
    if assume is not None:
        current = ClassLabel.parse(assume) if isinstance(assume, str) else assume
    elif perm is not None:
        minimal = classify_circuit(c, perm, atol=atol).minimal_classes
        if not minimal:
            raise PipelineError(0, plist[0].id if plist else "-", "input implements the permutation in no class")
        if len(minimal) > 1:
            notes.append("several minimal classes; tracking " + minimal[0].name)
        current = minimal[0]
    else:
        raise ValueError("need either a permutation or an assumed input class")

    start = current
    stages: list[StageRecord] = []
    for i, p in enumerate(plist):
        before, before_x = resource_counts(c), _expanded_counts(c)
        try:
            res, out_class = p.apply(c, current)
        except (PreconditionError, ContainsReset) as exc:
            raise PipelineError(i, p.id, str(exc)) from exc
        stages.append(StageRecord(
            i, p.id, current, out_class,
            resource_counts(res.circuit).delta(before),
            _expanded_counts(res.circuit).delta(before_x),
            res.diff, res.diagnostics,
        ))
        c, current = res.circuit, out_class

    joined = reduce(LATTICE.join, [s.guaranteed_class for s in stages]) if stages else start
    report = classify_circuit(c, perm, atol=atol) if perm is not None else None
    return PipelineResult(c, start, stages, joined, current, report, notes)
