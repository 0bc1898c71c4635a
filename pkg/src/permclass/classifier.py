"""Membership checks for all ten classes and minimal-class reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import (
    ALL_LABELS, LATTICE, Ancilla, Circuit, ClassLabel, Permutation, Phase, Waste,
    canonical_label,
)
from .errors import DimensionMismatch, InvalidCircuit, NotSeparable, NotUnitary
from .kron import RANK1_TOL, FactorResult, factor_unitary
from .unitary import (
    ATOL, elementwise_abs, permutation_matrix, project_aux, project_clean,
    strip_global_phase, unitarity_deviation, unitary_of, witness_states,
)

S, R = Phase.STRICT, Phase.RELATIVE
C, D = Ancilla.CLEAN, Ancilla.DIRTY
NW, WS, WE = Waste.NON_WASTING, Waste.WASTING_SEPARABLE, Waste.WASTING_ENTANGLED


@dataclass(frozen=True)
class Verdict:
    member: bool
    deviation: float | None
    witness: dict | None = None
    note: str | None = None

    def as_dict(self) -> dict:
        out = {"member": self.member, "deviation": self.deviation}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    per_class: dict[ClassLabel, Verdict]
    unitarity_deviation: float
    atol: float = ATOL
    rank1_tol: float = RANK1_TOL
    diagnostics: list[str] = field(default_factory=list)

    @property
    def members(self) -> frozenset[ClassLabel]:
        return frozenset(k for k, v in self.per_class.items() if v.member)

    @property
    def minimal_classes(self) -> list[ClassLabel]:
        return LATTICE.minimal(self.members)

    def is_member(self, label: ClassLabel | str) -> bool:
        if isinstance(label, str):
            label = ClassLabel.parse(label)
        return self.per_class[label].member

    def as_dict(self) -> dict:
        return {
            "classes": {k.name: v.as_dict() for k, v in self.per_class.items()},
            "minimal": [k.name for k in self.minimal_classes],
            "unitarity_deviation": self.unitarity_deviation,
            "atol": self.atol,
            "rank1_tol": self.rank1_tol,
            "diagnostics": list(self.diagnostics),
        }


def _worst_entry(diff: np.ndarray) -> tuple[float, dict]:
    idx = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[idx]), {"entry": [int(i) for i in idx]}


class _Checks:
    """Shared intermediate quantities for one ``(U, pi, aux_dim)`` triple."""

    def __init__(self, U, p: Permutation, aux_dim: int, atol: float, rank1_tol: float):
        U = np.asarray(U, dtype=complex)
        n = p.size
        if U.ndim != 2 or U.shape != (n * aux_dim, n * aux_dim):
            raise DimensionMismatch(
                f"unitary of shape {U.shape} vs permutation size {n} with auxiliary dimension {aux_dim}"
            )
        self.unitarity_deviation = unitarity_deviation(U)
        if self.unitarity_deviation > atol:
            raise NotUnitary(f"input deviates from unitarity by {self.unitarity_deviation:.3e}")
        self.U, self.p, self.aux_dim = U, p, aux_dim
        self.atol, self.rank1_tol = atol, rank1_tol
        self.P = permutation_matrix(p)
        self.I = np.eye(n)

    # -- shared pieces

    @cached_property
    def clean(self) -> np.ndarray:
        return project_clean(self.U, self.aux_dim)

    @cached_property
    def witnesses(self) -> np.ndarray:
        return witness_states(self.U, self.p, self.aux_dim)

    @cached_property
    def factor(self) -> FactorResult | NotSeparable:
        if self.aux_dim == 1:
            return FactorResult(V=self.U, W=np.ones((1, 1), dtype=complex), residual=0.0, ratio=0.0)
        try:
            return factor_unitary(self.U, self.p.size, self.aux_dim, atol=self.atol, rank1_tol=self.rank1_tol)
        except NotSeparable as exc:
            return exc

    def _eq(self, A: np.ndarray, B: np.ndarray) -> Verdict:
        dev, wit = _worst_entry(np.abs(A - B))
        return Verdict(dev <= self.atol, dev, wit)

    def _factored(self):
        f = self.factor
        if isinstance(f, NotSeparable):
            return None, Verdict(False, None, {"sigma_ratio": f.ratio}, "no Kronecker factorization")
        return f, None

    def _norms(self, w: np.ndarray) -> Verdict:
        # w has shape (b, c, aux); compare squared norms with 1.
        dev = np.abs(np.sum(np.abs(w) ** 2, axis=-1) - 1)
        b, c = np.unravel_index(int(np.argmax(dev)), dev.shape)
        worst = float(dev[b, c])
        return Verdict(worst <= self.atol, worst, {"b": int(b), "c": int(c)})

    # -- one method per canonical class

    def s_c_nw(self) -> Verdict:
        return self._eq(strip_global_phase(self.clean @ self.P.T), self.I)

    def r_c_nw(self) -> Verdict:
        return self._eq(elementwise_abs(self.clean) @ self.P.T, self.I)

    def s_d_nw(self) -> Verdict:
        # U (P^T x I) just reorders the main part of the column index.
        n, a = self.p.size, self.aux_dim
        inv = np.asarray(self.p.inverse().mapping)
        A = self.U.reshape(n * a, n, a)[:, inv, :].reshape(n * a, n * a)
        return self._eq(strip_global_phase(A), np.eye(n * a))

    def r_d_nw(self) -> Verdict:
        f, fail = self._factored()
        if fail:
            return fail
        v1 = self._eq(elementwise_abs(f.V) @ self.P.T, self.I)
        v2 = self._eq(strip_global_phase(f.W), np.eye(self.aux_dim))
        worst = v1 if v1.deviation >= v2.deviation else v2
        return Verdict(v1.member and v2.member, worst.deviation, worst.witness)

    def c_we(self) -> Verdict:
        return self._norms(self.witnesses[:, :1, :])

    def d_we(self) -> Verdict:
        return self._norms(self.witnesses)

    def s_c_ws(self) -> Verdict:
        phi = self.witnesses[:, 0, :]
        overlaps = phi.conj() @ phi[0]
        dev = np.abs(overlaps - 1)
        b = int(np.argmax(dev))
        norm_dev = abs(float(np.vdot(phi[0], phi[0]).real) - 1)
        worst = max(float(dev[b]), norm_dev)
        return Verdict(worst <= self.atol, worst, {"b": b})

    def r_c_ws(self) -> Verdict:
        psi = self.witnesses[0, 0]
        M = project_aux(self.U, self.aux_dim, psi)
        return self._eq(elementwise_abs(M), self.P)

    def s_d_ws(self) -> Verdict:
        f, fail = self._factored()
        if fail:
            return fail
        return self._eq(strip_global_phase(f.V @ self.P.T), self.I)

    def r_d_ws(self) -> Verdict:
        f, fail = self._factored()
        if fail:
            return fail
        return self._eq(elementwise_abs(f.V) @ self.P.T, self.I)


_DISPATCH = {
    canonical_label(S, C, NW): _Checks.s_c_nw,
    canonical_label(R, C, NW): _Checks.r_c_nw,
    canonical_label(S, D, NW): _Checks.s_d_nw,
    canonical_label(R, D, NW): _Checks.r_d_nw,
    canonical_label(R, C, WE): _Checks.c_we,
    canonical_label(R, D, WE): _Checks.d_we,
    canonical_label(S, C, WS): _Checks.s_c_ws,
    canonical_label(R, C, WS): _Checks.r_c_ws,
    canonical_label(S, D, WS): _Checks.s_d_ws,
    canonical_label(R, D, WS): _Checks.r_d_ws,
}


def verify(
    label: ClassLabel | str,
    U: np.ndarray,
    p: Permutation,
    aux_dim: int,
    *,
    atol: float = ATOL,
    rank1_tol: float = RANK1_TOL,
) -> Verdict:
    """Check whether ``U`` implements ``p`` within one class."""
    if isinstance(label, str):
        label = ClassLabel.parse(label)
    label = canonical_label(label.phase, label.ancilla, label.waste)
    return _DISPATCH[label](_Checks(U, p, aux_dim, atol, rank1_tol))


def classify_all(
    U: np.ndarray,
    p: Permutation,
    aux_dim: int,
    *,
    atol: float = ATOL,
    rank1_tol: float = RANK1_TOL,
) -> VerificationReport:
    checks = _Checks(U, p, aux_dim, atol, rank1_tol)
    per_class = {lab: _DISPATCH[lab](checks) for lab in ALL_LABELS}
    report = VerificationReport(per_class, checks.unitarity_deviation, atol, rank1_tol)
    if not LATTICE.is_upward_closed(report.members):
        missing = LATTICE.upward_closure(report.members) - report.members
        report.diagnostics.append(
            "NonMonotone: members imply " + ", ".join(sorted(m.name for m in missing))
        )
    return report


def classify_circuit(
    c: Circuit,
    p: Permutation,
    *,
    atol: float = ATOL,
    rank1_tol: float = RANK1_TOL,
) -> VerificationReport:
    """Classify a circuit, honouring a trailing reset of every auxiliary qubit.

    A reset suffix turns a clean wasting-separable prefix into a clean
    non-wasting implementation (strict or relative as the prefix). Resets
    discard dirty auxiliary input, so the dirty non-wasting classes are
    reported as non-members; the wasting classes follow the prefix.
    """
    if p.num_qubits != c.partition.num_main:
        raise DimensionMismatch(
            f"permutation acts on {p.num_qubits} qubits, circuit has {c.partition.num_main} main qubits"
        )
    if not c.has_reset:
        return classify_all(unitary_of(c), p, c.partition.aux_dim, atol=atol, rank1_tol=rank1_tol)

    prefix, reset = c.split_resets()
    if set(reset) != set(c.partition.aux_qubits):
        raise InvalidCircuit("trailing resets must cover every auxiliary qubit")
    base = classify_all(unitary_of(prefix), p, prefix.partition.aux_dim, atol=atol, rank1_tol=rank1_tol)
    per_class = dict(base.per_class)
    for phase in (S, R):
        ws = base.per_class[canonical_label(phase, C, WS)]
        per_class[canonical_label(phase, C, NW)] = Verdict(
            ws.member, ws.deviation, ws.witness, "reset after clean wasting-separable prefix"
        )
        per_class[canonical_label(phase, D, NW)] = Verdict(
            False, None, None, "reset discards the dirty auxiliary input"
        )
    report = VerificationReport(per_class, base.unitarity_deviation, atol, rank1_tol, list(base.diagnostics))
    if not base.per_class[canonical_label(R, C, WS)].member:
        report.diagnostics.append(
            "NonSeparableWaste: prefix leaves the auxiliary system entangled or input-dependent; "
            "reset does not restore a non-wasting class"
        )
    return report
