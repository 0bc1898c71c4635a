"""Dense unitaries of circuits and the matrix primitives behind class checks."""

from __future__ import annotations

import io

import numpy as np

from .core import Circuit, Gate, GateKind, Permutation
from .errors import BadDimension, ContainsReset, TooManyQubits
from .gates import local_matrix

UNITARY_QUBIT_CAP = 12
STATE_QUBIT_CAP = 14
ATOL = 1e-9

_FLIP_KINDS = (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX)


def _apply(tensor: np.ndarray, gate: Gate) -> np.ndarray:
    """Apply ``gate`` to the leading qubit axes of ``tensor``."""
    qs = gate.qubits
    if gate.kind in _FLIP_KINDS:
        # Controlled flips are index swaps; no matrix product needed.
        out = tensor.copy()
        sel = [slice(None)] * tensor.ndim
        for q in qs[:-1]:
            sel[q] = 1
        lo, hi = list(sel), list(sel)
        lo[qs[-1]], hi[qs[-1]] = 0, 1
        out[tuple(lo)], out[tuple(hi)] = tensor[tuple(hi)], tensor[tuple(lo)]
        return out
    k = len(qs)
    m = local_matrix(gate).reshape((2,) * (2 * k))
    out = np.tensordot(m, tensor, axes=(range(k, 2 * k), qs))
    return np.moveaxis(out, range(k), qs)


def _check_gates(c: Circuit, cap: int) -> None:
    if c.has_reset:
        raise ContainsReset("circuit contains reset; strip the trailing resets first")
    if c.num_qubits > cap:
        raise TooManyQubits(f"{c.num_qubits} qubits exceeds the cap of {cap}")


def unitary_of(c: Circuit, cap: int = UNITARY_QUBIT_CAP) -> np.ndarray:
    """Dense unitary; the first gate in the list is applied first."""
    _check_gates(c, cap)
    n = c.num_qubits
    t = np.eye(2**n, dtype=complex).reshape((2,) * n + (2**n,))
    for g in c.gates:
        t = _apply(t, g)
    return t.reshape(2**n, 2**n)


def apply_circuit(c: Circuit, state: np.ndarray, cap: int = STATE_QUBIT_CAP) -> np.ndarray:
    """Run a state vector through the circuit without forming the unitary."""
    _check_gates(c, cap)
    n = c.num_qubits
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**n,):
        raise BadDimension(f"state of shape {state.shape} on {n} qubits")
    t = state.reshape((2,) * n)
    for g in c.gates:
        t = _apply(t, g)
    return t.reshape(-1)


def permutation_matrix(p: Permutation) -> np.ndarray:
    m = np.zeros((p.size, p.size), dtype=complex)
    m[list(p.mapping), range(p.size)] = 1
    return m


def _blocks(U: np.ndarray, aux_dim: int) -> np.ndarray:
    d = U.shape[0]
    if U.ndim != 2 or U.shape[1] != d:
        raise BadDimension(f"expected a square matrix, got shape {U.shape}")
    if aux_dim < 1 or d % aux_dim:
        raise BadDimension(f"auxiliary dimension {aux_dim} does not divide {d}")
    n = d // aux_dim
    return U.reshape(n, aux_dim, n, aux_dim)


def project_clean(U: np.ndarray, aux_dim: int) -> np.ndarray:
    """``(I x <0|) U (I x |0>)``: rows and columns whose auxiliary index is 0."""
    return _blocks(U, aux_dim)[:, 0, :, 0].copy()


def project_aux(U: np.ndarray, aux_dim: int, bra: np.ndarray) -> np.ndarray:
    """``(I x <bra|) U (I x |0>)`` for an auxiliary vector ``bra`` (conjugated here)."""
    return np.einsum("a,iajb->ij", np.conj(bra), _blocks(U, aux_dim)[:, :, :, :1])


def strip_global_phase(A: np.ndarray) -> np.ndarray:
    """``conj(A[0, 0]) * A``; magnitudes are left untouched."""
    return np.conj(A[0, 0]) * A


def elementwise_abs(A: np.ndarray) -> np.ndarray:
    return np.abs(A)


def witness_state(U: np.ndarray, p: Permutation, b: int, c: int, aux_dim: int) -> np.ndarray:
    """Auxiliary vector ``(<pi(b)| x I) U |b, c>``."""
    blocks = _blocks(U, aux_dim)
    if blocks.shape[0] != p.size:
        raise BadDimension(f"permutation on {p.size} states vs main dimension {blocks.shape[0]}")
    if not (0 <= b < p.size and 0 <= c < aux_dim):
        raise BadDimension(f"basis pair ({b}, {c}) out of range")
    return blocks[p(b), :, b, c].copy()


def witness_states(U: np.ndarray, p: Permutation, aux_dim: int) -> np.ndarray:
    """All witnesses at once: ``out[b, c]`` is ``witness_state(U, p, b, c)``."""
    blocks = _blocks(U, aux_dim)
    if blocks.shape[0] != p.size:
        raise BadDimension(f"permutation on {p.size} states vs main dimension {blocks.shape[0]}")
    b = np.arange(p.size)
    return blocks[np.asarray(p.mapping), :, b, :].transpose(0, 2, 1)


def unitarity_deviation(U: np.ndarray) -> float:
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def max_deviation(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.max(np.abs(A - B))) if A.size else 0.0


def dump_matrix_csv(A: np.ndarray) -> str:
    """Row-major text dump; each line holds ``re,im`` pairs for one row."""
    buf = io.StringIO()
    for row in np.asarray(A):
        buf.write(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
        buf.write("\n")
    return buf.getvalue()


def load_matrix_csv(text: str) -> np.ndarray:
    rows = []
    for line in text.strip().splitlines():
        vals = [float(v) for v in line.split(",")]
        if len(vals) % 2:
            raise BadDimension("odd number of values in a matrix row")
        rows.append(np.array(vals[0::2]) + 1j * np.array(vals[1::2]))
    m = np.array(rows)
    if m.ndim != 2:
        raise BadDimension("ragged matrix dump")
    return m
