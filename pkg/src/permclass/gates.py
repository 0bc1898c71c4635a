"""Gate semantics: local matrices and gate-level definitions.

Local matrices use the gate's own qubit order with the first listed qubit as
the most significant bit, matching the global convention.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .core import Gate, GateKind

_S2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)

ONE_QUBIT = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    GateKind.Z: np.diag([1, -1]).astype(complex),
    GateKind.S: np.diag([1, 1j]),
    GateKind.SDG: np.diag([1, -1j]),
    GateKind.T: np.diag([1, _W]),
    GateKind.TDG: np.diag([1, np.conj(_W)]),
}


def _g(kind: GateKind, *qs: int) -> Gate:
    return Gate(kind, qs)


def _toffoli_6cx(a: int, b: int, c: int) -> list[Gate]:
    K = GateKind
    return [
        _g(K.H, c), _g(K.CX, b, c), _g(K.TDG, c), _g(K.CX, a, c), _g(K.T, c),
        _g(K.CX, b, c), _g(K.TDG, c), _g(K.CX, a, c), _g(K.T, b), _g(K.T, c),
        _g(K.H, c), _g(K.CX, a, b), _g(K.T, a), _g(K.TDG, b), _g(K.CX, a, b),
    ]


def _ry_quarter(q: int, sign: int) -> list[Gate]:
    # S H T^(+-1) H Sdg is a pi/4 y-rotation up to a phase that cancels in pairs.
    K = GateKind
    return [_g(K.SDG, q), _g(K.H, q), _g(K.T if sign > 0 else K.TDG, q), _g(K.H, q), _g(K.S, q)]


def _margolus(a: int, b: int, c: int) -> list[Gate]:
    K = GateKind
    return [
        *_ry_quarter(c, +1), _g(K.CX, b, c), *_ry_quarter(c, +1), _g(K.CX, a, c),
        *_ry_quarter(c, -1), _g(K.CX, b, c), *_ry_quarter(c, -1),
    ]


def _rccx(a: int, b: int, c: int) -> list[Gate]:
    K = GateKind
    return [
        _g(K.H, c), _g(K.T, c), _g(K.CX, b, c), _g(K.TDG, c), _g(K.CX, a, c),
        _g(K.T, c), _g(K.CX, b, c), _g(K.TDG, c), _g(K.H, c),
    ]


def _rc3x(a: int, b: int, c: int, d: int) -> list[Gate]:
    K = GateKind
    return [
        _g(K.H, d), _g(K.T, d), _g(K.CX, c, d), _g(K.TDG, d), _g(K.H, d),
        _g(K.CX, a, d), _g(K.T, d), _g(K.CX, b, d), _g(K.TDG, d), _g(K.CX, a, d),
        _g(K.T, d), _g(K.CX, b, d), _g(K.TDG, d), _g(K.H, d), _g(K.T, d),
        _g(K.CX, c, d), _g(K.TDG, d), _g(K.H, d),
    ]


def definition(gate: Gate) -> list[Gate] | None:
    """One-level decomposition into {H, S, Sdg, T, Tdg, CX}, or None for basis gates.

    ``mcx`` with three or more controls has no ancilla-free definition here.
    """
    K = GateKind
    q = gate.qubits
    if gate.kind is K.CCX or (gate.kind is K.MCX and len(q) == 3):
        return _toffoli_6cx(*q)
    if gate.kind is K.MCX and len(q) == 2:
        return [_g(K.CX, *q)]
    if gate.kind is K.CZ:
        return [_g(K.H, q[1]), _g(K.CX, *q), _g(K.H, q[1])]
    if gate.kind is K.MARGOLUS:
        return _margolus(*q)
    if gate.kind is K.RCCX:
        return _rccx(*q)
    if gate.kind is K.RC3X:
        body = _rc3x(*q)
        return [g.inverse() for g in reversed(body)] if gate.adjoint else body
    return None


def _embed_small(n: int, m: np.ndarray, qs: tuple[int, ...]) -> np.ndarray:
    k = len(qs)
    full = np.eye(2**n, dtype=complex).reshape((2,) * n + (2**n,))
    out = np.tensordot(m.reshape((2,) * (2 * k)), full, axes=(range(k, 2 * k), qs))
    return np.moveaxis(out, range(k), qs).reshape(2**n, 2**n)


def _mcx_matrix(k: int) -> np.ndarray:
    d = 2 ** (k + 1)
    perm = list(range(d))
    perm[d - 2], perm[d - 1] = d - 1, d - 2
    return np.eye(d, dtype=complex)[:, perm]


@lru_cache(maxsize=None)
def _relative_matrix(kind: GateKind, arity: int, adjoint: bool) -> np.ndarray:
    local = Gate(kind, tuple(range(arity)), adjoint)
    u = np.eye(2**arity, dtype=complex)
    for g in definition(local):
        u = _embed_small(arity, local_matrix(g), g.qubits) @ u
    u.setflags(write=False)
    return u


def local_matrix(gate: Gate) -> np.ndarray:
    """Matrix of ``gate`` on its own qubits, first qubit most significant."""
    K = GateKind
    if gate.kind in ONE_QUBIT:
        return ONE_QUBIT[gate.kind]
    if gate.kind is K.CX:
        return _mcx_matrix(1)
    if gate.kind is K.CZ:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if gate.kind in (K.CCX, K.MCX):
        return _mcx_matrix(len(gate.qubits) - 1)
    if gate.kind in (K.MARGOLUS, K.RCCX, K.RC3X):
        return _relative_matrix(gate.kind, len(gate.qubits), gate.adjoint)
    raise ValueError(f"{gate.name} has no unitary matrix")
