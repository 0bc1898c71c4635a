"""Exact Kronecker factorization ``U = V (x) W`` of unitaries.

The rearrangement maps ``V (x) W`` to the rank-one matrix ``vec(V) vec(W)^T``,
so separability reduces to a singular-value gap and the factors come from the
leading singular pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, NotSeparable, NotUnitary
from .unitary import ATOL, max_deviation, unitarity_deviation

RANK1_TOL = 1e-8


@dataclass(frozen=True)
class FactorResult:
    V: np.ndarray
    W: np.ndarray
    residual: float
    ratio: float  # sigma_2 / sigma_1 of the rearranged matrix


def rearrange(U: np.ndarray, nV: int, nW: int) -> np.ndarray:
    """``R[i*nV + j, k*nW + l] = U[i*nW + k, j*nW + l]``."""
    U = np.asarray(U)
    if U.shape != (nV * nW, nV * nW):
        raise BadDimension(f"matrix of shape {U.shape} cannot split as {nV} x {nW}")
    return U.reshape(nV, nW, nV, nW).transpose(0, 2, 1, 3).reshape(nV * nV, nW * nW)


def singular_ratio(U: np.ndarray, nV: int, nW: int) -> float:
    s = np.linalg.svd(rearrange(U, nV, nW), compute_uv=False)
    return float(s[1] / s[0]) if len(s) > 1 and s[0] > 0 else 0.0


def factor_unitary(
    U: np.ndarray,
    nV: int,
    nW: int,
    *,
    atol: float = ATOL,
    rank1_tol: float = RANK1_TOL,
) -> FactorResult:
    """Split a unitary into unitary factors ``V`` (dim ``nV``) and ``W`` (dim ``nW``).

    The scalar ambiguity between the factors is fixed by making the first
    entry of ``W`` with modulus above ``0.5 / sqrt(nW)`` real and positive.

    Raises
    ------
    NotUnitary
        If ``U`` fails the unitarity check at ``atol``.
    NotSeparable
        If the second singular value of the rearrangement exceeds
        ``rank1_tol`` relative to the first.
    """
    U = np.asarray(U, dtype=complex)
    R = rearrange(U, nV, nW)
    dev = unitarity_deviation(U)
    if dev > atol:
        raise NotUnitary(f"input deviates from unitarity by {dev:.3e}")
    u, s, vh = np.linalg.svd(R, full_matrices=False)
    ratio = float(s[1] / s[0]) if len(s) > 1 else 0.0
    if ratio > rank1_tol:
        raise NotSeparable(ratio)

    root = np.sqrt(s[0])
    V = (root * u[:, 0]).reshape(nV, nV)
    W = (root * vh[0]).reshape(nW, nW)
    # W W^dagger = a I for some a > 0; move sqrt(a) over to V.
    scale = np.sqrt(np.real(W[0] @ W[0].conj()))
    V, W = V * scale, W / scale
    flat = W.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 0.5 / np.sqrt(nW))]
    rot = np.conj(pivot) / abs(pivot)
    V, W = V / rot, W * rot

    residual = max_deviation(np.kron(V, W), U)
    if residual > atol or unitarity_deviation(V) > atol or unitarity_deviation(W) > atol:
        raise NotSeparable(ratio, f"rank-one fit leaves residual {residual:.3e}")
    return FactorResult(V=V, W=W, residual=residual, ratio=ratio)
