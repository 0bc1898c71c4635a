"""Reference multi-controlled Toffoli circuits.

Qubit layout for the ``k``-control constructions: controls ``0..k-1``, target
``k``, auxiliary qubits from ``k + 1`` on. Conjugations ``V U V^dagger`` are
annotated with ``V:<id>``, ``U:<id>`` and ``Vdg:<id>`` blocks.
"""

from __future__ import annotations

import math

from .core import Block, Circuit, Edit, Gate, GateKind, QubitPartition, splice
from .errors import TooFewControls
from .gates import definition

K = GateKind


def _single(kind: GateKind, arity: int) -> Circuit:
    gate = Gate(kind, tuple(range(arity)))
    body = definition(gate)
    return Circuit(QubitPartition(arity), body, (Block(0, len(body), gate.kind_name),))


def toffoli_strict() -> Circuit:
    """Six-CNOT Toffoli over {H, T, Tdg, CX}; equals CCX exactly."""
    return _single(K.CCX, 3)


def relative_toffoli() -> Circuit:
    """Three-CNOT relative-phase Toffoli (the expanded Margolus gate)."""
    return _single(K.MARGOLUS, 3)


def rccx() -> Circuit:
    return _single(K.RCCX, 3)


def rc3x() -> Circuit:
    return _single(K.RC3X, 4)


def _need(k: int, minimum: int) -> None:
    if k < minimum:
        raise TooFewControls(f"construction needs at least {minimum} controls, got {k}")


def _ladder_gates(k: int) -> list[Gate]:
    a = [k + 1 + i for i in range(k - 2)]  # a[0] is a_1
    G = [Gate(K.CCX, (0, 1, a[0]))] + [Gate(K.CCX, (j + 1, a[j - 1], a[j])) for j in range(1, k - 2)]
    F = Gate(K.CCX, (k - 1, a[-1], k))
    down = G[:0:-1]  # G_{k-2} .. G_2
    up = G[1:]       # G_2 .. G_{k-2}
    half = [F, *down, G[0], *up]
    return half + half


def barenco_ladder(num_controls: int) -> Circuit:
    """Toffoli-only ladder with ``k - 2`` dirty auxiliary qubits, restored exactly.

    Each sweep in the second half conjugates the rest of the ladder, so every
    Toffoli ``p`` in ``[k-2, 2k-5]`` pairs with its mirror ``4k-8-p``.
    """
    k = num_controls
    _need(k, 3)
    gates = _ladder_gates(k)
    blocks = []
    for d in range(k - 2):
        p = k - 2 + d
        q = 4 * k - 8 - p
        blocks += [Block(p, p + 1, f"V:{d}"), Block(p + 1, q, f"U:{d}"), Block(q, q + 1, f"Vdg:{d}")]
    return Circuit(QubitPartition(k + 1, k - 2), gates, blocks)


def strict_vchain(num_controls: int) -> Circuit:
    """Compute-uncompute chain of strict Toffolis on ``k - 2`` clean auxiliary qubits."""
    k = num_controls
    _need(k, 3)
    a = [k + 1 + i for i in range(k - 2)]
    compute = [Gate(K.CCX, (0, 1, a[0]))] + [Gate(K.CCX, (j + 1, a[j - 1], a[j])) for j in range(1, k - 2)]
    gates = [*compute, Gate(K.CCX, (k - 1, a[-1], k)), *reversed(compute)]
    n = len(compute)
    blocks = []
    for d in range(n):
        blocks += [
            Block(d, d + 1, f"V:{d}"), Block(d + 1, 2 * n - d, f"U:{d}"), Block(2 * n - d, 2 * n - d + 1, f"Vdg:{d}"),
        ]
    return Circuit(QubitPartition(k + 1, k - 2), gates, blocks)


def _vchain_groups(k: int) -> tuple[int, list[tuple[int, ...]]]:
    """Number of ancillas and, per ancilla, the controls it collects."""
    n = k + 1
    m = math.ceil((n - 3) / 2)
    first = k - 1 - 2 * (m - 1)
    groups = [tuple(range(first))]
    nxt = first
    for _ in range(m - 1):
        groups.append((nxt, nxt + 1))
        nxt += 2
    return m, groups


def _relative_flip(controls: tuple[int, ...], target: int, adjoint: bool = False) -> Gate:
    if len(controls) == 2:
        return Gate(K.RCCX, (*controls, target))
    return Gate(K.RC3X, (*controls, target), adjoint)


def vchain(num_controls: int, dirty: bool) -> Circuit:
    """V-chain MCT from relative-phase Toffolis on ``ceil((n-3)/2)`` ancillas, ``n = k + 1``.

    The clean form computes the ancilla chain, fires the final Toffoli and
    uncomputes. The dirty form toggles the target twice around a recursive
    relative-phase chain so that any ancilla contents cancel.
    """
    k = num_controls
    _need(k, 4)
    m, groups = _vchain_groups(k)
    anc = [k + 1 + i for i in range(m)]
    ctl = [groups[0]] + [(*groups[j], anc[j - 1]) for j in range(1, m)]
    F = Gate(K.CCX, (k - 1, anc[-1], k))
    part = QubitPartition(k + 1, m)

    if not dirty:
        B = [_relative_flip(ctl[j], anc[j]) for j in range(m)]
        gates = [*B, F, *(b.inverse() for b in reversed(B))]
        blocks = []
        for j in range(m):
            blocks += [
                Block(j, j + 1, f"V:{j}"), Block(j + 1, 2 * m - j, f"U:{j}"),
                Block(2 * m - j, 2 * m - j + 1, f"Vdg:{j}"),
            ]
        return Circuit(part, gates, blocks)

    def chain(j: int) -> list[Gate]:
        g = _relative_flip(ctl[j], anc[j])
        if j == 0:
            return [g]
        inner = chain(j - 1)
        return [g, *inner, g, *(x.inverse() for x in reversed(inner))]

    S = chain(m - 1)
    L = len(S)
    gates = [F, *S, F, *(x.inverse() for x in reversed(S))]
    blocks = [Block(1, 1 + L, "V:0"), Block(1 + L, 2 + L, "U:0"), Block(2 + L, 2 + 2 * L, "Vdg:0")]
    return Circuit(part, gates, blocks)


def _relativize(gates: list[Gate]) -> list[Gate]:
    return [Gate(K.MARGOLUS, g.qubits) if g.kind is K.CCX else g for g in gates]


def cwe_mct(num_controls: int) -> Circuit:
    """Clean wasting-entangled MCT: one relative-phase ladder sweep up to the target."""
    k = num_controls
    _need(k, 3)
    ladder = _ladder_gates(k)
    return Circuit(QubitPartition(k + 1, k - 2), _relativize(ladder[k - 2:2 * k - 3]))


def dwe_mct(num_controls: int) -> Circuit:
    """Dirty wasting-entangled MCT: the ladder up to the second target toggle, relativized."""
    k = num_controls
    _need(k, 3)
    ladder = _ladder_gates(k)
    return Circuit(QubitPartition(k + 1, k - 2), _relativize(ladder[:2 * (k - 2) + 1]))


def expand(c: Circuit) -> Circuit:
    """Rewrite every gate that has a definition into {H, S, Sdg, T, Tdg, CX}.

    Each expanded multi-gate definition is tagged with the gate's name. ``mcx``
    with three or more controls is kept as is.
    """
    edits = []
    for i, g in enumerate(c.gates):
        body = definition(g)
        if body is not None:
            edits.append(Edit(i, i + 1, tuple(body), g.name))
    return splice(c, edits) if edits else c
