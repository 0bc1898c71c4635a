"""Line-oriented circuit text format.

::

    qubits main=3 aux=1
    # comments start with '#'
    ccx 0 1 3
    mcx3 0 1 2 3
    rc3xdg 0 1 3 2
    block 0 1 V:0

Gate names are the lowercase kind names; ``mcx<k>`` has ``k`` controls and
``rc3xdg`` is the adjoint of ``rc3x``. ``block <start> <end> <tag>`` lines
annotate half-open gate ranges and may appear anywhere after the header.
"""

from __future__ import annotations

import re

from .core import Block, Circuit, Gate, GateKind, QubitPartition
from .errors import InvalidCircuit, ParseError

_HEADER = re.compile(r"^qubits\s+main=(\d+)\s+aux=(\d+)$")
_MCX = re.compile(r"^mcx(\d+)$")
_KINDS = {k.value: k for k in GateKind if k is not GateKind.MCX}


def _gate(name: str, qubits: tuple[int, ...]) -> Gate:
    m = _MCX.match(name)
    if m:
        k = int(m.group(1))
        if len(qubits) != k + 1:
            raise InvalidCircuit(f"{name} takes {k + 1} qubits, got {len(qubits)}")
        return Gate(GateKind.MCX, qubits)
    adjoint = name.endswith("dg") and name[:-2] in _KINDS and name not in _KINDS
    kind = _KINDS.get(name[:-2] if adjoint else name)
    if kind is None:
        raise InvalidCircuit(f"unknown gate {name!r}")
    return Gate(kind, qubits, adjoint)


def parse_circuit(text: str) -> Circuit:
    partition = None
    gates: list[Gate] = []
    blocks: list[Block] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if partition is None:
            m = _HEADER.match(" ".join(line.split()))
            if not m:
                raise ParseError("expected header 'qubits main=<m> aux=<a>'", lineno)
            try:
                partition = QubitPartition(int(m.group(1)), int(m.group(2)))
            except InvalidCircuit as exc:
                raise ParseError(str(exc), lineno) from exc
            continue
        words = line.split()
        try:
            if words[0] == "block":
                if len(words) != 4:
                    raise InvalidCircuit("block needs '<start> <end> <tag>'")
                blocks.append(Block(int(words[1]), int(words[2]), words[3]))
                continue
            qubits = tuple(int(w) for w in words[1:])
            g = _gate(words[0], qubits)
            if max(g.qubits) >= partition.total:
                raise InvalidCircuit(f"qubit {max(g.qubits)} out of range for {partition.total} qubits")
            gates.append(g)
        except ValueError as exc:
            # InvalidCircuit derives from ValueError, as do bad integer literals.
            raise ParseError(str(exc), lineno) from exc
    if partition is None:
        raise ParseError("missing header 'qubits main=<m> aux=<a>'")
    try:
        return Circuit(partition, tuple(gates), tuple(blocks))
    except InvalidCircuit as exc:
        raise ParseError(str(exc)) from exc


def format_circuit(c: Circuit) -> str:
    lines = [f"qubits main={c.partition.num_main} aux={c.partition.num_aux}"]
    lines += [str(g) for g in c.gates]
    lines += [f"block {b.start} {b.end} {b.tag}" for b in c.blocks]
    return "\n".join(lines) + "\n"
