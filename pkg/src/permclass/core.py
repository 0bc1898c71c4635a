"""Circuit IR, permutation targets, class labels and resource accounting.

Layout convention used everywhere: main-system qubits occupy indices
``[0, num_main)`` and auxiliary qubits ``[num_main, num_main + num_aux)``.
Qubit 0 is the most significant bit of a basis index, so a basis index
splits as ``main_index * aux_dim + aux_index``.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Iterator, Sequence

from .errors import ContainsReset, InvalidCircuit

DEFAULT_QUBIT_CAP = 14


@dataclass(frozen=True)
class QubitPartition:
    num_main: int
    num_aux: int = 0
    cap: int = DEFAULT_QUBIT_CAP

    def __post_init__(self):
        if self.num_main < 1:
            raise InvalidCircuit("need at least one main qubit")
        if self.num_aux < 0:
            raise InvalidCircuit("negative auxiliary count")
        if self.total > self.cap:
            raise InvalidCircuit(f"{self.total} qubits exceeds the cap of {self.cap}")

    @property
    def total(self) -> int:
        return self.num_main + self.num_aux

    @property
    def main_qubits(self) -> range:
        return range(self.num_main)

    @property
    def aux_qubits(self) -> range:
        return range(self.num_main, self.total)

    @property
    def main_dim(self) -> int:
        return 2**self.num_main

    @property
    def aux_dim(self) -> int:
        return 2**self.num_aux

    def is_aux(self, q: int) -> bool:
        return q >= self.num_main


class GateKind(enum.Enum):
    X = "x"
    H = "h"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CX = "cx"
    CZ = "cz"
    CCX = "ccx"
    RCCX = "rccx"
    RC3X = "rc3x"
    MARGOLUS = "margolus"
    MCX = "mcx"
    RESET = "reset"


_ARITY = {
    GateKind.X: 1, GateKind.H: 1, GateKind.Z: 1, GateKind.S: 1, GateKind.SDG: 1,
    GateKind.T: 1, GateKind.TDG: 1, GateKind.RESET: 1,
    GateKind.CX: 2, GateKind.CZ: 2,
    GateKind.CCX: 3, GateKind.RCCX: 3, GateKind.MARGOLUS: 3,
    GateKind.RC3X: 4,
}

PERMUTATION_KINDS = frozenset({GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX})
RELATIVE_KINDS = frozenset({GateKind.RCCX, GateKind.RC3X, GateKind.MARGOLUS})
# Gates that keep basis states on their control wires (everything but the last qubit).
CONTROLLED_X_KINDS = (PERMUTATION_KINDS | RELATIVE_KINDS) - {GateKind.X}

_INVERSE_KIND = {
    GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
    GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T,
}
# RC3X is the only gate kind here whose inverse is a different matrix and has no
# separate kind; it carries an ``adjoint`` flag instead.
_ADJOINTABLE = frozenset({GateKind.RC3X})


@dataclass(frozen=True)
class Gate:
    """One gate application. Controls come first, the target last."""

    kind: GateKind
    qubits: tuple[int, ...]
    adjoint: bool = False

    def __post_init__(self):
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if self.kind is GateKind.MCX:
            if len(qs) < 2:
                raise InvalidCircuit("mcx needs at least one control")
        elif len(qs) != _ARITY[self.kind]:
            raise InvalidCircuit(
                f"{self.kind.value} acts on {_ARITY[self.kind]} qubit(s), got {len(qs)}"
            )
        if len(set(qs)) != len(qs):
            raise InvalidCircuit(f"repeated qubit in {self.name} {list(qs)}")
        if any(q < 0 for q in qs):
            raise InvalidCircuit("negative qubit index")
        if self.adjoint and self.kind not in _ADJOINTABLE:
            raise InvalidCircuit(f"{self.kind.value} has no adjoint form")

    @property
    def name(self) -> str:
        """Text-format name, e.g. ``ccx``, ``mcx3`` or ``rc3xdg``."""
        if self.kind is GateKind.MCX:
            return f"mcx{len(self.qubits) - 1}"
        return self.kind.value + ("dg" if self.adjoint else "")

    @property
    def kind_name(self) -> str:
        if self.kind is GateKind.MCX:
            return f"mcx{len(self.qubits) - 1}"
        return self.kind.value

    @property
    def is_permutation_block(self) -> bool:
        return self.kind in PERMUTATION_KINDS

    @property
    def relative_variant_of(self) -> Gate | None:
        """The strict gate this gate is a relative-phase version of."""
        if self.kind in (GateKind.RCCX, GateKind.MARGOLUS):
            return Gate(GateKind.CCX, self.qubits)
        if self.kind is GateKind.RC3X:
            return Gate(GateKind.MCX, self.qubits)
        return None

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind in CONTROLLED_X_KINDS or self.kind is GateKind.CZ:
            return self.qubits[:-1]
        return ()

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def inverse(self) -> Gate:
        if self.kind is GateKind.RESET:
            raise ContainsReset("reset has no inverse")
        if self.kind in _INVERSE_KIND:
            return Gate(_INVERSE_KIND[self.kind], self.qubits)
        if self.kind in _ADJOINTABLE:
            return Gate(self.kind, self.qubits, not self.adjoint)
        return self

    def remap(self, mapping: Sequence[int] | dict[int, int]) -> Gate:
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.adjoint)

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.qubits)])


def mcx(*qubits: int) -> Gate:
    """Multi-controlled X with the narrowest fitting kind (X, CX, CCX or MCX)."""
    kinds = {1: GateKind.X, 2: GateKind.CX, 3: GateKind.CCX}
    return Gate(kinds.get(len(qubits), GateKind.MCX), qubits)


@dataclass(frozen=True)
class Block:
    """Half-open range ``[start, end)`` of gate indices with a tag.

    Tags of the form ``V:<id>``, ``U:<id>`` and ``Vdg:<id>`` mark the three
    parts of a conjugation ``V U V^dagger``; any other tag marks an atomic
    subcircuit (for instance an expanded Toffoli).
    """

    start: int
    end: int
    tag: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise InvalidCircuit(f"bad block range [{self.start}, {self.end})")
        if not self.tag or any(ch.isspace() for ch in self.tag):
            raise InvalidCircuit(f"bad block tag {self.tag!r}")

    @property
    def conj_role(self) -> tuple[str, str] | None:
        role, sep, ident = self.tag.partition(":")
        if sep and role in ("V", "U", "Vdg") and ident:
            return role, ident
        return None

    def contains(self, other: Block) -> bool:
        return self.start <= other.start and other.end <= self.end

    def __len__(self) -> int:
        return self.end - self.start


def _check_nesting(blocks: Sequence[Block]) -> None:
    for i, a in enumerate(blocks):
        for b in blocks[i + 1:]:
            disjoint = a.end <= b.start or b.end <= a.start
            if not (disjoint or a.contains(b) or b.contains(a)):
                raise InvalidCircuit(f"blocks {a} and {b} overlap without nesting")


@dataclass(frozen=True)
class Circuit:
    partition: QubitPartition
    gates: tuple[Gate, ...] = ()
    blocks: tuple[Block, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "blocks", tuple(sorted(self.blocks, key=lambda b: (b.start, -b.end))))
        n = self.partition.total
        seen_reset = False
        for i, g in enumerate(self.gates):
            if max(g.qubits) >= n:
                raise InvalidCircuit(f"gate {i} ({g}) uses a qubit outside the {n}-qubit register")
            if g.kind is GateKind.RESET:
                if not self.partition.is_aux(g.qubits[0]):
                    raise InvalidCircuit(f"reset on main qubit {g.qubits[0]}")
                seen_reset = True
            elif seen_reset:
                raise InvalidCircuit("resets are only allowed as a trailing suffix")
        for b in self.blocks:
            if b.end > len(self.gates):
                raise InvalidCircuit(f"block {b} runs past the last gate")
        if len(set(self.blocks)) != len(self.blocks):
            raise InvalidCircuit("duplicate block annotation")
        _check_nesting(self.blocks)

    @classmethod
    def empty(cls, num_main: int, num_aux: int = 0) -> Circuit:
        return cls(QubitPartition(num_main, num_aux))

    @property
    def num_qubits(self) -> int:
        return self.partition.total

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def with_gates(self, gates: Iterable[Gate], blocks: Iterable[Block] = ()) -> Circuit:
        return Circuit(self.partition, tuple(gates), tuple(blocks))

    def append(self, *gates: Gate) -> Circuit:
        return Circuit(self.partition, self.gates + gates, self.blocks)

    def compose(self, other: Circuit) -> Circuit:
        """``self`` followed by ``other`` on the same partition."""
        if other.partition.num_main != self.partition.num_main or \
                other.partition.num_aux != self.partition.num_aux:
            raise InvalidCircuit("cannot compose circuits over different partitions")
        off = len(self.gates)
        shifted = tuple(Block(b.start + off, b.end + off, b.tag) for b in other.blocks)
        return Circuit(self.partition, self.gates + other.gates, self.blocks + shifted)

    @property
    def has_reset(self) -> bool:
        return any(g.kind is GateKind.RESET for g in self.gates)

    def split_resets(self) -> tuple[Circuit, tuple[int, ...]]:
        """Return the reset-free prefix and the qubits reset in the trailing suffix."""
        k = len(self.gates)
        while k and self.gates[k - 1].kind is GateKind.RESET:
            k -= 1
        prefix = Circuit(self.partition, self.gates[:k], tuple(b for b in self.blocks if b.end <= k))
        return prefix, tuple(g.qubits[0] for g in self.gates[k:])

    def conjugation_triples(self) -> list[tuple[str, Block, Block, Block]]:
        """Complete ``(id, V, U, Vdg)`` annotation triples, in order of ``V`` start."""
        parts: dict[str, dict[str, Block]] = {}
        for b in self.blocks:
            role = b.conj_role
            if role:
                parts.setdefault(role[1], {})[role[0]] = b
        triples = [
            (ident, p["V"], p["U"], p["Vdg"])
            for ident, p in parts.items()
            if set(p) == {"V", "U", "Vdg"}
        ]
        return sorted(triples, key=lambda t: t[1].start)


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``[N]``; ``mapping[j]`` is the image of basis state ``j``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        object.__setattr__(self, "mapping", m)
        n = len(m)
        if n == 0 or n & (n - 1):
            raise ValueError(f"permutation size {n} is not a power of two")
        if sorted(m) != list(range(n)):
            raise ValueError("mapping is not a bijection")

    @classmethod
    def identity(cls, num_qubits: int) -> Permutation:
        return cls(tuple(range(2**num_qubits)))

    @classmethod
    def mct(cls, num_qubits: int) -> Permutation:
        """Flip the last bit iff all other bits are set (controls first)."""
        n = 2**num_qubits
        mapping = list(range(n))
        if num_qubits == 1:
            mapping = [1, 0]
        else:
            mapping[n - 2], mapping[n - 1] = n - 1, n - 2
        return cls(tuple(mapping))

    @property
    def size(self) -> int:
        return len(self.mapping)

    @property
    def num_qubits(self) -> int:
        return self.size.bit_length() - 1

    def __call__(self, j: int) -> int:
        return self.mapping[j]

    def inverse(self) -> Permutation:
        inv = [0] * self.size
        for j, pj in enumerate(self.mapping):
            inv[pj] = j
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(j == pj for j, pj in enumerate(self.mapping))


# --- classes and their order -------------------------------------------------


@total_ordering
class _Ordered(enum.Enum):
    def __lt__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        order = list(type(self))
        return order.index(self) < order.index(other)


class Phase(_Ordered):
    STRICT = "S"
    RELATIVE = "R"


class Ancilla(_Ordered):
    DIRTY = "D"
    CLEAN = "C"


class Waste(_Ordered):
    NON_WASTING = "NW"
    WASTING_SEPARABLE = "WS"
    WASTING_ENTANGLED = "WE"


@dataclass(frozen=True)
class ClassLabel:
    phase: Phase
    ancilla: Ancilla
    waste: Waste

    @property
    def name(self) -> str:
        if self.waste is Waste.WASTING_ENTANGLED:
            return f"{self.ancilla.value}-WE"
        return f"{self.phase.value}-{self.ancilla.value}-{self.waste.value}"

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"ClassLabel({self.name})"

    @staticmethod
    def parse(text: str) -> ClassLabel:
        """Accept ``S-C-NW`` style names, including ``C-WE`` and ``S-C-WE``."""
        parts = text.strip().upper().split("-")
        try:
            if len(parts) == 2 and parts[1] == "WE":
                return canonical_label(Phase.RELATIVE, Ancilla(parts[0]), Waste.WASTING_ENTANGLED)
            if len(parts) == 3:
                return canonical_label(Phase(parts[0]), Ancilla(parts[1]), Waste(parts[2]))
        except ValueError:
            pass
        raise ValueError(f"unknown class name {text!r}")


_INTERNED: dict[tuple[Phase, Ancilla, Waste], ClassLabel] = {}
_CANONICAL: dict[tuple[Phase, Ancilla, Waste], ClassLabel] = {}
for _p in Phase:
    for _a in Ancilla:
        for _w in Waste:
            _key = (Phase.RELATIVE if _w is Waste.WASTING_ENTANGLED else _p, _a, _w)
            _CANONICAL[(_p, _a, _w)] = _INTERNED.setdefault(_key, ClassLabel(*_key))


def canonical_label(phase: Phase, ancilla: Ancilla, waste: Waste) -> ClassLabel:
    """Canonical representative; strict and relative wasting-entangled labels coincide."""
    return _CANONICAL[(phase, ancilla, waste)]


ALL_LABELS: tuple[ClassLabel, ...] = tuple(dict.fromkeys(_CANONICAL.values()))


def label(name: str) -> ClassLabel:
    return ClassLabel.parse(name)


class ClassLattice:
    """Inclusion order between the canonical classes.

    ``leq(a, b)`` means every implementation in class ``a`` is also in ``b``.
    """

    def __init__(self, labels: Sequence[ClassLabel] = ALL_LABELS):
        self.labels = tuple(labels)
        self.edges = tuple(
            (a, b)
            for a in self.labels
            for b in self.labels
            if self.lt(a, b) and not any(self.lt(a, c) and self.lt(c, b) for c in self.labels)
        )

    @staticmethod
    def leq(a: ClassLabel, b: ClassLabel) -> bool:
        if not (a.ancilla <= b.ancilla and a.waste <= b.waste):
            return False
        return b.waste is Waste.WASTING_ENTANGLED or a.phase <= b.phase

    def lt(self, a: ClassLabel, b: ClassLabel) -> bool:
        return a != b and self.leq(a, b)

    def successors(self, a: ClassLabel) -> list[ClassLabel]:
        return [y for x, y in self.edges if x == a]

    def predecessors(self, a: ClassLabel) -> list[ClassLabel]:
        return [x for x, y in self.edges if y == a]

    def up(self, a: ClassLabel) -> frozenset[ClassLabel]:
        return frozenset(b for b in self.labels if self.leq(a, b))

    def upward_closure(self, labels: Iterable[ClassLabel]) -> frozenset[ClassLabel]:
        out: set[ClassLabel] = set()
        for a in labels:
            out |= self.up(a)
        return frozenset(out)

    def is_upward_closed(self, labels: Iterable[ClassLabel]) -> bool:
        s = frozenset(labels)
        return self.upward_closure(s) == s

    def minimal(self, labels: Iterable[ClassLabel]) -> list[ClassLabel]:
        s = list(dict.fromkeys(labels))
        return [a for a in self.labels if a in s and not any(self.lt(b, a) for b in s)]

    def join(self, a: ClassLabel, b: ClassLabel) -> ClassLabel:
        candidates = [c for c in self.labels if self.leq(a, c) and self.leq(b, c)]
        (least,) = self.minimal(candidates)
        return least

    @property
    def bottom(self) -> ClassLabel:
        (m,) = self.minimal(self.labels)
        return m


LATTICE = ClassLattice()


# --- resource accounting -----------------------------------------------------


@dataclass(frozen=True)
class ResourceCounts:
    per_gate_kind: dict[str, int] = field(default_factory=dict)
    gate_count: int = 0
    cnot_count: int = 0
    t_count: int = 0
    h_count: int = 0
    depth: int = 0
    aux_count: int = 0

    def as_dict(self) -> dict:
        return {
            "per_gate_kind": dict(sorted(self.per_gate_kind.items())),
            "gate_count": self.gate_count,
            "cnot_count": self.cnot_count,
            "t_count": self.t_count,
            "h_count": self.h_count,
            "depth": self.depth,
            "aux_count": self.aux_count,
        }

    def delta(self, before: ResourceCounts) -> dict:
        """Signed change ``self - before`` for every tally."""
        kinds = set(self.per_gate_kind) | set(before.per_gate_kind)
        out = {k: v - before.as_dict()[k] for k, v in self.as_dict().items() if k != "per_gate_kind"}
        out["per_gate_kind"] = {
            k: self.per_gate_kind.get(k, 0) - before.per_gate_kind.get(k, 0) for k in sorted(kinds)
        }
        return out


def resource_counts(c: Circuit) -> ResourceCounts:
    """Tallies over the gate list as written; nothing is decomposed."""
    per_kind = Counter(g.kind_name for g in c.gates)
    level = [0] * c.num_qubits
    for g in c.gates:
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
    return ResourceCounts(
        per_gate_kind=dict(per_kind),
        gate_count=len(c.gates),
        cnot_count=per_kind[GateKind.CX.value],
        t_count=per_kind[GateKind.T.value] + per_kind[GateKind.TDG.value],
        h_count=per_kind[GateKind.H.value],
        depth=max(level, default=0),
        aux_count=c.partition.num_aux,
    )


def invert(c: Circuit) -> Circuit:
    """Reversed circuit of inverse gates; conjugation tags swap V and Vdg."""
    if c.has_reset:
        raise ContainsReset("cannot invert a circuit containing reset")
    n = len(c.gates)
    gates = tuple(g.inverse() for g in reversed(c.gates))
    swap = {"V": "Vdg", "Vdg": "V"}
    blocks = []
    for b in c.blocks:
        tag = b.tag
        role = b.conj_role
        if role and role[0] in swap:
            tag = f"{swap[role[0]]}:{role[1]}"
        blocks.append(Block(n - b.end, n - b.start, tag))
    return Circuit(c.partition, gates, tuple(blocks))


# --- annotation-aware edits --------------------------------------------------


@dataclass(frozen=True)
class Edit:
    """Replace gates ``[start, end)`` by ``gates``; ``tag`` labels the new range."""

    start: int
    end: int
    gates: tuple[Gate, ...] = ()
    tag: str | None = None


def splice(c: Circuit, edits: Iterable[Edit]) -> Circuit:
    """Apply disjoint range replacements and carry annotations along.

    Blocks clear of every edit are shifted, a block whose range matches an
    edit takes the replacement's extent (and its tag, if atomic), blocks that
    contain edits are resized, and blocks cut by an edit boundary are dropped.
    """
    eds = sorted(edits, key=lambda e: e.start)
    for a, b in zip(eds, eds[1:]):
        if b.start < a.end:
            raise InvalidCircuit("overlapping edits")

    def newpos(x: int) -> int:
        return x + sum(len(e.gates) - (e.end - e.start) for e in eds if e.end <= x)

    gates: list[Gate] = []
    i = 0
    for e in eds:
        gates.extend(c.gates[i:e.start])
        gates.extend(e.gates)
        i = e.end
    gates.extend(c.gates[i:])

    exact = {(e.start, e.end): e for e in eds}
    blocks: dict[Block, None] = {}
    for b in c.blocks:
        if any(e.start < x < e.end for e in eds for x in (b.start, b.end)):
            continue
        s, t = newpos(b.start), newpos(b.end)
        if s >= t:
            continue
        tag = b.tag
        e = exact.get((b.start, b.end))
        if e is not None and e.tag and b.conj_role is None:
            tag = e.tag
        blocks[Block(s, t, tag)] = None
    for e in eds:
        if e.tag and len(e.gates) > 1:
            blocks[Block(newpos(e.start), newpos(e.start) + len(e.gates), e.tag)] = None
    return Circuit(c.partition, tuple(gates), tuple(blocks))
