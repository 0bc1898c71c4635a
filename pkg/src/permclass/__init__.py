"""Classify permutation circuits by phase, ancilla and waste behaviour, and rewrite them."""

from __future__ import annotations

from .classifier import Verdict, VerificationReport, classify_all, classify_circuit, verify
from .core import (
    ALL_LABELS, LATTICE, Ancilla, Block, Circuit, ClassLabel, ClassLattice, Gate, GateKind,
    Permutation, Phase, QubitPartition, ResourceCounts, Waste, canonical_label, invert, label, mcx,
    resource_counts,
)
from .errors import (
    BadDimension, ContainsReset, DimensionMismatch, InvalidCircuit, NotSeparable, NotUnitary,
    ParseError, PermclassError, PipelineError, PreconditionError, TooFewControls, TooManyQubits,
)
from .kron import FactorResult, factor_unitary
from .textfmt import format_circuit, parse_circuit
from .transforms import PASSES, PipelineResult, get_pass, run_pipeline
from .unitary import apply_circuit, permutation_matrix, unitary_of
from .zoo import (
    barenco_ladder, cwe_mct, dwe_mct, expand, rc3x, rccx, relative_toffoli, strict_vchain,
    toffoli_strict, vchain,
)

__version__ = "0.1.0"
