"""Entanglement measures for the signal/idler versus pump split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, FrameMismatch
from .fock_algebra import DensityOperator
from .spdc_state import CorrelationJ

MAX_DIMENSION = 4096


@dataclass(frozen=True)
class BipartitionSpec:
    side_a: tuple[str, ...]
    side_b: tuple[str, ...]

    def __post_init__(self):
        a = tuple(str(m) for m in self.side_a)
        b = tuple(str(m) for m in self.side_b)
        if set(a) & set(b):
            raise ValueError("bipartition sides overlap")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @classmethod
    def of(cls, modes, side_a) -> BipartitionSpec:
        side_a = tuple(str(m) for m in side_a)
        return cls(side_a, tuple(str(m) for m in modes if str(m) not in side_a))


def negativity(rho: DensityOperator, split: BipartitionSpec) -> float:
    """``(||rho^{T_A}||_1 - 1) / 2`` for the trace-normalised ``rho``."""
    if set(split.side_a) | set(split.side_b) != set(rho.modes) or len(split.side_a) + len(split.side_b) != len(rho.modes):
        raise FrameMismatch(f"bipartition {split} does not cover {rho.modes}")
    labels = rho.labels()
    if len(labels) > MAX_DIMENSION:
        raise DimensionTooLarge(f"{len(labels)} basis states exceed {MAX_DIMENSION}")
    ia = [rho.modes.index(m) for m in split.side_a]
    ib = [rho.modes.index(m) for m in split.side_b]
    a_labels = sorted({tuple(l[i] for i in ia) for l in labels})
    b_labels = sorted({tuple(l[i] for i in ib) for l in labels})
    ai = {l: k for k, l in enumerate(a_labels)}
    bi = {l: k for k, l in enumerate(b_labels)}
    nb = len(b_labels)
    dim = len(a_labels) * nb
    if dim > MAX_DIMENSION:
        raise DimensionTooLarge(f"product dimension {dim} exceeds {MAX_DIMENSION}")
    pt = np.zeros((dim, dim), dtype=complex)
    tr = rho.trace().real
    for (ket, bra), v in rho.entries.items():
        ka, kb = ai[tuple(ket[i] for i in ia)], bi[tuple(ket[i] for i in ib)]
        ba, bb = ai[tuple(bra[i] for i in ia)], bi[tuple(bra[i] for i in ib)]
        # transpose the A indices
        pt[ba * nb + kb, ka * nb + bb] += v / tr
    w = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(max(0.0, -w[w < 0].sum()))


def hybrid_witness(j: CorrelationJ) -> float:
    """``1 - |J01|**2 / (J00 J11)``: zero iff the first two pump states are parallel."""
    j00, j11, j01 = j[0, 0].real, j[1, 1].real, j[0, 1]
    if j00 <= 0 or j11 <= 0:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - abs(j01) ** 2 / (j00 * j11))))
