"""Sparse multimode bosonic states with per-mode displacement frames.

A :class:`StateVector` stores amplitudes on occupation tuples.  Each mode
carries a complex displacement ``beta`` and the label ``n`` on that mode
means the displaced number state ``D(beta)|n>``.  Frame 0 is the plain Fock
basis.  Labels in the same frame are orthonormal, so inner products and
partial traces never need to look at the frames beyond checking that they
agree.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import CutoffTooSmall, FrameMismatch

Label = tuple[int, ...]

FRAME_ATOL = 1e-12

_RESCALE = 1e150


# ---------------------------------------------------------------------------
# displacement operator matrix elements
# ---------------------------------------------------------------------------


def _genlaguerre_scaled(n, a, x):
    """Generalised Laguerre ``L_n^{(a)}(x)`` by upward recurrence in degree.

    Returns ``(value, log_scale)`` with the true polynomial equal to
    ``value * exp(log_scale)``; the scale keeps high degrees from overflowing.
    """
    n = np.asarray(n, dtype=np.int64)
    a = np.asarray(a, dtype=float)
    n, a = np.broadcast_arrays(n, a)
    prev = np.zeros(n.shape)
    cur = np.ones(n.shape)
    log_scale = np.zeros(n.shape)
    top = int(n.max()) if n.size else 0
    for k in range(top):
        active = k < n
        nxt = ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
        prev = np.where(active, cur, prev)
        cur = np.where(active, nxt, cur)
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur = np.where(big, cur / _RESCALE, cur)
            prev = np.where(big, prev / _RESCALE, prev)
            log_scale = np.where(big, log_scale + np.log(_RESCALE), log_scale)
    return cur, log_scale


def displacement_matrix(beta: complex, rows, cols) -> np.ndarray:
    """Matrix ``<m|D(beta)|n>`` for ``m`` in ``rows`` and ``n`` in ``cols``.

    Uses the closed form with log-factorials; for ``m < n`` the symmetry
    ``<m|D(b)|n> = conj(<n|D(-b)|m>)`` is applied.
    """
    beta = complex(beta)
    m = np.asarray(rows, dtype=np.int64)[:, None]
    n = np.asarray(cols, dtype=np.int64)[None, :]
    m, n = np.broadcast_arrays(m, n)
    if beta == 0:
        return (m == n).astype(complex)
    x = abs(beta) ** 2
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    d = hi - lo
    lag, log_scale = _genlaguerre_scaled(lo, d, x)
    log_mag = (
        0.5 * (gammaln(lo + 1.0) - gammaln(hi + 1.0))
        + d * np.log(abs(beta))
        - 0.5 * x
        + log_scale
    )
    # m >= n: beta**(m-n); m < n: (-conj(beta))**(n-m)
    angle = np.where(m >= n, np.angle(beta), np.angle(-np.conj(beta)))
    return np.exp(log_mag + 1j * d * angle) * lag


def displacement_matrix_element(m: int, n: int, beta: complex) -> complex:
    """``<m|D(beta)|n>`` for a single pair of occupations."""
    return complex(displacement_matrix(beta, [m], [n])[0, 0])


def frame_overlap(new: complex, old: complex, rows, cols) -> np.ndarray:
    """Matrix ``<m, new|n, old>`` between two displaced number bases."""
    phase = np.exp(1j * (np.conj(new) * old).imag)
    return phase * displacement_matrix(old - new, rows, cols)


def default_cutoff(beta: complex) -> int:
    """Occupation cutoff that captures a displacement of size ``|beta|``."""
    b = abs(beta)
    return int(np.ceil(b * b + 10 * b + 20))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def _same_frame(a: Sequence[complex], b: Sequence[complex]) -> bool:
    return len(a) == len(b) and all(abs(x - y) <= FRAME_ATOL for x, y in zip(a, b))


@dataclass(frozen=True)
class DisplacedLabel:
    """Single-mode displaced number state ``|n, alpha>``."""

    n: int
    alpha: complex = 0.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("occupation must be non-negative")
        if not np.isfinite(complex(self.alpha)):
            raise ValueError("displacement must be finite")


@dataclass(frozen=True)
class StateVector:
    """Sparse ket over occupation tuples in a per-mode displaced frame."""

    modes: tuple[str, ...]
    frame: tuple[complex, ...]
    amplitudes: Mapping[Label, complex] = field(default_factory=dict)

    def __post_init__(self):
        modes = tuple(str(m) for m in self.modes)
        frame = tuple(complex(b) for b in self.frame)
        if len(set(modes)) != len(modes):
            raise ValueError(f"duplicate mode names in {modes}")
        if len(frame) != len(modes):
            raise ValueError("frame must give one displacement per mode")
        amps = {}
        for label, value in self.amplitudes.items():
            label = tuple(int(k) for k in label)
            if len(label) != len(modes):
                raise ValueError(f"label {label} does not match {len(modes)} modes")
            if min(label, default=0) < 0:
                raise ValueError(f"negative occupation in {label}")
            amps[label] = amps.get(label, 0j) + complex(value)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, modes, label, frame=None, amplitude=1.0) -> StateVector:
        frame = tuple(frame) if frame is not None else (0.0,) * len(tuple(modes))
        return cls(tuple(modes), frame, {tuple(label): amplitude})

    @classmethod
    def from_array(cls, modes, frame, array, atol: float = 0.0) -> StateVector:
        """Build from a dense tensor indexed by occupations."""
        array = np.asarray(array)
        idx = np.argwhere(np.abs(array) > atol)
        return cls(tuple(modes), tuple(frame), {tuple(i): array[tuple(i)] for i in idx})

    def __len__(self):
        return len(self.amplitudes)

    def amplitude(self, label) -> complex:
        return self.amplitudes.get(tuple(label), 0j)

    def norm_squared(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.amplitudes.values()))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared()))

    def normalize(self) -> StateVector:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("cannot normalise the zero vector")
        return self * (1.0 / nrm)

    def _check_compatible(self, other: StateVector):
        if self.modes != other.modes:
            raise FrameMismatch(f"mode order {self.modes} != {other.modes}")
        if not _same_frame(self.frame, other.frame):
            raise FrameMismatch(f"frames differ: {self.frame} vs {other.frame}")

    def inner(self, other: StateVector) -> complex:
        """``<self|other>``."""
        self._check_compatible(other)
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        total = 0j
        for label, v in small.amplitudes.items():
            w = large.amplitudes.get(label)
            if w is not None:
                total += np.conj(v) * w if small is self else v * np.conj(w)
        return complex(total)

    def fidelity(self, other: StateVector) -> float:
        """Squared overlap of the normalised states."""
        ov = self.inner(other)
        return float(abs(ov) ** 2 / (self.norm_squared() * other.norm_squared()))

    def __mul__(self, c) -> StateVector:
        c = complex(c)
        return StateVector(self.modes, self.frame, {k: c * v for k, v in self.amplitudes.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __add__(self, other: StateVector) -> StateVector:
        self._check_compatible(other)
        out = dict(self.amplitudes)
        for k, v in other.amplitudes.items():
            out[k] = out.get(k, 0j) + v
        return StateVector(self.modes, self.frame, out)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + (-other)

    def tensor(self, other: StateVector) -> StateVector:
        overlap = set(self.modes) & set(other.modes)
        if overlap:
            raise FrameMismatch(f"modes {sorted(overlap)} appear on both sides")
        amps = {
            a + b: va * vb
            for a, va in self.amplitudes.items()
            for b, vb in other.amplitudes.items()
        }
        return StateVector(self.modes + other.modes, self.frame + other.frame, amps)

    def reorder(self, modes: Sequence[str]) -> StateVector:
        modes = tuple(modes)
        if sorted(modes) != sorted(self.modes):
            raise FrameMismatch(f"cannot reorder {self.modes} into {modes}")
        perm = [self.modes.index(m) for m in modes]
        amps = {tuple(k[i] for i in perm): v for k, v in self.amplitudes.items()}
        return StateVector(modes, tuple(self.frame[i] for i in perm), amps)

    def relabel(self, mapping: Mapping[str, str]) -> StateVector:
        return StateVector(tuple(mapping.get(m, m) for m in self.modes), self.frame, self.amplitudes)

    def pruned(self, atol: float) -> StateVector:
        return StateVector(
            self.modes, self.frame, {k: v for k, v in self.amplitudes.items() if abs(v) > atol}
        )

    def filter(self, predicate) -> StateVector:
        """Keep only labels for which ``predicate(label)`` is true."""
        return StateVector(
            self.modes, self.frame, {k: v for k, v in self.amplitudes.items() if predicate(k)}
        )

    def density(self) -> DensityOperator:
        return reduced_density(self, self.modes)

    def max_occupation(self) -> tuple[int, ...]:
        if not self.amplitudes:
            return (0,) * len(self.modes)
        return tuple(np.max(np.array(list(self.amplitudes)), axis=0).tolist())


@dataclass(frozen=True)
class DensityOperator:
    """Sparse density operator; ``entries[(ket, bra)]`` is ``<ket|rho|bra>``."""

    modes: tuple[str, ...]
    frame: tuple[complex, ...]
    entries: Mapping[tuple[Label, Label], complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(str(m) for m in self.modes))
        object.__setattr__(self, "frame", tuple(complex(b) for b in self.frame))
        entries = {}
        for (a, b), v in self.entries.items():
            a, b = tuple(int(k) for k in a), tuple(int(k) for k in b)
            if len(a) != len(self.modes) or len(b) != len(self.modes):
                raise ValueError("entry label does not match mode count")
            entries[(a, b)] = entries.get((a, b), 0j) + complex(v)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_matrix(cls, modes, frame, labels, matrix, atol: float = 0.0) -> DensityOperator:
        matrix = np.asarray(matrix)
        idx = np.argwhere(np.abs(matrix) > atol)
        return cls(modes, frame, {(labels[i], labels[j]): matrix[i, j] for i, j in idx})

    def labels(self) -> list[Label]:
        seen = set()
        for a, b in self.entries:
            seen.add(a)
            seen.add(b)
        return sorted(seen)

    def to_matrix(self, labels=None) -> tuple[list[Label], np.ndarray]:
        labels = self.labels() if labels is None else [tuple(l) for l in labels]
        index = {l: i for i, l in enumerate(labels)}
        mat = np.zeros((len(labels), len(labels)), dtype=complex)
        for (a, b), v in self.entries.items():
            mat[index[a], index[b]] = v
        return labels, mat

    def trace(self) -> complex:
        return complex(sum(v for (a, b), v in self.entries.items() if a == b))

    def normalize(self) -> DensityOperator:
        tr = self.trace().real
        if tr <= 0:
            raise ZeroDivisionError("density operator has non-positive trace")
        return self * (1.0 / tr)

    def __mul__(self, c) -> DensityOperator:
        return DensityOperator(self.modes, self.frame, {k: c * v for k, v in self.entries.items()})

    __rmul__ = __mul__

    def __add__(self, other: DensityOperator) -> DensityOperator:
        if self.modes != other.modes or not _same_frame(self.frame, other.frame):
            raise FrameMismatch("density operators live on different modes or frames")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0j) + v
        return DensityOperator(self.modes, self.frame, out)

    def entry(self, ket, bra) -> complex:
        return self.entries.get((tuple(ket), tuple(bra)), 0j)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        for (a, b), v in self.entries.items():
            if abs(v - np.conj(self.entries.get((b, a), 0j))) > atol:
                return False
        return True

    def purity(self) -> float:
        _, mat = self.to_matrix()
        tr = np.trace(mat).real
        return float(np.vdot(mat, mat).real / tr**2)

    def expectation(self, state: StateVector) -> complex:
        """``<psi|rho|psi>`` for a (not necessarily normalised) ket."""
        if state.modes != self.modes or not _same_frame(state.frame, self.frame):
            raise FrameMismatch("state and density operator disagree on modes or frames")
        amps = state.amplitudes
        total = 0j
        for (a, b), v in self.entries.items():
            ca = amps.get(a)
            if ca is None:
                continue
            cb = amps.get(b)
            if cb is None:
                continue
            total += np.conj(ca) * v * cb
        return complex(total)

    def fidelity(self, state: StateVector) -> float:
        """``<psi|rho|psi>`` with both operands normalised."""
        return float(self.expectation(state).real / (state.norm_squared() * self.trace().real))

    def eigenvalues(self) -> np.ndarray:
        _, mat = self.to_matrix()
        return np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))


# ---------------------------------------------------------------------------
# frame changes and traces
# ---------------------------------------------------------------------------


def _group_by_mode(amps: Mapping[Label, complex], i: int):
    groups = defaultdict(dict)
    for label, v in amps.items():
        groups[label[:i] + label[i + 1:]][label[i]] = v
    return groups


def change_frame(
    state: StateVector,
    new_frame: Sequence[complex] | complex,
    cutoff: int | Sequence[int | None] | None = None,
    tol: float = 1e-10,
) -> StateVector:
    """Re-express ``state`` over displaced labels in ``new_frame``.

    ``cutoff`` bounds the occupation kept on each re-expressed mode (one int
    for all modes or one per mode; ``None`` picks a default from the size of
    the frame shift).  Raises :class:`CutoffTooSmall` when the relative norm
    lost to truncation exceeds ``tol``.
    """
    nmodes = len(state.modes)
    if np.ndim(new_frame) == 0:
        new_frame = (complex(new_frame),) * nmodes
    new_frame = tuple(complex(b) for b in new_frame)
    if len(new_frame) != nmodes:
        raise FrameMismatch("new frame must have one entry per mode")
    if cutoff is None or np.ndim(cutoff) == 0:
        cutoffs = [cutoff] * nmodes
    else:
        cutoffs = list(cutoff)

    amps = dict(state.amplitudes)
    frame = list(state.frame)
    for i in range(nmodes):
        if abs(new_frame[i] - frame[i]) <= FRAME_ATOL:
            frame[i] = new_frame[i]
            continue
        top = max((k[i] for k in amps), default=0)
        cut = cutoffs[i]
        if cut is None:
            shift = abs(new_frame[i] - frame[i])
            cut = top + default_cutoff(shift)
        rows = np.arange(cut + 1)
        cols = np.arange(top + 1)
        T = frame_overlap(new_frame[i], frame[i], rows, cols)
        out = {}
        for rest, column in _group_by_mode(amps, i).items():
            vec = np.zeros(top + 1, dtype=complex)
            for k, v in column.items():
                vec[k] = v
            res = T @ vec
            for m in np.flatnonzero(res):
                out[rest[:i] + (int(m),) + rest[i:]] = res[m]
        amps = out
        frame[i] = new_frame[i]

    result = StateVector(state.modes, tuple(frame), amps)
    before = state.norm_squared()
    if before > 0:
        deficit = (before - result.norm_squared()) / before
        if deficit > tol:
            raise CutoffTooSmall(
                f"frame change lost relative norm {deficit:.3e} (tolerance {tol:.1e})"
            )
    return result


def _split_indices(modes: Sequence[str], keep: Iterable[str]):
    keep = [str(m) for m in keep]
    missing = set(keep) - set(modes)
    if missing:
        raise FrameMismatch(f"unknown modes {sorted(missing)}")
    keep_idx = [modes.index(m) for m in keep]
    drop_idx = [i for i in range(len(modes)) if i not in keep_idx]
    return keep_idx, drop_idx


def reduced_density(state: StateVector, keep: Iterable[str]) -> DensityOperator:
    """Reduced density operator of a pure state on the modes in ``keep``."""
    keep_idx, drop_idx = _split_indices(state.modes, keep)
    kept_labels: dict[Label, int] = {}
    env_labels: dict[Label, int] = {}
    rows, cols, vals = [], [], []
    for label, v in state.amplitudes.items():
        a = tuple(label[i] for i in keep_idx)
        e = tuple(label[i] for i in drop_idx)
        rows.append(env_labels.setdefault(e, len(env_labels)))
        cols.append(kept_labels.setdefault(a, len(kept_labels)))
        vals.append(v)
    V = np.zeros((len(env_labels), len(kept_labels)), dtype=complex)
    np.add.at(V, (np.array(rows, dtype=int), np.array(cols, dtype=int)), np.array(vals, dtype=complex))
    rho = V.T @ V.conj()
    modes = tuple(state.modes[i] for i in keep_idx)
    frame = tuple(state.frame[i] for i in keep_idx)
    return DensityOperator.from_matrix(modes, frame, list(kept_labels), rho)


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Trace out every mode of ``rho`` not listed in ``keep``."""
    keep_idx, drop_idx = _split_indices(rho.modes, keep)
    out: dict[tuple[Label, Label], complex] = {}
    for (a, b), v in rho.entries.items():
        if all(a[i] == b[i] for i in drop_idx):
            key = (tuple(a[i] for i in keep_idx), tuple(b[i] for i in keep_idx))
            out[key] = out.get(key, 0j) + v
    modes = tuple(rho.modes[i] for i in keep_idx)
    frame = tuple(rho.frame[i] for i in keep_idx)
    return DensityOperator(modes, frame, out)
