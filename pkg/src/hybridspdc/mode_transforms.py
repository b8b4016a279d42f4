"""Passive linear mode unitaries acting on displaced multimode states.

Convention: a unitary ``u`` maps creation operators as
``a_j^+ -> sum_k u[j, k] a_k^+``.  A displaced product
``D(beta_1) ... D(beta_d) |n_1 ... n_d>`` is then sent to
``D(beta') U|n_1 ... n_d>`` with ``beta' = u.T @ beta``; the displacement is
carried by the frame and only the small occupation content is expanded.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod, sqrt
from typing import Sequence

import numpy as np

from .errors import CutoffTooSmall, FrameMismatch
from .fock_algebra import StateVector

PHI = 2 * np.pi / 3


@dataclass(frozen=True)
class ModeUnitary:
    matrix: np.ndarray
    name: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_unitary(self, atol: float = 1e-12) -> bool:
        u = self.matrix
        return bool(np.allclose(u.conj().T @ u, np.eye(self.dim), atol=atol, rtol=0))


def bs2() -> ModeUnitary:
    """Balanced beam splitter ``[[1, 1], [-1, 1]] / sqrt(2)``."""
    return ModeUnitary(np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / np.sqrt(2), "BS")


def dft3(phi: float = PHI) -> ModeUnitary:
    """Three-mode discrete Fourier transform with ``phi = 2 pi / 3``."""
    e = np.exp(1j * phi)
    u = np.array([[1, 1, 1], [1, e, e**2], [1, e**2, e**4]], dtype=complex) / np.sqrt(3)
    return ModeUnitary(u, "DFT3")


def _poly_mul(p: dict, row: np.ndarray) -> dict:
    out: dict = {}
    for expo, c in p.items():
        for k, u in enumerate(row):
            if u == 0:
                continue
            e = list(expo)
            e[k] += 1
            e = tuple(e)
            out[e] = out.get(e, 0j) + c * u
    return out


@lru_cache(maxsize=4096)
def _fock_image(occ: tuple[int, ...], key: bytes, dim: int) -> tuple[tuple[tuple[int, ...], complex], ...]:
    u = np.frombuffer(key, dtype=complex).reshape(dim, dim)
    poly = {(0,) * dim: 1.0 + 0j}
    norm = 1.0
    for j, n in enumerate(occ):
        norm *= factorial(n)
        for _ in range(n):
            poly = _poly_mul(poly, u[j])
    out = []
    for expo, c in poly.items():
        amp = c * sqrt(prod(factorial(e) for e in expo) / norm)
        if abs(amp) > 1e-15:
            out.append((expo, complex(amp)))
    return tuple(out)


def fock_image(occ: Sequence[int], u: ModeUnitary) -> dict[tuple[int, ...], complex]:
    """Action of ``u`` on the number state ``|occ>`` (no displacement)."""
    key = np.ascontiguousarray(u.matrix, dtype=complex).tobytes()
    return dict(_fock_image(tuple(int(k) for k in occ), key, u.dim))


def apply_mode_unitary(
    state: StateVector, u: ModeUnitary, modes: Sequence[str], max_photons: int = 64
) -> StateVector:
    """Apply ``u`` to the listed modes of ``state``.

    Frames of the listed modes become ``u.T @ beta``.  Occupations on those
    modes above ``max_photons`` in total raise :class:`CutoffTooSmall`.
    """
    modes = [str(m) for m in modes]
    if len(modes) != u.dim:
        raise FrameMismatch(f"unitary acts on {u.dim} modes, got {len(modes)}")
    missing = set(modes) - set(state.modes)
    if missing or len(set(modes)) != len(modes):
        raise FrameMismatch(f"modes {modes} not all distinct members of {state.modes}")
    idx = [state.modes.index(m) for m in modes]
    beta = np.array([state.frame[i] for i in idx])
    new_beta = u.matrix.T @ beta
    frame = list(state.frame)
    for i, b in zip(idx, new_beta):
        frame[i] = complex(b)

    out: dict = {}
    for label, v in state.amplitudes.items():
        occ = tuple(label[i] for i in idx)
        if sum(occ) > max_photons:
            raise CutoffTooSmall(f"{sum(occ)} photons exceed max_photons={max_photons}")
        for expo, c in fock_image(occ, u).items():
            new = list(label)
            for i, e in zip(idx, expo):
                new[i] = e
            new = tuple(new)
            out[new] = out.get(new, 0j) + c * v
    return StateVector(state.modes, tuple(frame), out)


@dataclass(frozen=True)
class PumpIdentity:
    """A pump-mode state, the unitary applied to it and the expected image."""

    name: str
    unitary: ModeUnitary
    source: StateVector
    expected: StateVector
    conserving: StateVector | None = None

    @property
    def reference_conserves_photons(self) -> bool:
        """Whether the expected image has as many quanta above its frame as the source."""
        return self.conserving is None


def _target(modes, frame, terms) -> StateVector:
    amps: dict = {}
    for occ, c in terms:
        amps[tuple(occ)] = amps.get(tuple(occ), 0) + c
    return StateVector(tuple(modes), tuple(complex(f) for f in frame), amps)


def pump_identities(alpha: complex = 1.0) -> list[PumpIdentity]:
    """Images of the two- and three-pump basis states under ``bs2`` and ``dft3``.

    The expected states are the reference closed forms, including their
    global phases.  Two entries (``dft_varphi_-phi`` and
    ``dft_varphi_-2phi``) are written with one photon too many in the
    first pump mode, which no passive unitary can produce.  They are kept
    verbatim in ``expected`` and the photon-conserving form is attached
    as ``conserving``.
    """
    from .multisource import build_basis

    a = complex(alpha)
    s2, s3 = np.sqrt(2.0), np.sqrt(3.0)
    e1, e2 = np.exp(1j * PHI), np.exp(2j * PHI)
    m2, f2 = ("p1", "p2"), (0.0, s2 * a)
    m3, f3 = ("p1", "p2", "p3"), (s3 * a, 0.0, 0.0)
    bs, u3 = bs2(), dft3()
    two = [
        ("bs_00", "00", [((0, 0), 1)]),
        ("bs_11", "11", [((2, 0), -1 / s2), ((0, 2), 1 / s2)]),
        ("bs_phi+", "phi+", [((0, 1), 1)]),
        ("bs_phi-", "phi-", [((1, 0), -1)]),
        ("bs_sigma+", "sigma+", [((2, 0), 1 / s2), ((0, 2), 1 / s2)]),
        ("bs_sigma-", "sigma-", [((1, 1), -1)]),
    ]
    three = [
        ("dft_000", "000", [((0, 0, 0), 1)]),
        ("dft_varphi_0", "varphi_0", [((1, 0, 0), 1)]),
        ("dft_varphi_-phi", "varphi_-phi", [((1, 1, 0), 1)]),
        ("dft_varphi_-2phi", "varphi_-2phi", [((1, 0, 1), 1)]),
        ("dft_sigma_0", "sigma_0", [((2, 0, 0), 1 / s3), ((0, 1, 1), s2 / s3)]),
        ("dft_sigma_-phi", "sigma_-phi", [((0, 0, 2), 1 / s3), ((1, 1, 0), s2 / s3)]),
        ("dft_sigma_-2phi", "sigma_-2phi", [((0, 2, 0), 1 / s3), ((1, 0, 1), s2 / s3)]),
        ("dft_zeta_0", "zeta_0", [((2, 0, 0), s2 / s3), ((0, 1, 1), -1 / s3)]),
        ("dft_zeta_-phi", "zeta_-phi", [((0, 0, 2), e2 * s2 / s3), ((1, 1, 0), -e2 / s3)]),
        ("dft_zeta_-2phi", "zeta_-2phi", [((0, 2, 0), e1 * s2 / s3), ((1, 0, 1), -e1 / s3)]),
    ]
    out = []
    for name, label, terms in two:
        out.append(PumpIdentity(name, bs, build_basis(label, 2, a).state, _target(m2, f2, terms)))
    conserving = {
        "dft_varphi_-phi": [((0, 1, 0), 1)],
        "dft_varphi_-2phi": [((0, 0, 1), 1)],
    }
    for name, label, terms in three:
        fixed = _target(m3, f3, conserving[name]) if name in conserving else None
        out.append(
            PumpIdentity(name, u3, build_basis(label, 3, a).state, _target(m3, f3, terms), fixed)
        )
    return out


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    error: float
    phase: float
    error_mod_phase: float


def check_identity(identity: PumpIdentity, conserving: bool = False) -> IdentityCheck:
    """Apply the unitary and compare with the expected image.

    ``error`` is the norm of the difference; ``phase`` is the global phase
    ``arg <expected|image>`` and ``error_mod_phase`` the difference after
    removing it.  With ``conserving`` the photon-conserving form is used
    where one is attached.
    """
    image = apply_mode_unitary(identity.source, identity.unitary, identity.source.modes)
    expected = identity.expected
    if conserving and identity.conserving is not None:
        expected = identity.conserving
    if not np.allclose(image.frame, expected.frame, atol=1e-12):
        raise FrameMismatch(f"{identity.name}: image frame {image.frame} != {expected.frame}")
    expected = StateVector(expected.modes, image.frame, expected.amplitudes)
    overlap = expected.inner(image)
    phase = float(np.angle(overlap)) if abs(overlap) > 1e-12 else 0.0
    err = (image - expected).norm()
    err_mod = (image - expected * np.exp(1j * phase)).norm()
    return IdentityCheck(identity.name, float(err), phase, float(err_mod))
