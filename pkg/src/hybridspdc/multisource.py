"""Products of two or three identical, phase-locked sources.

Source ``s`` (1-based) owns signal/idler modes ``2s-1, 2s`` and pump mode
``p<s>``.  Joint states list the signal/idler modes first and the pumps
last.  The product is organised in blocks by total pair number ``n``; each
block is a sum of (pair-mode basis state) x (pump basis state) members whose
amplitudes ``p[n, m]`` are fixed products of G-matrix entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingGEntry, UnknownLabel
from .fock_algebra import StateVector
from .gmatrix import GMatrix
from .spdc_state import output_from_g

PHI = 2 * np.pi / 3
SQ2 = np.sqrt(2.0)
SQ3 = np.sqrt(3.0)


def micro_modes(arity: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(1, 2 * arity + 1))


def pump_modes(arity: int) -> tuple[str, ...]:
    return tuple(f"p{s}" for s in range(1, arity + 1))


@dataclass(frozen=True)
class EntangledBasis:
    arity: int
    label: str
    state: StateVector


def _pairs(counts) -> tuple[int, ...]:
    """Signal/idler occupation tuple for per-source pair counts."""
    out = []
    for c in counts:
        out += [c, c]
    return tuple(out)


def _micro(arity: int, terms) -> StateVector:
    amps = {}
    for counts, c in terms:
        amps[_pairs(counts)] = amps.get(_pairs(counts), 0) + c
    return StateVector(micro_modes(arity), (0.0,) * (2 * arity), amps).normalize()


def _macro(arity: int, alpha: complex, terms) -> StateVector:
    amps = {}
    for occ, c in terms:
        amps[tuple(occ)] = amps.get(tuple(occ), 0) + c
    return StateVector(pump_modes(arity), (complex(alpha),) * arity, amps).normalize()


def _cyclic(arity_terms, k_phase: int, sign: int = 1):
    """Attach phases ``exp(i*sign*j*k_phase*phi)`` to the j-th of three terms."""
    return [(t, np.exp(1j * sign * j * k_phase * PHI)) for j, t in enumerate(arity_terms)]


_MICRO3_FAMILIES = {
    "Psi": [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    "Phi": [(2, 0, 0), (0, 2, 0), (0, 0, 2)],
    "Delta": [(1, 1, 0), (0, 1, 1), (1, 0, 1)],
}
_MACRO3_FAMILIES = {
    "varphi": [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    "sigma": [(2, 0, 0), (0, 2, 0), (0, 0, 2)],
    "zeta": [(1, 1, 0), (0, 1, 1), (1, 0, 1)],
}
_PHASE_SUFFIX = {"0": 0, "phi": 1, "2phi": 2}

LABELS = {
    2: ("vac", "1111", "Psi+", "Psi-", "Phi+", "Phi-", "00", "11", "phi+", "phi-", "sigma+", "sigma-"),
    3: ("vac", "000")
    + tuple(f"{f}_{s}" for f in _MICRO3_FAMILIES for s in _PHASE_SUFFIX)
    + tuple(f"{f}_{s}" for f in _MACRO3_FAMILIES for s in ("0", "-phi", "-2phi")),
}


def build_basis(label: str, arity: int, alpha: complex = 0.0) -> EntangledBasis:
    """Named entangled basis state.

    Pair-mode states (``Psi+``, ``Phi-``, ``Psi_phi``, ``Delta_2phi``, ...)
    live on modes ``1..2*arity`` without displacement; pump states
    (``phi+``, ``sigma-``, ``varphi_-phi``, ``zeta_0``, ...) live on the
    pump modes in the frame ``alpha``.
    """
    if arity == 2:
        micro = {
            "vac": [((0, 0), 1)],
            "1111": [((1, 1), 1)],
            "Psi+": [((1, 0), 1), ((0, 1), 1)],
            "Psi-": [((1, 0), 1), ((0, 1), -1)],
            "Phi+": [((2, 0), 1), ((0, 2), 1)],
            "Phi-": [((2, 0), 1), ((0, 2), -1)],
        }
        macro = {
            "00": [((0, 0), 1)],
            "11": [((1, 1), 1)],
            "phi+": [((0, 1), 1), ((1, 0), 1)],
            "phi-": [((0, 1), 1), ((1, 0), -1)],
            "sigma+": [((0, 2), 1), ((2, 0), 1)],
            "sigma-": [((0, 2), 1), ((2, 0), -1)],
        }
    elif arity == 3:
        micro = {"vac": [((0, 0, 0), 1)]}
        for fam, terms in _MICRO3_FAMILIES.items():
            for suffix, k in _PHASE_SUFFIX.items():
                micro[f"{fam}_{suffix}"] = _cyclic(terms, k)
        macro = {"000": [((0, 0, 0), 1)]}
        for fam, terms in _MACRO3_FAMILIES.items():
            for suffix, k in (("0", 0), ("-phi", 1), ("-2phi", 2)):
                macro[f"{fam}_{suffix}"] = _cyclic(terms, k, sign=-1)
    else:
        raise UnknownLabel(f"arity must be 2 or 3, got {arity}")
    if label in micro:
        return EntangledBasis(arity, label, _micro(arity, micro[label]))
    if label in macro:
        return EntangledBasis(arity, label, _macro(arity, alpha, macro[label]))
    raise UnknownLabel(f"no basis state {label!r} for arity {arity}")


# (block n, member m) -> (pair-mode label, pump label)
MEMBERS = {
    2: {
        (0, 0): ("vac", "00"),
        (0, 1): ("vac", "phi+"),
        (0, 2): ("vac", "sigma+"),
        (0, 3): ("vac", "11"),
        (1, 0): ("Psi+", "00"),
        (1, 1): ("Psi+", "phi+"),
        (1, 2): ("Psi-", "phi-"),
        (1, 3): ("Psi+", "sigma+"),
        (1, 4): ("Psi-", "sigma-"),
        (1, 5): ("Psi+", "11"),
        (2, 0): ("Phi+", "00"),
        (2, 1): ("Phi+", "phi+"),
        (2, 2): ("Phi-", "phi-"),
        (2, 3): ("Phi+", "sigma+"),
        (2, 4): ("Phi-", "sigma-"),
        (2, 5): ("Phi+", "11"),
        (2, 6): ("1111", "00"),
        (2, 7): ("1111", "phi+"),
        (2, 8): ("1111", "sigma+"),
        (2, 9): ("1111", "11"),
    },
    3: {
        (0, 0): ("vac", "000"),
        (0, 1): ("vac", "varphi_0"),
        (0, 2): ("vac", "sigma_0"),
        (0, 3): ("vac", "zeta_0"),
        (1, 0): ("Psi_0", "000"),
        (1, 1): ("Psi_0", "varphi_0"),
        (1, 2): ("Psi_phi", "varphi_-phi"),
        (1, 3): ("Psi_0", "sigma_0"),
        (1, 4): ("Psi_phi", "sigma_-phi"),
        (1, 5): ("Psi_0", "zeta_0"),
        (1, 6): ("Psi_phi", "zeta_-phi"),
        (1, 7): ("Psi_2phi", "zeta_-2phi"),
        (2, 0): ("Phi_0", "000"),
        (2, 1): ("Phi_0", "varphi_0"),
        (2, 2): ("Phi_phi", "varphi_-phi"),
        (2, 3): ("Phi_0", "sigma_0"),
        (2, 4): ("Phi_phi", "sigma_-phi"),
        (2, 5): ("Phi_0", "zeta_0"),
        (2, 6): ("Phi_phi", "zeta_-phi"),
        (2, 7): ("Phi_2phi", "zeta_-2phi"),
        (2, 8): ("Delta_0", "000"),
        (2, 9): ("Delta_0", "varphi_0"),
        (2, 10): ("Delta_phi", "varphi_-phi"),
        (2, 11): ("Delta_2phi", "varphi_-2phi"),
        (2, 12): ("Delta_0", "sigma_0"),
        (2, 13): ("Delta_phi", "sigma_-phi"),
        (2, 14): ("Delta_2phi", "sigma_-2phi"),
        (2, 15): ("Delta_0", "zeta_0"),
        (2, 16): ("Delta_phi", "zeta_-phi"),
    },
}

# Members that reuse another member's amplitude in the block expansion.
SHARED_MEMBERS = {
    3: {
        ("Psi_2phi", "varphi_-2phi"): (1, 2),
        ("Psi_2phi", "sigma_-2phi"): (1, 4),
        ("Phi_2phi", "varphi_-2phi"): (2, 2),
        ("Phi_2phi", "sigma_-2phi"): (2, 4),
        ("Delta_2phi", "zeta_-2phi"): (2, 16),
    }
}


@dataclass(frozen=True)
class BlockAmplitudes:
    arity: int
    entries: dict

    def __getitem__(self, nm) -> complex:
        return self.entries[tuple(nm)]

    def normalization(self, alpha: complex, eta: float) -> float:
        """``sum |alpha*eta|**(2n) |p_nm|**2`` over the listed members.

        Shared members (same amplitude on two basis pairs) count twice.
        """
        s2 = abs(complex(alpha) * eta) ** 2
        total = sum(s2**n * abs(v) ** 2 for (n, _), v in self.entries.items())
        for nm in SHARED_MEMBERS.get(self.arity, {}).values():
            total += s2 ** nm[0] * abs(self.entries[nm]) ** 2
        return float(total)


def block_amplitudes(g: GMatrix, arity: int) -> BlockAmplitudes:
    """Member amplitudes of blocks 0-2 from G-matrix entries ``n, m <= 2``."""
    try:
        G = {(n, m): g[n, m] for n in range(3) for m in range(3)}
    except MissingGEntry:
        raise
    g00, g01, g02 = G[0, 0], G[0, 1], G[0, 2]
    g10, g11, g12 = G[1, 0], G[1, 1], G[1, 2]
    g20, g21, g22 = G[2, 0], G[2, 1], G[2, 2]
    if arity == 2:
        p = {
            (0, 0): g00**2,
            (0, 1): SQ2 * g00 * g01,
            (0, 2): SQ2 * g00 * g02,
            (0, 3): g01**2,
            (1, 0): SQ2 * g00 * g10,
            (1, 1): g10 * g01 + g00 * g11,
            (1, 2): g10 * g01 - g00 * g11,
            (1, 3): g10 * g02 + g00 * g12,
            (1, 4): g10 * g02 - g00 * g12,
            (1, 5): SQ2 * g01 * g11,
            (2, 0): SQ2 * g00 * g20,
            (2, 1): g20 * g01 + g00 * g21,
            (2, 2): g20 * g01 - g00 * g21,
            (2, 3): g20 * g02 + g00 * g22,
            (2, 4): g20 * g02 - g00 * g22,
            (2, 5): SQ2 * g01 * g21,
            (2, 6): g10**2,
            (2, 7): SQ2 * g10 * g11,
            (2, 8): SQ2 * g10 * g12,
            (2, 9): g11**2,
        }
    elif arity == 3:
        e1 = np.exp(-1j * PHI)
        e2 = np.exp(-2j * PHI)
        p = {
            (0, 0): g00**3,
            (0, 1): SQ3 * g00**2 * g01,
            (0, 2): SQ3 * g00**2 * g02,
            (0, 3): SQ3 * g00 * g01**2,
            (1, 0): SQ3 * g00**2 * g10,
            (1, 1): g00**2 * g11 + 2 * g00 * g01 * g10,
            (1, 2): g00**2 * g11 + e1 * g00 * g01 * g10 + e2 * g00 * g01 * g10,
            (1, 3): g00**2 * g12 + 2 * g00 * g10 * g02,
            (1, 4): g00**2 * g12 + e1 * g00 * g10 * g02 + e2 * g00 * g10 * g02,
            (1, 5): g01**2 * g10 + 2 * g00 * g01 * g11,
            (1, 6): g00 * g01 * g11 + e1 * g00 * g01 * g11 + e2 * g01**2 * g10,
            (1, 7): g00 * g01 * g11 + e1 * g01**2 * g10 + e2 * g00 * g01 * g11,
            (2, 0): SQ3 * g00**2 * g20,
            (2, 1): g00**2 * g21 + 2 * g00 * g01 * g20,
            (2, 2): g00**2 * g21 + e1 * g00 * g01 * g20 + e2 * g00 * g01 * g20,
            (2, 3): g00**2 * g22 + 2 * g00 * g02 * g20,
            (2, 4): g00**2 * g22 + e1 * g00 * g02 * g20 + e2 * g00 * g02 * g20,
            (2, 5): g01**2 * g20 + 2 * g00 * g01 * g21,
            (2, 6): g00 * g01 * g21 + e1 * g00 * g01 * g21 + e2 * g01**2 * g20,
            (2, 7): g00 * g01 * g21 + e1 * g01**2 * g20 + e2 * g00 * g01 * g21,
            (2, 8): SQ3 * g00 * g10**2,
            (2, 9): g10**2 * g01 + 2 * g00 * g10 * g11,
            (2, 10): g00 * g10 * g11 + e1 * g10**2 * g01 + e2 * g00 * g10 * g11,
            (2, 11): g00 * g10 * g11 + e1 * g00 * g10 * g11 + e2 * g10**2 * g01,
            (2, 12): g10**2 * g02 + 2 * g00 * g10 * g12,
            (2, 13): g00 * g10 * g12 + e1 * g10**2 * g02 + e2 * g00 * g10 * g12,
            (2, 14): g00 * g10 * g12 + e1 * g00 * g10 * g12 + e2 * g10**2 * g02,
            (2, 15): g00 * g11**2 + 2 * g01 * g10 * g11,
            (2, 16): g00 * g11**2 + e1 * g01 * g10 * g11 + e2 * g01 * g10 * g11,
        }
    else:
        raise ValueError("arity must be 2 or 3")
    return BlockAmplitudes(arity, p)


def source_state(g: GMatrix, n_cut: int = 2) -> StateVector:
    """Unnormalised single-source state truncated at ``n_cut`` pairs."""
    return output_from_g(g, n_cut, normalize=False)


def joint_state(g: GMatrix, arity: int, n_keep: int = 2, per_source_cut: int = 2) -> StateVector:
    """Tensor product of ``arity`` sources, keeping blocks with ``n <= n_keep``.

    The result is unnormalised, exactly as the product of the truncated
    sources; normalise it before reading off probabilities.
    """
    single = source_state(g, per_source_cut)
    joint = None
    for s in range(1, arity + 1):
        src = single.relabel({"1": str(2 * s - 1), "2": str(2 * s), "p": f"p{s}"})
        joint = src if joint is None else joint.tensor(src)
    joint = joint.reorder(micro_modes(arity) + pump_modes(arity))
    nm = 2 * arity
    return joint.filter(lambda lab: sum(lab[:nm]) // 2 <= n_keep)


def project_member(joint: StateVector, micro: StateVector, macro: StateVector) -> complex:
    """``(<micro| x <macro|) |joint>``."""
    return micro.tensor(macro).inner(joint)


def verify_block_decomposition(g: GMatrix, arity: int, n_keep: int = 2) -> list[dict]:
    """Project the brute-force product onto every listed member.

    Each row compares the projection with ``(alpha*eta)**n * p[n, m]``
    evaluated from the closed-form member amplitudes.
    """
    joint = joint_state(g, arity, n_keep)
    amps = block_amplitudes(g, arity)
    s = g.alpha * g.eta
    rows = []
    members = [(nm, pair) for nm, pair in MEMBERS[arity].items() if nm[0] <= n_keep]
    members += [(nm, pair) for pair, nm in SHARED_MEMBERS.get(arity, {}).items() if nm[0] <= n_keep]
    for (n, m), (mic, mac) in members:
        proj = project_member(
            joint, build_basis(mic, arity).state, build_basis(mac, arity, g.alpha).state
        )
        pred = s**n * amps[n, m]
        rows.append(
            {
                "n": n,
                "m": m,
                "micro": mic,
                "macro": mac,
                "projection": proj,
                "predicted": pred,
                "residual": abs(proj - pred),
            }
        )
    return rows


def block_tail(g: GMatrix, arity: int) -> float:
    """Norm of the product state not carried by the listed members."""
    return 1.0 - block_amplitudes(g, arity).normalization(g.alpha, g.eta)


def declared_tail(alpha: complex, eta: float, arity: int) -> float:
    """Upper bound on :func:`block_tail` for small ``alpha*eta``.

    The leading neglected block has three pairs spread over ``arity``
    sources, ``C(arity + 2, 3)`` ways, each of weight ``|alpha*eta|**6``;
    a factor 1.5 covers the higher blocks and the truncated columns.
    """
    from math import comb

    return 1.5 * comb(arity + 2, 3) * abs(complex(alpha) * eta) ** 6
