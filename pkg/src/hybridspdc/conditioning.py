"""Click/no-click heralding on the pump modes of two or three sources.

Detectors are ideal on/off counters: the POVM is ``{|0><0|, 1 - |0><0|}``
in the undisplaced frame of the measured mode.  The pump modes are first
mixed by a passive unitary that moves the whole coherent amplitude into one
mode, so the remaining pump modes are undisplaced and can be measured.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonZeroFrame
from .fock_algebra import DensityOperator, StateVector, reduced_density
from .gmatrix import GMatrix, gmatrix_numeric
from .mode_transforms import apply_mode_unitary, bs2, dft3
from .multisource import block_amplitudes, build_basis, joint_state, micro_modes, pump_modes
from .pump_dynamics import DEFAULT_STEPS

CLICK = "click"
NO_CLICK = "no-click"
DEFAULT_M_MAX = 4


@dataclass(frozen=True)
class HeraldResult:
    """Outcome of one click pattern.

    ``probability`` is computed on the normalised joint state;
    ``conditional`` is the normalised state of the surviving signal/idler
    modes.  ``fidelities`` maps target names to fidelities and
    ``components`` holds any further weights reported for the pattern.
    """

    click_pattern: dict
    probability: float
    conditional: DensityOperator
    fidelities: dict = field(default_factory=dict)
    components: dict = field(default_factory=dict)


def _require_undisplaced(frame: complex, mode: str, atol: float = 1e-12):
    if abs(frame) > atol:
        raise NonZeroFrame(f"mode {mode} is displaced by {frame}; its vacuum projector is frame dependent")


def apd_project(rho: DensityOperator, mode: str, outcome: str) -> tuple[DensityOperator, float]:
    """Measure ``mode`` with an on/off detector and remove it.

    Returns the unnormalised post-measurement operator on the remaining
    modes and its trace (the outcome probability for a normalised input).
    """
    mode = str(mode)
    if outcome not in (CLICK, NO_CLICK):
        raise ValueError(f"outcome must be {CLICK!r} or {NO_CLICK!r}")
    i = rho.modes.index(mode)
    _require_undisplaced(rho.frame[i], mode)
    want_vac = outcome == NO_CLICK
    out: dict = {}
    for (a, b), v in rho.entries.items():
        if a[i] != b[i] or (a[i] == 0) != want_vac:
            continue
        key = (a[:i] + a[i + 1:], b[:i] + b[i + 1:])
        out[key] = out.get(key, 0j) + v
    modes = rho.modes[:i] + rho.modes[i + 1:]
    frame = rho.frame[:i] + rho.frame[i + 1:]
    post = DensityOperator(modes, frame, out)
    return post, float(post.trace().real)


def herald_pure(
    state: StateVector, pattern: dict[str, str], keep
) -> tuple[DensityOperator, float]:
    """On/off measurement of a pure state followed by a partial trace.

    Equivalent to :func:`apd_project` on ``|state><state|`` for every mode in
    ``pattern`` and tracing everything outside ``keep``, but works on
    amplitudes directly.  Returns the unnormalised reduced operator and its
    trace.
    """
    idx = {}
    for mode, outcome in pattern.items():
        i = state.modes.index(str(mode))
        _require_undisplaced(state.frame[i], str(mode))
        idx[i] = outcome == CLICK

    def accept(label):
        return all((label[i] > 0) == click for i, click in idx.items())

    kept = state.filter(accept)
    prob = kept.norm_squared()
    if prob == 0:
        keep = tuple(str(m) for m in keep)
        frame = tuple(state.frame[state.modes.index(m)] for m in keep)
        return DensityOperator(keep, frame, {}), 0.0
    return reduced_density(kept, keep), float(prob)


def _conditional(rho: DensityOperator, prob: float) -> DensityOperator:
    return rho * (1.0 / prob) if prob > 0 else rho


def _g(alpha, eta, m_max, steps) -> GMatrix:
    return gmatrix_numeric(alpha, eta, 2, m_max, steps=steps)


def two_source_targets(g: GMatrix) -> dict[str, StateVector]:
    """Ideal singlet and its first-order corrected form built from block amplitudes."""
    p = block_amplitudes(g, 2)
    s = g.alpha * g.eta
    psi_m = build_basis("Psi-", 2).state
    phi_m = build_basis("Phi-", 2).state
    corrected = (psi_m * p[1, 2] + phi_m * (s * p[2, 2])).normalize()
    return {"Psi-": psi_m, "dominant": corrected}


def two_source_component_probabilities(g: GMatrix) -> dict[str, float]:
    """Unnormalised click weights from the block amplitudes (unnormalised product state)."""
    p = block_amplitudes(g, 2)
    s2 = abs(g.alpha * g.eta) ** 2
    P1 = s2 * (abs(p[1, 2]) ** 2 + s2 * abs(p[2, 2]) ** 2)
    P2 = 0.5 * (
        abs(p[0, 2] - p[0, 3]) ** 2
        + s2 * abs(p[1, 3] - p[1, 5]) ** 2
        + s2**2 * abs(p[2, 3] - p[2, 5]) ** 2
        + s2**2 * abs(p[2, 8] - p[2, 9]) ** 2
    )
    return {"P1": float(P1), "P2": float(P2), "P": float(P1 + P2)}


def _swap_antisymmetric_weight(rho: DensityOperator, pairs) -> float:
    """Weight of ``rho`` on the subspace odd under the mode swaps in ``pairs``."""
    idx = {m: i for i, m in enumerate(rho.modes)}

    def swapped(lab):
        lab = list(lab)
        for a, b in pairs:
            ia, ib = idx[a], idx[b]
            lab[ia], lab[ib] = lab[ib], lab[ia]
        return tuple(lab)

    # <P_-> = (tr rho - tr(rho S)) / 2 with S the swap
    tr = rho.trace().real
    tr_s = sum(v for (a, b), v in rho.entries.items() if swapped(b) == a).real
    return float(0.5 * (tr - tr_s))


def herald_two_source(
    alpha: complex, eta: float, m_max: int = DEFAULT_M_MAX, steps: int = DEFAULT_STEPS
) -> HeraldResult:
    """Two sources, beam splitter on the pumps, click in the first output pump."""
    alpha = complex(alpha)
    micro = micro_modes(2)
    if eta == 0:
        rho = DensityOperator(micro, (0.0,) * 4, {})
        return HeraldResult({"p1": CLICK}, 0.0, rho, {"Psi-": 0.0, "dominant": 0.0}, {})
    g = _g(alpha, eta, m_max, steps)
    raw = joint_state(g, 2, n_keep=2)
    raw_norm2 = raw.norm_squared()
    state = apply_mode_unitary(raw * (1.0 / np.sqrt(raw_norm2)), bs2(), pump_modes(2))
    rho_u, prob = herald_pure(state, {"p1": CLICK}, micro)
    rho = _conditional(rho_u, prob)
    targets = two_source_targets(g)
    fid = {name: rho.fidelity(t) for name, t in targets.items()}
    anti = _swap_antisymmetric_weight(rho_u, [("1", "3"), ("2", "4")])
    closed = two_source_component_probabilities(g)
    components = {
        "P1": anti,
        "P2": prob - anti,
        "P1_unnormalized": anti * raw_norm2,
        "P2_unnormalized": (prob - anti) * raw_norm2,
        "closed_form_P1": closed["P1"],
        "closed_form_P2": closed["P2"],
        "closed_form_P": closed["P"],
        "joint_norm_squared": raw_norm2,
    }
    return HeraldResult({"p1": CLICK}, prob, rho, fid, components)


def three_source_targets(g: GMatrix) -> dict[str, StateVector]:
    """Qutrit targets and their first-order corrected forms."""
    p = block_amplitudes(g, 3)
    s = g.alpha * g.eta
    b = {lab: build_basis(lab, 3).state for lab in (
        "Psi_phi", "Psi_2phi", "Phi_phi", "Phi_2phi", "Delta_phi", "Delta_2phi")}
    dom1 = (b["Psi_phi"] * p[1, 2] + (b["Phi_phi"] * p[2, 2] + b["Delta_phi"] * p[2, 10]) * s).normalize()
    dom2 = (b["Psi_2phi"] * p[1, 2] + (b["Phi_2phi"] * p[2, 2] + b["Delta_2phi"] * p[2, 11]) * s).normalize()
    return {"Psi_phi": b["Psi_phi"], "Psi_2phi": b["Psi_2phi"], "dominant_1": dom1, "dominant_2": dom2}


def _dominant(rho: DensityOperator):
    labels, mat = rho.to_matrix()
    w, v = np.linalg.eigh(mat)
    return labels, w[-1].real, v[:, -1]


def herald_three_source(
    alpha: complex, eta: float, m_max: int = DEFAULT_M_MAX, steps: int = DEFAULT_STEPS
) -> tuple[HeraldResult, HeraldResult]:
    """Three sources, DFT on the pumps, single click in the second or third pump.

    Returns the results for the patterns (p2 click, p3 no-click) and
    (p2 no-click, p3 click).  Each carries the full conditional mixture, its
    dominant eigenvalue and the weight outside the dominant eigenvector.
    """
    alpha = complex(alpha)
    micro = micro_modes(3)
    patterns = ({"p2": CLICK, "p3": NO_CLICK}, {"p2": NO_CLICK, "p3": CLICK})
    if eta == 0:
        empty = DensityOperator(micro, (0.0,) * 6, {})
        return tuple(HeraldResult(pat, 0.0, empty, {}, {}) for pat in patterns)
    g = _g(alpha, eta, m_max, steps)
    raw = joint_state(g, 3, n_keep=2)
    raw_norm2 = raw.norm_squared()
    state = apply_mode_unitary(raw * (1.0 / np.sqrt(raw_norm2)), dft3(), pump_modes(3))
    targets = three_source_targets(g)
    p12 = block_amplitudes(g, 3)[1, 2]
    results = []
    vecs = []
    for k, pat in enumerate(patterns):
        rho_u, prob = herald_pure(state, pat, micro)
        rho = _conditional(rho_u, prob)
        ideal = "Psi_phi" if k == 0 else "Psi_2phi"
        dom = f"dominant_{k + 1}"
        labels, lam, vec = _dominant(rho)
        vecs.append(dict(zip(labels, vec)))
        fid = {ideal: rho.fidelity(targets[ideal]), dom: rho.fidelity(targets[dom])}
        components = {
            "dominant_eigenvalue": float(lam),
            "discarded_weight": float(1.0 - lam),
            "probability_unnormalized": prob * raw_norm2,
            "closed_form_probability": float(abs(g.alpha * g.eta) ** 2 * abs(p12) ** 2),
            "joint_norm_squared": raw_norm2,
        }
        results.append(HeraldResult(pat, prob, rho, fid, components))
    overlap = abs(sum(np.conj(vecs[0].get(lab, 0)) * v for lab, v in vecs[1].items()))
    for r in results:
        r.components["dominant_overlap"] = float(overlap)
    return tuple(results)


@dataclass(frozen=True)
class ScalingReport:
    alpha_eta: float
    etas: list
    P2: list
    P3: list
    P1_over_P2: list
    neighbor_ratio: list
    slope_P2: float
    slope_P3: float
    slope_P1_over_P2: float
    slope_neighbor_ratio: float
    ratio_P3_P2: list


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.abs(np.asarray(y, float))), 1)[0])


def scaling_point(alpha_eta: float, eta: float, m_max: int = DEFAULT_M_MAX, steps: int = DEFAULT_STEPS) -> dict:
    """Success probabilities and ratios at one ``(alpha, eta)`` with ``alpha = alpha_eta/eta``."""
    alpha = alpha_eta / eta
    g = _g(alpha, eta, m_max, steps)
    p2 = block_amplitudes(g, 2)
    p3 = block_amplitudes(g, 3)
    comp = two_source_component_probabilities(g)
    return {
        "eta": eta,
        "alpha": alpha,
        "P2": float(abs(p2[1, 2]) ** 2),
        "P3": float(2 * abs(p3[1, 2]) ** 2),
        "P1_over_P2": comp["P1"] / comp["P2"],
        "neighbor_ratio": float(abs(g[0, 0]) / abs(g[0, 1])),
    }


def probability_scaling(
    alpha_eta: float, etas, m_max: int = DEFAULT_M_MAX, steps: int = DEFAULT_STEPS
) -> ScalingReport:
    """Log-log fits of the success probabilities against ``eta`` at fixed ``alpha*eta``."""
    etas = sorted(float(e) for e in etas)
    if len(etas) < 3:
        raise ValueError("need at least three eta values")
    pts = [scaling_point(alpha_eta, e, m_max, steps) for e in etas]
    col = {k: [p[k] for p in pts] for k in ("P2", "P3", "P1_over_P2", "neighbor_ratio")}
    return ScalingReport(
        alpha_eta=alpha_eta,
        etas=etas,
        P2=col["P2"],
        P3=col["P3"],
        P1_over_P2=col["P1_over_P2"],
        neighbor_ratio=col["neighbor_ratio"],
        slope_P2=loglog_slope(etas, col["P2"]),
        slope_P3=loglog_slope(etas, col["P3"]),
        slope_P1_over_P2=loglog_slope(etas, col["P1_over_P2"]),
        slope_neighbor_ratio=loglog_slope(etas, col["neighbor_ratio"]),
        ratio_P3_P2=[a / b for a, b in zip(col["P3"], col["P2"])],
    )
