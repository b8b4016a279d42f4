"""Invariant suites shared by the ``verify`` subcommand and the tests.

Every suite returns a plain dict with a ``passed`` flag, the measured error
and the tolerance it was held to.  Entries whose reference closed form is
internally inconsistent are listed under ``flagged`` with both values and
do not count as failures.
"""

from __future__ import annotations

import numpy as np

from .conditioning import CLICK, NO_CLICK, herald_pure, herald_two_source
from .fock_algebra import StateVector, change_frame
from .gmatrix import compare_series, gmatrix_numeric
from .mode_transforms import apply_mode_unitary, bs2, check_identity, dft3, pump_identities
from .multisource import (
    block_tail,
    build_basis,
    declared_tail,
    joint_state,
    micro_modes,
    pump_modes,
    verify_block_decomposition,
)
from .pump_dynamics import DEFAULT_STEPS, expm_oracle, solve_blocks, total_output_norm

INTEGRATOR_ETAS = (0.01, 0.05, 0.1, 0.2)


def suite_integrator(l_max: int = 100, etas=INTEGRATOR_ETAS, steps: int = DEFAULT_STEPS, tol: float = 1e-9) -> dict:
    """RK4 block amplitudes against the matrix-exponential oracle."""
    worst = 0.0
    norm_dev = 0.0
    for eta in etas:
        blocks = solve_blocks(range(l_max + 1), eta, steps)
        for l, f in enumerate(blocks):
            worst = max(worst, float(np.max(np.abs(f - expm_oracle(l, eta).values))))
            norm_dev = max(norm_dev, abs(float(f @ f) - 1.0))
    return {
        "passed": worst <= tol and norm_dev <= 1e-10,
        "max_error": worst,
        "tolerance": tol,
        "max_norm_deviation": norm_dev,
        "norm_tolerance": 1e-10,
        "l_max": l_max,
        "etas": list(etas),
    }


def suite_total_norm(alpha: float, eta: float, n_cut: int = 8, steps: int = DEFAULT_STEPS, tol: float = 1e-8) -> dict:
    value = total_output_norm(alpha, eta, n_cut, steps=steps)
    return {"passed": abs(value - 1.0) <= tol, "value": value, "tolerance": tol, "n_cut": n_cut}


def suite_series(alpha: float, eta: float, steps: int = DEFAULT_STEPS) -> dict:
    rows = compare_series(alpha, eta, steps)
    ok = [r for r in rows if not r["flagged"]]
    flagged = [r for r in rows if r["flagged"]]
    return {
        "passed": all(r["abs_diff"] <= r["tolerance"] for r in ok),
        "tolerance": rows[0]["tolerance"],
        "max_error_unflagged": max((r["abs_diff"] for r in ok), default=0.0),
        "flagged": flagged,
        "entries": rows,
    }


def suite_identities(alpha: float = 1.0, tol: float = 1e-10) -> dict:
    """Pump-mode unitary images against their closed forms."""
    entries, flagged = [], []
    passed = True
    for ident in pump_identities(alpha):
        chk = check_identity(ident)
        row = {"name": ident.name, "error": chk.error, "phase": chk.phase, "error_mod_phase": chk.error_mod_phase}
        if ident.conserving is not None:
            row["error_conserving"] = check_identity(ident, conserving=True).error
            flagged.append(row)
            passed &= row["error_conserving"] <= tol
        else:
            passed &= chk.error <= tol
        entries.append(row)
    return {"passed": bool(passed), "tolerance": tol, "entries": entries, "flagged": flagged}


def suite_blocks(alpha: float, eta: float, steps: int = DEFAULT_STEPS, tol: float = 1e-9) -> dict:
    g = gmatrix_numeric(alpha, eta, 2, 4, steps=steps)
    out = {"tolerance": tol, "passed": True}
    for arity in (2, 3):
        rows = verify_block_decomposition(g, arity)
        worst = max(r["residual"] for r in rows)
        tail = block_tail(g, arity)
        bound = declared_tail(alpha, eta, arity)
        out[f"arity_{arity}"] = {
            "max_residual": worst,
            "members": len(rows),
            "tail": tail,
            "tail_bound": bound,
        }
        out["passed"] &= worst <= tol and 0 <= tail <= bound
    single_tail = 1.0 - g.normalization()
    out["single_source"] = {"tail": single_tail, "tail_bound": declared_tail(alpha, eta, 1)}
    out["passed"] &= 0 <= single_tail <= declared_tail(alpha, eta, 1)
    out["passed"] = bool(out["passed"])
    return out


def suite_frame_transport(alpha: float = 1.0, tol: float = 1e-9, cutoff: int = 40) -> dict:
    """Unitary in the displaced frame versus the same unitary in the Fock frame."""
    worst = 0.0
    for ident in pump_identities(alpha)[:6]:
        s = ident.source
        fock_first = apply_mode_unitary(change_frame(s, 0.0, cutoff), ident.unitary, s.modes, max_photons=2 * cutoff + 4)
        displaced_first = change_frame(apply_mode_unitary(s, ident.unitary, s.modes), 0.0, cutoff)
        diff = fock_first.pruned(0) - displaced_first.pruned(0)
        worst = max(worst, diff.norm())
    return {"passed": worst <= tol, "max_error": worst, "tolerance": tol}


def _support_residual(rho) -> float:
    basis = [build_basis(l, 2).state for l in ("Psi-", "Phi-", "vac", "Psi+", "Phi+", "1111")]
    inside = sum(rho.expectation(b).real for b in basis)
    return float(rho.trace().real - inside)


def suite_heralding(alpha: float, eta: float, steps: int = DEFAULT_STEPS) -> dict:
    """Probability bookkeeping and the two independent routes to the click weights."""
    res = herald_two_source(alpha, eta, steps=steps)
    c = res.components
    g = gmatrix_numeric(alpha, eta, 2, 4, steps=steps)
    raw = joint_state(g, 2)
    state = apply_mode_unitary(raw.normalize(), bs2(), pump_modes(2))
    _, p_click = herald_pure(state, {"p1": CLICK}, micro_modes(2))
    _, p_none = herald_pure(state, {"p1": NO_CLICK}, micro_modes(2))
    raw3 = joint_state(g, 3)
    state3 = apply_mode_unitary(raw3.normalize(), dft3(), pump_modes(3))
    total3 = sum(
        herald_pure(state3, {"p2": a, "p3": b}, micro_modes(3))[1]
        for a in (CLICK, NO_CLICK)
        for b in (CLICK, NO_CLICK)
    )
    d1 = abs(c["P1_unnormalized"] - c["closed_form_P1"])
    d2 = abs(c["P2_unnormalized"] - c["closed_form_P2"])
    support = _support_residual(res.conditional)
    checks = {
        "two_source_sum": abs(p_click + p_none - 1.0),
        "three_source_sum": abs(total3 - 1.0),
        "P1_route_difference": d1,
        "P2_route_difference": d2,
        "support_residual": support,
    }
    tols = {
        "two_source_sum": 1e-10,
        "three_source_sum": 1e-10,
        "P1_route_difference": 1e-9,
        "P2_route_difference": 1e-9,
        "support_residual": 1e-8,
    }
    return {
        "passed": all(abs(checks[k]) <= tols[k] for k in checks),
        "values": checks,
        "tolerances": tols,
        "probability": res.probability,
        "fidelities": res.fidelities,
    }


def run_all(alpha: float = 2.0, eta: float = 0.02, steps: int = DEFAULT_STEPS) -> dict:
    suites = {
        "integrator": suite_integrator(steps=steps),
        "total_norm": suite_total_norm(alpha, eta, steps=steps),
        "series": suite_series(alpha, eta, steps),
        "identities": suite_identities(),
        "blocks": suite_blocks(alpha, eta, steps),
        "frame_transport": suite_frame_transport(),
        "heralding": suite_heralding(alpha, eta, steps),
    }
    return {"passed": all(s["passed"] for s in suites.values()), "suites": suites}
