"""Acceptance criteria 1-9, each at its stated tolerance.

Every criterion prints one ``PASS``/``FAIL`` line (collected into the
pytest summary, or printed directly with ``python tests/test_acceptance.py``).
"""

from __future__ import annotations

import json
import time

import numpy as np

from hybridspdc import cli
from hybridspdc.conditioning import herald_three_source, herald_two_source, loglog_slope
from hybridspdc.gmatrix import gmatrix_numeric
from hybridspdc.metrics import BipartitionSpec, hybrid_witness, negativity
from hybridspdc.mode_transforms import check_identity, pump_identities
from hybridspdc.multisource import block_tail, declared_tail, verify_block_decomposition
from hybridspdc.pump_dynamics import expm_oracle, pump_window, solve_blocks, total_output_norm
from hybridspdc.spdc_state import assemble_output, correlation_matrix, reduced_density, tmsv_reference
from hybridspdc.verification import suite_series

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

SWEEP = (0.005, 0.01, 0.02, 0.04)


def _record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for eta in (0.01, 0.05, 0.1, 0.2):
        for l, f in enumerate(solve_blocks(range(101), eta)):
            worst = max(worst, float(np.max(np.abs(f - expm_oracle(l, eta).values))))
    dt = time.perf_counter() - t0
    return worst <= 1e-9 and dt < 10, f"max |RK4 - expm| = {worst:.2e} (<= 1e-9), {dt:.1f} s (< 10 s)"


def criterion_2():
    block_dev = 0.0
    for alpha in (1, 2, 3, 4):
        lo, hi = pump_window(alpha)
        for eta in (0.01, 0.05):
            for f in solve_blocks(range(lo, hi + 3), eta):
                block_dev = max(block_dev, abs(float(f @ f) - 1))
    total_dev = max(abs(total_output_norm(a, e, 8) - 1) for a in (1, 2, 3, 4) for e in (0.01, 0.05))
    tails_ok = True
    worst_ratio = 0.0
    for a in (1, 2, 3, 4):
        for e in (0.01, 0.05):
            g = gmatrix_numeric(a, e, 2, 4)
            for arity, tail in ((1, 1 - g.normalization()), (2, block_tail(g, 2)), (3, block_tail(g, 3))):
                bound = declared_tail(a, e, arity)
                tails_ok &= 0 <= tail <= bound
                worst_ratio = max(worst_ratio, tail / bound)
    ok = block_dev <= 1e-10 and total_dev <= 1e-8 and tails_ok
    return ok, (
        f"per-block norm dev {block_dev:.1e} (<= 1e-10), total norm dev {total_dev:.1e} (<= 1e-8), "
        f"one/two/three-source tails <= declared bound (worst tail/bound {worst_ratio:.2f})"
    )


def criterion_3():
    t0 = time.perf_counter()
    alphas, etas = (1.0, 2.0, 3.0, 4.0), (0.005, 0.01, 0.02)
    diffs: dict = {}
    flagged_entries = set()
    unflagged_ok = True
    for a in alphas:
        for e in etas:
            rep = suite_series(a, e)
            unflagged_ok &= rep["passed"]
            for r in rep["entries"]:
                diffs.setdefault((r["n"], r["m"]), {}).setdefault(a, []).append(r["abs_diff"])
                if r["flagged"] and e >= 0.01:
                    flagged_entries.add((r["n"], r["m"]))
    # a flagged entry is systematic if its discrepancy falls slower than the
    # sixth-order tolerance, i.e. a missing or wrong lower-order term
    slopes = {
        nm: max(loglog_slope(etas, diffs[nm][a]) for a in alphas) for nm in flagged_entries
    }
    systematic = all(s < 5 for s in slopes.values())
    report = json.loads(_run_cli(["verify", "--alpha", "1", "--eta", "0.02"]))
    shown = {(r["n"], r["m"]) for r in report["suites"]["series"]["flagged"]}
    both_values = all("numeric" in r and "series" in r for r in report["suites"]["series"]["flagged"])
    dt = time.perf_counter() - t0
    ok = unflagged_ok and systematic and dt < 30 and shown == flagged_entries and both_values
    slope_txt = ", ".join(f"g{n}{m}:{s:.2f}" for (n, m), s in sorted(slopes.items()))
    return ok, (
        f"unflagged entries within 50*eta^6*max(1,|alpha|^6); flagged {sorted(flagged_entries)} "
        f"systematic (discrepancy slope vs eta {slope_txt} < 5); verify at alpha=1, eta=0.02 lists "
        f"{sorted(shown)} with both values; {dt:.1f} s (< 30 s)"
    )


def criterion_4():
    worst, phases, bad = 0.0, {}, []
    for ident in pump_identities(1.0):
        chk = check_identity(ident)
        err = chk.error_mod_phase if ident.name.startswith("dft_zeta") else chk.error
        if ident.name.startswith("dft_zeta"):
            phases[ident.name] = chk.phase
        if err > 1e-10:
            bad.append(f"{ident.name} err={err:.3f}")
        else:
            worst = max(worst, err)
    phase_txt = ", ".join(f"{k}:{v:+.1e}" for k, v in phases.items())
    return not bad, (
        f"{16 - len(bad)}/16 identities within 1e-10 (worst {worst:.1e}); reported global phases {phase_txt}; "
        f"not reproduced as written: {bad or 'none'}"
    )


def criterion_5():
    g = gmatrix_numeric(2.0, 0.02, 2, 4)
    worst = {ar: max(r["residual"] for r in verify_block_decomposition(g, ar)) for ar in (2, 3)}
    ok = all(v <= 1e-9 for v in worst.values())
    return ok, f"max |projection - closed form|: two sources {worst[2]:.1e}, three sources {worst[3]:.1e} (<= 1e-9)"


def criterion_6():
    eta = 0.01
    f2, f3a, f3b = [], [], []
    for ae in (0.1, 0.06, 0.03):
        r2 = herald_two_source(ae / eta, eta)
        r3a, r3b = herald_three_source(ae / eta, eta)
        f2.append(r2.fidelities["Psi-"])
        f3a.append(r3a.fidelities["Psi_phi"])
        f3b.append(r3b.fidelities["Psi_2phi"])
    thresh = min(f2[-1], f3a[-1], f3b[-1]) >= 0.99
    mono = all(np.all(np.diff(f) > 0) for f in (f2, f3a, f3b))
    return thresh and mono, (
        f"at alpha*eta=0.03: F2={f2[-1]:.4f}, F3_1={f3a[-1]:.4f}, F3_2={f3b[-1]:.4f} (>= 0.99); "
        f"increasing as alpha*eta goes 0.1->0.06->0.03: {mono}"
    )


def criterion_7():
    t0 = time.perf_counter()
    rep = json.loads(_run_cli(["sweep", "--fixed-alpha-eta", "0.06", "--sweep-eta", ",".join(map(str, SWEEP))]))
    dt = time.perf_counter() - t0
    ratios = rep["ratio_P3_P2"]
    ok = (
        abs(rep["slope_P2"] - 2) <= 0.1
        and abs(rep["slope_P3"] - 2) <= 0.1
        and all(abs(r / 2 - 1) <= 0.2 for r in ratios)
        and abs(rep["slope_P1_over_P2"] + 2) <= 0.2
        and abs(rep["slope_neighbor_ratio"] + 1) <= 0.05
        and dt < 120
    )
    return ok, (
        f"slopes P2 {rep['slope_P2']:.4f}, P3 {rep['slope_P3']:.4f}, P1/P2 {rep['slope_P1_over_P2']:.4f}, "
        f"neighbor ratio {rep['slope_neighbor_ratio']:.4f}; P3/P2 in [{min(ratios):.3f}, {max(ratios):.3f}]; {dt:.1f} s"
    )


def criterion_8():
    purities = []
    for eta in (1e-2, 1e-3):
        out = assemble_output(0.1 / eta, eta)
        rho = reduced_density(out.state, ("1", "2"))
        purities.append(rho.purity())
    fid = rho.fidelity(tmsv_reference(np.arctanh(0.1), out.n_cut))
    ok = fid >= 0.999 and purities[1] > purities[0] and 1 - purities[1] < 1e-6
    return ok, f"F(rho12, TMSV) = {fid:.9f} (>= 0.999); purity {purities[0]:.10f} -> {purities[1]:.12f} as eta 1e-2 -> 1e-3"


def criterion_9():
    negs, wits = [], []
    for eta in SWEEP:
        out = assemble_output(0.06 / eta, eta, n_cut=3)
        rho = out.state.density()
        negs.append(negativity(rho, BipartitionSpec.of(rho.modes, ("1", "2"))))
        wits.append(hybrid_witness(correlation_matrix(out.g)))
    ok = min(negs + wits) > 0 and np.all(np.diff(negs) >= 0) and np.all(np.diff(wits) >= 0)
    return ok, "negativity " + ", ".join(f"{x:.2e}" for x in negs) + "; witness " + ", ".join(f"{x:.2e}" for x in wits)


def _run_cli(argv) -> str:
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        cli.main(argv)
    return buf.getvalue()


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def _check(number: int) -> None:
    ok, detail = CRITERIA[number]()
    _record(number, bool(ok), detail)
    assert ok, detail


def test_criterion_1_integrator_vs_oracle():
    _check(1)


def test_criterion_2_normalization():
    _check(2)


def test_criterion_3_series_vs_numerics():
    _check(3)


def test_criterion_4_pump_identities():
    _check(4)


def test_criterion_5_block_amplitudes():
    _check(5)


def test_criterion_6_heralded_fidelities():
    _check(6)


def test_criterion_7_scaling_laws():
    _check(7)


def test_criterion_8_undepleted_limit():
    _check(8)


def test_criterion_9_entanglement_trend():
    _check(9)


if __name__ == "__main__":
    for k, fn in CRITERIA.items():
        ok, detail = fn()
        _record(k, bool(ok), detail)
