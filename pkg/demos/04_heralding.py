"""
Heralding entangled pairs from the pump
=======================================

Two sources share phase-locked pumps.  A balanced beam splitter moves all
the coherent light into one output; a click in the other output announces
that the pump states of the two sources differed, which leaves the pairs
in the singlet.  Three sources with a three-mode Fourier transform herald
two orthogonal qutrit states.
"""

from hybridspdc.conditioning import herald_three_source, herald_two_source, probability_scaling

two = herald_two_source(3.0, 0.01)
print("two sources: P(click) =", f"{two.probability:.3e}")
print("  fidelity with the singlet:", f"{two.fidelities['Psi-']:.5f}")
print("  singlet-like to symmetric weight:", f"{two.components['P1'] / two.components['P2']:.0f}")

first, second = herald_three_source(3.0, 0.01)
print("three sources: P(click in p2 only) =", f"{first.probability:.3e}")
print("  fidelities:", {k: round(v, 5) for k, v in first.fidelities.items()})
print("  overlap of the two heralded states:", f"{first.components['dominant_overlap']:.1e}")

rep = probability_scaling(0.06, [0.005, 0.01, 0.02, 0.04])
print("success probability slopes vs eta:", round(rep.slope_P2, 3), round(rep.slope_P3, 3))
print("three-source / two-source ratio:", [round(r, 3) for r in rep.ratio_P3_P2])
