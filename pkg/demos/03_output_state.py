"""
The hybrid output state
=======================

With a weak coupling the signal and idler look like a two-mode squeezed
vacuum.  The pump still records a small amount of which-pair information,
visible in the negativity across the pairs/pump split and in the overlap
of the pump states that accompany zero and one pair.
"""

import numpy as np

from hybridspdc.metrics import BipartitionSpec, hybrid_witness, negativity
from hybridspdc.spdc_state import assemble_output, correlation_matrix, reduced_rho12, tmsv_reference

alpha_eta = 0.06
for eta in (0.005, 0.01, 0.02, 0.04):
    out = assemble_output(alpha_eta / eta, eta, n_cut=3)
    rho12, J = reduced_rho12(out)
    full = out.state.density()
    neg = negativity(full, BipartitionSpec.of(full.modes, ("1", "2")))
    fid = rho12.fidelity(tmsv_reference(np.arctanh(alpha_eta), out.n_cut))
    print(
        f"eta={eta:<6} alpha={alpha_eta / eta:<5} F(TMSV)={fid:.8f} "
        f"purity={rho12.purity():.10f} negativity={neg:.2e} witness={hybrid_witness(J):.2e}"
    )
