"""
Pair creation inside one block
==============================

A fixed number of pump photons ``l`` can only be traded for photon pairs,
so the dynamics stays inside ``l + 1`` states.  We integrate one block,
compare against the matrix exponential and watch the pair amplitudes.
"""

import numpy as np

from hybridspdc.pump_dynamics import expm_oracle, solve_f, total_output_norm

# A block with 50 pump photons at a moderate coupling
block = solve_f(50, 0.05)
print("first pair amplitudes:", np.round(block.values[:5], 6))
print("norm:", block.values @ block.values)

# The RK4 result and the exact exponential agree far below 1e-9
print("max |rk4 - expm|:", np.max(np.abs(block.values - expm_oracle(50, 0.05).values)))

# Summed over the coherent pump and over every pair number the output keeps
# unit norm
print("total output norm at alpha=2, eta=0.02:", total_output_norm(2.0, 0.02, 8))
