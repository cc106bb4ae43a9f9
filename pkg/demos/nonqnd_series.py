"""Spin-flipping (sigma_x) coupling: the propagator as a truncated series.

Each order adds one more spin flip; the table shows the deviation from a
brute-force reference shrinking order by order.
"""

import numpy as np

from qndprop import TruncationSpec, make_model, oracle
from qndprop.spin_bose import propagator_nonqnd

model = make_model(1.0, [1.5], [0.2])
a_s, a_p, t = [0.2], [0.1j], 0.8
ref = oracle.kernel_at(oracle.build_hamiltonian("H3", model, TruncationSpec(fock_cutoff=30)),
                       t, a_s, a_p).kernel

print(" N   max dev      last-term size")
for N in range(9):
    res = propagator_nonqnd(model, t, a_s, a_p, TruncationSpec(series_order=N))
    print(f"{N:2d}   {np.abs(res.propagator.matrix - ref).max():.2e}   {res.error_estimate:.2e}")

amps = propagator_nonqnd(model, t, a_s, a_p, TruncationSpec(series_order=8)).propagator.amplitudes
print("off-diagonal amplitudes (spin flips):", amps[0, 1], amps[1, 0])
