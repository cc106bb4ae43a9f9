"""Adding an external mode of frequency Omega.

Its effect is a shifted spin precession (w -> w - Omega) and one extra scalar
factor; with Omega = 0 the undriven kernel comes back unchanged.
"""

import numpy as np

from qndprop import TruncationSpec, make_model, oracle
from qndprop.osc_qnd import propagator_driven, propagator_qnd

args = (1.2, [0.9], [0.25])
a_s, a_p, nu_s, nu_p = [0.2j], [0.3], 0.1, -0.2j
driven = make_model(*args, drive_Omega=0.7)

H = oracle.build_hamiltonian("H2", driven, TruncationSpec(fock_cutoff=30))
for t in (0.5, 1.5, 3.0):
    closed = propagator_driven(driven, t, a_s, a_p, nu_s, nu_p).matrix
    ref = oracle.kernel_at(H, t, np.append(a_s, nu_s), np.append(a_p, nu_p)).kernel
    print(f"t={t}: max |closed - oracle| = {np.abs(closed - ref).max():.1e}")

still = propagator_driven(make_model(*args, drive_Omega=0.0), 1.0, a_s, a_p, 0, 0)
print("Omega = 0 equals undriven amplitudes:",
      np.array_equal(still.amplitudes, propagator_qnd(make_model(*args), 1.0, a_s, a_p).amplitudes))
