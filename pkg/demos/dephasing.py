"""Pure dephasing: populations frozen, coherence decays and revives.

Prints the coherence ratio r(t) for a single bath mode; |r| returns to 1
whenever the mode completes a full period.
"""

import numpy as np

from qndprop import TruncationSpec, make_model, oracle
from qndprop.osc_qnd import dephasing_factor

model = make_model(1.0, [1.0], [0.6])
rho0 = 0.5 * np.ones((2, 2))

print("  w1 t    |r| closed   |r| oracle   rho_00 oracle")
for wt in np.linspace(0, 2 * np.pi, 9):
    r = dephasing_factor(model, wt)
    R = oracle.reduced_density("H1", model, rho0, None, wt, TruncationSpec(fock_cutoff=30))
    print(f"{wt:6.3f}   {abs(r):.8f}   {abs(R[0, 1]) / 0.5:.8f}   {R[0, 0].real:.12f}")

# Coherent initial bath: the same closed form with a displaced starting state.
print("r(t=1) for mu=0.4:", dephasing_factor(model, 1.0, [0.4]))
