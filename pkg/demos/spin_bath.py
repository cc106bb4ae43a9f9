"""Spin bath with QND coupling: one 2x2 factor per bath spin.

Compares the series for a single factor with its exact exponential and
checks the full tensor product against the dense propagator.
"""

import numpy as np

from qndprop import BathKind, make_model, oracle
from qndprop.spin_bath import full_propagator, mode_propagator_exact, mode_propagator_series

model = make_model(1.0, [0.8, 1.3, 0.5], [0.4, -0.25, 0.3], kind=BathKind.SPIN)
t = 1.2

for N in (2, 6, 10, 14):
    series, err = mode_propagator_series(model, 0, +1, t, N)
    exact = mode_propagator_exact(model, 0, +1, t)
    print(f"N={N:2d}: |series - exact| = {np.abs(series - exact).max():.1e}, last term {err:.1e}")

U = oracle.evolve(oracle.build_hamiltonian("H4", model), t).dense()
print("tensor product vs dense propagator:", f"{np.abs(full_propagator(model, t) - U).max():.1e}")
