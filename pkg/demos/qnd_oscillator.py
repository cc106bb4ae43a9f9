"""Closed-form kernel of a spin dephased by an oscillator bath, checked against brute force.

The spin never flips, so the 2x2 amplitude matrix is diagonal; all the bath
physics sits in two exponents A and B.
"""

import numpy as np

from qndprop import TruncationSpec, make_model, oracle
from qndprop.osc_qnd import amplitude_A, amplitude_B, propagator_qnd

model = make_model(1.0, [1.0, 1.7], [0.2, 0.1])
a_s, a_p = np.array([0.3, -0.1j]), np.array([0.2, 0.4])

print(" t     A                      B                      rel. dev vs oracle")
H = oracle.build_hamiltonian("H1", model, TruncationSpec(fock_cutoff=30))
for t in (0.5, 1.0, 2.0, 4.0):
    closed = propagator_qnd(model, t, a_s, a_p).matrix
    ref = oracle.kernel_at(H, t, a_s, a_p).kernel
    dev = np.abs(closed - ref).max() / np.abs(ref).max()
    A, B = amplitude_A(model, t), amplitude_B(model, t, a_s, a_p)
    print(f"{t:4.1f}  {A:.6f}  {B:.6f}  {dev:.1e}")

# Re(A) <= 0 always: the bath can only shrink the kernel's spin-independent part.
ts = np.linspace(0, 20, 201)
print("max Re(A) over t in [0, 20]:", max(amplitude_A(model, t).real for t in ts))
