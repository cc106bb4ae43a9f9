"""Squeeze and rotation structure of the QND propagators.

The oscillator-bath amplitudes are a squeeze diag(e^B, e^-B); each spin-bath
factor at order zero is a rotation exp(i Theta sigma_x), which acts on the
Pauli vector as a rotation about x by 2 Theta.
"""

import numpy as np

from qndprop import BathKind, make_model
from qndprop.canonical import classify_2x2, make_rotation, pauli_adjoint_action
from qndprop.osc_qnd import amplitude_A, amplitude_B, propagator_qnd
from qndprop.spin_bath import mode_term

osc = make_model(1.0, [1.0], [0.3])
amps = propagator_qnd(osc, 1.5, [0.2], [0.1]).amplitudes / np.exp(amplitude_A(osc, 1.5))
c = classify_2x2(amps)
print(c.kind.value, "B =", c.parameter, "expected", amplitude_B(osc, 1.5, [0.2], [0.1]))

spins = make_model(1.0, [0.8], [0.4], kind=BathKind.SPIN)
c = classify_2x2(mode_term(spins, 0, +1, 2.0, 0))
print(c.kind.value, "Theta =", c.parameter, "parity", c.parity)

np.set_printoptions(precision=4, suppress=True)
print("adjoint action of exp(i pi/8 sigma_x):\n", pauli_adjoint_action(make_rotation(np.pi / 8)))
R = pauli_adjoint_action(make_rotation(np.pi / 8, parity=1))
print("with a sigma_z twist:\n", R, "\ndet =", np.linalg.det(R))
