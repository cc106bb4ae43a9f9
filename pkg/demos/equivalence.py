"""Coordinate coupling and velocity coupling are the same physics.

A quarter-period rotation of each bath mode followed by a shear maps one
quadratic Hamiltonian onto the other exactly.  Rotating the wrong way does not.
"""

from qndprop.canonical import verify_equivalence

for M in (1, 2, 3, 5):
    omegas = [0.5 + 0.6 * j for j in range(M)]
    rep = verify_equivalence(M, omegas)
    print(f"M={M}: deviation {rep.max_abs_deviation:.1e}, symplectic error {rep.symplectic_error:.1e}")

bad = verify_equivalence(3, [0.5, 1.0, 2.0], angle_sign=-1)
print("reversed rotation: deviation", bad.max_abs_deviation, "passed:", bad.passed)
