"""Quadratic-form equivalence checks and squeeze/rotation classification.

Phase-space coordinates are ordered ``z = (Q, P, q_1, p_1, ..., q_M, p_M)``
so the symplectic form is block diagonal with ``[[0, 1], [-1, 0]]`` blocks.
A canonical map ``S`` acts by Heisenberg substitution: conjugating the
operator ``H(z)`` gives ``H(S z)``, so a quadratic form ``M`` becomes
``S^T M S``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .model import SIGMA_X, SIGMA_Y

CLASSIFY_TOL = 1e-9


def _pairs(M: int) -> int:
    return 2 * (M + 1)


def symplectic_form(M: int) -> np.ndarray:
    return np.kron(np.eye(M + 1), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _q(j: int) -> int:
    """Index of q_j (1-based mode j); Q is index 0."""
    return 2 * j


def _p(j: int) -> int:
    return 2 * j + 1


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``H(z) = z^T matrix z / 2 + linear . z + offset``."""

    matrix: np.ndarray
    linear: np.ndarray = None
    offset: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError("quadratic form must be square with even dimension")
        if not np.allclose(m, m.T, atol=1e-14, rtol=0):
            raise ValueError("quadratic form must be symmetric")
        object.__setattr__(self, "matrix", m)
        lin = np.zeros(m.shape[0]) if self.linear is None else np.asarray(self.linear, dtype=float)
        object.__setattr__(self, "linear", lin)

    @property
    def M(self) -> int:
        return self.matrix.shape[0] // 2 - 1

    def coefficient(self, a: int, b: int) -> float:
        """Coefficient of the monomial ``z_a z_b`` in H (``z_a^2`` when a == b)."""
        return self.matrix[a, a] / 2 if a == b else self.matrix[a, b]

    def transformed(self, cmap: "LinearCanonicalMap") -> "QuadraticHamiltonian":
        S, d = cmap.matrix, cmap.translation
        # H(S z + d) expanded in z
        mat = S.T @ self.matrix @ S
        lin = S.T @ (self.matrix @ d + self.linear)
        off = 0.5 * d @ self.matrix @ d + self.linear @ d + self.offset
        return QuadraticHamiltonian(0.5 * (mat + mat.T), lin, float(off))


@dataclass(frozen=True)
class LinearCanonicalMap:
    matrix: np.ndarray
    translation: np.ndarray = field(default=None)

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", S)
        if self.translation is None:
            object.__setattr__(self, "translation", np.zeros(S.shape[0]))

    def symplectic_error(self) -> float:
        J = symplectic_form(self.matrix.shape[0] // 2 - 1)
        return float(np.abs(self.matrix.T @ J @ self.matrix - J).max())

    def then(self, other: "LinearCanonicalMap") -> "LinearCanonicalMap":
        """Map for conjugating by ``self`` first and ``other`` second.

        ``U2 (U1 H U1^+) U2^+ = H(S1 S2 z)`` for linear maps.
        """
        return LinearCanonicalMap(self.matrix @ other.matrix,
                                  self.matrix @ other.translation + self.translation)


def _check_omegas(omegas) -> np.ndarray:
    w = np.asarray(omegas, dtype=float)
    if np.any(w <= 0):
        raise ValueError("bath frequencies must be positive")
    return w


def coordinate_coupling_form(M: int, omegas) -> QuadraticHamiltonian:
    """``P^2/2 + (1/2) sum_j (p_j^2 + w_j^2 (q_j - Q)^2)``."""
    w = _check_omegas(omegas)
    if w.shape[0] != M:
        raise ValueError("need one frequency per bath mode")
    H = np.zeros((_pairs(M), _pairs(M)))
    H[1, 1] = 1.0
    for j in range(1, M + 1):
        w2 = w[j - 1] ** 2
        H[_p(j), _p(j)] = 1.0
        H[_q(j), _q(j)] = w2
        H[0, 0] += w2
        H[0, _q(j)] = H[_q(j), 0] = -w2
    return QuadraticHamiltonian(H)


def velocity_coupling_form(M: int, omegas) -> QuadraticHamiltonian:
    """``P^2/2 + P sum_j w_j q_j + (1/2) sum_j (p_j^2 + w_j^2 q_j^2) + (1/2)(sum_j w_j q_j)^2``."""
    w = _check_omegas(omegas)
    if w.shape[0] != M:
        raise ValueError("need one frequency per bath mode")
    H = np.zeros((_pairs(M), _pairs(M)))
    H[1, 1] = 1.0
    for j in range(1, M + 1):
        H[_p(j), _p(j)] = 1.0
        H[1, _q(j)] = H[_q(j), 1] = w[j - 1]
        for i in range(1, M + 1):
            H[_q(j), _q(i)] += w[j - 1] * w[i - 1]
        H[_q(j), _q(j)] += w[j - 1] ** 2
    return QuadraticHamiltonian(H)


def rotation_map(M: int, omegas, angle_sign: int = 1) -> LinearCanonicalMap:
    """Quarter-period rotation of every bath mode.

    ``angle_sign=+1`` sends ``q_j -> p_j / w_j`` and ``p_j -> -w_j q_j``;
    ``-1`` is the opposite rotation.
    """
    w = _check_omegas(omegas)
    S = np.eye(_pairs(M))
    for j in range(1, M + 1):
        wj = w[j - 1]
        S[_q(j), _q(j)] = S[_p(j), _p(j)] = 0.0
        S[_q(j), _p(j)] = angle_sign / wj
        S[_p(j), _q(j)] = -angle_sign * wj
    return LinearCanonicalMap(S)


def shear_map(M: int, omegas) -> LinearCanonicalMap:
    """Generated by ``Q sum_j w_j q_j``: ``P -> P + sum_j w_j q_j``, ``p_j -> p_j + w_j Q``."""
    w = _check_omegas(omegas)
    S = np.eye(_pairs(M))
    for j in range(1, M + 1):
        S[1, _q(j)] = w[j - 1]
        S[_p(j), 0] = w[j - 1]
    return LinearCanonicalMap(S)


def conjugation_maps(M: int, omegas, angle_sign: int = 1):
    return rotation_map(M, omegas, angle_sign), shear_map(M, omegas)


@dataclass(frozen=True)
class EquivalenceReport:
    max_abs_deviation: float
    symplectic_error: float
    passed: bool


def verify_equivalence(M: int, omegas, angle_sign: int = 1, tol: float = 1e-12) -> EquivalenceReport:
    """Conjugate the coordinate-coupling form by the shear after the rotation
    and compare with the velocity-coupling form entry by entry."""
    U1, U2 = conjugation_maps(M, omegas, angle_sign)
    total = U1.then(U2)
    conj = coordinate_coupling_form(M, omegas).transformed(total)
    target = velocity_coupling_form(M, omegas)
    dev = max(float(np.abs(conj.matrix - target.matrix).max()),
              float(np.abs(conj.linear - target.linear).max(initial=0.0)),
              abs(conj.offset - target.offset))
    symp = max(U1.symplectic_error(), U2.symplectic_error(), total.symplectic_error())
    return EquivalenceReport(dev, symp, dev <= tol and symp <= tol)


class Kind(enum.Enum):
    SQUEEZE_LIKE = "SqueezeLike"
    ROTATION_LIKE = "RotationLike"
    OTHER = "Other"


@dataclass(frozen=True)
class TwoByTwoClassification:
    kind: Kind
    parameter: complex = 0.0
    parity: int | None = None
    determinant: complex = 0.0


# Rotation-like forms and Pauli adjoint actions use the textbook sigma_z = diag(1, -1).
_SIGMA_Z_TEXTBOOK = np.diag([1.0, -1.0]).astype(complex)


def make_squeeze(B: complex) -> np.ndarray:
    return np.diag([np.exp(B), np.exp(-B)]).astype(complex)


def make_rotation(theta: float, parity: int = 0) -> np.ndarray:
    R = np.cos(theta) * np.eye(2) + 1j * np.sin(theta) * SIGMA_X
    return R if parity % 2 == 0 else _SIGMA_Z_TEXTBOOK @ R


def classify_2x2(matrix, tol: float = CLASSIFY_TOL) -> TwoByTwoClassification:
    """Detect ``diag(e^B, e^-B)``, ``e^{i Theta sigma_x}`` or ``sigma_z e^{i Theta sigma_x}``.

    Diagonal matrices with unit determinant are reported as squeeze-like even
    when they are also rotations (Theta = 0 or pi).  ``B`` has its imaginary
    part in (-pi, pi]; ``Theta`` lies in (-pi, pi].
    """
    m = np.asarray(matrix, dtype=complex)
    det = complex(np.linalg.det(m))
    if abs(m[0, 1]) <= tol and abs(m[1, 0]) <= tol and abs(m[0, 0]) > 0:
        B = complex(np.log(m[0, 0]))
        if np.allclose(m, make_squeeze(B), atol=tol, rtol=0):
            return TwoByTwoClassification(Kind.SQUEEZE_LIKE, B, None, det)
    for parity in (0, 1):
        base = m if parity == 0 else _SIGMA_Z_TEXTBOOK @ m
        theta = float(np.arctan2(base[0, 1].imag, base[0, 0].real))
        if np.allclose(m, make_rotation(theta, parity), atol=tol, rtol=0):
            return TwoByTwoClassification(Kind.ROTATION_LIKE, theta, parity, det)
    return TwoByTwoClassification(Kind.OTHER, 0.0, None, det)


_PAULI = (SIGMA_X, SIGMA_Y, _SIGMA_Z_TEXTBOOK)


def pauli_adjoint_action(matrix, tol: float = 1e-10) -> np.ndarray:
    """Real 3x3 ``R`` with ``U sigma_a U^+ = sum_b R[a, b] sigma_b``.

    Pauli matrices are taken in the textbook form (sigma_z = diag(1, -1)).
    """
    U = np.asarray(matrix, dtype=complex)
    if np.abs(U.conj().T @ U - np.eye(2)).max() > tol:
        raise ValueError("pauli_adjoint_action needs a unitary matrix")
    R = np.empty((3, 3))
    for a, sa in enumerate(_PAULI):
        conj = U @ sa @ U.conj().T
        for b, sb in enumerate(_PAULI):
            R[a, b] = 0.5 * np.trace(conj @ sb).real
    return R


def x_rotation(angle: float) -> np.ndarray:
    """Rotation of (sigma_x, sigma_y, sigma_z) about x, sign pattern as for e^{i Theta sigma_x} with angle = 2 Theta."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def squeeze_jacobian(B: complex) -> complex:
    """Determinant of the phase-space map ``(x, p) -> (e^B x, e^-B p)``."""
    return complex(np.linalg.det(make_squeeze(B)))
