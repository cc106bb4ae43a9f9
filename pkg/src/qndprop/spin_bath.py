"""QND spin-bath propagator.

    H4 = (w/2) S_z + sum_k w_k sigma_zk + (w/2) sum_k c_k sigma_xk S_z

The system sector label ``s`` is +1 for slot 0 (spin-down) and -1 for slot 1,
i.e. ``s = (-1)**slot``.  With that reading the per-mode series, the
rotation angle ``Theta = (w/2) s c_k A_n`` and the system phase
``exp(i w s t / 2)`` all reproduce ``exp(-i H4 t)`` verbatim; bath spins use
the same slot order (slot 0 = down, ``sigma_zk = diag(-1, 1)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import expm

from .model import ModelError, Model, SIGMA_X, SIGMA_Z
from .quadrature import SimplexRule, exponential_simplex_integral

MAX_MATERIALIZED_MODES = 10


def _check_sector(s: int) -> int:
    if s not in (1, -1):
        raise ModelError(f"sector label s must be +1 or -1, got {s!r}")
    return int(s)


def sector_slot(s: int) -> int:
    return 0 if _check_sector(s) == 1 else 1


def a_n(tau, t: float) -> float | np.ndarray:
    """Signed time ``sum_j (-1)^(j+1) 2 tau_j + (-1)^n t`` (vectorized over rows)."""
    tau = np.asarray(tau, dtype=float)
    n = tau.shape[-1]
    if n and (np.any(np.diff(tau, axis=-1) < -1e-14) or np.any(tau < -1e-14)
              or np.any(tau > t + 1e-14)):
        raise ModelError("tau must be ordered with 0 <= tau_1 <= ... <= tau_n <= t")
    sgn = np.where(np.arange(1, n + 1) % 2 == 1, 2.0, -2.0)
    val = np.sum(sgn * tau, axis=-1) + (-1) ** n * t
    return float(val) if np.ndim(val) == 0 else val


def theta_kn(model: Model, k: int, s: int, tau, t: float):
    """Rotation angle ``(w/2) s c_k A_n`` of mode k in sector s."""
    k = model.mode_index(k)
    s = _check_sector(s)
    return 0.5 * model.omega * s * model.couplings[k] * a_n(tau, t)


def _rotation_matrix(cos_part, isin_part, n: int) -> np.ndarray:
    sign = (-1) ** n
    return np.array([[cos_part, isin_part], [sign * isin_part, sign * cos_part]], dtype=complex)


def _phase_integrals_exact(beta: float, n: int, t: float):
    """Simplex integrals of ``exp(+i beta A_n)`` and ``exp(-i beta A_n)``."""
    sgn = np.where(np.arange(1, n + 1) % 2 == 1, 2.0, -2.0)
    out = []
    for a in (1j * beta, -1j * beta):
        out.append(np.exp(a * (-1) ** n * t) * exponential_simplex_integral(a * sgn, t))
    return out


def _phase_integrals_closed(beta: float, n: int, t: float):
    """Hand-integrated forms for n <= 2, kept as an independent check."""
    out = []
    for a in (1j * beta, -1j * beta):
        if n == 0:
            v = np.exp(a * t)
        elif n == 1:
            v = t if a == 0 else np.sinh(a * t) / a
        elif n == 2:
            v = t * t / 2 if a == 0 else np.exp(a * t) / (2 * a) * (t - (1 - np.exp(-2 * a * t)) / (2 * a))
        else:
            raise ValueError("closed forms exist only for n <= 2")
        out.append(complex(v))
    return out


def _phase_integrals_quadrature(beta: float, n: int, t: float, q=None):
    rule = SimplexRule.build(n, t, q)
    A = a_n(rule.nodes, t)
    return [rule.integrate(np.exp(1j * beta * A)), rule.integrate(np.exp(-1j * beta * A))]


_METHODS = {
    "exact": lambda b, n, t, q: _phase_integrals_exact(b, n, t),
    "closed": lambda b, n, t, q: _phase_integrals_closed(b, n, t),
    "quadrature": _phase_integrals_quadrature,
}


def mode_term(model: Model, k: int, s: int, t: float, n: int,
              method: str = "exact", q=None) -> np.ndarray:
    """Order-n term ``(i w_k)^n * simplex integral of the rotation matrix``.

    ``method`` picks how the simplex integrals of cos/sin of the piecewise-linear
    angle are done: ``"exact"`` (divided differences, any n), ``"quadrature"``
    (iterated Gauss-Legendre) or ``"closed"`` (hand formulas, n <= 2).
    """
    k = model.mode_index(k)
    s = _check_sector(s)
    beta = 0.5 * model.omega * s * model.couplings[k]
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    plus, minus = _METHODS[method](beta, n, t, q)
    return (1j * model.omegas[k]) ** n * _rotation_matrix((plus + minus) / 2, (plus - minus) / 2, n)


def mode_propagator_series(model: Model, k: int, s: int, t: float, N: int,
                           method: str = "exact", q=None):
    """Bath-mode factor of sector s summed through order N.

    Returns ``(matrix, error_estimate)`` where the estimate is the largest
    entry of the order-N term.
    """
    if N < 0:
        raise ModelError("series order must be >= 0")
    terms = [mode_term(model, k, s, t, n, method, q) for n in range(N + 1)]
    return np.sum(terms, axis=0), float(np.max(np.abs(terms[-1])))


def mode_propagator_exact(model: Model, k: int, s: int, t: float) -> np.ndarray:
    """Exact bath-mode factor: ``exp(-i t (w_k sigma_z - (w/2) c_k s sigma_x))``.

    Uses the Rabi closed form ``cos(r t) I - i sin(r t) h / r`` for the
    traceless Hermitian generator ``h`` with ``r = |h|``.
    """
    k = model.mode_index(k)
    s = _check_sector(s)
    h = model.omegas[k] * SIGMA_Z - 0.5 * model.omega * model.couplings[k] * s * SIGMA_X
    r = np.hypot(model.omegas[k], 0.5 * model.omega * model.couplings[k])
    if r == 0.0:
        return np.eye(2, dtype=complex)
    return np.cos(r * t) * np.eye(2) - 1j * np.sin(r * t) * h / r


def system_phase(model: Model, s: int, t: float) -> complex:
    return complex(np.exp(0.5j * model.omega * _check_sector(s) * t))


@dataclass(frozen=True)
class SpinBathPropagator:
    """Sector-s propagator as a system phase times per-mode 2x2 factors."""

    s: int
    phase: complex
    modes: tuple
    error_estimate: float = 0.0

    def materialize(self) -> np.ndarray:
        """Dense ``2^M x 2^M`` bath-space matrix (mode 1 is the slowest index)."""
        if len(self.modes) > MAX_MATERIALIZED_MODES:
            raise ModelError(
                f"refusing to materialize a tensor product of {len(self.modes)} modes "
                f"(limit {MAX_MATERIALIZED_MODES})")
        return self.phase * reduce(np.kron, self.modes, np.ones((1, 1), dtype=complex))


def propagator_spinbath(model: Model, t: float, s: int, N: int | None = 12,
                        method: str = "exact") -> SpinBathPropagator:
    """Sector-s propagator; ``N=None`` uses the exact per-mode factors."""
    s = _check_sector(s)
    if N is None:
        modes = tuple(mode_propagator_exact(model, k, s, t) for k in range(model.M))
        err = 0.0
    else:
        pairs = [mode_propagator_series(model, k, s, t, N, method) for k in range(model.M)]
        modes = tuple(m for m, _ in pairs)
        err = max((e for _, e in pairs), default=0.0)
    return SpinBathPropagator(s, system_phase(model, s, t), modes, err)


def full_propagator(model: Model, t: float, N: int | None = None,
                    method: str = "exact") -> np.ndarray:
    """Full ``system x bath`` matrix, block diagonal in the system slot."""
    if model.M > MAX_MATERIALIZED_MODES:
        raise ModelError("too many modes to materialize")
    dim = 2 ** model.M
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for s in (1, -1):
        slot = sector_slot(s)
        out[slot * dim:(slot + 1) * dim, slot * dim:(slot + 1) * dim] = (
            propagator_spinbath(model, t, s, N, method).materialize())
    return out


def system_space_term(model: Model, k: int, n: int, tau, t: float) -> np.ndarray:
    """One order-n integrand of mode k expanded over the system space.

    Returns the 4x4 matrix (system slot x bath-mode slot) of
    ``exp(i w S_z t/2) R_n`` with ``S_z = diag(1, -1)`` in slot order.  Only
    the system-diagonal blocks are nonzero.
    """
    out = np.zeros((4, 4), dtype=complex)
    for s in (1, -1):
        slot = sector_slot(s)
        theta = theta_kn(model, k, s, tau, t)
        block = system_phase(model, s, t) * _rotation_matrix(np.cos(theta), 1j * np.sin(theta), n)
        out[2 * slot:2 * slot + 2, 2 * slot:2 * slot + 2] = block
    return out

