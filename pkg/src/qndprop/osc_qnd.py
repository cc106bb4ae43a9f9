"""Closed-form propagators of the QND oscillator-bath models.

The undriven Hamiltonian is

    H1 = (w/2) sigma_z + sum_k w_k b_k^+ b_k + (w/2) sum_k g_k (b_k + b_k^+) sigma_z

and the driven variant adds an external mode ``Omega a^+ a - (Omega/2) sigma_z``.
Both are block diagonal in the system spin, so the amplitude matrix is
``exp(A) diag(exp(B), exp(-B))`` times the free bath kernel.
"""

from __future__ import annotations

import numpy as np

from .model import ModelError, Model, Propagator2x2, free_bath_kernel


def _phis(model: Model, t: float) -> np.ndarray:
    return (model.omega / 2.0) * model.couplings / model.omegas * (1.0 - np.exp(-1j * model.omegas * t))


def phase_phi(model: Model, k: int, t: float) -> complex:
    """Displacement coefficient ``(w/2)(g_k/w_k)(1 - exp(-i w_k t))`` of mode k."""
    k = model.mode_index(k)
    return complex(_phis(model, t)[k])


def amplitude_A(model: Model, t: float) -> complex:
    """Spin-independent exponent of the QND amplitudes.

    The first term is purely imaginary and the second has non-positive real
    part, so ``Re(A) <= 0`` for all real t.
    """
    w2 = (model.omega / 2.0) ** 2
    g2 = model.couplings ** 2
    wk = model.omegas
    return complex(1j * w2 * np.sum(g2 / wk) * t
                   - w2 * np.sum(g2 / wk ** 2 * (1.0 - np.exp(-1j * wk * t))))


def amplitude_B(model: Model, t: float, alpha_star, alpha_prime) -> complex:
    """Label-dependent exponent ``sum_k phi_k (a*_k + a'_k) + i w t / 2``."""
    a_s = model.labels(alpha_star, "alpha_star")
    a_p = model.labels(alpha_prime, "alpha_prime")
    return complex(np.sum(_phis(model, t) * (a_s + a_p)) + 0.5j * model.omega * t)


def amplitude_B2(model: Model, t: float, alpha_star, alpha_prime) -> complex:
    """Driven-model exponent; the free spin phase uses ``w - Omega``."""
    if model.drive_Omega is None:
        raise ModelError("driven model requires drive_Omega")
    a_s = model.labels(alpha_star, "alpha_star")
    a_p = model.labels(alpha_prime, "alpha_prime")
    return complex(np.sum(_phis(model, t) * (a_s + a_p))
                   + 0.5j * (model.omega - model.drive_Omega) * t)


def _squeeze_form(A: complex, B: complex) -> np.ndarray:
    out = np.zeros((2, 2), dtype=complex)
    out[0, 0] = np.exp(A + B)
    out[1, 1] = np.exp(A - B)
    return out


def propagator_qnd(model: Model, t: float, alpha_star, alpha_prime) -> Propagator2x2:
    a_s = model.labels(alpha_star, "alpha_star")
    a_p = model.labels(alpha_prime, "alpha_prime")
    A = amplitude_A(model, t)
    B = amplitude_B(model, t, a_s, a_p)
    return Propagator2x2(free_bath_kernel(model, t, a_s, a_p), _squeeze_form(A, B))


def propagator_driven(model: Model, t: float, alpha_star, alpha_prime,
                      nu_star: complex, nu_prime: complex) -> Propagator2x2:
    """Driven-model kernel; the external mode enters as ``exp(nu* nu' e^{-i Omega t})``."""
    if model.drive_Omega is None:
        raise ModelError("driven model requires drive_Omega")
    a_s = model.labels(alpha_star, "alpha_star")
    a_p = model.labels(alpha_prime, "alpha_prime")
    A = amplitude_A(model, t)
    B2 = amplitude_B2(model, t, a_s, a_p)
    drive = complex(np.exp(complex(nu_star) * complex(nu_prime) * np.exp(-1j * model.drive_Omega * t)))
    return Propagator2x2(free_bath_kernel(model, t, a_s, a_p), _squeeze_form(A, B2), drive)


def dephasing_factor(model: Model, t: float, bath_initial=None) -> complex:
    """Coherence ratio ``rho_01(t) / rho_01(0)`` of the reduced system state.

    The bath starts in the product coherent state ``|mu>`` (vacuum when
    ``bath_initial`` is None).  Acting with the slot-j kernel on ``|mu>``
    gives ``exp(c_j)`` times an unnormalized coherent state of amplitude
    ``z_j = mu e^{-i w_k t} + sign_j phi_k`` (sign_0 = +1, sign_1 = -1), where
    ``c_j = A + sign_j (i w t/2 + sum_k phi_k mu_k)``.  The ratio is the
    overlap of the two branches:

        r = exp(-|mu|^2 + c_0 + conj(c_1) + sum_k conj(z_1k) z_0k)
    """
    mu = np.zeros(model.M, dtype=complex) if bath_initial is None else model.labels(bath_initial, "bath_initial")
    phi = _phis(model, t)
    A = amplitude_A(model, t)
    free = mu * np.exp(-1j * model.omegas * t)
    shift = 0.5j * model.omega * t + np.sum(phi * mu)
    c0 = A + shift
    c1 = A - shift
    z0 = free + phi
    z1 = free - phi
    return complex(np.exp(-np.sum(np.abs(mu) ** 2) + c0 + np.conj(c1) + np.sum(np.conj(z1) * z0)))
