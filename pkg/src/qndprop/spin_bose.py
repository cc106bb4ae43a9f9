"""Order-N series for the non-QND spin-Bose propagator.

    H3 = (w/2) sigma_z + sum_k w_k b_k^+ b_k + (w/2) sum_k g_k (b_k + b_k^+) sigma_x

The series expands in the system splitting; each order-n term is an integral
over the time-ordered simplex of ``exp(kappa_n)`` times a cosh/sinh matrix of
``chi_n``.  Order n is bounded by ``(w t / 2)^n / n!`` in size.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ModelError, Model, Propagator2x2, TruncationSpec, free_bath_kernel
from .quadrature import SimplexRule


def _check_tau(tau: np.ndarray, t: float) -> None:
    """Accept ``tau`` of shape (n,) or (P, n); every row must be ordered in [0, t]."""
    if tau.shape[-1] == 0:
        return
    lo, hi = (0.0, t) if t >= 0 else (t, 0.0)
    step = np.diff(tau, axis=-1)
    ok = (np.all(step * np.sign(t or 1.0) >= -1e-14)
          and np.all(tau >= lo - 1e-14) and np.all(tau <= hi + 1e-14))
    if not ok:
        raise ModelError("tau must be ordered with 0 <= tau_1 <= ... <= tau_n <= t")


def _alternating(n: int) -> np.ndarray:
    """(-1)^(l+1) for l = 1..n."""
    return np.where(np.arange(1, n + 1) % 2 == 1, 1.0, -1.0)


def _kappa_bracket(wk: float, tau: np.ndarray, t: float) -> np.ndarray:
    n = tau.shape[-1]
    sgn = _alternating(n)
    ft = np.exp(-1j * wk * t)
    e_tau = np.exp(-1j * wk * tau)
    out = (2 * n + 1) - 1j * wk * t + (-1) ** (n + 1) * ft
    out = out - 2.0 * np.sum(sgn * e_tau, axis=-1)
    out = out + 2.0 * (-1) ** n * np.sum(sgn * np.exp(-1j * wk * (t - tau)), axis=-1)
    if n >= 2:
        # sum_{p>q} (-1)^{p+q} e^{-i w tau_p} e^{+i w tau_q} via prefix sums over q
        par = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)  # (-1)^l
        prefix = np.cumsum(par * np.conj(e_tau), axis=-1)
        out = out + 4.0 * np.sum(par[1:] * e_tau[..., 1:] * prefix[..., :-1], axis=-1)
    return out


def kappa_n(model: Model, t: float, tau) -> complex | np.ndarray:
    """Scalar exponent of the order-n integrand (vectorized over rows of ``tau``)."""
    tau = np.asarray(tau, dtype=float)
    _check_tau(tau, t)
    scale = (model.omega / 2.0) ** 2 * model.couplings ** 2 / model.omegas ** 2
    total = np.zeros(tau.shape[:-1], dtype=complex)
    for k in range(model.M):
        total = total + scale[k] * _kappa_bracket(model.omegas[k], tau, t)
    total = -total
    return complex(total) if total.ndim == 0 else total


def chi_n(model: Model, t: float, tau, alpha_star, alpha_prime) -> complex | np.ndarray:
    """Label-linear argument of the cosh/sinh matrix (vectorized over rows of ``tau``)."""
    tau = np.asarray(tau, dtype=float)
    _check_tau(tau, t)
    a_s = model.labels(alpha_star, "alpha_star")
    a_p = model.labels(alpha_prime, "alpha_prime")
    n = tau.shape[-1]
    sgn = _alternating(n)
    total = np.zeros(tau.shape[:-1], dtype=complex)
    for k in range(model.M):
        wk = model.omegas[k]
        edge = (a_p[k] + (-1) ** n * a_s[k]) * (1.0 + (-1) ** (n + 1) * np.exp(-1j * wk * t))
        late = 2.0 * a_s[k] * np.sum(sgn * np.exp(-1j * wk * (t - tau)), axis=-1)
        early = -2.0 * a_p[k] * np.sum(sgn * np.exp(-1j * wk * tau), axis=-1)
        total = total + model.couplings[k] / wk * (edge + late + early)
    total = -(model.omega / 2.0) * total
    return complex(total) if total.ndim == 0 else total


def order_term(model: Model, t: float, n: int, alpha_star, alpha_prime,
               q: Optional[int] = None) -> np.ndarray:
    """Order-n contribution to the amplitude matrix, prefactor included."""
    rule = SimplexRule.build(n, t, q)
    kap = kappa_n(model, t, rule.nodes)
    chi = chi_n(model, t, rule.nodes, alpha_star, alpha_prime)
    ek = np.exp(kap)
    c = rule.integrate(ek * np.cosh(chi))
    s = rule.integrate(ek * np.sinh(chi))
    sign = (-1) ** n
    mat = np.array([[c, s], [sign * s, sign * c]], dtype=complex)
    return (0.5j * model.omega) ** n * mat


@dataclass(frozen=True)
class SeriesResult:
    """Truncated-series propagator with its last-term error estimate.

    ``error_estimate`` is the largest entry of the order-N amplitude term,
    on the same scale as ``propagator.amplitudes``.
    """

    propagator: Propagator2x2
    error_estimate: float
    terms: tuple


def propagator_nonqnd(model: Model, t: float, alpha_star, alpha_prime,
                      trunc: Optional[TruncationSpec] = None) -> SeriesResult:
    """Sum the series through ``trunc.series_order`` (default 4).

    ``trunc.quad_points`` fixes the Gauss-Legendre points per dimension for
    every order; when it is None the per-order default is used.
    """
    trunc = TruncationSpec() if trunc is None else trunc
    a_s = model.labels(alpha_star, "alpha_star")
    a_p = model.labels(alpha_prime, "alpha_prime")
    terms = tuple(order_term(model, t, n, a_s, a_p, trunc.quad_points)
                  for n in range(trunc.series_order + 1))
    amps = np.sum(terms, axis=0)
    if not np.all(np.isfinite(amps)):
        warnings.warn("non-finite value in spin-Bose series (overflow in exp/cosh)", RuntimeWarning)
    err = float(np.max(np.abs(terms[-1])))
    return SeriesResult(Propagator2x2(free_bath_kernel(model, t, a_s, a_p), amps), err, terms)
