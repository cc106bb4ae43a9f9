"""Integration over the time-ordered simplex 0 <= tau_1 <= ... <= tau_n <= t."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import roots_jacobi

# Cap on q**n so high orders stay cheap; the per-dimension rule shrinks instead.
NODE_BUDGET = 200_000


def default_points(n: int) -> int:
    """Gauss-Legendre points per simplex dimension for an order-n term."""
    if n <= 2:
        return 16
    if n <= 4:
        return 8
    return max(2, int(np.floor(NODE_BUDGET ** (1.0 / n) + 1e-9)))


@lru_cache(maxsize=256)
def _unit_rule(q: int, power: int):
    """q-point Gauss rule on [0, 1] for the weight ``x**power``.

    ``power = 0`` is plain Gauss-Legendre.
    """
    x, w = roots_jacobi(q, 0.0, float(power))
    return (x + 1.0) / 2.0, w / 2.0 ** (power + 1)


@dataclass(frozen=True)
class SimplexRule:
    """Iterated Gauss rule on the ordered simplex.

    ``nodes`` has shape ``(P, n)`` with columns tau_1..tau_n (ascending in each
    row); ``weights`` has shape ``(P,)``.  The innermost variable tau_1 is
    integrated first with upper limit tau_2, and so on out to tau_n on [0, t],
    using ``tau_j = tau_{j+1} x_j``.  The collapse leaves a Jacobian
    ``x_j**(j-1)`` on each fraction, which is folded into a Gauss-Jacobi
    weight so the simplex volume is exact for every q.
    For n = 0 the rule is a single empty point of weight 1.  Weights are
    positive for t > 0; a negative t gives the signed integral.
    """

    order: int
    points: int
    t: float
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, n: int, t: float, q: int | None = None) -> "SimplexRule":
        if n < 0:
            raise ValueError("simplex order must be >= 0")
        q = default_points(n) if q is None else int(q)
        if q < 2:
            raise ValueError("need at least 2 points per dimension")
        if n == 0:
            return cls(0, q, float(t), np.zeros((1, 0)), np.ones(1))
        idx = np.indices((q,) * n).reshape(n, -1).T  # column j -> tau_{j+1}
        nodes = np.empty(idx.shape)
        weights = np.full(idx.shape[0], float(t) ** n)
        upper = np.full(idx.shape[0], float(t))
        for j in range(n - 1, -1, -1):
            x, w = _unit_rule(q, j)
            weights *= w[idx[:, j]]
            nodes[:, j] = upper * x[idx[:, j]]
            upper = nodes[:, j]
        return cls(n, q, float(t), nodes, weights)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the leading (node) axis of ``values``."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def simplex_volume(n: int, t: float) -> float:
    return float(t) ** n / float(np.prod(np.arange(1, n + 1)))


def exponential_simplex_integral(rates, t: float) -> complex:
    """Exact value of the simplex integral of ``exp(sum_j rates[j] * tau_j)``.

    Substituting the gaps between consecutive times turns the integrand into
    ``exp(sum_i gap_i * S_i)`` with suffix sums ``S_i = rates[i:].sum()``
    (``S_n = 0``), whose integral over ``sum(gaps) = t`` is the divided
    difference of ``x -> exp(t x)`` on ``S_0..S_n``.  Repeated nodes are
    handled by evaluating it as the corner entry of ``expm(t * J)``, with J
    bidiagonal (``S`` on the diagonal, ones above).
    """
    rates = np.asarray(rates, dtype=complex)
    n = rates.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    suffix = np.append(np.cumsum(rates[::-1])[::-1], 0.0)
    J = np.diag(suffix) + np.diag(np.ones(n), 1)
    return complex(expm(float(t) * J)[0, n])
