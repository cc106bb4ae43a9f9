"""Brute-force ground truth from truncated matrix representations.

Basis order is ``system (x) mode_1 (x) ... (x) mode_M [(x) drive mode]``; each
oscillator mode uses Fock states 0..cutoff-1 and each bath spin uses
(down, up).  Nothing here reuses the closed forms: Hamiltonians are built
from truncated ladder and Pauli matrices and exponentiated numerically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import expm_multiply

from .model import BathKind, ModelError, Model, SIGMA_X, SIGMA_Z, TruncationSpec

# Above this dimension propagation switches from dense eigh to Krylov/Taylor action.
DENSE_LIMIT = 1200
MAX_DIM = 200_000


class HamiltonianKind(enum.Enum):
    H1 = "H1"  # QND oscillator bath
    H2 = "H2"  # QND oscillator bath + external mode
    H3 = "H3"  # non-QND spin-Bose
    H4 = "H4"  # QND spin bath


@dataclass(frozen=True)
class TruncatedOperator:
    """Matrix on the truncated product space together with its factor dimensions."""

    matrix: object  # scipy.sparse matrix or ndarray
    dims: tuple

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def dense(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    def hermiticity_error(self) -> float:
        d = self.matrix - self.matrix.conj().T
        if sp.issparse(d):
            return float(abs(d).max()) if d.nnz else 0.0
        return float(np.abs(d).max())

    def unitarity_error(self) -> float:
        u = self.dense()
        return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def annihilation(n: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr")


def _embed(op, position: int, dims: tuple) -> sp.csr_matrix:
    factors = [sp.identity(d, format="csr") for d in dims]
    factors[position] = sp.csr_matrix(op)
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


def _dims(kind: HamiltonianKind, model: Model, cutoff: int) -> tuple:
    if kind is HamiltonianKind.H4:
        return (2,) + (2,) * model.M
    dims = (2,) + (cutoff,) * model.M
    if kind is HamiltonianKind.H2:
        dims = dims + (cutoff,)
    return dims


def _expected_bath(kind: HamiltonianKind) -> BathKind:
    return BathKind.SPIN if kind is HamiltonianKind.H4 else BathKind.OSCILLATOR


def hamiltonian_parts(kind, model: Model, trunc: TruncationSpec | None = None,
                      max_dim: int = MAX_DIM) -> dict:
    """System, reservoir and coupling terms of the chosen Hamiltonian."""
    kind = HamiltonianKind(kind)
    trunc = TruncationSpec() if trunc is None else trunc
    if model.kind is not _expected_bath(kind):
        raise ModelError(f"{kind.value} needs a {_expected_bath(kind).value} bath")
    if kind is HamiltonianKind.H2 and model.drive_Omega is None:
        raise ModelError("H2 requires drive_Omega")
    dims = _dims(kind, model, int(trunc.fock_cutoff))
    dim = int(np.prod(dims))
    if dim > max_dim:
        raise ModelError(f"truncated dimension {dim} exceeds limit {max_dim}")
    w = model.omega
    zero = sp.csr_matrix((dim, dim), dtype=complex)
    system = _embed(0.5 * w * SIGMA_Z, 0, dims)
    reservoir = zero.copy()
    coupling = zero.copy()
    sys_op = SIGMA_X if kind is HamiltonianKind.H3 else SIGMA_Z
    for k in range(model.M):
        wk, gk = model.omegas[k], model.couplings[k]
        if kind is HamiltonianKind.H4:
            reservoir = reservoir + wk * _embed(SIGMA_Z, k + 1, dims)
            bath_op = _embed(SIGMA_X, k + 1, dims)
        else:
            b = annihilation(dims[k + 1])
            reservoir = reservoir + wk * _embed(b.T @ b, k + 1, dims)
            bath_op = _embed(b + b.T, k + 1, dims)
        coupling = coupling + 0.5 * w * gk * (_embed(sys_op, 0, dims) @ bath_op)
    if kind is HamiltonianKind.H2:
        a = annihilation(dims[-1])
        Om = model.drive_Omega
        reservoir = reservoir + Om * _embed(a.T @ a, len(dims) - 1, dims)
        system = system - 0.5 * Om * _embed(SIGMA_Z, 0, dims)
    return {"system": system.tocsr(), "reservoir": reservoir.tocsr(),
            "coupling": coupling.tocsr(), "dims": dims}


def build_hamiltonian(kind, model: Model, trunc: TruncationSpec | None = None,
                      max_dim: int = MAX_DIM) -> TruncatedOperator:
    parts = hamiltonian_parts(kind, model, trunc, max_dim)
    H = parts["system"] + parts["reservoir"] + parts["coupling"]
    return TruncatedOperator(H.tocsr(), parts["dims"])


def system_coupling_commutator(kind, model: Model, trunc: TruncationSpec | None = None) -> float:
    """Largest entry of ``[H_S, H_SR]``; zero for the QND models."""
    parts = hamiltonian_parts(kind, model, trunc)
    c = parts["system"] @ parts["coupling"] - parts["coupling"] @ parts["system"]
    return float(abs(c).max()) if c.nnz else 0.0


def evolve(H: TruncatedOperator, t: float) -> TruncatedOperator:
    """``exp(-i H t)`` from a dense Hermitian eigendecomposition."""
    if H.dim > 4 * DENSE_LIMIT:
        raise ModelError(f"dimension {H.dim} too large for dense evolution")
    try:
        evals, vecs = eigh(H.dense())
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ModelError(f"eigendecomposition failed: {exc}") from exc
    U = (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T
    return TruncatedOperator(U, H.dims)


def evolve_states(H: TruncatedOperator, t: float, states: np.ndarray) -> np.ndarray:
    """Apply ``exp(-i H t)`` to the columns of ``states``.

    Small problems go through :func:`evolve`; large ones use
    ``scipy.sparse.linalg.expm_multiply`` on the sparse Hamiltonian.
    """
    states = np.asarray(states, dtype=complex)
    if H.dim <= DENSE_LIMIT:
        return evolve(H, t).dense() @ states
    A = (-1j * t) * sp.csr_matrix(H.matrix, dtype=complex)
    return expm_multiply(A, states)


def label_vector(alpha: complex, n: int) -> np.ndarray:
    """Unnormalized Bargmann vector ``alpha^m / sqrt(m!)`` for m < n."""
    out = np.empty(n, dtype=complex)
    out[0] = 1.0
    for m in range(1, n):
        out[m] = out[m - 1] * alpha / math.sqrt(m)
    return out


def coherent_state(mu: complex, n: int) -> np.ndarray:
    return np.exp(-0.5 * abs(mu) ** 2) * label_vector(mu, n)


def poisson_tail(labels_star, labels_prime, cutoffs) -> float:
    """Norm deficit ``exp(sum a^2) - prod_k sum_{m<n_k} a_k^{2m}/m!`` of the label vectors."""
    full = 0.0
    kept = 1.0
    for a_s, a_p, n in zip(labels_star, labels_prime, cutoffs):
        a2 = max(abs(a_s), abs(a_p)) ** 2
        full += a2
        term, acc = 1.0, 0.0
        for m in range(n):
            acc += term
            term *= a2 / (m + 1)
        kept *= acc
    return float(max(np.exp(full) - kept, 0.0))


@dataclass(frozen=True)
class KernelResult:
    """Oracle 2x2 kernel (bath factor included) with its truncation tail bound."""

    kernel: np.ndarray
    tail_bound: float
    flagged: bool


def _bath_vector(labels, dims) -> np.ndarray:
    return reduce(np.kron, [label_vector(a, d) for a, d in zip(labels, dims)], np.ones(1, dtype=complex))


def _check_label_count(labels, dims):
    if len(labels) != len(dims) - 1:
        raise ModelError(f"expected {len(dims) - 1} coherent labels, got {len(labels)}")


def bargmann_kernel(U: TruncatedOperator, alpha_star, alpha_prime, tol: float = 1e-8) -> KernelResult:
    """``K_ij = sum_{m,n} (a*)^m (a')^n / sqrt(m! n!) <i,m|U|j,n>`` over all bath modes.

    For the driven model the drive label is the last entry of each label list.
    """
    a_s = np.atleast_1d(np.asarray(alpha_star, dtype=complex))
    a_p = np.atleast_1d(np.asarray(alpha_prime, dtype=complex))
    _check_label_count(a_s, U.dims)
    _check_label_count(a_p, U.dims)
    bath_dims = U.dims[1:]
    left = np.kron(np.eye(2), _bath_vector(a_s, bath_dims)[None, :])
    right = np.kron(np.eye(2), _bath_vector(a_p, bath_dims)[:, None])
    K = left @ U.dense() @ right
    tail = poisson_tail(a_s, a_p, bath_dims)
    return KernelResult(K, tail, tail > tol)


def kernel_at(H: TruncatedOperator, t: float, alpha_star, alpha_prime, tol: float = 1e-8) -> KernelResult:
    """Kernel of ``exp(-i H t)`` without forming the full propagator when it is large."""
    a_s = np.atleast_1d(np.asarray(alpha_star, dtype=complex))
    a_p = np.atleast_1d(np.asarray(alpha_prime, dtype=complex))
    _check_label_count(a_s, H.dims)
    _check_label_count(a_p, H.dims)
    bath_dims = H.dims[1:]
    right = np.kron(np.eye(2), _bath_vector(a_p, bath_dims)[:, None])
    left = np.kron(np.eye(2), _bath_vector(a_s, bath_dims)[None, :])
    K = left @ evolve_states(H, t, right)
    tail = poisson_tail(a_s, a_p, bath_dims)
    return KernelResult(K, tail, tail > tol)


def sector_block(U: TruncatedOperator, slot: int) -> np.ndarray:
    """Bath-space block ``<slot|U|slot>`` of a system (x) bath operator."""
    d = U.dim // 2
    return U.dense()[slot * d:(slot + 1) * d, slot * d:(slot + 1) * d]


def _bath_state(model: Model, dims: tuple, bath_state) -> np.ndarray:
    bath_dims = dims[1:]
    if bath_state is None:
        parts = [np.eye(d, dtype=complex)[0] for d in bath_dims]
    elif model.kind is BathKind.SPIN:
        parts = [np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in bath_state]
    else:
        parts = [coherent_state(mu, d) for mu, d in zip(bath_state, bath_dims)]
    if len(parts) != len(bath_dims):
        raise ModelError(f"expected {len(bath_dims)} bath factors, got {len(parts)}")
    return reduce(np.kron, parts, np.ones(1, dtype=complex))


def reduced_density(kind, model: Model, rho_sys_0, bath_state=None, t: float = 0.0,
                    trunc: TruncationSpec | None = None) -> np.ndarray:
    """``Tr_bath[U (rho_sys (x) rho_bath) U^+]`` for a pure product bath state.

    ``bath_state`` holds coherent labels for oscillator baths (a drive label
    appended for H2) or per-spin (down, up) amplitude pairs for the spin
    bath; None means vacuum / all spins down.
    """
    trunc = TruncationSpec() if trunc is None else trunc
    rho0 = np.asarray(rho_sys_0, dtype=complex)
    if rho0.shape != (2, 2):
        raise ModelError("rho_sys_0 must be 2x2")
    if abs(np.trace(rho0) - 1) > 1e-10 or np.linalg.eigvalsh((rho0 + rho0.conj().T) / 2).min() < -1e-12:
        raise ModelError("rho_sys_0 must be a density matrix")
    H = build_hamiltonian(kind, model, trunc)
    chi = _bath_state(model, H.dims, bath_state)
    if model.kind is BathKind.OSCILLATOR and bath_state is not None:
        deficit = 1.0 - float(np.vdot(chi, chi).real)
        if deficit > trunc.tol:
            raise ModelError(f"Fock cutoff too small for bath labels (norm deficit {deficit:.2e})")
    starts = np.kron(np.eye(2), chi[:, None])
    d = chi.shape[0]
    out = evolve_states(H, t, starts).reshape(2, d, 2)  # (slot, bath, initial slot)
    # <a|rho(t)|b> = sum_{jk} rho0_{jk} <bath(b, k)|bath(a, j)>
    psi = out.transpose(0, 2, 1)  # (slot a, initial j, bath)
    R = np.einsum("ajx,bkx,jk->ab", psi, psi.conj(), rho0)
    return R
