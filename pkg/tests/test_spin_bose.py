import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qndprop import ModelError, TruncationSpec, make_model, oracle
from qndprop.spin_bose import chi_n, kappa_n, order_term, propagator_nonqnd

# Frozen from a plain-loop re-evaluation of the kappa/chi sums (no shared code).
KAPPA_2 = -4.732352230742976e-06 - 0.00022233936149464121j
CHI_1 = -0.0042972563582521104 + 0.0023476018480101894j


def kappa_loops(w, wk, g, tau, t):
    n = len(tau)
    total = 0j
    for k in range(len(wk)):
        s = (2 * n + 1) - 1j * wk[k] * t + (-1) ** (n + 1) * np.exp(-1j * wk[k] * t)
        for l in range(1, n + 1):
            s -= 2 * (-1) ** (l + 1) * np.exp(-1j * wk[k] * tau[l - 1])
            s += 2 * (-1) ** n * (-1) ** (l + 1) * np.exp(-1j * wk[k] * (t - tau[l - 1]))
        for p in range(2, n + 1):
            for q in range(1, p):
                s += 4 * (-1) ** (p + q) * np.exp(-1j * wk[k] * (tau[p - 1] - tau[q - 1]))
        total += (w / 2) ** 2 * g[k] ** 2 / wk[k] ** 2 * s
    return -total


@pytest.fixture
def h3():
    return make_model(1.0, [1.5], [0.1])


def test_kappa_order_zero_formula():
    m = make_model(1.3, [0.7, 2.0], [0.2, 0.1])
    t = 0.9
    expected = -(1.3 / 2) ** 2 * sum(g * g / w ** 2 * (1 - 1j * w * t - np.exp(-1j * w * t))
                                      for w, g in zip([0.7, 2.0], [0.2, 0.1]))
    assert kappa_n(m, t, []) == pytest.approx(expected, rel=1e-14)
    assert kappa_n(m, 0.0, []) == 0


def test_kappa_frozen_order_two():
    m = make_model(1.0, [1.0], [0.2])
    assert kappa_n(m, 1.0, [0.25, 0.75]) == pytest.approx(KAPPA_2, rel=1e-12)


def test_chi_frozen_order_one():
    m = make_model(1.0, [1.0], [0.2])
    assert chi_n(m, 1.0, [0.5], [0.3], [0.1]) == pytest.approx(CHI_1, rel=1e-12)


def test_chi_homogeneous_in_labels():
    m = make_model(1.0, [1.0, 2.0], [0.2, 0.3])
    assert chi_n(m, 1.0, [0.1, 0.4, 0.9], [0, 0], [0, 0]) == 0
    assert chi_n(m, 0.0, [], [0.3, 1.0], [0.2j, 0.5]) == 0


def test_unordered_tau_rejected(h3):
    with pytest.raises(ModelError):
        kappa_n(h3, 1.0, [0.7, 0.2])
    with pytest.raises(ModelError):
        chi_n(h3, 1.0, [0.2, 1.4], [0.1], [0.1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=0, max_size=5), st.floats(0.1, 3.0))
def test_vectorized_kappa_matches_loops(fracs, t):
    tau = sorted(f * t for f in fracs)
    w, wk, g = 0.9, [0.6, 1.7], [0.25, -0.1]
    m = make_model(w, wk, g)
    assert abs(kappa_n(m, t, tau) - kappa_loops(w, wk, g, tau, t)) < 1e-13


def test_initial_condition(h3):
    res = propagator_nonqnd(h3, 0.0, [0.2], [0.1j])
    np.testing.assert_allclose(res.propagator.amplitudes, np.eye(2), atol=1e-15)
    assert res.propagator.bath_kernel == pytest.approx(np.exp(0.2 * 0.1j))


@pytest.mark.parametrize("wt", [0.5, 1.0, 1.5])
def test_free_limit_resums(wt):
    m = make_model(1.0, [1.5], [0.0])
    res = propagator_nonqnd(m, wt, [0.2], [0.1j], TruncationSpec(series_order=12))
    np.testing.assert_allclose(res.propagator.amplitudes,
                               np.diag([np.exp(0.5j * wt), np.exp(-0.5j * wt)]), rtol=0, atol=1e-10)


def test_off_diagonals_present(h3):
    amps = propagator_nonqnd(h3, 0.8, [0.2], [0.1j]).propagator.amplitudes
    assert abs(amps[0, 1]) > 1e-4 and abs(amps[1, 0]) > 1e-4


def test_sign_pattern_against_oracle(h3):
    # at high order the series is exact up to quadrature, so row/column conventions are pinned
    H = oracle.build_hamiltonian("H3", h3, TruncationSpec(fock_cutoff=30))
    ref = oracle.kernel_at(H, 0.8, [0.2], [0.1j]).kernel
    res = propagator_nonqnd(h3, 0.8, [0.2], [0.1j], TruncationSpec(series_order=9))
    np.testing.assert_allclose(res.propagator.matrix, ref, rtol=0, atol=1e-9)


def test_truncation_error_bounded_by_first_omitted_term(h3):
    # N = 4 misses order 5, of size about (w t/2)^5/5!
    H = oracle.build_hamiltonian("H3", h3, TruncationSpec(fock_cutoff=30))
    ref = oracle.kernel_at(H, 0.8, [0.2], [0.1j]).kernel
    res = propagator_nonqnd(h3, 0.8, [0.2], [0.1j], TruncationSpec(series_order=4))
    dev = np.abs(res.propagator.matrix - ref).max()
    assert dev <= 1.2 * 0.4 ** 5 / math.factorial(5)
    six = propagator_nonqnd(h3, 0.8, [0.2], [0.1j], TruncationSpec(series_order=6))
    assert np.abs(six.propagator.matrix - ref).max() < 1e-6


def test_convergence_monotone():
    m = make_model(1.0, [1.2], [0.2])
    H = oracle.build_hamiltonian("H3", m, TruncationSpec(fock_cutoff=30))
    ref = oracle.kernel_at(H, 1.0, [0.3], [0.2 - 0.1j]).kernel
    devs = [np.abs(propagator_nonqnd(m, 1.0, [0.3], [0.2 - 0.1j],
                                     TruncationSpec(series_order=N)).propagator.matrix - ref).max()
            for N in range(5)]
    assert all(b <= a for a, b in zip(devs, devs[1:]))


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_quadrature_consistency(h3, n):
    lab = ([0.2], [0.1j])
    q = 16 if n <= 2 else 8
    coarse = order_term(h3, 0.8, n, *lab, q=q)
    fine = order_term(h3, 0.8, n, *lab, q=2 * q)
    assert np.abs(coarse - fine).max() < 1e-12


def test_time_reversal_and_label_swap():
    m = make_model(1.0, [1.3], [0.15])
    a_s, a_p = np.array([0.2 + 0.1j]), np.array([-0.1 + 0.3j])
    t = 0.6
    trunc = TruncationSpec(series_order=4)
    fwd = propagator_nonqnd(m, t, np.conj(a_p), np.conj(a_s), trunc)
    bwd = propagator_nonqnd(m, -t, a_s, a_p, trunc)
    tol = 2 * (fwd.error_estimate + bwd.error_estimate) * abs(fwd.propagator.bath_kernel)
    assert np.abs(bwd.propagator.matrix - fwd.propagator.matrix.conj().T).max() <= tol


def test_error_estimate_is_last_term(h3):
    res = propagator_nonqnd(h3, 0.8, [0.2], [0.1j], TruncationSpec(series_order=3))
    assert res.error_estimate == pytest.approx(np.abs(res.terms[-1]).max())
    assert len(res.terms) == 4
