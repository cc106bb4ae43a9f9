"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.  Corpora are drawn from a seeded
generator so every run sees the same instances.
"""

from __future__ import annotations

import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from qndprop import BathKind, TruncationSpec, cli, make_model, oracle
from qndprop.canonical import (
    Kind, classify_2x2, make_rotation, pauli_adjoint_action, verify_equivalence, x_rotation,
)
from qndprop.model import free_bath_kernel
from qndprop.osc_qnd import amplitude_A, amplitude_B, dephasing_factor, propagator_driven, propagator_qnd
from qndprop.spin_bath import (
    full_propagator, mode_propagator_exact, mode_propagator_series, mode_term,
)
from qndprop.spin_bose import propagator_nonqnd

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
FOCK = TruncationSpec(fock_cutoff=30)
RESULTS: dict[int, tuple[bool, str]] = {}


def report(n: int, passed: bool, detail: str) -> None:
    RESULTS[n] = (passed, detail)
    print(f"CRITERION {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def _labels(rng, M):
    return rng.uniform(0, 0.5, M) * np.exp(1j * rng.uniform(0, 2 * np.pi, M))


@lru_cache(maxsize=None)
def h1_corpus():
    rng = np.random.default_rng(20261016)
    out = []
    for M in [0] * 4 + [1] * 8 + [2] * 8 + [3] * 4:
        model = make_model(rng.uniform(0.5, 2), rng.uniform(0.5, 3, M), rng.uniform(0, 0.3, M))
        a_s, a_p, t = _labels(rng, M), _labels(rng, M), rng.uniform(0, 4)
        K = oracle.kernel_at(oracle.build_hamiltonian("H1", model, FOCK), t, a_s, a_p).kernel
        out.append((model, t, a_s, a_p, K))
    return tuple(out)


@lru_cache(maxsize=None)
def h2_corpus():
    rng = np.random.default_rng(7)
    out = []
    for M in [0] * 4 + [1] * 8:
        model = make_model(rng.uniform(0.5, 2), rng.uniform(0.5, 3, M), rng.uniform(0, 0.3, M),
                           drive_Omega=rng.uniform(0.2, 2))
        a_s, a_p, t = _labels(rng, M), _labels(rng, M), rng.uniform(0, 4)
        nu_s, nu_p = _labels(rng, 1)[0], _labels(rng, 1)[0]
        K = oracle.kernel_at(oracle.build_hamiltonian("H2", model, FOCK), t,
                             np.append(a_s, nu_s), np.append(a_p, nu_p)).kernel
        out.append((model, t, a_s, a_p, nu_s, nu_p, K))
    return tuple(out)


def rel_dev(a, ref):
    return float(np.abs(a - ref).max() / np.abs(ref).max())


def test_criterion_01_qnd_closed_form():
    start = time.perf_counter()
    devs = [rel_dev(propagator_qnd(m, t, a_s, a_p).matrix, K) for m, t, a_s, a_p, K in h1_corpus()]
    elapsed = time.perf_counter() - start
    ms = sorted({m.M for m, *_ in h1_corpus()})
    passed = len(devs) >= 20 and max(devs) <= 1e-8 and elapsed < 60
    report(1, passed, f"{len(devs)} instances M in {ms}, max rel dev {max(devs):.2e} (tol 1e-08), {elapsed:.1f}s")
    assert passed


def test_criterion_02_driven():
    devs = [rel_dev(propagator_driven(m, t, a_s, a_p, ns, np_).matrix, K)
            for m, t, a_s, a_p, ns, np_, K in h2_corpus()]
    # Omega = 0: amplitudes coincide with the undriven closed form, drive factor is exp(nu* nu')
    rng = np.random.default_rng(11)
    exact = True
    for _ in range(10):
        M = int(rng.integers(0, 4))
        args = (rng.uniform(0.5, 2), rng.uniform(0.5, 3, M), rng.uniform(0, 0.3, M))
        t, a_s, a_p, ns, np_ = rng.uniform(0, 4), _labels(rng, M), _labels(rng, M), 0.3j, 0.2
        d = propagator_driven(make_model(*args, drive_Omega=0.0), t, a_s, a_p, ns, np_)
        u = propagator_qnd(make_model(*args), t, a_s, a_p)
        exact &= (np.array_equal(d.amplitudes, u.amplitudes) and d.bath_kernel == u.bath_kernel
                  and d.drive_factor == np.exp(ns * np_))
    passed = len(devs) >= 10 and max(devs) <= 1e-8 and exact
    report(2, passed, f"{len(devs)} instances, max rel dev {max(devs):.2e} (tol 1e-08); "
                      f"Omega=0 reduction exact: {exact}")
    assert passed


def test_criterion_03_diagonality():
    closed = [propagator_qnd(m, t, a_s, a_p).amplitudes for m, t, a_s, a_p, _ in h1_corpus()]
    closed += [propagator_driven(m, t, a_s, a_p, ns, np_).amplitudes for m, t, a_s, a_p, ns, np_, _ in h2_corpus()]
    zero = all(u[0, 1] == 0 and u[1, 0] == 0 for u in closed)
    kernels = [c[-1] for c in h1_corpus()] + [c[-1] for c in h2_corpus()]
    off = max(max(abs(K[0, 1]), abs(K[1, 0])) for K in kernels)
    passed = zero and off <= 1e-10
    report(3, passed, f"closed-form off-diagonals identically zero: {zero}; "
                      f"oracle max |off-diagonal| {off:.2e} (tol 1e-10)")
    assert passed


def test_criterion_04_dephasing():
    rho0 = 0.5 * np.ones((2, 2))
    models = [make_model(1.0, [1.0], [0.3]), make_model(1.4, [0.7, 2.2], [0.25, 0.15])]
    pop_dev = ratio_dev = 0.0
    for m in models:
        for t in np.linspace(0, 4, 9):
            R = oracle.reduced_density("H1", m, rho0, None, t, FOCK)
            pop_dev = max(pop_dev, abs(R[0, 0] - 0.5), abs(R[1, 1] - 0.5))
            ratio_dev = max(ratio_dev, abs(R[0, 1] / rho0[0, 1] - dephasing_factor(m, t)))
    single = make_model(0.8, [1.3], [0.3])
    recur = abs(abs(dephasing_factor(single, 2 * np.pi / 1.3)) - 1)
    R = oracle.reduced_density("H1", single, rho0, None, 2 * np.pi / 1.3, FOCK)
    recur_oracle = abs(abs(R[0, 1] / rho0[0, 1]) - 1)
    passed = pop_dev <= 1e-10 and ratio_dev <= 1e-8 and recur <= 1e-8 and recur_oracle <= 1e-8
    report(4, passed, f"population drift {pop_dev:.2e} (tol 1e-10), coherence ratio dev {ratio_dev:.2e} "
                      f"(tol 1e-08), recurrence ||r|-1| {recur:.2e} closed / {recur_oracle:.2e} oracle")
    assert passed


def test_criterion_05_nonqnd_convergence():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    worst_n4, monotone, worst_case = 0.0, True, None
    for w in (0.5, 1.0, 2.0):
        for wt in (0.25, 0.5, 0.75, 1.0):
            t = wt / w
            g = 0.2 / w
            m = make_model(w, [rng.uniform(0.5, 3)], [g])
            a_s, a_p = _labels(rng, 1), _labels(rng, 1)
            K = oracle.kernel_at(oracle.build_hamiltonian("H3", m, FOCK), t, a_s, a_p).kernel
            devs = [float(np.abs(propagator_nonqnd(m, t, a_s, a_p, TruncationSpec(series_order=N, quad_points=16))
                                 .propagator.matrix - K).max()) for N in range(5)]
            monotone &= all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))
            if devs[-1] > worst_n4:
                worst_n4, worst_case = devs[-1], (w, wt)
    elapsed = time.perf_counter() - start
    passed = monotone and worst_n4 <= 1e-5 and elapsed < 120
    report(5, passed, f"monotone over N=0..4: {monotone}; max dev at N=4 {worst_n4:.2e} (tol 1e-05) "
                      f"at w={worst_case[0]}, wt={worst_case[1]}; {elapsed:.1f}s")
    assert passed


def test_criterion_06_free_resummation():
    worst, at = 0.0, None
    for w in (0.5, 1.0, 2.0):
        for wt in np.linspace(0.25, 2.0, 8):
            m = make_model(w, [1.0], [0.0])
            t = wt / w
            amps = propagator_nonqnd(m, t, [0.2], [0.1j], TruncationSpec(series_order=12)).propagator.amplitudes
            dev = float(np.abs(amps - np.diag([np.exp(0.5j * wt), np.exp(-0.5j * wt)])).max())
            if dev > worst:
                worst, at = dev, wt
    passed = worst <= 1e-10
    report(6, passed, f"max dev {worst:.2e} (tol 1e-10) at wt={at:.2f}")
    assert passed


def test_criterion_07_spin_bath():
    worst, at = 0.0, None
    for w in (0.5, 1.0, 2.0):
        for wk in (0.5, 1.0, 2.5):
            for c in (-0.5, 0.2, 0.5):
                m = make_model(w, [wk], [c], kind=BathKind.SPIN)
                for wkt in (0.5, 1.0, 1.5, 2.0):
                    for s in (1, -1):
                        series, _ = mode_propagator_series(m, 0, s, wkt / wk, 12)
                        dev = float(np.abs(series - mode_propagator_exact(m, 0, s, wkt / wk)).max())
                        if dev > worst:
                            worst, at = dev, (w, wk, c, wkt)
    tensor = 0.0
    for M in (1, 2, 3):
        m = make_model(1.2, np.linspace(0.6, 1.8, M), np.linspace(0.5, -0.3, M), kind=BathKind.SPIN)
        for t in (0.4, 1.1):
            U = oracle.evolve(oracle.build_hamiltonian("H4", m), t).dense()
            tensor = max(tensor, float(np.abs(full_propagator(m, t) - U).max()))
    passed = worst <= 1e-6 and tensor <= 1e-10
    report(7, passed, f"per-mode N=12 max dev {worst:.2e} (tol 1e-06) at (w, w_k, c, w_k t)={at}; "
                      f"tensor product vs oracle {tensor:.2e} (tol 1e-10)")
    assert passed


def test_criterion_08_equivalence():
    start = time.perf_counter()
    devs = {M: verify_equivalence(M, np.geomspace(0.4, 3.1, M) if M > 1 else [1.7]).max_abs_deviation
            for M in (1, 2, 3, 5)}
    control = verify_equivalence(3, [0.5, 1.0, 2.0], angle_sign=-1)
    elapsed = time.perf_counter() - start
    passed = max(devs.values()) <= 1e-12 and not control.passed and elapsed < 1
    report(8, passed, f"max dev {max(devs.values()):.2e} (tol 1e-12) over M={sorted(devs)}; "
                      f"sign-flipped control dev {control.max_abs_deviation:.2e} rejected: {not control.passed}; "
                      f"{elapsed:.3f}s")
    assert passed


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def test_criterion_09_structure():
    squeeze_ok, b_err = True, 0.0
    for m, t, a_s, a_p, _ in h1_corpus():
        amps = propagator_qnd(m, t, a_s, a_p).amplitudes / np.exp(amplitude_A(m, t))
        c = classify_2x2(amps)
        B = amplitude_B(m, t, a_s, a_p)
        squeeze_ok &= c.kind is Kind.SQUEEZE_LIKE
        b_err = max(b_err, abs(c.parameter.real - B.real), abs(_wrap(c.parameter.imag - B.imag)))
    rot_ok, th_err = True, 0.0
    for w, wk, ck, t in [(1.0, 0.8, 0.4, 1.0), (1.7, 1.2, -0.3, 2.5), (0.6, 2.0, 0.5, 3.3)]:
        m = make_model(w, [wk], [ck], kind=BathKind.SPIN)
        for s in (1, -1):
            c = classify_2x2(mode_term(m, 0, s, t, 0))
            rot_ok &= c.kind is Kind.ROTATION_LIKE and c.parity == 0
            th_err = max(th_err, abs(_wrap(c.parameter - 0.5 * w * s * ck * t)))
    adj_err, dets = 0.0, []
    for theta in np.linspace(-3, 3, 13):
        adj_err = max(adj_err, float(np.abs(pauli_adjoint_action(make_rotation(theta)) - x_rotation(2 * theta)).max()))
        dets.append(np.linalg.det(pauli_adjoint_action(make_rotation(theta, 1))))
    det_err = max(abs(d - 1) for d in dets)
    passed = squeeze_ok and b_err <= 1e-9 and rot_ok and th_err <= 1e-9 and adj_err <= 1e-10 and det_err <= 1e-10
    report(9, passed, f"squeeze-like {squeeze_ok}, B err {b_err:.2e}; rotation-like {rot_ok}, Theta err {th_err:.2e}; "
                      f"adjoint action err {adj_err:.2e}; |det R - 1| {det_err:.2e}")
    assert passed


def test_criterion_10_determinism(tmp_path):
    configs = sorted(CONFIGS.glob("*.yaml"))
    runs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        codes = [cli.run(cfg, out=str(out)) for cfg in configs]
        runs.append(({p.name: p.read_bytes() for p in out.iterdir()}, codes))
    identical = runs[0][0] == runs[1][0] and len(runs[0][0]) == len(configs)
    passed = identical and all(c == 0 for c in runs[0][1])
    report(10, passed, f"{len(configs)} configs, byte-identical outputs: {identical}, exit codes {set(runs[0][1])}")
    assert passed


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
