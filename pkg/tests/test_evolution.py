import math

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import random_state
from qsl.core import QuantumState, angle, energy_stats, spectral_decompose
from qsl.errors import NotReached, ZeroSpread
from qsl.evolution import evolve, first_passage, overlap, overlap_trajectory, propagator

S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]])
S3 = np.diag([1.0, -1.0]).astype(complex)


def expm_series(a, order=30):
    """Truncated power series of exp(a); independent of any eigensolver."""
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ a / k
        out = out + term
    return out


def test_zero_time_identity(random_pairs):
    system, psi = random_pairs[0]
    assert np.max(np.abs(evolve(system, psi, 0.0).amplitudes - psi.amplitudes)) < 1e-15


def test_eigenstate_is_stationary(random_pairs):
    system, _ = random_pairs[3]
    psi = system.eigenstate(1)
    for t in (0.3, 2.0, 17.0):
        assert angle(psi, evolve(system, psi, t)) == pytest.approx(0.0, abs=1e-7)


def test_qubit_closed_form_and_series():
    eps, d1, d2 = 0.3, 0.4, 0.3
    h = -eps * S3 + d1 * S1 + d2 * S2
    system = spectral_decompose(h)
    psi0 = QuantumState.basis(2, 0)
    omega = math.hypot(eps, math.hypot(d1, d2))
    cos_beta = eps / omega
    for t in np.linspace(0.0, 10.0, 20):
        amp = evolve(system, psi0, t).amplitudes
        closed = math.cos(omega * t) + 1j * cos_beta * math.sin(omega * t)
        series = (expm_series(-1j * h * t) @ psi0.amplitudes)[0]
        assert abs(amp[0] - closed) < 1e-10
        assert abs(amp[0] - series) < 1e-10


def test_overlap_initial():
    system = spectral_decompose(np.diag([0.0, 1.0, 3.0]))
    o = overlap(system, QuantumState.from_vector([1, 1, 1]), 0.0)
    assert o.s == pytest.approx(1.0, abs=1e-15) and o.theta == pytest.approx(0.0, abs=1e-7)


def test_two_level_angle_equals_time():
    system = spectral_decompose(np.diag([0.0, 2.0]))
    psi = QuantumState.from_vector([1, 1])
    for t in np.linspace(0.01, math.pi / 2, 30):
        o = overlap(system, psi, t)
        assert o.s == pytest.approx((1 + np.exp(-2j * t)) / 2, abs=1e-15)
        assert o.theta == pytest.approx(t, abs=1e-9)
        assert abs(o.s) == pytest.approx(math.cos(o.theta), abs=1e-12)
        assert o.s == pytest.approx(math.cos(o.theta) * np.exp(1j * o.phase), abs=1e-12)


def test_overlap_paths_agree(random_pairs):
    system, psi = random_pairs[5]
    for t in np.linspace(-3, 12, 50):
        direct = np.vdot(psi.amplitudes, evolve(system, psi, t).amplitudes)
        assert abs(overlap(system, psi, t).s - direct) < 1e-12


def test_evolution_invariants(random_pairs):
    gen = np.random.default_rng(3)
    for system, psi in random_pairs:
        st0 = energy_stats(psi, system)
        for t in gen.uniform(-5, 20, 4):
            out = evolve(system, psi, t)
            assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12
            st_t = energy_stats(out, system)
            assert st_t.mean == pytest.approx(st0.mean, abs=1e-10)
            assert st_t.spread == pytest.approx(st0.spread, abs=1e-10)
        t1, t2 = gen.uniform(-4, 4, 2)
        twice = evolve(system, evolve(system, psi, t1), t2)
        assert np.max(np.abs(twice.amplitudes - evolve(system, psi, t1 + t2).amplitudes)) < 1e-11
        s = overlap_trajectory(system, psi, np.linspace(0, 30, 200))
        assert np.all(np.abs(s) <= 1 + 1e-12)


def test_propagator_matches_series(random_pairs):
    system, _ = random_pairs[8]
    u = propagator(system, 0.7)
    assert np.max(np.abs(u - expm_series(-0.7j * system.matrix, 40))) < 1e-10


def test_first_passage_two_level():
    system = spectral_decompose(np.diag([0.0, 2.0]))
    psi = QuantumState.from_vector([1, 1])
    assert first_passage(system, psi, math.pi / 4) == pytest.approx(math.pi / 4, abs=1e-10)
    # orthogonality is a tangential touch of |S| = 0
    assert first_passage(system, psi, math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-10)
    assert first_passage(system, psi, 0.0) == 0.0


def test_first_passage_zero_spread():
    system = spectral_decompose(np.diag([0.0, 2.0]))
    with pytest.raises(ZeroSpread):
        first_passage(system, QuantumState.basis(2, 0), 0.1)


def test_first_passage_not_reached():
    system = spectral_decompose(np.diag([0.0, 1.0]))
    psi = QuantumState.from_vector([math.sqrt(0.9), math.sqrt(0.1)])
    # |S| >= 0.8 so theta never exceeds arccos(0.8)
    with pytest.raises(NotReached):
        first_passage(system, psi, 1.0, t_max=50.0)


def test_first_passage_hadamard_system():
    eps, delta = 0.5, 1.0
    omega = math.hypot(eps, delta)
    system = spectral_decompose(-eps * S3 + delta * S1)
    psi0 = QuantumState.basis(2, 0)
    target = angle(psi0, QuantumState.from_vector([1, 1]))
    rhs = math.sqrt((delta**2 + eps**2) / (delta**2 - eps**2))
    oracle = brentq(lambda t: math.tan(omega * t) - rhs, 1e-9, math.pi / (2 * omega) - 1e-9,
                    xtol=1e-15)
    assert first_passage(system, psi0, target) == pytest.approx(oracle, abs=1e-8)


def test_first_passage_is_first(random_pairs):
    checked = 0
    for system, psi in random_pairs[:40]:
        st_ = energy_stats(psi, system)
        target = 0.6
        try:
            t_star = first_passage(system, psi, target, t_max=50.0 / st_.spread)
        except NotReached:
            continue
        checked += 1
        grid = np.linspace(0, t_star, 1002)[1:-1]
        thetas = np.arccos(np.clip(np.abs(overlap_trajectory(system, psi, grid)), 0, 1))
        assert np.all(thetas[grid < t_star - 1e-10] <= target + 1e-8)
        assert overlap(system, psi, t_star).theta == pytest.approx(target, abs=1e-8)
    assert checked >= 30
