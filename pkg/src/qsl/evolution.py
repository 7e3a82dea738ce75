"""Exact spectral time evolution, overlap trajectories and first-passage times."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import HamiltonianSystem, QuantumState, check_theta, energy_stats
from .errors import NotReached, ZeroSpread

__all__ = [
    "OverlapSample",
    "evolve",
    "overlap",
    "overlap_trajectory",
    "first_passage",
    "default_t_max",
    "propagator",
    "TIME_TOL",
]

TIME_TOL = 1e-10
# |S|^2 within this of cos^2(target) counts as reaching the target
TOUCH_TOL = 1e-12
_XTOL = 1e-13
T_MAX_CAP = 1e6
_CHUNK = 4096


@dataclass(frozen=True)
class OverlapSample:
    """S(t) = <psi(0)|psi(t)> = cos(theta) * exp(i * phase)."""

    time: float
    s_real: float
    s_imag: float
    theta: float
    phase: float

    @property
    def s(self) -> complex:
        return complex(self.s_real, self.s_imag)


def evolve(system: HamiltonianSystem, initial: QuantumState, t: float) -> QuantumState:
    """Return exp(-i H t)|initial>, computed in the eigenbasis."""
    c = system.coefficients(initial)
    amps = system.eigenvectors @ (np.exp(-1j * system.eigenvalues * t) * c)
    # unitary up to rounding; renormalize the last few ulps
    return QuantumState(amps / np.linalg.norm(amps))


def _theta_of(absval):
    return np.arccos(np.clip(absval, 0.0, 1.0))


def overlap_trajectory(system: HamiltonianSystem, initial: QuantumState, times) -> np.ndarray:
    """Vector of S(t) values for an array of times."""
    p = system.populations(initial)
    t = np.asarray(times, dtype=float)
    return np.exp(-1j * np.multiply.outer(t, system.eigenvalues)) @ p


def overlap(system: HamiltonianSystem, initial: QuantumState, t: float) -> OverlapSample:
    s = complex(overlap_trajectory(system, initial, [t])[0])
    return OverlapSample(
        time=float(t),
        s_real=s.real,
        s_imag=s.imag,
        theta=float(_theta_of(abs(s))),
        phase=math.atan2(s.imag, s.real),
    )


def default_t_max(system: HamiltonianSystem) -> float:
    """4*pi*d/gap, capped; the smallest nonzero level spacing sets the quasi-period."""
    gap = system.spectral_gap()
    if gap == 0.0:
        return T_MAX_CAP
    return min(T_MAX_CAP, 4.0 * math.pi * system.dimension / gap)


def first_passage(
    system: HamiltonianSystem,
    initial: QuantumState,
    target_theta: float,
    t_max: float | None = None,
) -> float:
    """Earliest time at which the evolution angle reaches ``target_theta``.

    Works with G(t) = |S(t)|^2 - cos^2(target), which is smooth even where
    |S| has a kink at orthogonality.  G is scanned on a grid of step
    ``min(0.01, 0.1/spread)``; a sign change is bisected to ``TIME_TOL``.
    Tangential touches (local minima of G reaching zero without a sign
    change) count as passage: in cells where G could dip to zero and its
    derivative turns from negative to positive, the minimum is located as
    a root of dG/dt.  A minimum with |G| <= ``TOUCH_TOL`` is taken as a
    touch even when rounding pushes it slightly below zero, so crossings
    of such a shallow dip snap to the minimum.
    """
    target = check_theta(target_theta)
    spread = energy_stats(initial, system).spread
    if target == 0.0:
        return 0.0
    if spread == 0.0:
        raise ZeroSpread("stationary state never leaves its initial ray")
    if t_max is None:
        t_max = default_t_max(system)
    if t_max <= 0:
        raise ValueError("t_max must be positive")

    p = system.populations(initial)
    e = system.eigenvalues
    level = math.cos(target) ** 2

    def s_and_ds(ts):
        phases = np.exp(-1j * np.multiply.outer(ts, e))
        return phases @ p, phases @ (-1j * e * p)

    def g(t):
        s, _ = s_and_ds(np.array([t]))
        return float(abs(s[0]) ** 2) - level

    def dg(t):
        s, ds = s_and_ds(np.array([t]))
        return float(2.0 * (s[0].conjugate() * ds[0]).real)

    step = min(0.01, 0.1 / spread)

    def snap(root):
        # a shallow dip below zero is a rounded touch: report its minimum
        right = min(root + step, t_max)
        if right <= root or dg(root) >= 0.0 or dg(right) < 0.0:
            return float(root)
        t_min = brentq(dg, root, right, xtol=_XTOL)
        return float(t_min) if g(t_min) >= -TOUCH_TOL else float(root)

    # |d|S|^2/dt| <= 2 spread, so inside a cell G dips at most spread*step
    dip = spread * step
    start = 0.0
    while start < t_max:
        n = min(_CHUNK, int(math.ceil((t_max - start) / step)))
        ts = start + step * np.arange(0, n + 1)
        ts[-1] = min(ts[-1], t_max)
        s, ds = s_and_ds(ts)
        gs = np.abs(s) ** 2 - level
        dgs = 2.0 * (s.conj() * ds).real
        crossing = np.flatnonzero(gs[1:] <= 0.0)
        stop = crossing[0] + 1 if crossing.size else n
        low = np.minimum(gs[:stop], gs[1 : stop + 1]) <= dip
        turning = (dgs[:stop] < 0.0) & (dgs[1 : stop + 1] >= 0.0)
        for i in np.flatnonzero(low & turning):
            t_min = ts[i + 1] if dgs[i + 1] == 0.0 else brentq(dg, ts[i], ts[i + 1], xtol=_XTOL)
            g_min = g(t_min)
            if g_min <= TOUCH_TOL:
                if g_min < -TOUCH_TOL and gs[i] > 0.0:
                    return brentq(g, ts[i], t_min, xtol=_XTOL)
                return float(t_min)
        if crossing.size:
            i = crossing[0]
            if gs[i + 1] == 0.0:
                return snap(ts[i + 1])
            return snap(brentq(g, ts[i], ts[i + 1], xtol=_XTOL))
        start = float(ts[-1])
    raise NotReached(f"angle {target:.6g} not reached for t <= {t_max:.6g}")


def propagator(system: HamiltonianSystem, t: float) -> np.ndarray:
    """exp(-i H t) as a dense unitary matrix."""
    v = system.eigenvectors
    return (v * np.exp(-1j * system.eigenvalues * t)) @ v.conj().T
