"""States, Hamiltonians and energy statistics.

All quantities use natural units with hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AngleOutOfRange,
    DimensionMismatch,
    NotHermitian,
    NotNormalized,
    NotSquare,
)

__all__ = [
    "QuantumState",
    "HamiltonianSystem",
    "EnergyStats",
    "spectral_decompose",
    "energy_stats",
    "angle",
    "check_theta",
    "NORM_TOL",
    "HERMITIAN_TOL",
]

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
# populations below this (outside the dominant eigenvalue) count as zero
EIGENSTATE_TOL = 1e-12


@dataclass(frozen=True)
class QuantumState:
    """Normalized pure state given by its amplitudes in a fixed orthonormal basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 2:
            raise DimensionMismatch("a state needs dimension >= 2")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm^2 = {norm2!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vector, normalize: bool = True) -> "QuantumState":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if normalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise NotNormalized("zero vector cannot be normalized")
            v = v / n
        return cls(v)

    @classmethod
    def basis(cls, dimension: int, index: int) -> "QuantumState":
        v = np.zeros(dimension, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class HamiltonianSystem:
    """Hermitian matrix together with its spectral decomposition.

    ``eigenvalues`` are ascending and ``eigenvectors[:, n]`` is the
    eigenstate belonging to ``eigenvalues[n]``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    @property
    def e_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def e_max(self) -> float:
        return float(self.eigenvalues[-1])

    def eigenstate(self, n: int) -> QuantumState:
        return QuantumState.from_vector(self.eigenvectors[:, n])

    def populations(self, state: QuantumState) -> np.ndarray:
        """|<psi_n|state>|^2 for every eigenvector."""
        return np.abs(self.coefficients(state)) ** 2

    def coefficients(self, state: QuantumState) -> np.ndarray:
        if state.dimension != self.dimension:
            raise DimensionMismatch(
                f"state dimension {state.dimension} != system dimension {self.dimension}"
            )
        return self.eigenvectors.conj().T @ state.amplitudes

    def spectral_gap(self, tol: float = 1e-12) -> float:
        """Smallest nonzero difference between eigenvalues (0 if the spectrum is flat)."""
        diffs = np.diff(self.eigenvalues)
        diffs = diffs[diffs > tol * max(1.0, float(np.max(np.abs(self.eigenvalues))))]
        return float(diffs.min()) if diffs.size else 0.0


def spectral_decompose(matrix) -> HamiltonianSystem:
    """Diagonalize a Hermitian matrix.

    Parameters
    ----------
    matrix : array_like, shape (d, d)
        Complex Hermitian matrix. Deviations from Hermiticity up to
        ``HERMITIAN_TOL`` (entrywise, absolute) are tolerated and
        symmetrized away.

    Returns
    -------
    HamiltonianSystem
        Eigenvalues ascending, eigenvectors unitary.

    Raises
    ------
    NotSquare
        If the input is not a square 2-D array.
    NotHermitian
        If ``matrix`` differs from its conjugate transpose by more than the tolerance.
    """
    h = np.array(matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] < 2:
        raise NotSquare("dimension must be at least 2")
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > HERMITIAN_TOL:
        raise NotHermitian(f"max |H - H^dagger| = {asym:.3e} exceeds {HERMITIAN_TOL:g}")
    h = 0.5 * (h + h.conj().T)
    evals, evecs = np.linalg.eigh(h)
    for arr in (h, evals, evecs):
        arr.setflags(write=False)
    return HamiltonianSystem(matrix=h, eigenvalues=evals, eigenvectors=evecs)


@dataclass(frozen=True)
class EnergyStats:
    mean: float
    spread: float
    e_min: float
    e_max: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.e_max - self.e_min)

    @property
    def is_stationary(self) -> bool:
        return self.spread == 0.0


def energy_stats(state: QuantumState, system: HamiltonianSystem) -> EnergyStats:
    """Mean energy, energy spread and spectral extremes of ``state``.

    The spread is evaluated as the population-weighted central second
    moment, which equals <H^2> - <H>^2 but does not cancel catastrophically.
    It is exactly 0 when the population outside a single eigenvalue is
    below ``EIGENSTATE_TOL``.
    """
    p = system.populations(state)
    p = p / p.sum()
    e = system.eigenvalues
    mean = float(p @ e)
    scale = max(1.0, float(np.max(np.abs(e))))
    dominant = e[np.argmax(p)]
    outside = float(p[np.abs(e - dominant) > 1e-12 * scale].sum())
    if outside <= EIGENSTATE_TOL:
        spread = 0.0
        mean = float(dominant)
    else:
        spread = math.sqrt(max(0.0, float(p @ (e - mean) ** 2)))
    mean = min(max(mean, system.e_min), system.e_max)
    return EnergyStats(mean=mean, spread=spread, e_min=system.e_min, e_max=system.e_max)


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 <= theta <= math.pi / 2) or math.isnan(theta):
        raise AngleOutOfRange("theta must lie in [0, pi/2]")
    return theta


def angle(a: QuantumState, b: QuantumState) -> float:
    """Angle arccos|<a|b>| in [0, pi/2] between two pure states.

    Evaluated as atan2(sin, cos) with sin^2 = (1/2) sum_ij |a_i b_j - a_j b_i|^2,
    which keeps full precision near theta = 0 and is exactly symmetric
    in its arguments.
    """
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions {a.dimension} and {b.dimension} differ")
    u, v = a.amplitudes, b.amplitudes
    # fused complex kernels are not commutative bit for bit; fix the order
    if u.tobytes() > v.tobytes():
        u, v = v, u
    cos = abs(np.vdot(u, v))
    wedge = np.multiply.outer(u, v)
    sin = math.sqrt(0.5 * float(np.sum(np.abs(wedge - wedge.T) ** 2)))
    return math.atan2(sin, cos)
