"""Closed-form minimal-time bounds at an arbitrary evolution angle.

Times are in hbar = 1 units.  Each bound is a lower limit on the time
needed to rotate a state by ``theta``; the GLM-alpha bound is not
provided because its defining equations are not available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import EnergyStats, check_theta
from .errors import ZeroSpread

__all__ = [
    "MEAN_E_FACTOR",
    "BOUND_LABELS",
    "BoundReport",
    "MeanEnergyFamily",
    "mean_energy_numerator",
    "glm_beta_bound",
    "mean_energy_family",
    "bound_report",
]

MEAN_E_FACTOR = math.sqrt(1.0 + 4.0 / math.pi**2)
BOUND_LABELS = ("glm_beta", "mean_min_e", "max_mean_e", "max_min", "delta_e_variant", "bc")


def mean_energy_numerator(theta: float) -> float:
    """(pi/2) * max(0, 1 - sqrt(1 + 4/pi^2) cos theta)."""
    return 0.5 * math.pi * max(0.0, 1.0 - MEAN_E_FACTOR * math.cos(theta))


def glm_beta_bound(spread: float, theta: float) -> float:
    """tau >= theta / spread."""
    theta = check_theta(theta)
    if theta == 0.0:
        return 0.0
    if not spread > 0:
        raise ZeroSpread("energy spread is zero, the state cannot rotate")
    return theta / spread


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


@dataclass(frozen=True)
class MeanEnergyFamily:
    mean_min_e: float
    max_mean_e: float
    max_min: float
    delta_e_variant: float


def mean_energy_family(stats: EnergyStats, theta: float) -> MeanEnergyFamily:
    """Mean-energy type bounds; entries with a vanishing denominator are 0."""
    theta = check_theta(theta)
    k = mean_energy_numerator(theta)
    return MeanEnergyFamily(
        mean_min_e=_ratio(k, stats.mean - stats.e_min),
        max_mean_e=_ratio(k, stats.e_max - stats.mean),
        max_min=_ratio(k, stats.half_width),
        delta_e_variant=_ratio(theta, stats.half_width),
    )


@dataclass(frozen=True)
class BoundReport:
    theta: float
    glm_beta: float
    mean_min_e: float
    max_mean_e: float | None
    max_min: float
    delta_e_variant: float
    bc: float
    tightest_label: str
    tightest_value: float
    saturation_ratio: float | None = None
    frozen: bool = False

    def entries(self) -> dict:
        """Present bound values keyed by label."""
        out = {label: getattr(self, label) for label in BOUND_LABELS}
        return {k: v for k, v in out.items() if v is not None}

    def as_record(self, time_scale: float = 1.0) -> dict:
        """Flat record; times are divided by ``time_scale`` (2*pi for units of h)."""
        rec = {"theta": self.theta}
        for label in BOUND_LABELS:
            v = getattr(self, label)
            rec[label] = None if v is None else v / time_scale
        rec["tightest_label"] = self.tightest_label
        rec["tightest_value"] = self.tightest_value / time_scale
        rec["saturation_ratio"] = self.saturation_ratio
        return rec


def bound_report(
    stats: EnergyStats,
    theta: float,
    bc_value: float,
    actual_time: float | None = None,
    bounded_above: bool = True,
) -> BoundReport:
    """Collect every bound at ``theta`` and pick the tightest.

    ``bc_value`` is the dimensionless bound on (mean - e_min) * tau; it is
    converted to a time with the spectrum shifted so that e_min = 0.
    A stationary state (zero spread) is reported as frozen; at theta > 0
    it raises ZeroSpread since such a state never rotates.
    """
    theta = check_theta(theta)
    glm = glm_beta_bound(stats.spread, theta)
    fam = mean_energy_family(stats, theta)
    entries = {
        "glm_beta": glm,
        "mean_min_e": fam.mean_min_e,
        "max_mean_e": fam.max_mean_e if bounded_above else None,
        "max_min": fam.max_min,
        "delta_e_variant": fam.delta_e_variant,
        "bc": _ratio(max(0.0, bc_value), stats.mean - stats.e_min),
    }
    present = {k: v for k, v in entries.items() if v is not None}
    top = max(present.values())
    # near-ties (relative 1e-12) resolve to the earliest label
    label = next(k for k, v in present.items() if v >= top * (1.0 - 1e-12))
    value = present[label]
    ratio = None
    if actual_time is not None:
        ratio = actual_time / value if value > 0 else math.inf
    return BoundReport(
        theta=theta,
        tightest_label=label,
        tightest_value=value,
        saturation_ratio=ratio,
        frozen=stats.is_stationary,
        **entries,
    )
