"""Lower bounds on the time a pure state needs to rotate by a given angle."""

from .bc import BcResult, BcTable, TrigTriple, bc_bound, bc_poly, certify, triple_from_tangency
from .bounds import BoundReport, bound_report, glm_beta_bound, mean_energy_family
from .cases import CaseReport, GroverBudget, cnot_case, grover_case, hadamard_case
from .core import (
    EnergyStats,
    HamiltonianSystem,
    QuantumState,
    angle,
    energy_stats,
    spectral_decompose,
)
from .evolution import OverlapSample, evolve, first_passage, overlap

__version__ = "0.1.0"
