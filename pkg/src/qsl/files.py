"""System description files and curve CSV output."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .bc import bc_bound, bc_poly
from .bounds import mean_energy_numerator
from .core import HamiltonianSystem, QuantumState, spectral_decompose
from .errors import QSLError

__all__ = [
    "SystemFileError",
    "CURVE_HEADER",
    "fmt",
    "load_system_file",
    "dump_system_file",
    "emit_curves",
]

CURVE_HEADER = (
    "cos_theta", "theta", "glm_beta_dimensionless", "mean_e_dimensionless",
    "bc_dimensionless", "bc_poly",
)


class SystemFileError(QSLError):
    """A system description file is unreadable or malformed."""


def fmt(x) -> str:
    """12 significant digits, the fixed numeric format of every CSV we write."""
    if x is None:
        return ""
    return f"{float(x):.12g}"


def _complex(pair, where):
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise SystemFileError(f"{where}: expected a [re, im] pair, got {pair!r}")
    try:
        return complex(float(pair[0]), float(pair[1]))
    except (TypeError, ValueError) as exc:
        raise SystemFileError(f"{where}: {exc}") from None


def load_system_file(path) -> tuple[HamiltonianSystem, QuantumState]:
    """Read ``{"hamiltonian": [[[re, im], ...], ...], "state": [[re, im], ...]}``.

    The state is normalized on load.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SystemFileError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or "hamiltonian" not in doc or "state" not in doc:
        raise SystemFileError(f"{path}: needs 'hamiltonian' and 'state' fields")
    try:
        rows = [
            [_complex(v, f"hamiltonian[{i}][{j}]") for j, v in enumerate(row)]
            for i, row in enumerate(doc["hamiltonian"])
        ]
        state = [_complex(v, f"state[{i}]") for i, v in enumerate(doc["state"])]
        if len({len(r) for r in rows}) != 1:
            raise SystemFileError("hamiltonian rows have unequal lengths")
        system = spectral_decompose(np.array(rows))
        psi = QuantumState.from_vector(state)
        if psi.dimension != system.dimension:
            raise SystemFileError(
                f"state has {psi.dimension} entries, hamiltonian is {system.dimension}x{system.dimension}"
            )
    except SystemFileError as exc:
        raise SystemFileError(f"{path}: {exc}") from None
    except (QSLError, TypeError) as exc:
        raise SystemFileError(f"{path}: {exc}") from None
    return system, psi


def dump_system_file(path, matrix, state) -> None:
    m = np.asarray(matrix, dtype=complex)
    v = np.asarray(state, dtype=complex)
    doc = {
        "hamiltonian": [[[z.real, z.imag] for z in row] for row in m],
        "state": [[z.real, z.imag] for z in v],
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def emit_curves(points: int, output_path) -> int:
    """Write the dimensionless bound curves on a uniform cos(theta) grid; return rows written."""
    if points < 2:
        raise ValueError("points must be at least 2")
    rows = []
    for k in range(points):
        u = k / (points - 1)
        theta = math.acos(u)
        rows.append([
            u, theta, theta, mean_energy_numerator(theta), bc_bound(theta).value, bc_poly(u),
        ])
    with open(output_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        writer.writerows([fmt(x) for x in row] for row in rows)
    return len(rows)
