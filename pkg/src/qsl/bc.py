"""Tighter mean-energy bound from certified trigonometric inequalities.

Any triple (a, b, c) with b > 0 such that

    f(x) = cos x + b x - c - a sin x >= 0   for all x >= 0

yields  mean_energy * tau >= (c - sqrt(1 + a^2) cos(theta)) / b  (hbar = 1,
ground energy shifted to 0).  The best such bound is found by maximizing
over triples that touch zero at a tangency point ``x_star``; for fixed
``(x_star, a)`` the tangency conditions f(x_star) = f'(x_star) = 0 give
``b`` and ``c`` in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .core import check_theta
from .errors import NonPositiveSlope, OutOfRange

__all__ = [
    "TrigTriple",
    "BcResult",
    "SearchBox",
    "BcTable",
    "ML_TRIPLE",
    "triple_from_tangency",
    "tangency_margin",
    "certify",
    "bc_bound",
    "bc_poly",
    "bc_table",
    "POLY_COEFFS",
]

POLY_COEFFS = (1.57, -1.847, 0.372, -0.0958)
CERT_TOL = 1e-9
# tangency residual allowed by the in-loop feasibility test
_LOOP_TOL = 1e-12
_COARSE_STEP = 0.05


@dataclass(frozen=True)
class TrigTriple:
    """Parameters of ``cos x >= c - b x + a sin x`` and its certification state."""

    a: float
    b: float
    c: float
    tangency_point: float | None = None
    certified: bool = False
    min_margin: float | None = None
    margin_point: float | None = None

    @property
    def amplitude(self) -> float:
        return math.hypot(1.0, self.a)

    def margin(self, x):
        """f(x) = cos x + b x - c - a sin x."""
        x = np.asarray(x, dtype=float)
        return np.cos(x) + self.b * x - self.c - self.a * np.sin(x)

    def raw_value(self, theta: float) -> float:
        """Unclamped bound (c - sqrt(1+a^2) cos theta) / b."""
        return (self.c - self.amplitude * math.cos(theta)) / self.b

    def cut_point(self) -> float:
        """Beyond this x, b x - c >= sqrt(1+a^2) >= a sin x - cos x, so f >= 0."""
        return max(0.0, (self.c + self.amplitude) / self.b)


ML_TRIPLE = TrigTriple(a=-2.0 / math.pi, b=2.0 / math.pi, c=1.0, tangency_point=math.pi)


def triple_from_tangency(x_star: float, a: float) -> TrigTriple:
    if not x_star > 0:
        raise ValueError("tangency point must be positive")
    b = math.sin(x_star) + a * math.cos(x_star)
    if not b > 0:
        raise NonPositiveSlope(f"slope b = {b:.6g} <= 0 at x*={x_star:.6g}, a={a:.6g}")
    c = math.cos(x_star) + b * x_star - a * math.sin(x_star)
    return TrigTriple(a=float(a), b=b, c=c, tangency_point=float(x_star))


def tangency_margin(x_star, a):
    """Vectorized (b, c, boundary margin, interior margin) for tangency triples.

    Writing f(x) = b x - c + R cos(x + alpha) with R = sqrt(1+a^2),
    alpha = arctan(a), its local minima sit at x + alpha = pi - arcsin(b/R)
    (mod 2 pi) and grow by 2 pi b per period, so the global minimum over
    x >= 0 is either f(0) or the first positive local minimum.  Returns
    f(0) and that local minimum (``inf`` when b >= R and f is monotone).
    """
    x_star = np.asarray(x_star, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.sin(x_star) + a * np.cos(x_star)
    c = np.cos(x_star) + b * x_star - a * np.sin(x_star)
    r = np.hypot(1.0, a)
    alpha = np.arctan(a)
    m0 = 1.0 - c
    with np.errstate(invalid="ignore"):
        ratio = np.clip(b / r, -1.0, 1.0)
        x1 = np.mod(math.pi - np.arcsin(ratio) - alpha, 2 * math.pi)
        x1 = np.where(x1 <= 0.0, x1 + 2 * math.pi, x1)
        m1 = b * x1 - c - np.sqrt(np.maximum(r * r - b * b, 0.0))
    m1 = np.where(b < r, m1, np.inf)
    return b, c, m0, m1


def certify(triple: TrigTriple, tolerance: float = CERT_TOL) -> TrigTriple:
    """Check ``f(x) >= -tolerance`` on x >= 0 by grid evaluation.

    f is scanned on [0, cut_point] where the analytic tail argument takes
    over.  Every grid cell of width w gets the lower bound
    ``min(f_left, f_right) - R w^2 / 8`` from |f''| <= R = sqrt(1+a^2);
    cells whose bound is below ``-tolerance`` are bisected until the
    bound clears or a sample falls below ``-tolerance``.  The lowest
    sample is polished with a bounded scalar minimization to report
    ``min_margin``.
    """
    if not triple.b > 0:
        raise NonPositiveSlope("certification needs b > 0")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    curv = triple.amplitude
    x_cut = triple.cut_point()
    n = max(1, int(math.ceil(x_cut / _COARSE_STEP)))
    xs = np.linspace(0.0, x_cut, n + 1)
    fs = triple.margin(xs)
    k = int(np.argmin(fs))
    best_x, best_f, best_w = float(xs[k]), float(fs[k]), x_cut / n

    lo, hi = xs[:-1], xs[1:]
    flo, fhi = fs[:-1], fs[1:]
    for _ in range(80):
        if best_f < -tolerance or lo.size == 0:
            break
        w = hi - lo
        open_cells = np.minimum(flo, fhi) - curv * w * w / 8.0 < -tolerance
        if not open_cells.any():
            break
        lo, hi, flo, fhi = lo[open_cells], hi[open_cells], flo[open_cells], fhi[open_cells]
        mid = 0.5 * (lo + hi)
        fmid = triple.margin(mid)
        j = int(np.argmin(fmid))
        if fmid[j] < best_f:
            best_x, best_f, best_w = float(mid[j]), float(fmid[j]), float(hi[j] - lo[j]) / 2
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        flo, fhi = np.concatenate([flo, fmid]), np.concatenate([fmid, fhi])

    if x_cut > 0:
        left, right = max(0.0, best_x - best_w), min(x_cut, best_x + best_w)
        if right > left:
            res = minimize_scalar(
                lambda x: float(triple.margin(x)), bounds=(left, right),
                method="bounded", options={"xatol": 1e-12},
            )
            if res.fun < best_f:
                best_x, best_f = float(res.x), float(res.fun)
    return replace(
        triple, certified=best_f >= -tolerance, min_margin=best_f, margin_point=best_x
    )


@dataclass(frozen=True)
class BcResult:
    theta: float
    value: float
    witness: TrigTriple


@dataclass(frozen=True)
class SearchBox:
    """Domain of the (tangency point, a) search and the coarse grid resolution."""

    x_max: float = 2 * math.pi
    a_min: float = -3.0
    a_max: float = 3.0
    n_x: int = 64
    n_a: int = 64

    def contains(self, x_star: float, a: float) -> bool:
        return 0.0 < x_star <= self.x_max and self.a_min <= a <= self.a_max


@lru_cache(maxsize=8)
def _coarse_grid(box: SearchBox):
    xs = box.x_max * np.arange(1, box.n_x + 1) / box.n_x
    avals = np.linspace(box.a_min, box.a_max, box.n_a)
    gx, ga = np.meshgrid(xs, avals, indexing="ij")
    gx, ga = gx.ravel(), ga.ravel()
    _, _, feasible = _feasible(gx, ga)
    b, c, _, _ = tangency_margin(gx, ga)
    return gx[feasible], ga[feasible], b[feasible], c[feasible]


def _feasible(x_star, a):
    """Exact in-loop feasibility of tangency triples: (b, c, ok).

    With b > 0 the tangency point is a global minimizer of the margin iff
    it is a local minimum (f'' >= 0), it is the first positive one
    (automatic for x* <= 2 pi since minima repeat every 2 pi) and the
    boundary value f(0) = 1 - c is nonnegative.
    """
    x_star = np.asarray(x_star, dtype=float)
    a = np.asarray(a, dtype=float)
    b, c, m0, m1 = tangency_margin(x_star, a)
    curvature = a * np.sin(x_star) - np.cos(x_star)
    first = (x_star <= 2 * math.pi) | (m1 >= -_LOOP_TOL)
    ok = (b > 0) & (m0 >= 0.0) & (curvature >= 0.0) & first
    return b, c, ok


def _objective(b, c, a, u):
    return (c - np.hypot(1.0, a) * u) / b


def _refine(x0, a0, u, box: SearchBox):
    """Constrained derivative-free ascent from a coarse-grid incumbent.

    COBYLA handles the active constraint c <= 1 on which the optimum sits;
    only points passing the exact feasibility test may become the
    incumbent, so a final iterate that violates a constraint by rounding
    is simply not used.
    """
    best = [float(_objective(*_feasible(x0, a0)[:2], a0, u)), x0, a0]

    def parts(p):
        x, a = p
        b = math.sin(x) + a * math.cos(x)
        return x, a, b, math.cos(x) + b * x - a * math.sin(x)

    def negated(p):
        x, a, b, c = parts(p)
        if b <= 0:
            return 1e3
        val = (c - math.hypot(1.0, a) * u) / b
        if val > best[0] and box.contains(x, a) and bool(_feasible(x, a)[2]):
            best[:] = [val, x, a]
        return -val

    constraints = [
        {"type": "ineq", "fun": lambda p: 1.0 - parts(p)[3]},
        {"type": "ineq", "fun": lambda p: p[1] * math.sin(p[0]) - math.cos(p[0])},
        {"type": "ineq", "fun": lambda p: parts(p)[2]},
        {"type": "ineq", "fun": lambda p: box.x_max - p[0]},
        {"type": "ineq", "fun": lambda p: p[1] - box.a_min},
        {"type": "ineq", "fun": lambda p: box.a_max - p[1]},
    ]
    minimize(
        negated, np.array([x0, a0]), method="COBYLA", constraints=constraints,
        options={"rhobeg": 0.5 * box.x_max / box.n_x, "tol": 1e-13, "maxiter": 4000},
    )
    return float(best[1]), float(best[2])


def bc_bound(theta: float, box: SearchBox = SearchBox()) -> BcResult:
    """Best certified lower limit on (mean - e_min) * tau at angle ``theta``.

    Parameters
    ----------
    theta : float
        Target angle in [0, pi/2].
    box : SearchBox
        Search domain for the tangency point and ``a``.

    Returns
    -------
    BcResult
        ``value`` is clamped at 0; ``witness`` is the maximizing triple,
        certified on a grid to ``CERT_TOL``.
    """
    theta = check_theta(theta)
    u = math.cos(theta)
    gx, ga, gb, gc = _coarse_grid(box)
    vals = _objective(gb, gc, ga, u)
    k = int(np.argmax(vals))
    candidates = [_refine(float(gx[k]), float(ga[k]), u, box), (float(gx[k]), float(ga[k]))]
    for x_star, a in candidates:
        witness = certify(triple_from_tangency(x_star, a))
        if witness.certified:
            break
    else:
        witness = certify(ML_TRIPLE)
    return BcResult(theta=theta, value=max(0.0, witness.raw_value(theta)), witness=witness)


def bc_poly(cos_theta: float) -> float:
    """Cubic fit to the bound in powers of cos(theta), clamped at 0."""
    u = float(cos_theta)
    if not 0.0 <= u <= 1.0:
        raise OutOfRange("cos_theta must lie in [0, 1]")
    c0, c1, c2, c3 = POLY_COEFFS
    return max(0.0, c0 + u * (c1 + u * (c2 + u * c3)))


class BcTable:
    """Fast certified evaluation from witnesses precomputed on a theta grid.

    Every stored witness is a certified triple, so its bound is valid at
    any angle; the table returns the largest of them.  Because the optimal
    triple is stationary in the angle, the loss against a fresh
    ``bc_bound`` is second order in the grid spacing.
    """

    def __init__(self, points: int = 1025, box: SearchBox = SearchBox()):
        thetas = np.linspace(0.0, math.pi / 2, points)
        witnesses = [bc_bound(t, box).witness for t in thetas]
        self.thetas = thetas
        self.a = np.array([w.a for w in witnesses])
        self.b = np.array([w.b for w in witnesses])
        self.c = np.array([w.c for w in witnesses])

    def values(self, theta) -> np.ndarray:
        u = np.cos(np.asarray(theta, dtype=float))
        raw = (self.c - np.hypot(1.0, self.a) * u[..., None]) / self.b
        return np.maximum(0.0, raw.max(axis=-1))

    def __call__(self, theta: float) -> float:
        return float(self.values(np.array([theta]))[0])


@lru_cache(maxsize=2)
def bc_table(points: int = 1025) -> BcTable:
    return BcTable(points)
