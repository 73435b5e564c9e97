"""Expected number of real zeros, by numerical integration.

Two routes to the same number:

* the x-space route integrates the zero density (2/s_m) sqrt(det g_x)
  over R^m, truncated to an automatically grown box whose outermost
  shell is monitored until it stops contributing;
* the moment-space route integrates the Legendre-transform density over
  the interior of the Newton polytope, with a one-step extrapolation of
  the square-root boundary layer.

One-dimensional integrals use a nested midpoint rule with Richardson
extrapolation; higher dimensions use adaptive dyadic subdivision with a
pair of tensor Gauss-Legendre rules per cell.  All accumulation is
compensated (math.fsum), so results do not depend on evaluation order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.spatial import ConvexHull

from .errors import ConvergenceError, InputError
from .expsum import (
    ExpSum,
    _batch_moments,
    _invert_moment_many,
    density_many,
    invert_moment,
)
from .geometry import ball_sphere_constants, diameter, hull_volume

__all__ = [
    "Quadrature",
    "IntegralResult",
    "esol_total",
    "esol_region",
    "esol_pspace",
    "LowerBoundReport",
    "lower_bound_check",
]

#: Subdivision budget per adaptive integral.
MAX_CELLS = 40000
#: Nested-midpoint level cap (initial 32 panels, doubled per level).
MAX_LEVELS = 14
#: AUTO boxes stop growing once the newest shell contributes less than
#: abs_tol divided by this factor.
SHELL_FACTOR = 10.0
#: Maximum number of AUTO box doublings.
MAX_DOUBLINGS = 12
#: Outermost relative shrink of the moment-space integration region.
PSPACE_EPS = 1e-3


@dataclass(frozen=True)
class Quadrature:
    """Integration request: scheme, tolerances, and region.

    ``scheme`` is "auto" (midpoint/Richardson in one variable, adaptive
    dyadic subdivision otherwise).  ``box`` is "auto" for the grown box,
    or a per-axis sequence of (lo, hi) pairs ((lo, hi) alone is accepted
    in one variable).
    """

    scheme: str = "auto"
    abs_tol: float = 1e-7
    rel_tol: float = 1e-7
    box: object = "auto"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InputError("tolerances must be positive")
        if self.scheme not in ("auto", "midpoint-richardson", "adaptive-dyadic"):
            raise InputError(f"unknown scheme {self.scheme!r}")


@dataclass(frozen=True)
class IntegralResult:
    """Converged integral with its error estimate and work counters.

    ``cells`` counts quadrature panels (one variable) or leaf cells;
    ``inversion_failures`` counts failed moment-map inversions on the
    moment-space route (always 0 on the x route)."""

    value: float
    error: float
    route: str
    cells: int
    inversion_failures: int = 0


def _normalize_box(box, m: int):
    """Coerce box input to a tuple of m (lo, hi) float pairs."""
    box = np.asarray(box, dtype=float)
    if box.shape == (2,) and m == 1:
        box = box[None, :]
    if box.shape != (m, 2):
        raise InputError(f"box must give (lo, hi) for each of {m} axes")
    if not np.all(np.isfinite(box)) or np.any(box[:, 0] >= box[:, 1]):
        raise InputError("box must give finite lo < hi per axis")
    return tuple((float(a), float(b)) for a, b in box)


# ---------------------------------------------------------------------------
# One-dimensional nested midpoint + Richardson


def _midpoint_richardson(f, lo, hi, abs_tol, rel_tol, n0=32):
    """Integrate vectorized f on [lo, hi]; returns (value, error, panels)."""
    rows = []
    n = n0
    for _ in range(MAX_LEVELS + 1):
        xs = lo + (hi - lo) * (np.arange(n) + 0.5) / n
        row = [float((hi - lo) * math.fsum(f(xs[:, None])) / n)]
        if rows:
            prev = rows[-1]
            for k in range(len(prev)):
                row.append(row[k] + (row[k] - prev[k]) / (4.0 ** (k + 1) - 1.0))
            err = abs(row[-1] - prev[-1])
            if err <= max(abs_tol, rel_tol * abs(row[-1])):
                return row[-1], err, n
        rows.append(row)
        n *= 2
    raise ConvergenceError(
        "midpoint rule did not converge within the level budget",
        value=rows[-1][-1],
        residual=abs(rows[-1][-1] - rows[-2][-1]),
    )


# ---------------------------------------------------------------------------
# Adaptive dyadic subdivision with paired tensor Gauss-Legendre rules

_GL_COARSE = leggauss(4)
_GL_FINE = leggauss(8)


def _tensor_rule(rule, m):
    """Tensor-product nodes ((n, m), weights (n,)) on [-1, 1]^m."""
    nodes1, weights1 = rule
    grids = np.meshgrid(*([nodes1] * m), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([weights1] * m), indexing="ij")
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=1), axis=1)
    return nodes, weights


def _cell_quadrature(f, los, his, nodes, weights):
    """Apply one reference rule to a batch of cells; returns per-cell values."""
    n_cells = los.shape[0]
    half = 0.5 * (his - los)
    mid = 0.5 * (his + los)
    pts = mid[:, None, :] + half[:, None, :] * nodes[None, :, :]
    vals = f(pts.reshape(-1, los.shape[1])).reshape(n_cells, -1)
    jac = np.prod(half, axis=1)
    return jac * (vals @ weights)


def _seed_grid(box, per_axis):
    """Initial subdivision: roughly isotropic cells, per_axis on the longest axis."""
    lengths = np.array([b - a for a, b in box])
    counts = np.maximum(1, np.round(per_axis * lengths / lengths.max()).astype(int))
    edges = [np.linspace(a, b, c + 1) for (a, b), c in zip(box, counts)]
    grids_lo = np.meshgrid(*[e[:-1] for e in edges], indexing="ij")
    grids_hi = np.meshgrid(*[e[1:] for e in edges], indexing="ij")
    los = np.stack([g.ravel() for g in grids_lo], axis=1)
    his = np.stack([g.ravel() for g in grids_hi], axis=1)
    return los, his


def _adaptive_box(f, box, abs_tol, rel_tol, max_cells=MAX_CELLS, seed_per_axis=8):
    """Adaptive cubature of vectorized f over a box; (value, error, cells)."""
    m = len(box)
    nodes_c, weights_c = _tensor_rule(_GL_COARSE, m)
    nodes_f, weights_f = _tensor_rule(_GL_FINE, m)

    heap = []
    counter = 0

    def push_cells(los, his):
        """Evaluate cells, push them, return their (value sum, error sum)."""
        nonlocal counter
        coarse = _cell_quadrature(f, los, his, nodes_c, weights_c)
        fine = _cell_quadrature(f, los, his, nodes_f, weights_f)
        errs = np.abs(fine - coarse)
        for lo, hi, value, err in zip(los, his, fine, errs):
            heapq.heappush(
                heap, (-float(err), counter, tuple(lo), tuple(hi), float(value))
            )
            counter += 1
        return float(fine.sum()), float(errs.sum())

    total, total_err = push_cells(*_seed_grid(box, seed_per_axis))

    while total_err > max(abs_tol, rel_tol * abs(total)):
        if len(heap) >= max_cells:
            raise ConvergenceError(
                f"cell budget {max_cells} exhausted",
                value=total,
                residual=total_err,
            )
        batch = [heapq.heappop(heap) for _ in range(min(16, len(heap)))]
        los, his = [], []
        for neg_err, _, lo, hi, value in batch:
            total -= value
            total_err += neg_err
            lo, hi = np.asarray(lo), np.asarray(hi)
            axis = int(np.argmax(hi - lo))
            mid = 0.5 * (lo[axis] + hi[axis])
            child_hi, child_lo = hi.copy(), lo.copy()
            child_hi[axis] = mid
            child_lo[axis] = mid
            los += [lo, child_lo]
            his += [child_hi, hi]
        dv, de = push_cells(np.asarray(los), np.asarray(his))
        total += dv
        total_err += de

    value = math.fsum(entry[4] for entry in heap)
    error = math.fsum(-entry[0] for entry in heap)
    return value, error, len(heap)


def _integrate_box(f, box, abs_tol, rel_tol, m, seed_per_axis=8):
    """Dispatch on dimension; (value, error, cells)."""
    if m == 1:
        (lo, hi), = box
        return _midpoint_richardson(f, lo, hi, abs_tol, rel_tol)
    return _adaptive_box(f, box, abs_tol, rel_tol, seed_per_axis=seed_per_axis)


# ---------------------------------------------------------------------------
# AUTO box policy


def _auto_center_radius(E: ExpSum):
    """Initial AUTO box: centered on the moment preimage of the barycenter,
    radius 5 over the smallest nonzero axis-projected support gap."""
    pts = E.support.points
    gaps = []
    for axis in range(pts.shape[1]):
        vals = np.unique(pts[:, axis])
        if len(vals) > 1:
            gaps.append(np.diff(vals).min())
    sigma = min(gaps)
    center = invert_moment(E, pts.mean(axis=0))
    return center, 5.0 / sigma


def _shell_slabs(center, r_in, r_out, m):
    """Partition box(r_out) minus box(r_in) into 2m axis-aligned slabs."""
    slabs = []
    for axis in range(m):
        for sign in (-1.0, 1.0):
            slab = []
            for j in range(m):
                if j < axis:
                    slab.append((center[j] - r_out, center[j] + r_out))
                elif j > axis:
                    slab.append((center[j] - r_in, center[j] + r_in))
                elif sign < 0:
                    slab.append((center[j] - r_out, center[j] - r_in))
                else:
                    slab.append((center[j] + r_in, center[j] + r_out))
            slabs.append(tuple(slab))
    return slabs


def _integrate_auto(f, E, abs_tol, rel_tol):
    """Integrate f over an automatically grown box; (value, error, cells)."""
    m = E.dim
    center, radius = _auto_center_radius(E)
    box = tuple((c - radius, c + radius) for c in center)
    value, error, cells = _integrate_box(f, box, abs_tol, rel_tol, m)
    shell_tol = abs_tol / SHELL_FACTOR
    for _ in range(MAX_DOUBLINGS):
        slabs = _shell_slabs(center, radius, 2.0 * radius, m)
        shell = 0.0
        for slab in slabs:
            try:
                v, e, c = _integrate_box(
                    f, slab, shell_tol / (4 * len(slabs)), rel_tol, m, seed_per_axis=4
                )
            except ConvergenceError as exc:
                partial = exc.value if exc.value is not None else 0.0
                raise ConvergenceError(
                    str(exc), value=value + shell + partial, residual=exc.residual
                ) from exc
            shell += v
            error += e
            cells += c
        value += shell
        radius *= 2.0
        if abs(shell) < shell_tol:
            return value, error + abs(shell), cells
    raise ConvergenceError(
        "AUTO box kept growing without the tail shells dying off",
        value=value,
        residual=abs(shell),
    )


# ---------------------------------------------------------------------------
# Public integrals


def esol_total(E: ExpSum, q: Quadrature | None = None) -> IntegralResult:
    """Expected number of zeros: the density integrated over R^m.

    With ``box="auto"`` the region grows until the outermost shell is
    negligible; an explicit box integrates over it alone.  Degenerate
    supports (dim conv(A) < m) carry zero density and return 0.
    """
    q = q or Quadrature()
    if E.support.degenerate:
        return IntegralResult(0.0, 0.0, "x", 0)
    f = lambda X: density_many(E, X)
    if isinstance(q.box, str):
        if q.box != "auto":
            raise InputError(f"box must be 'auto' or explicit bounds, got {q.box!r}")
        value, error, cells = _integrate_auto(f, E, q.abs_tol, q.rel_tol)
    else:
        box = _normalize_box(q.box, E.dim)
        value, error, cells = _integrate_box(f, box, q.abs_tol, q.rel_tol, E.dim)
    return IntegralResult(value, error, "x", cells)


def esol_region(E: ExpSum, U, q: Quadrature | None = None) -> IntegralResult:
    """Expected number of zeros with x restricted to the box U.

    Additive over disjoint boxes; used for decrease/increase-region
    comparisons between a sum and its augmentation.
    """
    q = q or Quadrature()
    if E.support.degenerate:
        return IntegralResult(0.0, 0.0, "x", 0)
    box = _normalize_box(U, E.dim)
    f = lambda X: density_many(E, X)
    value, error, cells = _integrate_box(f, box, q.abs_tol, q.rel_tol, E.dim)
    return IntegralResult(value, error, "x", cells)


# ---------------------------------------------------------------------------
# Moment-space route


def _bbox(points):
    return points.min(axis=0), points.max(axis=0)


def _is_box_polytope(E: ExpSum) -> bool:
    """True when the Newton polytope is its own axis-aligned bounding box."""
    if E.dim == 1:
        return True
    lo, hi = _bbox(E.support.points)
    volume = hull_volume(E.support)
    return abs(volume - float(np.prod(hi - lo))) <= 1e-12 * max(1.0, volume)


def _legendre_values(E, P, prefactor, counter):
    """Legendre-transform density at moment points P; failures contribute 0."""
    values = np.zeros(P.shape[0])
    X, ok = _invert_moment_many(E, P, max_iter=200)
    counter[0] += int((~ok).sum())
    if ok.any():
        _, _, G = _batch_moments(E, X[ok])
        dets = np.maximum(np.linalg.det(2.0 * G), 0.0)
        dens = np.zeros(int(ok.sum()))
        good = dets > 0.0
        dens[good] = 1.0 / np.sqrt(dets[good])
        values[ok] = dens
    return prefactor * values


def _pspace_level_box(E, eps, prefactor, abs_tol, rel_tol, counter):
    """One shrink level for a box-shaped polytope, in angular coordinates.

    Per axis, p = mid + halfwidth sin(t) absorbs the 1/sqrt(edge distance)
    boundary layer into a smooth Jacobian; the (1 - eps) homothety becomes
    |t| <= arcsin(1 - eps).
    """
    lo, hi = _bbox(E.support.points)
    mid = 0.5 * (lo + hi)
    halfw = 0.5 * (hi - lo)
    t_max = math.asin(1.0 - eps)

    def f(T):
        P = mid + halfw * np.sin(T)
        jac = np.prod(halfw * np.cos(T), axis=1)
        return jac * _legendre_values(E, P, prefactor, counter)

    box = tuple((-t_max, t_max) for _ in range(E.dim))
    return _integrate_box(f, box, abs_tol, rel_tol, E.dim)


def _pspace_level_masked(E, eps, prefactor, abs_tol, rel_tol, counter):
    """One shrink level for a general polytope: masked bounding-box cubature."""
    pts = E.support.points
    bary = pts.mean(axis=0)
    shrunk = bary + (1.0 - eps) * (pts - bary)
    hull = ConvexHull(shrunk)
    eqs = hull.equations
    lo, hi = _bbox(shrunk)

    def f(P):
        inside = np.all(P @ eqs[:, :-1].T + eqs[:, -1] < 0.0, axis=1)
        values = np.zeros(P.shape[0])
        if inside.any():
            values[inside] = _legendre_values(E, P[inside], prefactor, counter)
        return values

    box = tuple((float(a), float(b)) for a, b in zip(lo, hi))
    return _integrate_box(f, box, abs_tol, rel_tol, E.dim, seed_per_axis=12)


def esol_pspace(E: ExpSum, q: Quadrature | None = None) -> IntegralResult:
    """Expected number of zeros via the Newton-polytope route (m <= 2).

    Integrates the Legendre-transform density over an interior-shrunk
    copy of the polytope at three shrink levels and extrapolates the
    square-root boundary layer one Richardson step.  Box-shaped polytopes
    use an exact angular substitution that flattens the layer; other
    shapes fall back to masked bounding-box cubature.  Nodes whose moment
    inversion fails contribute nothing and are counted (per evaluation)
    in ``inversion_failures``.
    """
    q = q or Quadrature()
    if E.support.degenerate:
        return IntegralResult(0.0, 0.0, "p", 0)
    m = E.dim
    if m > 2:
        raise InputError("moment-space integration is limited to two variables")
    prefactor = 1.0 / (2.0 ** ((m - 2) / 2.0) * ball_sphere_constants(m)[1])
    counter = [0]
    box_shaped = _is_box_polytope(E)
    level = _pspace_level_box if box_shaped else _pspace_level_masked
    inner_tol = q.abs_tol if box_shaped else max(q.abs_tol, 1e-6)

    levels = []
    cells = 0
    for eps in (PSPACE_EPS, PSPACE_EPS / 4.0, PSPACE_EPS / 16.0):
        value, err, c = level(E, eps, prefactor, inner_tol, q.rel_tol, counter)
        levels.append((value, err))
        cells += c
    (v0, _), (v1, e1), (v2, e2) = levels
    value = 2.0 * v2 - v1
    # The square-root layer cancels in each extrapolant; their difference
    # estimates what remains.
    error = abs((2.0 * v2 - v1) - (2.0 * v1 - v0)) + e1 + e2
    return IntegralResult(value, error, "p", cells, inversion_failures=counter[0])


@dataclass(frozen=True)
class LowerBoundReport:
    """Comparison of the expected zero count against its volume bound.

    The bound is vol_m(P) / (2^{m-1} s_m diam(P)^m); ``strict`` records
    esol > bound.  Degenerate polytopes make both sides zero and the
    inequality vacuous."""

    esol: float
    esol_error: float
    bound: float
    volume: float
    diam: float
    degenerate: bool
    strict: bool


def lower_bound_check(E: ExpSum, q: Quadrature | None = None) -> LowerBoundReport:
    """Evaluate both sides of the volume lower bound for esol (m <= 3)."""
    volume = hull_volume(E.support)
    if E.support.degenerate:
        return LowerBoundReport(0.0, 0.0, 0.0, volume, diameter(E.support), True, False)
    m = E.dim
    d = diameter(E.support)
    bound = volume / (2.0 ** (m - 1) * ball_sphere_constants(m)[1] * d**m)
    result = esol_total(E, q)
    return LowerBoundReport(
        esol=result.value,
        esol_error=result.error,
        bound=bound,
        volume=volume,
        diam=d,
        degenerate=False,
        strict=result.value > bound,
    )
