"""Effect of adjoining one exponent to an exponential sum.

Adding a term alpha_0 * exp(<a_0, x>) multiplies the expected-zero density
pointwise by a computable factor Psi(x).  The region where Psi < 1 is where
zeros become less likely, the region where Psi > 1 is where they become
more likely; both are computed here, along with interior witnesses for
"the decrease region is nonempty", ray scans into the tails, rectangular
region scans for plotting, the metric of the augmented sum, and the exact
shrink factor of the projected dual ellipsoid on level sets.

All formulas are evaluated through the log-domain quantities of
:mod:`.expsum`, so far-tail points stay finite.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.special import expit

from .errors import DegenerateMetricError, DomainError, InputError, SparseKacRiceError
from .expsum import ExpSum, EvalBundle, _batch_moments, _check_point, evaluate, invert_moment
from .geometry import QuadForm, SupportSet, diameter, interior_contains

__all__ = [
    "U_MINUS",
    "U_PLUS",
    "BOUNDARY",
    "OUTSIDE",
    "Augmentation",
    "PsiEval",
    "RegionScan",
    "LevelsetReport",
    "augment",
    "psi",
    "psi_via_phi0",
    "classify",
    "witness_interior",
    "ray_scan_unbounded",
    "region_scan",
    "augmented_metric",
    "levelset_projection_check",
]

U_MINUS = "U_minus"
U_PLUS = "U_plus"
BOUNDARY = "boundary"
#: Region-scan marker for grid nodes outside the scan domain.
OUTSIDE = "outside"

#: |Psi - 1| at or below this band classifies as "boundary" rather than
#: forcing a side; the decrease/increase regions are open sets.
BOUNDARY_BAND = 1e-10


@dataclass(frozen=True)
class Augmentation:
    """One extra exponent a_0 with positive weight alpha_0."""

    a0: np.ndarray
    alpha0: float = 1.0

    def __post_init__(self):
        a0 = np.asarray(self.a0, dtype=float).reshape(-1)
        if not np.all(np.isfinite(a0)):
            raise InputError("a0 must be finite")
        object.__setattr__(self, "a0", a0)
        if not (np.isfinite(self.alpha0) and self.alpha0 > 0):
            raise InputError("alpha0 must be finite and positive")


@dataclass(frozen=True, eq=False)
class PsiEval:
    """The density-ratio evaluation at one point.

    ``ratio`` is K/K_0 in (0, 1); ``tau_normsq`` is the dual-metric square
    norm of the one-form tau; ``psi = ratio^{m/2} sqrt(1 + tau_normsq)``.
    """

    x: np.ndarray
    phi0: float
    tau_normsq: float
    ratio: float
    psi: float
    classification: str


def _classify_psi(value: float) -> str:
    if value < 1.0 - BOUNDARY_BAND:
        return U_MINUS
    if value > 1.0 + BOUNDARY_BAND:
        return U_PLUS
    return BOUNDARY


def _check_augmentation(E: ExpSum, aug: Augmentation) -> np.ndarray:
    a0 = np.asarray(aug.a0, dtype=float).reshape(-1)
    if a0.shape[0] != E.dim:
        raise InputError(f"a0 has length {a0.shape[0]}, expected {E.dim}")
    gap = np.linalg.norm(E.support.points - a0, axis=1).min()
    if gap <= SupportSet.dedup_tolerance(np.vstack([E.support.points, a0])):
        raise InputError("a0 coincides with an existing support point")
    return a0


def augment(E: ExpSum, aug: Augmentation) -> ExpSum:
    """The exponential sum with the extra exponent adjoined to the support."""
    a0 = _check_augmentation(E, aug)
    return ExpSum(
        np.vstack([E.support.points, a0]),
        np.append(E.coeffs, aug.alpha0),
    )


def _aug_logs(E: ExpSum, aug: Augmentation, bundle: EvalBundle):
    """(log f0, phi0, log K0) at bundle.x, all overflow-safe."""
    log_f0 = math.log(aug.alpha0) + float(aug.a0 @ bundle.x)
    phi0 = bundle.phi - log_f0
    log_K0 = np.logaddexp(2.0 * bundle.phi, 2.0 * log_f0)
    return log_f0, phi0, float(log_K0)


def psi(E: ExpSum, aug: Augmentation, x) -> PsiEval:
    """Evaluate the pointwise density ratio Psi at x.

    Built from the one-form tau = (f_0/sqrt(K_0)) (mu - a_0):
    Psi = (K/K_0)^{m/2} sqrt(1 + g^x(tau)).  Requires a nondegenerate
    metric (full-dimensional Newton polytope).
    """
    a0 = _check_augmentation(E, aug)
    bundle = evaluate(E, x)
    if bundle.g_dual is None:
        raise DegenerateMetricError("metric degenerates at x; density ratio undefined")
    log_f0, phi0, log_K0 = _aug_logs(E, aug, bundle)
    ratio = math.exp(2.0 * bundle.phi - log_K0)
    tau = math.exp(log_f0 - 0.5 * log_K0) * (bundle.mu - a0)
    tau_normsq = bundle.g_dual(tau)
    value = ratio ** (E.dim / 2.0) * math.sqrt(1.0 + tau_normsq)
    return PsiEval(
        x=bundle.x,
        phi0=phi0,
        tau_normsq=tau_normsq,
        ratio=ratio,
        psi=value,
        classification=_classify_psi(value),
    )


def psi_via_phi0(E: ExpSum, aug: Augmentation, x) -> float:
    """Alternate route to Psi through phi0 alone.

    Psi = (1 - s)^{m/2} sqrt(1 + s * g^x(mu - a_0)) with the logistic
    s = 1/(1 + e^{2 phi0}); the factor 1 - s is evaluated as its own
    logistic so the far tail keeps full precision.  Used to
    cross-validate :func:`psi`; the two routes agree to 1e-10 on
    nondegenerate inputs.
    """
    a0 = _check_augmentation(E, aug)
    bundle = evaluate(E, x)
    if bundle.g_dual is None:
        raise DegenerateMetricError("metric degenerates at x; density ratio undefined")
    _, phi0, _ = _aug_logs(E, aug, bundle)
    s = float(expit(-2.0 * phi0))
    ratio = float(expit(2.0 * phi0))
    return ratio ** (E.dim / 2.0) * math.sqrt(1.0 + s * bundle.g_dual(bundle.mu - a0))


def classify(E: ExpSum, aug: Augmentation, x, tol: float = 1e-10) -> str:
    """Classify x against the closed-form decrease criterion.

    x is in the decrease region iff

        g^x(mu - a_0)  <  m + sum_{k=1}^{m-1} C(m+1, k+1) r^k + r^m,

    with r = e^{-2 phi0}; the right side equals ((1+r)^m - 1)(1 + 1/r),
    which is algebraically equivalent to Psi < 1.  Agrees with the
    Psi-vs-1 classification whenever |Psi - 1| > tol.
    """
    a0 = _check_augmentation(E, aug)
    bundle = evaluate(E, x)
    if bundle.g_dual is None:
        raise DegenerateMetricError("metric degenerates at x; classification undefined")
    _, phi0, _ = _aug_logs(E, aug, bundle)
    lhs = bundle.g_dual(bundle.mu - a0)
    m = E.dim
    with np.errstate(over="ignore"):
        r = float(np.exp(-2.0 * phi0))
        rhs = float(m)
        for k in range(1, m):
            rhs += math.comb(m + 1, k + 1) * r**k
        rhs += r**m
    if not math.isfinite(rhs):
        return U_MINUS
    band = tol * max(1.0, abs(lhs), abs(rhs))
    if lhs < rhs - band:
        return U_MINUS
    if lhs > rhs + band:
        return U_PLUS
    return BOUNDARY


def witness_interior(E: ExpSum, aug: Augmentation, tol: float = 1e-9) -> np.ndarray:
    """A point where the density ratio certifiably drops below 1.

    For a_0 interior to the Newton polytope, x_0 = invert_moment(a_0) makes
    tau vanish, so Psi(x_0) = (K/K_0)^{m/2} < 1.  Returns x_0 after
    checking that inequality numerically.
    """
    a0 = _check_augmentation(E, aug)
    if not tol > 0:
        raise InputError("tol must be positive")
    if not interior_contains(E.support, a0, tol):
        raise DomainError("a0 is not interior to the Newton polytope")
    x0 = invert_moment(E, a0)
    result = psi(E, aug, x0)
    if not result.psi < 1.0:
        raise SparseKacRiceError(
            f"interior witness failed numerically: Psi(x0) = {result.psi!r}"
        )
    return x0


def ray_scan_unbounded(
    E: ExpSum, aug: Augmentation, x_dir, t_max: float, n_steps: int
) -> list[PsiEval]:
    """Psi along the ray t * x_dir for t in (0, t_max], n_steps samples.

    Raw empirical data: when a_0 is far outside the polytope and the ray
    points away from it through a vertex, the tail classifications land in
    the decrease region; no certification of unboundedness is attempted.
    """
    x_dir = _check_point(x_dir, E.dim, name="x_dir")
    norm = float(np.linalg.norm(x_dir))
    if norm == 0.0:
        raise InputError("x_dir must be nonzero")
    if not (t_max > 0 and n_steps >= 1):
        raise InputError("need t_max > 0 and n_steps >= 1")
    direction = x_dir / norm
    ts = np.linspace(t_max / n_steps, t_max, n_steps)
    return [psi(E, aug, t * direction) for t in ts]


@dataclass(frozen=True, eq=False)
class RegionScan:
    """Rectangular grid of Psi values with decrease/increase classification.

    ``psi`` is NaN and ``classes`` is "outside" at grid nodes outside the
    scan domain (only possible for moment-coordinate scans, where the
    domain is the polytope interior).
    """

    space: str
    box: tuple
    resolution: tuple
    axes: tuple
    psi: np.ndarray
    classes: np.ndarray

    def _column_names(self) -> list[str]:
        prefix = "p" if self.space == "p" else "x"
        return [f"{prefix}{i + 1}" for i in range(len(self.axes))]

    def to_csv(self) -> str:
        """Serialize as CSV with a header row, nodes in row-major order."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self._column_names() + ["psi", "class"])
        grids = np.meshgrid(*self.axes, indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        flat_psi = self.psi.ravel()
        flat_cls = self.classes.ravel()
        for row, value, label in zip(coords, flat_psi, flat_cls):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(value)), str(label)])
        return out.getvalue()

    def to_json(self) -> str:
        """Serialize with grid metadata; NaN encodes as null."""
        flat = [None if math.isnan(v) else v for v in self.psi.ravel().tolist()]
        payload = {
            "schema": 1,
            "space": self.space,
            "box": [list(b) for b in self.box],
            "resolution": list(self.resolution),
            "axes": [axis.tolist() for axis in self.axes],
            "columns": self._column_names() + ["psi", "class"],
            "psi": flat,
            "class": self.classes.ravel().tolist(),
        }
        return json.dumps(payload)


def _scan_psi_flat(E, aug, points, threads):
    """Psi evaluations for an (n, m) array of x points, optionally threaded."""
    n = points.shape[0]
    values = np.empty(n)
    labels = np.empty(n, dtype=object)

    def eval_range(lo, hi):
        for i in range(lo, hi):
            result = psi(E, aug, points[i])
            values[i] = result.psi
            labels[i] = result.classification

    if threads and threads > 1 and n > 1:
        workers = min(threads, n)
        bounds = np.linspace(0, n, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda w: eval_range(bounds[w], bounds[w + 1]), range(workers)))
    else:
        eval_range(0, n)
    return values, labels


def region_scan(
    E: ExpSum,
    aug: Augmentation,
    box=None,
    resolution=64,
    space: str = "p",
    threads: int = 1,
) -> RegionScan:
    """Psi on a rectangular grid, in moment coordinates or x coordinates.

    In the default moment-coordinate scan ("p" space) each grid node is an
    interior point of the Newton polytope, mapped back through the moment
    map before evaluating; nodes outside the interior are marked "outside".
    An "x" space scan evaluates the grid directly.  ``box`` defaults to the
    support's bounding box ("p") or [-5, 5]^m ("x"); ``resolution`` is an
    int or per-axis sequence, at least 2 per axis.
    """
    _check_augmentation(E, aug)
    if space not in ("p", "x"):
        raise InputError("space must be 'p' or 'x'")
    if E.support.degenerate:
        raise DegenerateMetricError("support is not full-dimensional; Psi undefined")
    m = E.dim
    if box is None:
        if space == "p":
            lo = E.support.points.min(axis=0)
            hi = E.support.points.max(axis=0)
            box = tuple((float(a), float(b)) for a, b in zip(lo, hi))
        else:
            box = tuple((-5.0, 5.0) for _ in range(m))
    box = tuple((float(a), float(b)) for a, b in box)
    if len(box) != m or any(a >= b for a, b in box):
        raise InputError("box must give (lo, hi) with lo < hi per axis")
    if np.isscalar(resolution):
        resolution = (int(resolution),) * m
    resolution = tuple(int(r) for r in resolution)
    if len(resolution) != m or any(r < 2 for r in resolution):
        raise InputError("resolution must be at least 2 per axis")

    axes = tuple(np.linspace(a, b, r) for (a, b), r in zip(box, resolution))
    grids = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    n = nodes.shape[0]
    values = np.full(n, np.nan)
    labels = np.full(n, OUTSIDE, dtype=object)

    if space == "x":
        values[:], labels[:] = _scan_psi_flat(E, aug, nodes, threads)
    else:
        margin = 1e-6 * diameter(E.support)
        inside = np.array(
            [interior_contains(E.support, p, margin) for p in nodes], dtype=bool
        )
        if inside.any():
            from .expsum import _invert_moment_many

            X, ok = _invert_moment_many(E, nodes[inside])
            usable = np.flatnonzero(inside)[ok]
            if usable.size:
                values[usable], labels[usable] = _scan_psi_flat(E, aug, X[ok], threads)
    shape = resolution
    return RegionScan(
        space=space,
        box=box,
        resolution=resolution,
        axes=axes,
        psi=values.reshape(shape),
        classes=labels.reshape(shape),
    )


def augmented_metric(E: ExpSum, aug: Augmentation, x) -> QuadForm:
    """Metric of the augmented sum, via the rank-one update formula.

    (g_0)_x = (K/K_0) (g_x + tau tau^T).  Evaluating the augmented sum
    directly gives the same form; this route never materializes it.
    """
    a0 = _check_augmentation(E, aug)
    bundle = evaluate(E, x)
    if bundle.g_dual is None:
        raise DegenerateMetricError("metric degenerates at x")
    log_f0, _, log_K0 = _aug_logs(E, aug, bundle)
    ratio = math.exp(2.0 * bundle.phi - log_K0)
    tau = math.exp(log_f0 - 0.5 * log_K0) * (bundle.mu - a0)
    return QuadForm(ratio * (bundle.g.entries + np.outer(tau, tau)))


@dataclass(frozen=True)
class LevelsetReport:
    """Result of the projected-dual-ellipsoid shrink check.

    On the tangent space of the level set of phi0 through x (the orthogonal
    complement of mu - a_0), the augmented form is exactly (K/K_0) times
    the base form — equivalently the projected dual ellipsoid shrinks by
    sqrt(K/K_0).  ``residual`` is the largest entrywise mismatch of the
    restricted Gram arrays, relative to their scale.
    """

    residual: float
    ratio: float
    vacuous: bool
    passed: bool


def levelset_projection_check(
    E: ExpSum, aug: Augmentation, x, tol: float = 1e-10
) -> LevelsetReport:
    """Verify the exact shrink of the projected dual ellipsoid at x.

    Restricts both metrics to the orthogonal complement of mu(x) - a_0 and
    compares the augmented restriction against (K/K_0) times the base
    restriction.  At a critical point of phi0 (mu = a_0) the tangent space
    is undefined and a DomainError is raised; in one variable the
    complement is trivial and the check passes vacuously.
    """
    a0 = _check_augmentation(E, aug)
    bundle = evaluate(E, x)
    if bundle.g_dual is None:
        raise DegenerateMetricError("metric degenerates at x")
    log_f0, _, log_K0 = _aug_logs(E, aug, bundle)
    ratio = math.exp(2.0 * bundle.phi - log_K0)
    grad0 = bundle.mu - a0
    if np.linalg.norm(grad0) <= 1e-12 * (1.0 + np.linalg.norm(a0)):
        raise DomainError("x is a critical point of phi0; level set has no tangent space")
    if E.dim == 1:
        return LevelsetReport(residual=0.0, ratio=ratio, vacuous=True, passed=True)
    basis = null_space(grad0[None, :])
    g0 = augmented_metric(E, aug, x).entries
    restricted_aug = basis.T @ g0 @ basis
    restricted_base = ratio * (basis.T @ bundle.g.entries @ basis)
    scale = max(1.0, float(np.abs(restricted_base).max()))
    residual = float(np.abs(restricted_aug - restricted_base).max()) / scale
    return LevelsetReport(
        residual=residual, ratio=ratio, vacuous=False, passed=residual < tol
    )
