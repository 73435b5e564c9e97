"""Convex geometry of finite support sets and quadratic-form calculus.

A finite set A of points in R^m carries everything the rest of the package
needs from convex geometry: its support function, exposed faces, diameter,
and the Euclidean volume of its convex hull.  Quadratic forms enter through
the metric attached to an exponential sum; this module supplies the dual
form (Gram-array inverse), determinants, ellipsoid volumes, and the
unit-ball/unit-sphere constants that normalize every density in the package.
"""

from __future__ import annotations

import math
from functools import cached_property, lru_cache

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.special import gammaln

from .errors import InputError, SingularFormError

__all__ = [
    "SupportSet",
    "QuadForm",
    "support_function",
    "exposed_face",
    "diameter",
    "hull_volume",
    "interior_contains",
    "dual_form",
    "form_det",
    "ellipsoid_volume",
    "ball_sphere_constants",
]

#: Condition-number gate for dual_form; beyond this the inversion is refused.
DUAL_COND_LIMIT = 1e12


def _as_point_array(points) -> np.ndarray:
    """Coerce point input to a float array of shape (k, m)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # A flat list is read as k points on the line, not one point in R^k.
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InputError(f"expected a non-empty (k, m) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("support points must be finite")
    return arr


class SupportSet:
    """An ordered finite set of points A in R^m.

    The convex hull of A is the Newton polytope of any exponential sum
    supported on A.  Points must be pairwise distinct beyond a dedup
    tolerance scaled to the set's size.

    Parameters
    ----------
    points : array_like
        Shape (k, m); a flat length-k sequence is read as k points in R^1.
    """

    def __init__(self, points):
        arr = _as_point_array(points)
        tol = self.dedup_tolerance(arr)
        k = arr.shape[0]
        if k > 1:
            diff = arr[:, None, :] - arr[None, :, :]
            dist = np.sqrt((diff**2).sum(axis=-1))
            iu = np.triu_indices(k, 1)
            if dist[iu].min() <= tol:
                raise InputError("support points must be pairwise distinct")
        arr = arr.copy()
        arr.flags.writeable = False
        self.points = arr

    @staticmethod
    def dedup_tolerance(points) -> float:
        """Distance below which two points count as the same point."""
        arr = np.asarray(points, dtype=float)
        scale = float(np.abs(arr).max()) if arr.size else 0.0
        return 1e-9 * (1.0 + scale)

    @property
    def dim(self) -> int:
        """Ambient dimension m."""
        return self.points.shape[1]

    @property
    def size(self) -> int:
        """Number of points."""
        return self.points.shape[0]

    @cached_property
    def affine_dim(self) -> int:
        """Dimension of the affine hull of the points."""
        if self.size == 1:
            return 0
        centered = self.points[1:] - self.points[0]
        scale = np.abs(centered).max()
        if scale == 0.0:
            return 0
        return int(np.linalg.matrix_rank(centered, tol=1e-12 * scale * max(centered.shape)))

    @property
    def degenerate(self) -> bool:
        """True when conv(A) has empty interior (affine dimension < m)."""
        return self.affine_dim < self.dim

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.points)

    def __repr__(self) -> str:
        return f"SupportSet({self.points.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SupportSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.array_equal(self.points, other.points)
        )

    def __hash__(self):
        return hash((self.points.shape, self.points.tobytes()))


def _coerce_support(A) -> SupportSet:
    return A if isinstance(A, SupportSet) else SupportSet(A)


def _check_vector(u, m: int, name: str = "u") -> np.ndarray:
    vec = np.asarray(u, dtype=float).reshape(-1)
    if vec.shape[0] != m:
        raise InputError(f"{name} has length {vec.shape[0]}, expected {m}")
    if not np.all(np.isfinite(vec)):
        raise InputError(f"{name} must be finite")
    return vec


def support_function(A, u) -> float:
    """Support value h_A(u) = max over a in A of <u, a>.

    For the convex hull this is the polytope's support function: the sup
    over conv(A) is attained on A.
    """
    A = _coerce_support(A)
    u = _check_vector(u, A.dim)
    return float(np.max(A.points @ u))


def exposed_face(A, u, tol: float | None = None) -> SupportSet:
    """Points of A within ``tol`` of the support value in direction u.

    This is the exposed face A^u = {a : <u, a> = h_A(u)} up to a gap
    tolerance; the default tolerance scales with ``|u|`` times the largest
    point norm so that floating-point ties are kept together.  Never empty.
    """
    A = _coerce_support(A)
    u = _check_vector(u, A.dim)
    if tol is None:
        scale = float(np.linalg.norm(u)) * float(np.linalg.norm(A.points, axis=1).max())
        tol = 1e-12 * max(1.0, scale)
    if tol < 0:
        raise InputError("tol must be nonnegative")
    values = A.points @ u
    top = values.max()
    return SupportSet(A.points[values >= top - tol])


def diameter(A) -> float:
    """Largest pairwise Euclidean distance over A (equals diam conv(A))."""
    A = _coerce_support(A)
    if A.size == 1:
        return 0.0
    diff = A.points[:, None, :] - A.points[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=-1)).max())


def hull_volume(A) -> float:
    """Euclidean volume of conv(A), exactly supported for m <= 3.

    Returns 0.0 for degenerate hulls (affine dimension < m); the degeneracy
    itself is queryable as ``A.degenerate``.  Dimensions above 3 are refused.
    """
    A = _coerce_support(A)
    m = A.dim
    if m > 3:
        raise InputError(f"hull_volume supports m <= 3, got m = {m}")
    if A.degenerate:
        return 0.0
    if m == 1:
        flat = A.points[:, 0]
        return float(flat.max() - flat.min())
    try:
        return float(ConvexHull(A.points).volume)
    except QhullError:
        return 0.0


def interior_contains(A, p, tol: float) -> bool:
    """True iff p lies in the interior of conv(A) with margin ``tol``.

    Decided against the facet inequalities of the hull: every facet must
    clear the point by at least ``tol``.  A degenerate hull has no interior.
    """
    A = _coerce_support(A)
    if not tol > 0:
        raise InputError("tol must be positive")
    p = _check_vector(p, A.dim, name="p")
    if A.degenerate:
        return False
    if A.dim == 1:
        flat = A.points[:, 0]
        return bool(flat.min() + tol <= p[0] <= flat.max() - tol)
    try:
        hull = ConvexHull(A.points)
    except QhullError:
        return False
    # Facet rows are (normal, offset) with normal . x + offset <= 0 inside.
    slack = hull.equations[:, :-1] @ p + hull.equations[:, -1]
    return bool(np.all(slack <= -tol))


class QuadForm:
    """A symmetric quadratic form on R^m given by its Gram array.

    The stored array is symmetrized on construction, so symmetry is exact.
    Calling the form evaluates Q(u) = u^T M u.
    """

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError(f"expected a square Gram array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("Gram entries must be finite")
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        self.entries = arr

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __call__(self, u) -> float:
        u = _check_vector(u, self.dim)
        return float(u @ self.entries @ u)

    def __add__(self, other):
        if not isinstance(other, QuadForm):
            return NotImplemented
        return QuadForm(self.entries + other.entries)

    def __mul__(self, scalar):
        return QuadForm(self.entries * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"QuadForm({self.entries.tolist()!r})"


def dual_form(Q: QuadForm, cond_limit: float = DUAL_COND_LIMIT) -> QuadForm:
    """Dual quadratic form Q°, realized as the Gram-array inverse.

    Q°(u) = sup{<u, v>^2 : Q(v) <= 1}; its Gram array is the inverse of Q's.
    The inversion goes through a Cholesky factorization and is refused
    (SingularFormError) when the factorization fails or the condition
    number exceeds ``cond_limit``.
    """
    M = Q.entries
    try:
        chol = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise SingularFormError("form is not positive definite") from exc
    eigs = np.linalg.eigvalsh(M)
    if eigs[0] <= 0 or eigs[-1] / eigs[0] > cond_limit:
        raise SingularFormError(
            f"condition number {eigs[-1] / max(eigs[0], 5e-324):.3e} exceeds gate {cond_limit:.1e}"
        )
    inv_chol = np.linalg.inv(chol)
    return QuadForm(inv_chol.T @ inv_chol)


def form_det(Q: QuadForm) -> float:
    """Determinant of the form's Gram array."""
    return float(np.linalg.det(Q.entries))


def ellipsoid_volume(Q: QuadForm) -> float:
    """Volume of the dual unit ball: vol(B_Q°) = b_m sqrt(det Q).

    Small negative determinants from roundoff clamp to zero; a clearly
    negative determinant is an error.
    """
    d = form_det(Q)
    scale = max(1.0, float(np.abs(Q.entries).max())) ** Q.dim
    if d < -1e-9 * scale:
        raise SingularFormError(f"negative determinant {d:.3e} beyond roundoff")
    b_m, _ = ball_sphere_constants(Q.dim)
    return b_m * math.sqrt(max(d, 0.0))


@lru_cache(maxsize=None)
def ball_sphere_constants(m: int) -> tuple[float, float]:
    """Volumes (b_m, s_m) of the unit ball in R^m and unit sphere S^m in R^{m+1}.

    b_m = pi^{m/2} / Gamma(m/2 + 1) and s_m = 2 pi^{(m+1)/2} / Gamma((m+1)/2);
    they satisfy m! b_m s_m / (2 pi)^m = 2.
    """
    if m < 1:
        raise InputError("m must be a positive integer")
    b_m = math.exp(0.5 * m * math.log(math.pi) - gammaln(0.5 * m + 1.0))
    s_m = 2.0 * math.exp(0.5 * (m + 1) * math.log(math.pi) - gammaln(0.5 * (m + 1)))
    return b_m, s_m
