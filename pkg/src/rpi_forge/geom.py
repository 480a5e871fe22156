"""Convex set kernel: polytopes, ellipsoids, gauges, and Minkowski arithmetic.

All sets are value objects; every operation returns a new set. Halfspace
representations are ``{z : normals @ z <= offsets}``, vertex representations
store one point per row. Linear programs run on scipy's HiGHS backend,
hull/dual computations on Qhull.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.spatial._qhull import QhullError

from .errors import (DegenerateSetError, EmptySetError, GeometryError,
                     UnboundedSetError)

DEFAULT_TOL = 1e-8


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HPolytope:
    """Halfspace form ``{z : normals @ z <= offsets}``."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "normals", _freeze(np.atleast_2d(self.normals)))
        object.__setattr__(self, "offsets", _freeze(np.atleast_1d(self.offsets)))
        if self.normals.shape[0] != self.offsets.shape[0]:
            raise ValueError("normals and offsets row counts differ")
        if np.any(np.linalg.norm(self.normals, axis=1) == 0.0):
            raise ValueError("zero normal row")

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def nrows(self) -> int:
        return self.normals.shape[0]

    def contains(self, z, tol: float = DEFAULT_TOL) -> bool:
        z = np.asarray(z, dtype=float)
        return bool(np.all(self.normals @ z <= self.offsets + tol))

    @classmethod
    def box(cls, radius, dim: int | None = None) -> "HPolytope":
        """Axis-aligned box |z_i| <= radius_i (scalar radius broadcasts)."""
        r = np.atleast_1d(np.asarray(radius, dtype=float))
        if r.size == 1 and dim is not None:
            r = np.full(dim, r[0])
        n = r.size
        eye = np.eye(n)
        return cls(np.vstack([eye, -eye]), np.concatenate([r, r]))


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of finitely many points (one vertex per row)."""

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _freeze(np.atleast_2d(self.vertices)))
        if self.vertices.shape[0] == 0:
            raise EmptySetError("vertex list is empty")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def nverts(self) -> int:
        return self.vertices.shape[0]

    def support(self, direction) -> float:
        """Support function max_{v in set} <direction, v>."""
        return float(np.max(self.vertices @ np.asarray(direction, dtype=float)))

    def contains(self, z, tol: float = DEFAULT_TOL) -> bool:
        """Membership via a convex-combination feasibility LP."""
        z = np.asarray(z, dtype=float)
        k = self.nverts
        A_eq = np.vstack([self.vertices.T, np.ones((1, k))])
        b_eq = np.concatenate([z, [1.0]])
        res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k,
                      method="highs")
        if res.status == 0:
            return True
        if res.status == 2:
            # retry with tolerance slack on the equality part
            A = np.hstack([self.vertices.T, np.eye(self.dim), -np.eye(self.dim)])
            A_eq2 = np.vstack([A, np.concatenate([np.ones(k), np.zeros(2 * self.dim)])[None, :]])
            b_eq2 = np.concatenate([z, [1.0]])
            c = np.concatenate([np.zeros(k), np.ones(2 * self.dim)])
            res2 = linprog(c, A_eq=A_eq2, b_eq=b_eq2,
                           bounds=[(0, None)] * (k + 2 * self.dim), method="highs")
            return res2.status == 0 and res2.fun <= tol
        raise GeometryLPError(res)


@dataclass(frozen=True)
class Ellipsoid:
    """Origin-centred ellipsoid ``{z : z^T Q^{-1} z <= 1}`` with SPD shape Q."""

    shape: np.ndarray

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.shape, dtype=float))
        q = 0.5 * (q + q.T)
        object.__setattr__(self, "shape", _freeze(q))
        eigs = np.linalg.eigvalsh(q)
        if eigs.min() <= DEFAULT_TOL * max(1.0, eigs.max()):
            raise DegenerateSetError("ellipsoid shape matrix is not SPD")

    @property
    def dim(self) -> int:
        return self.shape.shape[0]

    @cached_property
    def inv_shape(self) -> np.ndarray:
        return _freeze(np.linalg.inv(self.shape))

    def contains(self, z, tol: float = DEFAULT_TOL) -> bool:
        z = np.asarray(z, dtype=float)
        return float(z @ self.inv_shape @ z) <= 1.0 + tol


@dataclass(frozen=True)
class GaugePolytope:
    """Polytope with the origin in its interior, usable as a gauge body."""

    base: HPolytope

    def __post_init__(self):
        if np.any(self.base.offsets <= 0.0):
            raise DegenerateSetError("gauge body must have 0 in its interior "
                                     "(all offsets > 0)")

    @property
    def dim(self) -> int:
        return self.base.dim

    @cached_property
    def vertex_set(self) -> VPolytope:
        return vertex_enum(self.base)


class GeometryLPError(GeometryError):
    """An internal LP terminated abnormally."""

    def __init__(self, result):
        super().__init__(f"LP terminated with status {result.status}: {result.message}")
        self.result = result


def lp_max(c, normals, offsets):
    """Maximize ``c @ z`` over ``normals @ z <= offsets``.

    Returns (value, argmax). Raises EmptySetError / UnboundedSetError on
    infeasible / unbounded problems.
    """
    c = np.asarray(c, dtype=float)
    res = linprog(-c, A_ub=normals, b_ub=offsets,
                  bounds=[(None, None)] * c.size, method="highs")
    if res.status == 0:
        return -res.fun, res.x
    if res.status == 2:
        raise EmptySetError("LP infeasible: empty polytope")
    if res.status == 3:
        raise UnboundedSetError("LP unbounded: polytope unbounded in objective direction")
    raise GeometryLPError(res)


def chebyshev_center(h: HPolytope):
    """Center and radius of the largest inscribed ball."""
    norms = np.linalg.norm(h.normals, axis=1)
    A = np.hstack([h.normals, norms[:, None]])
    c = np.zeros(h.dim + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=A, b_ub=h.offsets,
                  bounds=[(None, None)] * h.dim + [(0, None)], method="highs")
    if res.status == 2:
        raise EmptySetError("polytope is empty")
    if res.status == 3:
        raise UnboundedSetError("polytope is unbounded")
    if res.status != 0:
        raise GeometryLPError(res)
    return res.x[:-1], res.x[-1]


def bounding_box(h: HPolytope):
    """Componentwise (lo, hi) bounds; raises if unbounded in any direction."""
    n = h.dim
    lo = np.empty(n)
    hi = np.empty(n)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        hi[j] = lp_max(e, h.normals, h.offsets)[0]
        lo[j] = -lp_max(-e, h.normals, h.offsets)[0]
    return lo, hi


def gauge(body, z, tol: float = DEFAULT_TOL) -> float:
    """Minkowski functional inf{alpha >= 0 : z in alpha * body}.

    Polytopes evaluate as the max facet ratio, ellipsoids as the Q^{-1}
    quadratic norm. The body must contain 0 in its interior.
    """
    z = np.asarray(z, dtype=float)
    if isinstance(body, Ellipsoid):
        return math.sqrt(max(0.0, float(z @ body.inv_shape @ z)))
    base = body.base if isinstance(body, GaugePolytope) else body
    if np.any(base.offsets <= 0.0):
        raise DegenerateSetError("gauge undefined: body lacks 0 in its interior")
    return max(0.0, float(np.max((base.normals @ z) / base.offsets)))


def convex_hull(points, tol: float = DEFAULT_TOL) -> VPolytope:
    """Irredundant V-representation of the hull of a point cloud.

    Handles clouds that are affinely degenerate (points, segments, flats) by
    hulling inside the affine span.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise EmptySetError("no points to hull")
    scale = max(1.0, float(np.abs(pts).max()))
    pts = _dedupe(pts, tol * scale)
    if pts.shape[0] == 1:
        return VPolytope(pts)
    n = pts.shape[1]
    if n == 1:
        return VPolytope(np.array([[pts.min()], [pts.max()]]))
    center = pts.mean(axis=0)
    shifted = pts - center
    # affine rank via SVD; hull in the span if the cloud is flat
    u, s, vt = np.linalg.svd(shifted, full_matrices=False)
    rank = int(np.sum(s > tol * scale * 10))
    if rank == 0:
        return VPolytope(center[None, :])
    if rank < n:
        basis = vt[:rank]
        local = convex_hull(shifted @ basis.T, tol)
        return VPolytope(local.vertices @ basis + center)
    try:
        hull = ConvexHull(pts)
    except QhullError:
        hull = ConvexHull(pts, qhull_options="QJ")
    return VPolytope(pts[np.sort(hull.vertices)])


def _dedupe(pts: np.ndarray, tol: float) -> np.ndarray:
    if tol <= 0:
        tol = 1e-15
    keys = np.round(pts / tol)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return pts[np.sort(idx)]


def remove_redundant(h: HPolytope, tol: float = DEFAULT_TOL, box=None) -> HPolytope:
    """Drop rows that never bind; each survivor is certified by one LP.

    A cheap bounding-box pass removes the bulk first: a row whose support
    over the box stays strictly below its offset is inactive everywhere on
    the feasible set, so removing it (even jointly with others) cannot grow
    the set. The survivors are then filtered sequentially: row l is
    redundant iff maximizing its normal over the remaining rows stays
    within offsets[l].
    """
    norms = np.linalg.norm(h.normals, axis=1)
    normals = h.normals / norms[:, None]
    offsets = h.offsets / norms
    if box is None:
        chebyshev_center(h)  # raises EmptySetError on empty input
        box = bounding_box(h)
    lo, hi = box
    support_over_box = normals.clip(min=0.0) @ hi + normals.clip(max=0.0) @ lo
    scale = max(1.0, float(np.abs(offsets).max()))
    keep = support_over_box > offsets - tol * scale
    normals, offsets = normals[keep], offsets[keep]
    # exact duplicates collapse to the tightest offset
    key = np.round(normals / 1e-10)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    tight = np.full(first.size, np.inf)
    for row, grp in enumerate(inverse):
        tight[grp] = min(tight[grp], offsets[row])
    normals = normals[np.sort(first)]
    offsets = np.array([tight[inverse[i]] for i in np.sort(first)])

    active = list(range(normals.shape[0]))
    i = 0
    while i < len(active) and len(active) > 1:
        others = [a for a in active if a != active[i]]
        try:
            val, _ = lp_max(normals[active[i]], normals[others], offsets[others])
        except UnboundedSetError:
            i += 1
            continue
        if val <= offsets[active[i]] + tol * scale:
            active.pop(i)
        else:
            i += 1
    return HPolytope(normals[active], offsets[active])


def vertex_enum(h: HPolytope, tol: float = DEFAULT_TOL) -> VPolytope:
    """Enumerate the vertices of a bounded H-polytope.

    Redundant rows are stripped first, coordinates are whitened to the
    bounding box so thin sets stay well conditioned, and the dual hull
    (Qhull halfspace intersection) does the enumeration. Degenerate inputs
    that collapse to a single point are returned as that point.
    """
    if h.dim == 1:
        return _vertex_enum_1d(h)
    lo, hi = bounding_box(h)  # raises on unbounded input
    widths = hi - lo
    scale = max(1.0, float(np.abs(np.concatenate([lo, hi])).max()))
    if np.all(widths <= tol * scale):
        return VPolytope((0.5 * (lo + hi))[None, :])
    hr = remove_redundant(h, tol, box=(lo, hi))
    center = 0.5 * (lo + hi)
    w = np.maximum(0.5 * widths, tol * scale)
    normals = hr.normals * w[None, :]
    offsets = hr.offsets - hr.normals @ center
    nn = np.linalg.norm(normals, axis=1)
    normals, offsets = normals / nn[:, None], offsets / nn
    c0, radius = chebyshev_center(HPolytope(normals, offsets))
    if radius <= 1e-10:
        raise DegenerateSetError("polytope is not full-dimensional")
    try:
        inter = HalfspaceIntersection(np.hstack([normals, -offsets[:, None]]), c0)
    except QhullError as exc:
        raise DegenerateSetError(f"halfspace intersection failed: {exc}") from exc
    pts = _dedupe(inter.intersections, 1e-9 * max(1.0, float(np.abs(inter.intersections).max())))
    hull = convex_hull(pts, tol=1e-9)
    return VPolytope(hull.vertices * w[None, :] + center)


def _vertex_enum_1d(h: HPolytope) -> VPolytope:
    g = h.normals[:, 0]
    b = h.offsets
    hi = np.min(b[g > 0] / g[g > 0]) if np.any(g > 0) else np.inf
    lo = np.max(b[g < 0] / g[g < 0]) if np.any(g < 0) else -np.inf
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise UnboundedSetError("interval is unbounded")
    if lo > hi + DEFAULT_TOL:
        raise EmptySetError("interval is empty")
    if abs(hi - lo) <= DEFAULT_TOL * max(1.0, abs(lo), abs(hi)):
        return VPolytope(np.array([[0.5 * (lo + hi)]]))
    return VPolytope(np.array([[lo], [hi]]))


def facet_enum(v: VPolytope, tol: float = DEFAULT_TOL) -> HPolytope:
    """H-representation of a bounded, full-dimensional V-polytope."""
    pts = v.vertices
    if v.dim == 1:
        lo, hi = float(pts.min()), float(pts.max())
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            raise DegenerateSetError("degenerate interval has no facet form")
        return HPolytope(np.array([[1.0], [-1.0]]), np.array([hi, -lo]))
    if pts.shape[0] <= v.dim:
        raise DegenerateSetError("too few vertices for a full-dimensional set")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateSetError(f"input is not full-dimensional: {exc}") from exc
    # Qhull equations are A x + b <= 0
    eqs = _dedupe(hull.equations, 1e-12)
    return HPolytope(eqs[:, :-1], -eqs[:, -1])


def minkowski_sum(a: VPolytope, b: VPolytope, tol: float = DEFAULT_TOL) -> VPolytope:
    """Hull of all pairwise vertex sums."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    sums = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, a.dim)
    return convex_hull(sums, tol)


def linear_image(A, s: VPolytope, tol: float = DEFAULT_TOL) -> VPolytope:
    """Image {A z : z in s}, pruned to extreme points."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[1] != s.dim:
        raise ValueError(f"matrix expects dimension {A.shape[1]}, set has {s.dim}")
    return convex_hull(s.vertices @ A.T, tol)


def contains_inflated(s: VPolytope, t: VPolytope, eps: float, omega: VPolytope,
                      tol: float = DEFAULT_TOL) -> bool:
    """Check ``s ⊆ t ⊕ eps * omega`` by one decomposition LP per vertex of s."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    kt, ko = t.nverts, omega.nverts
    n = s.dim
    # variables: lambda (over t), mu (over omega)
    A_eq = np.zeros((n + 2, kt + ko))
    A_eq[:n, :kt] = t.vertices.T
    A_eq[:n, kt:] = eps * omega.vertices.T
    A_eq[n, :kt] = 1.0
    A_eq[n + 1, kt:] = 1.0
    bounds = [(0, None)] * (kt + ko)
    for vtx in s.vertices:
        b_eq = np.concatenate([vtx, [1.0, 1.0]])
        res = linprog(np.zeros(kt + ko), A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                      method="highs")
        if res.status == 2:
            # allow a tolerance band before declaring failure
            if not _near_member(vtx, A_eq, b_eq, tol):
                return False
        elif res.status != 0:
            raise GeometryLPError(res)
    return True


def _near_member(vtx, A_eq, b_eq, tol) -> bool:
    k = A_eq.shape[1]
    n = vtx.size
    slack = np.vstack([np.hstack([np.eye(n), -np.eye(n)]),
                       np.zeros((2, 2 * n))])
    A = np.hstack([A_eq, slack])
    c = np.concatenate([np.zeros(k), np.ones(2 * n)])
    res = linprog(c, A_eq=A, b_eq=b_eq, bounds=[(0, None)] * (k + 2 * n),
                  method="highs")
    scale = max(1.0, float(np.abs(vtx).max()))
    return res.status == 0 and res.fun <= tol * scale


def induced_gauge_norm(A, body: GaugePolytope, tol: float = DEFAULT_TOL) -> float:
    """Operator norm sup_{z != 0} gauge(A z) / gauge(z) for a polytopic gauge.

    Evaluates the facet/vertex ratio max: the gauge is piecewise linear over
    the body, so the supremum is attained at a vertex of the body.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    verts = body.vertex_set.vertices
    images = verts @ A.T
    base = body.base
    ratios = (images @ base.normals.T) / base.offsets[None, :]
    return max(0.0, float(ratios.max()))


def circumscribe(P, M: int, tol: float = DEFAULT_TOL):
    """Tangent-halfspace polytope around the ellipsoid {z : z^T P^{-1} z <= 1}.

    M sphere directions (equally spaced in 2D, symmetrized golden spiral in
    3D) are whitened through P^{-1/2} so the contact points spread uniformly
    over the ellipsoid; the facets are the tangent halfspaces
    d^T z <= sqrt(d^T P d). Returns (omega, kappa) with
    kappa = max vertex P^{-1}-norm, so that B ⊆ omega ⊆ kappa * B; kappa
    depends only on (M, n), not on P.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    P = 0.5 * (P + P.T)
    eigs, basis = np.linalg.eigh(P)
    if eigs.min() <= tol * max(1.0, eigs.max()):
        raise DegenerateSetError("shape matrix must be SPD")
    n = P.shape[0]
    inv_sqrt = basis @ np.diag(eigs ** -0.5) @ basis.T
    dirs = sphere_directions(n, M) @ inv_sqrt.T
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    offsets = np.sqrt(np.einsum("ij,jk,ik->i", dirs, P, dirs))
    omega = vertex_enum(HPolytope(dirs, offsets))
    Pinv = basis @ np.diag(1.0 / eigs) @ basis.T
    kappa = float(np.sqrt(np.max(np.einsum("ij,jk,ik->i", omega.vertices, Pinv,
                                           omega.vertices))))
    return omega, kappa


def sphere_directions(n: int, M: int) -> np.ndarray:
    """Deterministic, centrally symmetric covering of the unit sphere."""
    if M < n + 1:
        raise ValueError(f"need at least {n + 1} directions in dimension {n}")
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        ang = 2.0 * np.pi * np.arange(M) / M
        return np.column_stack([np.cos(ang), np.sin(ang)])
    half = (M + 1) // 2
    if n == 3:
        # golden-spiral points on the upper half sphere, mirrored
        k = np.arange(half)
        phi = np.pi * (3.0 - np.sqrt(5.0)) * k
        z = (k + 0.5) / half
        rad = np.sqrt(1.0 - z ** 2)
        pts = np.column_stack([rad * np.cos(phi), rad * np.sin(phi), z])
    else:
        rng = np.random.default_rng(2718281828)
        pts = rng.normal(size=(half, n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return np.vstack([pts, -pts])


_UNIT_BALL_VOL_CACHE: dict[int, float] = {}


def unit_ball_volume(n: int) -> float:
    if n not in _UNIT_BALL_VOL_CACHE:
        _UNIT_BALL_VOL_CACHE[n] = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
    return _UNIT_BALL_VOL_CACHE[n]


def volume(obj, r: float | None = None, rng=None) -> float:
    """Lebesgue volume of a V-polytope or an ellipsoid.

    Ellipsoids are passed either as an `Ellipsoid` or as ``(P, r)`` meaning
    the radius-r ball of the P^{-1} norm; their volume is closed form.
    Polytopes use a fan triangulation from the centroid in dimensions 2-3
    and Monte Carlo above that.
    """
    if isinstance(obj, Ellipsoid):
        return ellipsoid_volume(obj.shape, 1.0 if r is None else r)
    if isinstance(obj, tuple):
        return ellipsoid_volume(obj[0], obj[1])
    if isinstance(obj, np.ndarray) and r is not None:
        return ellipsoid_volume(obj, r)
    v: VPolytope = obj
    pts = v.vertices
    n = v.dim
    if v.nverts <= n:
        warnings.warn("flat set has zero volume")
        return 0.0
    if n == 1:
        return float(pts.max() - pts.min())
    if n <= 3:
        try:
            hull = ConvexHull(pts)
        except QhullError:
            warnings.warn("flat set has zero volume")
            return 0.0
        centroid = pts.mean(axis=0)
        total = 0.0
        for simplex in hull.simplices:
            edges = pts[simplex] - centroid
            total += abs(np.linalg.det(edges)) / math.factorial(n)
        return total
    return _volume_mc(v, rng)


def _volume_mc(v: VPolytope, rng, n_samples: int = 200_000) -> float:
    rng = np.random.default_rng(0) if rng is None else rng
    lo = v.vertices.min(axis=0)
    hi = v.vertices.max(axis=0)
    box_vol = float(np.prod(hi - lo))
    if box_vol == 0.0:
        warnings.warn("flat set has zero volume")
        return 0.0
    h = facet_enum(v)
    pts = rng.uniform(lo, hi, size=(n_samples, v.dim))
    inside = np.all(pts @ h.normals.T <= h.offsets[None, :] + DEFAULT_TOL, axis=1)
    return box_vol * float(inside.mean())


def ellipsoid_volume(P, r: float) -> float:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = P.shape[0]
    det = float(np.linalg.det(P))
    if det <= 0:
        warnings.warn("flat ellipsoid has zero volume")
        return 0.0
    return unit_ball_volume(n) * (r ** n) * math.sqrt(det)
