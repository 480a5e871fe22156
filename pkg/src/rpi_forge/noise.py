"""Bounded-noise set models: polytopic or ellipsoidal, with samplers.

A noise set is compact, convex, and contains the origin. The same type
describes process noise (entering the state update) and measurement noise
(entering the state readout); `role` records which.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import geom
from .errors import DegenerateSetError
from .geom import Ellipsoid, GaugePolytope, HPolytope, VPolytope

PROCESS = "process"
MEASUREMENT = "measurement"


@dataclass(frozen=True)
class NoiseSet:
    body: HPolytope | Ellipsoid
    role: str = PROCESS

    def __post_init__(self):
        if self.role not in (PROCESS, MEASUREMENT):
            raise ValueError(f"unknown role {self.role!r}")
        if isinstance(self.body, HPolytope) and np.any(self.body.offsets < 0.0):
            raise ValueError("polytopic noise set must contain the origin")

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def is_polytopic(self) -> bool:
        return isinstance(self.body, HPolytope)

    @property
    def is_degenerate(self) -> bool:
        """True when the set is the origin only (zero noise bound)."""
        return self.is_polytopic and bool(np.any(self.body.offsets <= 0.0))

    def contains(self, z, tol: float = geom.DEFAULT_TOL) -> bool:
        if self.is_degenerate:
            return bool(np.allclose(np.asarray(z, dtype=float), 0.0, atol=tol))
        return self.body.contains(z, tol)


def box(bound, dim: int, role: str = PROCESS) -> NoiseSet:
    """Infinity-norm ball |z_i| <= bound."""
    if np.any(np.atleast_1d(bound) < 0.0):
        raise ValueError("noise bound must be nonnegative")
    return NoiseSet(HPolytope.box(bound, dim), role)


def isotropic(bound: float, dim: int, role: str = PROCESS) -> NoiseSet:
    """Euclidean ball of radius bound (as an ellipsoid with Q = bound^2 I)."""
    if bound <= 0.0:
        raise ValueError("ellipsoidal noise bound must be positive")
    return NoiseSet(Ellipsoid(bound ** 2 * np.eye(dim)), role)


def inflate(s: NoiseSet, factor: float) -> NoiseSet:
    """Scale the set by a nonnegative factor: offsets scale linearly for
    polytopes, the shape matrix quadratically for ellipsoids."""
    if factor < 0.0:
        raise ValueError("inflation factor must be nonnegative")
    if s.is_polytopic:
        return replace(s, body=HPolytope(s.body.normals, factor * s.body.offsets))
    return replace(s, body=Ellipsoid(factor ** 2 * s.body.shape))


def gauge_body(s: NoiseSet) -> GaugePolytope | Ellipsoid:
    """Body used for gauge/operator-norm evaluations.

    For a degenerate (zero-bound) polytopic set the induced norm is taken
    w.r.t. the unit-offset body, the scale-invariant limit of the shrinking
    family; nondegenerate sets are used as-is.
    """
    if not s.is_polytopic:
        return s.body
    if s.is_degenerate:
        norms = np.linalg.norm(s.body.normals, axis=1)
        return GaugePolytope(HPolytope(s.body.normals / norms[:, None],
                                       np.ones(s.body.nrows)))
    return GaugePolytope(s.body)


def sample(s: NoiseSet, rng: np.random.Generator, worst_case: bool = False) -> np.ndarray:
    """Draw one point of the set: uniform by default, a random vertex /
    boundary point with `worst_case`."""
    if s.is_degenerate:
        return np.zeros(s.dim)
    if s.is_polytopic:
        verts = geom.vertex_enum(s.body)
        if worst_case:
            return verts.vertices[rng.integers(verts.nverts)].copy()
        lo = verts.vertices.min(axis=0)
        hi = verts.vertices.max(axis=0)
        for _ in range(10_000):
            z = rng.uniform(lo, hi)
            if s.body.contains(z):
                return z
        raise RuntimeError("rejection sampler failed; set is too thin")
    L = np.linalg.cholesky(s.body.shape)
    d = rng.normal(size=s.dim)
    d /= np.linalg.norm(d)
    r = 1.0 if worst_case else rng.uniform() ** (1.0 / s.dim)
    return L @ (r * d)


def support_radius(s: NoiseSet, P) -> float:
    """sup over the set of the P^{-1}-norm ||d||_{P^{-1}}.

    Closed form lambda_max(Q^{1/2} P^{-1} Q^{1/2})^{1/2} for ellipsoids,
    vertex maximization for polytopes.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    eigs = np.linalg.eigvalsh(0.5 * (P + P.T))
    if eigs.min() <= geom.DEFAULT_TOL * max(1.0, eigs.max()):
        raise DegenerateSetError("P must be SPD")
    Pinv = np.linalg.inv(P)
    if s.is_polytopic:
        if s.is_degenerate:
            return 0.0
        verts = geom.vertex_enum(s.body).vertices
        return float(np.sqrt(np.max(np.einsum("ij,jk,ik->i", verts, Pinv, verts))))
    Q = s.body.shape
    w, V = np.linalg.eigh(Q)
    Qh = V @ np.diag(np.sqrt(w)) @ V.T
    return float(np.sqrt(np.max(np.linalg.eigvalsh(Qh @ Pinv @ Qh))))


def vertex_set(s: NoiseSet) -> VPolytope:
    """Vertex form of a polytopic noise set (needed for Minkowski sums)."""
    if not s.is_polytopic:
        raise TypeError("ellipsoidal noise sets have no vertex form")
    if s.is_degenerate:
        return VPolytope(np.zeros((1, s.dim)))
    return geom.vertex_enum(s.body)


def to_config(s: NoiseSet) -> dict:
    if s.is_polytopic:
        return {"type": "polytope", "role": s.role,
                "normals": s.body.normals.tolist(),
                "offsets": s.body.offsets.tolist()}
    return {"type": "ellipsoid", "role": s.role, "shape": s.body.shape.tolist()}


def from_config(cfg: dict, dim: int | None = None, role: str = PROCESS) -> NoiseSet:
    """Build a noise set from its config form.

    Accepted shapes: {"type": "box", "bound": v} (needs dim),
    {"type": "polytope", "normals": ..., "offsets": ...}, and
    {"type": "ellipsoid", "shape": ...} or {"type": "ellipsoid", "bound": v}.
    """
    kind = cfg.get("type")
    role = cfg.get("role", role)
    if kind == "box":
        if dim is None:
            raise ValueError("box noise config needs the ambient dimension")
        return box(float(cfg["bound"]), dim, role)
    if kind == "polytope":
        return NoiseSet(HPolytope(np.asarray(cfg["normals"], dtype=float),
                                  np.asarray(cfg["offsets"], dtype=float)), role)
    if kind == "ellipsoid":
        if "shape" in cfg:
            return NoiseSet(Ellipsoid(np.asarray(cfg["shape"], dtype=float)), role)
        if dim is None:
            raise ValueError("ellipsoid noise config needs the ambient dimension")
        return isotropic(float(cfg["bound"]), dim, role)
    raise ValueError(f"unknown noise set type {kind!r}")
