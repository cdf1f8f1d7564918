"""Constrained zonotopes and the exact set arithmetic on them.

A constrained zonotope is the affine image of a slice of the unit cube:

    Z = { center + generators @ xi : ||xi||_inf <= 1, conA @ xi = conB }

The class is closed under linear maps, Minkowski sums and intersections
(also with measurement strips), which is exactly the arithmetic the
filtering recursion needs. Membership, emptiness and interval hulls are
linear programs over the cube, delegated to :mod:`dsmf.setops.lp`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, EmptySetError
from .boxes import Box
from .lp import PIVOT_TOL, BoundedSimplex, lp_feasible


class ConstrainedZonotope:
    """Immutable value type; all operations return new instances."""

    __slots__ = ("center", "generators", "con_a", "con_b")

    def __init__(self, center, generators, con_a=None, con_b=None):
        c = np.atleast_1d(np.asarray(center, dtype=float)).copy()
        if c.ndim != 1:
            raise ValueError("center must be a vector")
        n = c.shape[0]
        G = np.asarray(generators, dtype=float).copy()
        if G.size == 0:
            G = G.reshape(n, 0)
        if G.ndim != 2 or G.shape[0] != n:
            raise ValueError(f"generators must be {n} x g")
        g = G.shape[1]
        if con_a is None:
            A = np.zeros((0, g))
            b = np.zeros(0)
        else:
            A = np.asarray(con_a, dtype=float).copy()
            if A.size == 0:
                A = A.reshape(0, g)
            b = np.atleast_1d(np.asarray(con_b, dtype=float)).copy()
        if A.ndim != 2 or A.shape[1] != g:
            raise ValueError(f"conA must have {g} columns")
        if b.shape != (A.shape[0],):
            raise ValueError("conB length must match conA row count")
        for arr in (c, G, A, b):
            arr.flags.writeable = False
        self.center = c
        self.generators = G
        self.con_a = A
        self.con_b = b

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def num_generators(self) -> int:
        return self.generators.shape[1]

    @property
    def num_constraints(self) -> int:
        return self.con_a.shape[0]

    def __repr__(self):
        return (f"ConstrainedZonotope(dim={self.dim}, "
                f"gens={self.num_generators}, cons={self.num_constraints})")

    @staticmethod
    def from_box(box: Box) -> "ConstrainedZonotope":
        """Box as a CZ; zero-width dimensions contribute no generator."""
        r = box.radius
        keep = np.flatnonzero(r > 0.0)
        G = np.zeros((box.dim, keep.size))
        G[keep, np.arange(keep.size)] = r[keep]
        return ConstrainedZonotope(box.center, G)

    @staticmethod
    def from_point(x) -> "ConstrainedZonotope":
        x = np.asarray(x, dtype=float).ravel()
        return ConstrainedZonotope(x, np.zeros((x.shape[0], 0)))


@dataclass(frozen=True, eq=False)
class Strip:
    """Measurement-consistent set { x : y - C x in V }.

    Possibly unbounded (the kernel of C is free), so it is kept symbolic
    and only ever intersected into a bounded constrained zonotope.
    """

    C: np.ndarray
    y: np.ndarray
    V: Box

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=float)).copy()
        y = np.atleast_1d(np.asarray(self.y, dtype=float)).copy()
        if C.ndim != 2:
            raise ValueError("C must be a matrix")
        if y.shape[0] != C.shape[0] or self.V.dim != C.shape[0]:
            raise DimensionMismatchError(
                "strip rows, measurement and noise box must agree"
            )
        C.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "y", y)


def _check_same_dim(z1: ConstrainedZonotope, z2: ConstrainedZonotope):
    if z1.dim != z2.dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {z1.dim} vs {z2.dim}"
        )


def cz_linear_map(M, Z: ConstrainedZonotope) -> ConstrainedZonotope:
    """Exact image { M z : z in Z }; constraints are untouched."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] != Z.dim:
        raise DimensionMismatchError(
            f"matrix has {M.shape[1]} columns, set has dimension {Z.dim}"
        )
    return ConstrainedZonotope(M @ Z.center, M @ Z.generators,
                               Z.con_a, Z.con_b)


def cz_minkowski_sum(z1: ConstrainedZonotope,
                     z2: ConstrainedZonotope) -> ConstrainedZonotope:
    """Exact Minkowski sum: generators concatenate, constraints stay
    block-diagonal (the two parameter vectors are independent)."""
    _check_same_dim(z1, z2)
    g1, g2 = z1.num_generators, z2.num_generators
    m1, m2 = z1.num_constraints, z2.num_constraints
    G = np.hstack([z1.generators, z2.generators])
    A = np.zeros((m1 + m2, g1 + g2))
    A[:m1, :g1] = z1.con_a
    A[m1:, g1:] = z2.con_a
    b = np.concatenate([z1.con_b, z2.con_b])
    return ConstrainedZonotope(z1.center + z2.center, G, A, b)


def cz_intersect(z1: ConstrainedZonotope,
                 z2: ConstrainedZonotope) -> ConstrainedZonotope:
    """Exact intersection.

    The parameterizations of both operands are kept side by side and an
    equality ties their realizations together; emptiness of the result is
    a queryable state, not an error.
    """
    _check_same_dim(z1, z2)
    n = z1.dim
    g1, g2 = z1.num_generators, z2.num_generators
    m1, m2 = z1.num_constraints, z2.num_constraints
    G = np.hstack([z1.generators, np.zeros((n, g2))])
    A = np.zeros((m1 + m2 + n, g1 + g2))
    A[:m1, :g1] = z1.con_a
    A[m1:m1 + m2, g1:] = z2.con_a
    A[m1 + m2:, :g1] = z1.generators
    A[m1 + m2:, g1:] = -z2.generators
    b = np.concatenate([z1.con_b, z2.con_b, z2.center - z1.center])
    return ConstrainedZonotope(z1.center, G, A, b)


def cz_intersect_strip(Z: ConstrainedZonotope,
                       strip: Strip) -> ConstrainedZonotope:
    """Exact { z in Z : y - C z in V }.

    The strip's noise box enters as extra generators tied to Z's
    parameters by the measurement equality, so the unbounded kernel of C
    never needs a bounded representation. A zero-row strip (no
    measurement) returns Z unchanged.
    """
    q = strip.C.shape[0]
    if strip.C.shape[1] != Z.dim:
        raise DimensionMismatchError(
            f"strip expects dimension {strip.C.shape[1]}, set has {Z.dim}"
        )
    if q == 0:
        return Z
    vc = strip.V.center
    vr = strip.V.radius
    active = np.flatnonzero(vr > 0.0)
    Dv = np.zeros((q, active.size))
    Dv[active, np.arange(active.size)] = vr[active]
    n, g = Z.dim, Z.num_generators
    m = Z.num_constraints
    G = np.hstack([Z.generators, np.zeros((n, active.size))])
    A = np.zeros((m + q, g + active.size))
    A[:m, :g] = Z.con_a
    A[m:, :g] = strip.C @ Z.generators
    A[m:, g:] = Dv
    b = np.concatenate([Z.con_b, strip.y - strip.C @ Z.center - vc])
    return ConstrainedZonotope(Z.center, G, A, b)


def cz_is_empty(Z: ConstrainedZonotope, tol: float = PIVOT_TOL) -> bool:
    if Z.num_constraints == 0:
        return False
    return lp_feasible(Z.con_a, Z.con_b, tol=tol) is None


def cz_contains_point(Z: ConstrainedZonotope, x,
                      tol: float = PIVOT_TOL) -> bool:
    """Exact membership: is there a feasible parameter mapping to x?"""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != Z.dim:
        raise DimensionMismatchError(
            f"point has dimension {x.shape[0]}, set has {Z.dim}"
        )
    A = np.vstack([Z.con_a, Z.generators])
    b = np.concatenate([Z.con_b, x - Z.center])
    return lp_feasible(A, b, tol=tol) is not None


def _feasible_solver(Z: ConstrainedZonotope) -> BoundedSimplex:
    solver = BoundedSimplex(Z.con_a, Z.con_b)
    if not solver.ensure_feasible():
        raise EmptySetError("operation requires a non-empty set")
    return solver


def cz_interval_hull(Z: ConstrainedZonotope, witnesses: bool = False):
    """Tight axis-aligned hull via 2n cube LPs sharing one warm basis.

    With ``witnesses=True`` also returns the 2n boundary points attaining
    the per-coordinate extremes (minimizer then maximizer, per dimension).
    """
    solver = _feasible_solver(Z)
    n = Z.dim
    lo = np.empty(n)
    hi = np.empty(n)
    points = np.empty((2 * n, n)) if witnesses else None
    for d in range(n):
        row = Z.generators[d]
        val, xi = solver.optimize(row, maximize=False)
        lo[d] = Z.center[d] + val
        if witnesses:
            points[2 * d] = Z.center + Z.generators @ xi
        val, xi = solver.optimize(row, maximize=True)
        hi[d] = Z.center[d] + val
        if witnesses:
            points[2 * d + 1] = Z.center + Z.generators @ xi
    box = Box(np.minimum(lo, hi), np.maximum(lo, hi))
    return (box, points) if witnesses else box


# Deterministic extra support directions used by the diameter
# under-approximation (beyond the 2n hull witnesses).
_DIAMETER_EXTRA_DIRECTIONS = 8


def cz_diameter_bounds(Z: ConstrainedZonotope) -> tuple[float, float]:
    """Sandwich the diameter of Z.

    Upper bound: Euclidean norm of the tight hull widths. Lower bound:
    largest pairwise distance among a fixed budget of LP extreme points
    (the hull witnesses plus a few deterministic diagonal directions).
    """
    box, points = cz_interval_hull(Z, witnesses=True)
    upper = float(np.linalg.norm(box.width))
    n = Z.dim
    solver = _feasible_solver(Z)
    extras = []
    rng = np.random.default_rng(0)  # fixed budget, fixed directions
    for _ in range(_DIAMETER_EXTRA_DIRECTIONS):
        direction = rng.standard_normal(n)
        obj = Z.generators.T @ direction
        for maximize in (False, True):
            _, xi = solver.optimize(obj, maximize=maximize)
            extras.append(Z.center + Z.generators @ xi)
    pts = np.vstack([points] + [np.asarray(extras)]) if extras else points
    diff = pts[:, None, :] - pts[None, :, :]
    lower = float(np.sqrt((diff ** 2).sum(axis=2)).max())
    return lower, upper


def cz_sample_point(Z: ConstrainedZonotope, rng: np.random.Generator,
                    interpolate: bool = False) -> np.ndarray:
    """One member of Z, driven by the caller's generator.

    Default mode returns an extreme point (random support direction);
    ``interpolate=True`` blends two extreme points at a random weight for
    interior coverage. Deterministic for a fixed generator state.
    """
    return cz_sample_points(Z, 1, rng, interpolate=interpolate)[0]


def cz_sample_points(Z: ConstrainedZonotope, count: int,
                     rng: np.random.Generator,
                     interpolate: bool = False) -> np.ndarray:
    if count < 0:
        raise ValueError("count must be non-negative")
    g = Z.num_generators
    if g == 0:
        if Z.num_constraints and np.abs(Z.con_b).max(initial=0.0) > PIVOT_TOL:
            raise EmptySetError("operation requires a non-empty set")
        return np.tile(Z.center, (count, 1))
    solver = _feasible_solver(Z)
    out = np.empty((count, Z.dim))
    for i in range(count):
        _, xi = solver.optimize(rng.standard_normal(g), maximize=True)
        x = Z.center + Z.generators @ xi
        if interpolate:
            _, xi2 = solver.optimize(rng.standard_normal(g), maximize=True)
            lam = rng.uniform()
            x = lam * x + (1.0 - lam) * (Z.center + Z.generators @ xi2)
        out[i] = x
    return out
