"""Linear programming over the hypercube: A xi = b, ||xi||_inf <= 1.

All set queries in this package (membership, emptiness, interval hulls,
extreme-point sampling) reduce to feasibility or linear optimization over
the parameter cube of a constrained zonotope, so the solver works with
variables natively bounded in [-1, 1]. It is a dense bounded-variable
simplex with a phase-1 artificial start, Dantzig pricing with a Bland
fallback against cycling, and periodic basis refactorization to contain
round-off drift. No external solver is used.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptySetError, LPConditioningError

# Absolute pivot / feasibility tolerance. Constraint rows are scaled to
# unit inf-norm on entry, which is what makes an absolute tolerance safe.
PIVOT_TOL = 1e-9

_REFRESH_PERIOD = 64
_DEGENERACY_STREAK = 12


def _as_matrix(A, rows: int) -> np.ndarray:
    """Coerce to a 2-D float matrix; an empty input means `rows` x 0."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else np.zeros((rows, 0))
    if A.ndim != 2:
        raise ValueError("equality matrix must be 2-D")
    return A


class BoundedSimplex:
    """Simplex state for one equality system over the unit cube.

    The object is reusable: after ``ensure_feasible`` succeeds, any number
    of ``optimize`` calls may follow, each warm-starting from the previous
    basis. Instances hold no global state and are safe to use from
    separate threads as long as each instance stays on one thread.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, tol: float = PIVOT_TOL):
        b = np.asarray(b, dtype=float).ravel()
        A = _as_matrix(A, b.shape[0])
        if A.shape[0] != b.shape[0]:
            raise ValueError(
                f"A has {A.shape[0]} rows but b has {b.shape[0]} entries"
            )
        self.tol = float(tol)
        self.num_vars = A.shape[1]

        # Scale every row to unit inf-norm; drop rows that are entirely
        # zero (recording an immediate infeasibility if b disagrees).
        keep = []
        self._trivially_infeasible = False
        scale = np.maximum(np.abs(A).max(axis=1, initial=0.0), np.abs(b))
        for i in range(A.shape[0]):
            if scale[i] <= self.tol:
                continue
            if np.abs(A[i]).max(initial=0.0) <= self.tol * scale[i]:
                if abs(b[i]) > self.tol * scale[i]:
                    self._trivially_infeasible = True
                continue
            keep.append(i)
        A = A[keep] / scale[keep, None] if keep else A[:0]
        b = b[keep] / scale[keep] if keep else b[:0]

        m, g = A.shape
        self.m = m
        # Structural columns then one artificial per row.
        res = b.copy()
        res += A.sum(axis=1)  # structurals start at their lower bound -1
        signs = np.where(res >= 0.0, 1.0, -1.0)
        self.cols = np.hstack([A, np.diag(signs)]) if m else A
        self.rhs = b
        self.lower = np.concatenate([np.full(g, -1.0), np.zeros(m)])
        self.upper = np.concatenate([np.full(g, 1.0), np.full(m, np.inf)])
        self.at_upper = np.zeros(g + m, dtype=bool)
        self.allowed = np.ones(g + m, dtype=bool)
        self.basis = np.arange(g, g + m)
        self.is_basic = np.zeros(g + m, dtype=bool)
        self.is_basic[self.basis] = True
        self.binv = np.diag(signs)
        self.x_basic = np.abs(res)
        self._pivots_since_refresh = 0
        self._feasible: bool | None = None

    # -- internals ---------------------------------------------------------

    def _nonbasic_values(self) -> np.ndarray:
        vals = np.where(self.at_upper, self.upper, self.lower)
        # Artificials pinned to [0, 0] after phase 1 sit at 0, and inf
        # upper bounds never apply to nonbasic artificials.
        return vals

    def _refactor(self) -> None:
        if self.m == 0:
            return
        B = self.cols[:, self.basis]
        try:
            self.binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as err:
            raise LPConditioningError(
                "singular simplex basis", condition=float("inf")
            ) from err
        drift = np.abs(self.binv @ B - np.eye(self.m)).max()
        if drift > 1e-6:
            raise LPConditioningError(
                "ill-conditioned simplex basis",
                condition=float(np.linalg.cond(B)),
            )
        vals = self._nonbasic_values()
        nb = ~self.is_basic
        rhs = self.rhs - self.cols[:, nb] @ vals[nb]
        self.x_basic = self.binv @ rhs
        self._pivots_since_refresh = 0

    def _minimize(self, cost: np.ndarray) -> None:
        """Run primal simplex until optimal for the given cost vector."""
        if self.m == 0:
            return
        tol = self.tol
        max_iter = 200 + 50 * (self.m + self.num_vars)
        degen = 0
        bland = False
        for _ in range(max_iter):
            y = cost[self.basis] @ self.binv
            reduced = cost - y @ self.cols
            nb = ~self.is_basic & self.allowed
            improve = np.where(
                self.at_upper, reduced, -reduced
            )  # positive => improving move available
            improve = np.where(nb, improve, -np.inf)
            if bland:
                eligible = np.flatnonzero(improve > tol)
                if eligible.size == 0:
                    return
                enter = int(eligible[0])
            else:
                enter = int(np.argmax(improve))
                if improve[enter] <= tol:
                    return
            sigma = -1.0 if self.at_upper[enter] else 1.0
            w = self.binv @ self.cols[:, enter]
            z = sigma * w
            lb_b = self.lower[self.basis]
            ub_b = self.upper[self.basis]
            ratios = np.full(self.m, np.inf)
            dec = z > tol
            ratios[dec] = (self.x_basic[dec] - lb_b[dec]) / z[dec]
            inc = z < -tol
            ratios[inc] = (ub_b[inc] - self.x_basic[inc]) / (-z[inc])
            np.maximum(ratios, 0.0, out=ratios)
            t_flip = self.upper[enter] - self.lower[enter]
            t_block = ratios.min() if self.m else np.inf
            t = min(t_flip, t_block)
            if not np.isfinite(t):
                raise LPConditioningError("unbounded simplex direction")
            if t_flip <= t_block:
                # Bound flip: the entering variable crosses the cube.
                self.x_basic -= z * t_flip
                self.at_upper[enter] = ~self.at_upper[enter]
            else:
                near = np.flatnonzero(ratios <= t + tol)
                if bland:
                    leave_row = int(near[np.argmin(self.basis[near])])
                else:
                    leave_row = int(near[np.argmax(np.abs(w[near]))])
                leaving = self.basis[leave_row]
                self.x_basic -= z * t
                new_val = (self.upper[enter] if self.at_upper[enter]
                           else self.lower[enter]) + sigma * t
                self.x_basic[leave_row] = new_val
                # Leaving variable lands on whichever bound it hit.
                self.at_upper[leaving] = z[leave_row] < 0
                self.basis[leave_row] = enter
                self.is_basic[leaving] = False
                self.is_basic[enter] = True
                piv = w[leave_row]
                if abs(piv) <= tol:
                    raise LPConditioningError("vanishing simplex pivot")
                row = self.binv[leave_row] / piv
                self.binv -= np.outer(w, row)
                self.binv[leave_row] = row
                self._pivots_since_refresh += 1
                if leaving >= self.num_vars:
                    # Artificials never come back.
                    self.allowed[leaving] = False
            if t <= tol:
                degen += 1
                if degen >= _DEGENERACY_STREAK:
                    bland = True
            else:
                degen = 0
                bland = False
            if self._pivots_since_refresh >= _REFRESH_PERIOD:
                self._refactor()
        raise LPConditioningError("simplex iteration limit exceeded")

    # -- public API --------------------------------------------------------

    def ensure_feasible(self) -> bool:
        """Phase 1: decide feasibility, leaving a feasible basis behind."""
        if self._feasible is not None:
            return self._feasible
        if self._trivially_infeasible:
            self._feasible = False
            return False
        if self.m == 0:
            self._feasible = True
            return True
        cost = np.zeros(self.num_vars + self.m)
        cost[self.num_vars:] = 1.0
        self._minimize(cost)
        self._refactor()
        art_basic = self.basis >= self.num_vars
        infeas = float(self.x_basic[art_basic].sum()) if art_basic.any() else 0.0
        self._feasible = infeas <= self.tol * max(1.0, self.m)
        if self._feasible:
            # Pin artificials at zero so later phases honor A xi = b.
            self.upper[self.num_vars:] = 0.0
            self.allowed[self.num_vars:] = False
            self.x_basic[art_basic] = np.maximum(
                0.0, np.minimum(self.x_basic[art_basic], 0.0)
            )
        return self._feasible

    def solution(self) -> np.ndarray:
        """Current structural point (only meaningful when feasible)."""
        if self.m == 0:
            return np.zeros(self.num_vars)
        if self._pivots_since_refresh:
            self._refactor()
        x = self._nonbasic_values().copy()
        x[self.basis] = self.x_basic
        xi = x[: self.num_vars]
        return np.clip(xi, -1.0, 1.0)

    def optimize(self, c: np.ndarray, maximize: bool = False):
        """Optimize ``c . xi`` over the feasible cube slice.

        Returns ``(value, xi)``. Raises :class:`EmptySetError` when the
        system is infeasible.
        """
        if not self.ensure_feasible():
            raise EmptySetError("infeasible equality system over the cube")
        c = np.asarray(c, dtype=float).ravel()
        if c.shape[0] != self.num_vars:
            raise ValueError("objective length mismatch")
        if self.m == 0:
            xi = np.where(c > 0, 1.0, -1.0) if maximize else np.where(
                c > 0, -1.0, 1.0
            )
            xi = np.where(c == 0, 0.0, xi)
            return float(c @ xi), xi
        cost = np.zeros(self.num_vars + self.m)
        cost[: self.num_vars] = -c if maximize else c
        self._minimize(cost)
        xi = self.solution()
        return float(c @ xi), xi


def lp_feasible(A: np.ndarray, b: np.ndarray, tol: float = PIVOT_TOL):
    """Witness for { xi : ||xi||_inf <= 1, A xi = b }, or None if empty.

    With no constraints the canonical witness is the origin.
    """
    b = np.asarray(b, dtype=float).ravel()
    A = _as_matrix(A, b.shape[0])
    if A.shape[0] == 0:
        return np.zeros(A.shape[1])
    solver = BoundedSimplex(A, b, tol=tol)
    if not solver.ensure_feasible():
        return None
    return solver.solution()


def lp_optimize(A: np.ndarray, b: np.ndarray, c: np.ndarray,
                maximize: bool = False, tol: float = PIVOT_TOL):
    """One-shot optimization helper; see :meth:`BoundedSimplex.optimize`."""
    solver = BoundedSimplex(A, b, tol=tol)
    return solver.optimize(c, maximize=maximize)
