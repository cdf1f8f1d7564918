"""Order reduction for constrained zonotopes.

Reduction returns a superset within a (max generators, max constraints)
budget. Constraints go first: each elimination solves one constraint for
one parameter and substitutes it away, which drops one constraint and one
generator; the substitution is exact except that the eliminated
parameter's cube bound is discarded, so candidates whose implied range
already fits in [-1, 1] cost nothing and the scoring prefers them. The
remaining surplus generators are folded, in the lifted space that stacks
state rows over constraint rows, into per-row interval generators.
Everything here only ever enlarges the set.
"""

from __future__ import annotations

import numpy as np

from .czono import ConstrainedZonotope, cz_interval_hull, cz_is_empty
from .lp import PIVOT_TOL

# Pivot floor on unit-scaled constraint rows.
_PIVOT_FLOOR = 1e-6
_SOLVE_RTOL = 1e-8


def _normalize_rows(A: np.ndarray, b: np.ndarray):
    scale = np.maximum(np.abs(A).max(axis=1, initial=0.0), np.abs(b))
    scale = np.maximum(scale, 1e-300)
    return A / scale[:, None], b / scale


def _drop_trivial(G, A, b):
    """Remove all-zero generator columns and vacuous constraint rows."""
    col_mass = np.abs(G).sum(axis=0) + np.abs(A).sum(axis=0)
    keep_cols = col_mass > 0.0
    if not keep_cols.all():
        G = G[:, keep_cols]
        A = A[:, keep_cols]
    row_mass = np.abs(A).max(axis=1, initial=0.0)
    vacuous = (row_mass <= PIVOT_TOL) & (np.abs(b) <= PIVOT_TOL)
    if vacuous.any():
        A = A[~vacuous]
        b = b[~vacuous]
    return G, A, b


def _block_eliminate(c, G, A, b, rows, cols):
    """Gauss-substitute the chosen (constraint, parameter) pairs away.

    Returns the updated (c, G, A, b) or None when the pivot block is too
    ill-conditioned to trust (caller splits the batch).
    """
    m, g = A.shape
    row_mask = np.zeros(m, dtype=bool)
    row_mask[rows] = True
    col_mask = np.zeros(g, dtype=bool)
    col_mask[cols] = True
    A_ej = A[np.ix_(rows, cols)]
    rhs = np.hstack([A[rows][:, ~col_mask], b[rows, None]])
    try:
        X = np.linalg.solve(A_ej, rhs)
    except np.linalg.LinAlgError:
        return None
    resid = np.abs(A_ej @ X - rhs).max(initial=0.0)
    if resid > _SOLVE_RTOL * max(1.0, np.abs(rhs).max(initial=0.0)):
        return None
    sub, y = X[:, :-1], X[:, -1]
    G_j = G[:, cols]
    c_new = c + G_j @ y
    G_new = G[:, ~col_mask] - G_j @ sub
    A_fj = A[~row_mask][:, cols]
    A_new = A[~row_mask][:, ~col_mask] - A_fj @ sub
    b_new = b[~row_mask] - A_fj @ y
    return c_new, G_new, A_new, b_new


def _eliminate_constraints(c, G, A, b, target_m):
    """Drive the constraint count down to ``target_m``."""
    while A.shape[0] > target_m:
        A, b = _normalize_rows(A, b)
        G, A, b = _drop_trivial(G, A, b)
        m, g = A.shape
        if m <= target_m:
            break
        need = m - target_m
        absA = np.abs(A)
        row_sum = absA.sum(axis=1)
        # Implied |xi_j| reach when constraint i is solved for xi_j; the
        # elimination is lossless iff that reach stays within 1.
        with np.errstate(divide="ignore", invalid="ignore"):
            reach = (np.abs(b)[:, None] + row_sum[:, None] - absA) / absA
        reach[absA < _PIVOT_FLOOR] = np.inf
        gen_mass = np.abs(G).sum(axis=0)
        cost = np.maximum(reach - 1.0, 0.0) * np.maximum(gen_mass, 1e-12)
        viable = np.flatnonzero(np.isfinite(reach).ravel())
        tie = (cost + 1e-9 * (1.0 - absA)).ravel()[viable]
        order = viable[np.argsort(tie, kind="stable")]
        rows_used = np.zeros(m, dtype=bool)
        cols_used = np.zeros(g, dtype=bool)
        rows, cols = [], []
        for flat in order:
            i, j = divmod(int(flat), g)
            if rows_used[i] or cols_used[j]:
                continue
            rows_used[i] = True
            cols_used[j] = True
            rows.append(i)
            cols.append(j)
            if len(rows) == need:
                break
        if not rows:
            # No trustworthy pivot anywhere: dropping constraints outright
            # is still sound (it can only enlarge the set).
            slack = np.abs(b) + row_sum
            drop = np.argsort(slack, kind="stable")[:need]
            keep = np.ones(m, dtype=bool)
            keep[drop] = False
            A, b = A[keep], b[keep]
            continue
        stack = [(rows, cols)]
        progressed = False
        while stack:
            r_batch, c_batch = stack.pop()
            out = _block_eliminate(c, G, A, b, r_batch, c_batch)
            if out is not None:
                c, G, A, b = out
                progressed = True
                break  # indices into A changed; rescore in the outer loop
            if len(r_batch) == 1:
                continue
            half = len(r_batch) // 2
            stack.append((r_batch[:half], c_batch[:half]))
            stack.append((r_batch[half:], c_batch[half:]))
        if not progressed:
            slack = np.abs(b) + row_sum
            drop = np.argsort(slack, kind="stable")[:need]
            keep = np.ones(A.shape[0], dtype=bool)
            keep[drop] = False
            A, b = A[keep], b[keep]
    return c, G, A, b


def _fold_generators(G, A, target_g):
    """Girard-style fold of the least important lifted columns.

    Folded columns are replaced by per-row interval generators covering
    their combined reach, jointly over state and constraint rows, so the
    constraint system is relaxed consistently with the state enlargement.
    """
    n = G.shape[0]
    lifted = np.vstack([G, A]) if A.shape[0] else G
    g = lifted.shape[1]
    if g <= target_g:
        return G, A
    scores = np.abs(lifted).sum(axis=0)
    order = np.argsort(scores, kind="stable")
    cum = np.cumsum(np.abs(lifted[:, order]), axis=1)
    remove = g - target_g  # minimum number of columns to fold
    while remove <= g:
        box_rows = int(np.count_nonzero(cum[:, remove - 1] > 0.0))
        if g - remove + box_rows <= target_g:
            break
        remove += 1
    remove = min(remove, g)
    folded = order[:remove]
    kept = np.ones(g, dtype=bool)
    kept[folded] = False
    mass = np.abs(lifted[:, folded]).sum(axis=1)
    rows = np.flatnonzero(mass > 0.0)
    D = np.zeros((lifted.shape[0], rows.size))
    D[rows, np.arange(rows.size)] = mass[rows]
    new_lifted = np.hstack([lifted[:, kept], D])
    return new_lifted[:n], new_lifted[n:]


def cz_reduce(Z: ConstrainedZonotope, max_gen: int,
              max_con: int) -> ConstrainedZonotope:
    """Superset of Z with at most ``max_gen`` generators and ``max_con``
    constraints. Containment is guaranteed; tightness is best-effort."""
    if max_gen < Z.dim:
        raise ValueError("max_gen must be at least the ambient dimension")
    if max_con < 0:
        raise ValueError("max_con must be non-negative")
    if Z.num_generators <= max_gen and Z.num_constraints <= max_con:
        return Z
    if max_con == 0 and max_gen == Z.dim:
        # Maximal reduction: the tight interval hull.
        if cz_is_empty(Z):
            return ConstrainedZonotope.from_point(Z.center)
        return ConstrainedZonotope.from_box(cz_interval_hull(Z))
    c = Z.center.copy()
    G = Z.generators.copy()
    A = Z.con_a.copy()
    b = Z.con_b.copy()
    G, A, b = _drop_trivial(G, A, b)
    if A.shape[0] > max_con:
        c, G, A, b = _eliminate_constraints(c, G, A, b, max_con)
    if G.shape[1] > max_gen:
        # The fold needs headroom for one interval generator per active
        # row; eliminate further constraints when the budget is too tight.
        while A.shape[0] > 0 and max_gen < G.shape[0] + A.shape[0] + 1:
            c, G, A, b = _eliminate_constraints(c, G, A, b, A.shape[0] - 1)
        G, A = _fold_generators(G, A, max_gen)
    return ConstrainedZonotope(c, G, A, b)
