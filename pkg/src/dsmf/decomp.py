"""Observability decomposition, spectra and rank utilities.

The decomposition splits the state space into the observable subspace of
(A, C) and its orthogonal complement using SVD bases of the n-step
observability matrix, so the transformation P is orthogonal and the
transformed system has the block-triangular shape

    P A P^T = [[Ao,  0   ],        C P^T = [Co, 0]
               [A21, Aobar]],

with (Ao, Co) observable. Orthogonality makes the structural invariants
directly checkable (block norms below tolerance) and P^{-1} = P^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EIG_UNIT_TOL = 1e-7   # |lambda| distance to the unit circle
RANK_REL_TOL = 1e-9   # relative singular-value cutoff for rank queries


def matrix_rank(M: np.ndarray, tol: float = RANK_REL_TOL) -> int:
    """Singular values above tol * sigma_max count (absolute when the
    matrix is numerically zero)."""
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    smax = s[0] if s.size else 0.0
    cutoff = tol * smax if smax > 0.0 else tol
    return int(np.count_nonzero(s > cutoff))


def observability_matrix(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    blocks = []
    Ck = C.copy()
    for _ in range(n):
        blocks.append(Ck)
        Ck = Ck @ A
    return np.vstack(blocks) if blocks else np.zeros((0, n))


@dataclass(frozen=True, eq=False)
class ObservabilityDecomposition:
    P: np.ndarray        # orthogonal, rows = [P_o; P_obar]
    Ao: np.ndarray       # n_o x n_o
    A21: np.ndarray      # n_obar x n_o
    Aobar: np.ndarray    # n_obar x n_obar
    Bo: np.ndarray
    Bobar: np.ndarray
    Co: np.ndarray
    n_o: int
    nu: int              # observability index of (Ao, Co)

    @property
    def n_obar(self) -> int:
        return self.P.shape[0] - self.n_o

    @property
    def P_o(self) -> np.ndarray:
        return self.P[: self.n_o]

    @property
    def P_obar(self) -> np.ndarray:
        return self.P[self.n_o:]


def observability_decomposition(A, C, B=None) -> ObservabilityDecomposition:
    """Decompose (A, C); B defaults to an n x 0 matrix when absent."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    C = np.asarray(C, dtype=float).reshape(-1, n) if np.size(C) else \
        np.zeros((0, n))
    if B is None:
        B = np.zeros((n, 0))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    obs = observability_matrix(A, C)
    if obs.shape[0] == 0:
        n_o = 0
        P = np.eye(n)
    else:
        u, s, vt = np.linalg.svd(obs)
        cutoff = n * np.finfo(float).eps * (s[0] if s.size else 0.0)
        n_o = int(np.count_nonzero(s > cutoff))
        P = vt  # rows 0..n_o-1 span the row space, the rest its complement
    P_o, P_obar = P[:n_o], P[n_o:]
    At = P @ A @ P.T
    Ao = At[:n_o, :n_o]
    Co = C @ P_o.T
    nu = 1 if n_o == 0 else observability_index(Ao, Co)
    return ObservabilityDecomposition(
        P=P,
        Ao=Ao,
        A21=At[n_o:, :n_o],
        Aobar=At[n_o:, n_o:],
        Bo=P_o @ B,
        Bobar=P_obar @ B,
        Co=Co,
        n_o=n_o,
        nu=nu,
    )


def observability_index(Ao: np.ndarray, Co: np.ndarray) -> int:
    """Least number of stacked output maps reaching full observable rank."""
    Ao = np.atleast_2d(np.asarray(Ao, dtype=float))
    n_o = Ao.shape[0]
    Co = np.asarray(Co, dtype=float).reshape(-1, n_o)
    blocks = []
    Ck = Co.copy()
    for ell in range(1, n_o + 1):
        blocks.append(Ck)
        if matrix_rank(np.vstack(blocks)) == n_o:
            return ell
        Ck = Ck @ Ao
    raise ValueError("pair is not observable")


@dataclass(frozen=True)
class UnitCircleEigenvalue:
    value: complex
    algebraic: int
    geometric: int

    @property
    def semisimple(self) -> bool:
        return self.algebraic == self.geometric


@dataclass(frozen=True, eq=False)
class SpectralReport:
    eigenvalues: np.ndarray
    unit_circle: tuple[UnitCircleEigenvalue, ...]

    @property
    def spectral_radius(self) -> float:
        if self.eigenvalues.size == 0:
            return 0.0
        return float(np.abs(self.eigenvalues).max())

    def is_marginally_stable(self, tol: float = EIG_UNIT_TOL) -> bool:
        """All eigenvalues within the closed unit disk (up to tol) and all
        unit-circle eigenvalues semisimple. Vacuously true when empty."""
        if self.eigenvalues.size == 0:
            return True
        if self.spectral_radius > 1.0 + tol:
            return False
        return all(e.semisimple for e in self.unit_circle)


def _cluster(values: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """Greedy grouping of nearly equal complex numbers."""
    remaining = list(values)
    clusters = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        rest = []
        for v in remaining:
            if abs(v - seed) <= tol:
                members.append(v)
            else:
                rest.append(v)
        remaining = rest
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def spectrum(M: np.ndarray, unit_tol: float = EIG_UNIT_TOL,
             rank_tol: float = RANK_REL_TOL) -> SpectralReport:
    """Dense eigendecomposition plus unit-circle bookkeeping."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError("spectrum needs a square matrix")
    n = M.shape[0]
    if n == 0:
        return SpectralReport(eigenvalues=np.zeros(0, dtype=complex),
                              unit_circle=())
    eigs = np.linalg.eigvals(M)
    on_circle = eigs[np.abs(np.abs(eigs) - 1.0) <= unit_tol]
    entries = []
    for lam, mult in _cluster(on_circle, tol=max(unit_tol, 1e-8)):
        geo = n - matrix_rank(M - lam * np.eye(n), tol=rank_tol)
        entries.append(UnitCircleEigenvalue(value=lam, algebraic=mult,
                                            geometric=geo))
    return SpectralReport(eigenvalues=eigs, unit_circle=tuple(entries))
