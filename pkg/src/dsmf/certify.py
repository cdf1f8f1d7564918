"""Boundedness certification per source component.

Two nested certificates are computed for every source component, from its
joint (stacked) measurement matrix:

* collective detectability of (A, C_joint), via the PBH rank test on
  every eigenvalue of A on or outside the unit circle;
* a weaker pair of conditions on the unobservable block of the
  observability decomposition: (i) it is marginally stable, and (ii) for
  every unit-circle eigenvalue the rows reachable from noise and from the
  observable block stay inside the row space of (Aobar - lambda I). The
  rank form of (ii) is cross-checked against the left-eigenvector form
  (every unit left eigenvector must annihilate [Bobar, A21]); the two
  must agree or the certificate aborts as numerically unreliable.

Detectability implies the weaker conditions, so component verdicts are
ordered DETECTABLE > THEOREM1_BOUNDED > UNCERTIFIED.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .decomp import (
    EIG_UNIT_TOL,
    RANK_REL_TOL,
    matrix_rank,
    observability_decomposition,
    spectrum,
)
from .errors import CertificationError
from .graph import SourceComponent, reachable_from, source_components
from .sysmodel import Scenario, joint_measurement_matrix

VERDICT_DETECTABLE = "DETECTABLE"
VERDICT_THEOREM1 = "THEOREM1_BOUNDED"
VERDICT_UNCERTIFIED = "UNCERTIFIED"
SENSOR_COVERED = "COVERED_BY_PREDECESSOR"
SENSOR_UNREACHABLE = "UNREACHABLE"


@dataclass(frozen=True)
class EigenCheckDetail:
    value: complex
    rank_lhs: int
    rank_rhs: int
    semisimple: bool
    eigvec_residual: float

    def as_json(self) -> dict:
        return {
            "lambda_re": float(self.value.real),
            "lambda_im": float(self.value.imag),
            "rank_lhs": self.rank_lhs,
            "rank_rhs": self.rank_rhs,
            "semisimple": self.semisimple,
        }


@dataclass(frozen=True)
class DetectabilityResult:
    detectable: bool
    failing_eigenvalues: tuple[complex, ...]


@dataclass(frozen=True)
class Theorem1Result:
    condition_i: bool
    condition_ii: bool
    eigen_details: tuple[EigenCheckDetail, ...]
    n_obar: int

    @property
    def passed(self) -> bool:
        return self.condition_i and self.condition_ii


@dataclass(frozen=True)
class ComponentCertificate:
    component: SourceComponent
    detectable: DetectabilityResult
    thm1: Theorem1Result

    @property
    def verdict(self) -> str:
        if self.detectable.detectable:
            return VERDICT_DETECTABLE
        if self.thm1.passed:
            return VERDICT_THEOREM1
        return VERDICT_UNCERTIFIED

    def as_json(self) -> dict:
        return {
            "component": self.component.index,
            "vertices": list(self.component.vertices),
            "detectable": self.detectable.detectable,
            "thm1": {
                "cond_i": self.thm1.condition_i,
                "cond_ii": self.thm1.condition_ii,
                "eigs": [d.as_json() for d in self.thm1.eigen_details],
            },
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class CertificateReport:
    components: tuple[ComponentCertificate, ...]
    sensor_status: dict[int, str] = field(compare=False)
    tol_rank: float = RANK_REL_TOL
    tol_eig: float = EIG_UNIT_TOL

    @property
    def network_verdict(self) -> str:
        verdicts = [c.verdict for c in self.components]
        if any(v == VERDICT_UNCERTIFIED for v in verdicts):
            return VERDICT_UNCERTIFIED
        if all(v == VERDICT_DETECTABLE for v in verdicts):
            return VERDICT_DETECTABLE
        return VERDICT_THEOREM1

    @property
    def has_unreachable_sensors(self) -> bool:
        return any(s == SENSOR_UNREACHABLE
                   for s in self.sensor_status.values())

    @property
    def certified(self) -> bool:
        return (self.network_verdict != VERDICT_UNCERTIFIED
                and not self.has_unreachable_sensors)

    def as_json(self) -> dict:
        return {
            "components": [c.as_json() for c in self.components],
            "sensors_outside_components": {
                str(i): s for i, s in sorted(self.sensor_status.items())
            },
            "network_verdict": self.network_verdict,
            "certified": self.certified,
            "tolerances": {"rank": self.tol_rank, "eig": self.tol_eig},
        }

    def to_json_text(self) -> str:
        return json.dumps(self.as_json(), indent=2, sort_keys=True)


def check_collective_detectability(
    A: np.ndarray,
    C_joint: np.ndarray,
    tol_rank: float = RANK_REL_TOL,
    tol_eig: float = EIG_UNIT_TOL,
) -> DetectabilityResult:
    """PBH test on every eigenvalue on or outside the unit circle."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[0]
    C_joint = np.asarray(C_joint, dtype=float).reshape(-1, n)
    eigs = np.linalg.eigvals(A)
    failing = []
    checked: list[complex] = []
    for lam in eigs:
        if abs(lam) < 1.0 - tol_eig:
            continue
        if any(abs(lam - prev) <= tol_eig for prev in checked):
            continue
        checked.append(complex(lam))
        stacked = np.vstack([A - lam * np.eye(n),
                             C_joint.astype(complex)])
        if matrix_rank(stacked, tol=tol_rank) < n:
            failing.append(complex(lam))
    return DetectabilityResult(detectable=not failing,
                               failing_eigenvalues=tuple(failing))


def check_theorem1(
    A: np.ndarray,
    B: np.ndarray,
    C_joint: np.ndarray,
    tol_rank: float = RANK_REL_TOL,
    tol_eig: float = EIG_UNIT_TOL,
) -> Theorem1Result:
    """Marginal stability plus the unit-eigenvalue rank condition.

    Raises :class:`CertificationError` when the rank form and the
    left-eigenvector form of the unit-eigenvalue condition disagree.
    """
    dec = observability_decomposition(A, C_joint, B=B)
    n_obar = dec.n_obar
    if n_obar == 0:
        return Theorem1Result(condition_i=True, condition_ii=True,
                              eigen_details=(), n_obar=0)
    report = spectrum(dec.Aobar, unit_tol=tol_eig, rank_tol=tol_rank)
    cond_i = report.is_marginally_stable(tol=tol_eig)
    coupling = np.hstack([dec.Bobar, dec.A21])
    coupling_scale = max(1.0, float(np.abs(coupling).max(initial=0.0)))
    details = []
    cond_ii = True
    for entry in report.unit_circle:
        lam = entry.value
        shifted = dec.Aobar - lam * np.eye(n_obar)
        rank_rhs = matrix_rank(shifted, tol=tol_rank)
        rank_lhs = matrix_rank(
            np.hstack([shifted, coupling.astype(complex)]), tol=tol_rank
        )
        rank_pass = rank_lhs == rank_rhs
        # Left eigenvectors of lam = right null space of (Aobar - lam I)^T.
        u, s, vt = np.linalg.svd(shifted.T)
        null_dim = n_obar - rank_rhs
        residual = 0.0
        if null_dim > 0:
            q = vt[n_obar - null_dim:].conj()
            residual = float(np.abs(q @ coupling).max(initial=0.0))
        vec_pass = residual <= 1e-6 * coupling_scale
        if rank_pass != vec_pass:
            raise CertificationError(
                f"rank and eigenvector tests disagree at lambda={lam}: "
                f"rank {rank_lhs} vs {rank_rhs}, residual {residual:.3e}"
            )
        cond_ii = cond_ii and rank_pass
        details.append(EigenCheckDetail(value=complex(lam),
                                        rank_lhs=rank_lhs,
                                        rank_rhs=rank_rhs,
                                        semisimple=entry.semisimple,
                                        eigvec_residual=residual))
    return Theorem1Result(condition_i=cond_i, condition_ii=cond_ii,
                          eigen_details=tuple(details), n_obar=n_obar)


def certify_network(scenario: Scenario) -> CertificateReport:
    """Certify every source component and classify the other sensors."""
    tol_rank = scenario.tolerances.rank
    tol_eig = scenario.tolerances.eig
    A = scenario.plant.A
    B = scenario.plant.B
    comps = source_components(scenario.graph)
    certificates = []
    member_ids = set()
    for comp in comps:
        member_ids |= set(comp.vertices)
        C_joint = joint_measurement_matrix(scenario, comp)
        det = check_collective_detectability(A, C_joint,
                                             tol_rank=tol_rank,
                                             tol_eig=tol_eig)
        thm = check_theorem1(A, B, C_joint,
                             tol_rank=tol_rank, tol_eig=tol_eig)
        certificates.append(ComponentCertificate(component=comp,
                                                 detectable=det,
                                                 thm1=thm))
    covered = reachable_from(scenario.graph, member_ids) if member_ids else set()
    status = {}
    for i in range(1, scenario.num_sensors + 1):
        if i in member_ids:
            continue
        status[i] = SENSOR_COVERED if i in covered else SENSOR_UNREACHABLE
    return CertificateReport(components=tuple(certificates),
                             sensor_status=status,
                             tol_rank=tol_rank, tol_eig=tol_eig)
