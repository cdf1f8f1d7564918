"""Outer-bound oracles and sampling verifiers for the filter recursion.

Two families of sets outer-bound every fused belief:

* observation-information sets: states at time k consistent with one past
  measurement, inflated forward by process noise. They contain an
  unbounded kernel term, so they are never materialized; membership is a
  box-constrained feasibility problem, exact up to LP tolerance.
* state-evolution sets: forward reach sets of the initial beliefs. These
  are bounded and are materialized as constrained zonotopes with
  reduction disabled (verification only, guarded by a generator cap).

On top of them sit the two sampled containment checks: the
intersection-form bound over predecessor hop sets, and the
decomposition-form bound that splits a fused belief into the commonly
known observation window times a recursion on the unobservable block.
Checks are one-sided (sampled members of the belief must satisfy every
term) with a fault-injection control to demonstrate sensitivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomp import ObservabilityDecomposition, observability_decomposition
from .errors import OracleCapError
from .filtering import BeliefHistory
from .graph import SourceComponent, m_set
from .setops import (
    ConstrainedZonotope,
    cz_contains_point,
    cz_linear_map,
    cz_minkowski_sum,
    cz_sample_points,
    lp_feasible,
)
from .sysmodel import Scenario, Trajectory, joint_measurement_matrix

GENERATOR_CAP = 5000
_FAULT_OFFSET = 1e6


@dataclass
class BoundCheckReport:
    """Outcome of one sampled containment check."""

    checked_points: int
    violations: int
    breakdown: dict[str, int] = field(default_factory=dict)
    params: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_json(self) -> dict:
        return {
            "checked_points": self.checked_points,
            "violations": self.violations,
            "passed": self.passed,
            "breakdown": dict(sorted(self.breakdown.items())),
            "params": self.params,
        }


def _neg_power(A: np.ndarray, exponent: int) -> np.ndarray:
    """A ** exponent for a (possibly negative) integer exponent."""
    if exponent >= 0:
        return np.linalg.matrix_power(A, exponent)
    return np.linalg.matrix_power(np.linalg.inv(A), -exponent)


class _ObsSystem:
    """Cached feasibility system for one observation-information set.

    Membership of x reduces to existence of in-box noises satisfying
    C A^(r-k) (x - sum_tau A^(k-1-tau) B w_tau) + v = y, encoded over unit
    cube variables (noise boxes recentred and scaled by their radii).
    """

    def __init__(self, scenario: Scenario, trajectory: Trajectory,
                 k: int, r: int, l: int, y_override=None):
        if not 0 <= r <= k:
            raise ValueError("need 0 <= r <= k")
        sensor = scenario.sensor(l)
        self.q = sensor.num_outputs
        if self.q == 0:
            return  # whole space, nothing to solve
        plant = scenario.plant
        y = trajectory.measurement(r, l) if y_override is None else y_override
        self.x_map = sensor.C @ _neg_power(plant.A, r - k)
        w_c, w_r = plant.W.center, plant.W.radius
        v_c, v_r = sensor.V.center, sensor.V.radius
        cols = []
        const = y - v_c
        for tau in range(r, k):
            M_tau = sensor.C @ _neg_power(plant.A, r - 1 - tau) @ plant.B
            const = const + M_tau @ w_c
            cols.append(-M_tau * w_r[None, :])
        v_cols = np.zeros((self.q, self.q))
        np.fill_diagonal(v_cols, v_r)
        cols.append(v_cols)
        self.A_eq = np.hstack(cols) if cols else np.zeros((self.q, 0))
        self.const = const

    def contains(self, x) -> bool:
        if self.q == 0:
            return True
        b = self.const - self.x_map @ np.asarray(x, dtype=float)
        return lp_feasible(self.A_eq, b) is not None


def obs_info_membership(x, k: int, r: int, l: int,
                        trajectory: Trajectory,
                        scenario: Scenario) -> bool:
    """Is x in the time-k set consistent with sensor l's measurement at r?"""
    return _ObsSystem(scenario, trajectory, k, r, l).contains(x)


def state_evolution_set(scenario: Scenario, k: int, l: int,
                        cap: int = GENERATOR_CAP) -> ConstrainedZonotope:
    """Forward reach set of sensor l's initial belief, materialized."""
    plant = scenario.plant
    out = cz_linear_map(_neg_power(plant.A, k), scenario.initial_beliefs[l])
    noise = ConstrainedZonotope.from_box(plant.W)
    for tau in range(k):
        term = cz_linear_map(_neg_power(plant.A, k - 1 - tau) @ plant.B,
                             noise)
        out = cz_minkowski_sum(out, term)
        if out.num_generators > cap:
            raise OracleCapError(
                f"state-evolution set exceeded {cap} generators at "
                f"step {k}; retry with a smaller k"
            )
    return out


def state_evo_membership(x, k: int, l: int, scenario: Scenario,
                         cap: int = GENERATOR_CAP) -> bool:
    return cz_contains_point(state_evolution_set(scenario, k, l, cap=cap), x)


def coit_membership(x, k: int, component: SourceComponent,
                    trajectory: Trajectory, scenario: Scenario) -> bool:
    """Membership in the component's commonly known observation window:
    the conjunction of observation-set memberships over r up to
    k - rho_tilde + 1 and all component members."""
    rho = component.rho_tilde
    if k < rho - 1:
        raise ValueError(f"window is trivial before step {rho - 1}")
    for r in range(0, k - rho + 2):
        for l in component.vertices:
            if not obs_info_membership(x, k, r, l, trajectory, scenario):
                return False
    return True


def unobs_residual_set(scenario: Scenario, history: BeliefHistory,
                       dec: ObservabilityDecomposition, i: int, k: int,
                       cap: int = GENERATOR_CAP) -> ConstrainedZonotope:
    """Recursion bounding the unobservable-block image of sensor i's
    fused belief at step k.

    Propagates the initial prior through the unobservable block and adds,
    per step, the observable-block coupling applied to the recorded fused
    belief plus the projected process noise. Materialized exactly (no
    reduction); coupling terms vanish when the coupling block is zero.
    """
    if k < 0:
        raise ValueError("step must be non-negative")
    plant = scenario.plant
    out = cz_linear_map(
        _neg_power(dec.Aobar, k) @ dec.P_obar, scenario.initial_beliefs[i]
    )
    if dec.n_obar == 0:
        return out
    noise = ConstrainedZonotope.from_box(plant.W)
    couple = np.abs(dec.A21).max(initial=0.0) > 0.0
    for j in range(k):
        prop = _neg_power(dec.Aobar, k - 1 - j)
        out = cz_minkowski_sum(out, cz_linear_map(prop @ dec.Bobar, noise))
        if couple:
            term = cz_linear_map(prop @ dec.A21 @ dec.P_o,
                                 history.fused(i, j))
            out = cz_minkowski_sum(out, term)
        if out.num_generators > cap:
            raise OracleCapError(
                f"residual recursion exceeded {cap} generators at "
                f"step {k}; retry with a smaller k"
            )
    return out


def _fault_target(scenario: Scenario, candidates) -> tuple[int, int]:
    """First (r, l) pair whose sensor actually measures something."""
    for r, l in candidates:
        if scenario.sensor(l).num_outputs > 0:
            return r, l
    raise ValueError("no measuring sensor available for fault injection")


def _corrupt(y: np.ndarray) -> np.ndarray:
    return y + _FAULT_OFFSET * (1.0 + np.abs(y).max(initial=0.0))


def _sample_rng(scenario: Scenario, i: int, k: int):
    return np.random.default_rng((scenario.seed, 17, i, k))


def verify_intersection_bound(
    scenario: Scenario,
    trajectory: Trajectory,
    history: BeliefHistory,
    k: int,
    i: int,
    samples: int,
    rng: np.random.Generator | None = None,
    inject_fault: bool = False,
) -> BoundCheckReport:
    """Sampled check that the fused belief of (i, k) sits inside every
    observation-information term over the hop-indexed predecessor sets
    and every reachable-set term.

    With ``inject_fault`` one observation term is rebuilt from a corrupted
    measurement; a healthy harness must then report violations.
    """
    if rng is None:
        rng = _sample_rng(scenario, i, k)
    graph = scenario.graph
    points = cz_sample_points(history.fused(i, k), samples, rng)
    obs_terms = []
    for r in range(k + 1):
        for l in sorted(m_set(graph, i, k - r)):
            obs_terms.append((r, l))
    fault_at = None
    if inject_fault:
        fault_at = _fault_target(
            scenario, sorted(obs_terms, key=lambda rl: (-rl[0], rl[1]))
        )
    report = BoundCheckReport(
        checked_points=len(points), violations=0,
        params={"sensor": i, "step": k, "samples": samples,
                "fault": bool(inject_fault)},
    )
    for r, l in obs_terms:
        override = None
        if fault_at == (r, l):
            override = _corrupt(trajectory.measurement(r, l))
        system = _ObsSystem(scenario, trajectory, k, r, l,
                            y_override=override)
        bad = sum(0 if system.contains(x) else 1 for x in points)
        report.breakdown[f"obs[r={r},l={l}]"] = bad
        report.violations += bad
    for l in sorted(m_set(graph, i, k)):
        evo = state_evolution_set(scenario, k, l)
        bad = sum(0 if cz_contains_point(evo, x) else 1 for x in points)
        report.breakdown[f"evo[l={l}]"] = bad
        report.violations += bad
    return report


def verify_decomposition_bound(
    scenario: Scenario,
    trajectory: Trajectory,
    history: BeliefHistory,
    component: SourceComponent,
    i: int,
    k: int,
    samples: int,
    rng: np.random.Generator | None = None,
    inject_fault: bool = False,
) -> BoundCheckReport:
    """Sampled check of the decomposition-form bound for sensor i of a
    source component: every sampled member of the fused belief must lie
    in the component's observation window, and its unobservable-block
    image must lie in the residual recursion set.
    """
    rho = component.rho_tilde
    if k <= rho:
        raise ValueError(
            f"decomposition bound needs k > {rho} for this component"
        )
    if i not in component.vertices:
        raise ValueError(f"sensor {i} is not in component {component.index}")
    if rng is None:
        rng = _sample_rng(scenario, i, k)
    points = cz_sample_points(history.fused(i, k), samples, rng)
    report = BoundCheckReport(
        checked_points=len(points), violations=0,
        params={"sensor": i, "step": k, "component": component.index,
                "samples": samples, "fault": bool(inject_fault)},
    )
    fault_at = None
    if inject_fault:
        fault_at = _fault_target(
            scenario,
            [(0, l) for l in component.vertices]
            + [(r, l) for r in range(1, k - rho + 2)
               for l in component.vertices],
        )
    for r in range(0, k - rho + 2):
        for l in component.vertices:
            override = None
            if fault_at == (r, l):
                override = _corrupt(trajectory.measurement(r, l))
            system = _ObsSystem(scenario, trajectory, k, r, l,
                                y_override=override)
            bad = sum(0 if system.contains(x) else 1 for x in points)
            report.breakdown[f"obs[r={r},l={l}]"] = bad
            report.violations += bad
    dec = observability_decomposition(
        scenario.plant.A, joint_measurement_matrix(scenario, component),
        B=scenario.plant.B,
    )
    if dec.n_obar > 0:
        residual = unobs_residual_set(scenario, history, dec, i, k)
        bad = sum(
            0 if cz_contains_point(residual, dec.P_obar @ x) else 1
            for x in points
        )
        report.breakdown["residual"] = bad
        report.violations += bad
    return report


@dataclass(frozen=True)
class DiagnosticEntry:
    sensor: int
    dim: int
    early_max: float
    tail_max: float
    ratio: float
    flag: str


def boundedness_diagnostic(history: BeliefHistory,
                           early_window: tuple[int, int],
                           tail_window: tuple[int, int],
                           growth_threshold: float = 1.5
                           ) -> list[DiagnosticEntry]:
    """Tail-versus-early hull-width ratios per (sensor, dimension).

    Windows are inclusive step ranges. A ratio above the threshold flags
    the pair as GROWING; a plateaued filter sits near 1.
    """
    scenario = history.scenario
    K = scenario.horizon
    for lo, hi in (early_window, tail_window):
        if not (0 <= lo <= hi <= K):
            raise ValueError("window outside horizon")
    out = []
    for i in range(1, scenario.num_sensors + 1):
        widths = history.hull_widths(i)
        early = widths[early_window[0]:early_window[1] + 1].max(axis=0)
        tail = widths[tail_window[0]:tail_window[1] + 1].max(axis=0)
        for d in range(widths.shape[1]):
            if early[d] > 0.0:
                ratio = float(tail[d] / early[d])
            else:
                ratio = 1.0 if tail[d] == 0.0 else float("inf")
            flag = "GROWING" if ratio > growth_threshold else "OK"
            out.append(DiagnosticEntry(sensor=i, dim=d + 1,
                                       early_max=float(early[d]),
                                       tail_max=float(tail[d]),
                                       ratio=ratio, flag=flag))
    return out
