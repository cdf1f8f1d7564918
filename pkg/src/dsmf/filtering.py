"""Synchronized distributed set-membership filtering rounds.

Every round k runs three phases for each sensor i:

* predict (skipped at k = 0): push the previous fused belief through the
  dynamics and inflate by the process-noise box;
* local update: intersect with the measurement strip of y_k^i (a sensor
  without measurements keeps its prior);
* fuse: intersect the local posterior with the same-round posteriors of
  the 1-hop predecessors.

Order reduction runs after predict and after fuse, the two growth
points, never between update and fuse. Emptiness is a hard error: with
in-bound noise the recursion cannot produce an empty set, so an empty
belief always indicates corrupt inputs or a bug, never a state to recover
from. The engine is sequential and deterministic; phases only read the
previous round plus the current measurements, so per-sensor work could
run in parallel between barriers without changing any result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBeliefError, EmptySetError
from .graph import fusion_neighborhood
from .setops import (
    Box,
    ConstrainedZonotope,
    Strip,
    cz_intersect,
    cz_intersect_strip,
    cz_interval_hull,
    cz_is_empty,
    cz_linear_map,
    cz_minkowski_sum,
    cz_reduce,
)
from .sysmodel import PlantModel, Scenario, SensorModel, Trajectory

STORE_ALL = "all"
STORE_FUSED = "fused"
STORE_HULLS = "hulls"


def predict(belief: ConstrainedZonotope, plant: PlantModel,
            max_gen: int | None = None,
            max_con: int | None = None) -> ConstrainedZonotope:
    """A @ belief + B @ noise box, reduced when a budget is given."""
    mapped = cz_linear_map(plant.A, belief)
    noise = cz_linear_map(plant.B, ConstrainedZonotope.from_box(plant.W))
    out = cz_minkowski_sum(mapped, noise)
    if max_gen is not None:
        out = cz_reduce(out, max_gen, max_con if max_con is not None else 0)
    return out


def local_update(prior: ConstrainedZonotope, sensor: SensorModel,
                 y) -> ConstrainedZonotope:
    """Intersect the prior with the measurement strip of y.

    A sensor without measurements degenerates to the identity.
    """
    if sensor.num_outputs == 0:
        return prior
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != sensor.num_outputs:
        raise ValueError(
            f"sensor {sensor.id} expects {sensor.num_outputs} outputs"
        )
    return cz_intersect_strip(prior, Strip(sensor.C, y, sensor.V))


def fuse(own: ConstrainedZonotope, neighbors,
         max_gen: int | None = None,
         max_con: int | None = None) -> ConstrainedZonotope:
    """Left-fold intersection of own posterior with neighbor posteriors."""
    out = own
    for nb in neighbors:
        out = cz_intersect(out, nb)
    if max_gen is not None:
        out = cz_reduce(out, max_gen, max_con if max_con is not None else 0)
    return out


@dataclass(frozen=True, eq=False)
class StepRecord:
    prior: ConstrainedZonotope | None
    local_posterior: ConstrainedZonotope | None
    fused: ConstrainedZonotope | None
    fused_hull: Box
    fused_diameter_ub: float


class BeliefHistory:
    """Per-sensor, per-step belief records plus hull statistics.

    ``store`` controls how much set data is retained: ``"all"`` keeps
    prior/local posterior/fused, ``"fused"`` keeps only the fused belief,
    ``"hulls"`` keeps only hull statistics. Hull and diameter statistics
    of the fused belief are always present.
    """

    def __init__(self, scenario: Scenario, store: str = STORE_ALL):
        if store not in (STORE_ALL, STORE_FUSED, STORE_HULLS):
            raise ValueError(f"unknown store mode {store!r}")
        self.scenario = scenario
        self.store = store
        self._records: dict[tuple[int, int], StepRecord] = {}

    def _put(self, i: int, k: int, record: StepRecord) -> None:
        self._records[(i, k)] = record

    def record(self, i: int, k: int) -> StepRecord:
        return self._records[(i, k)]

    def prior(self, i: int, k: int) -> ConstrainedZonotope:
        rec = self.record(i, k).prior
        if rec is None:
            raise ValueError("prior sets were not stored for this run")
        return rec

    def local_posterior(self, i: int, k: int) -> ConstrainedZonotope:
        rec = self.record(i, k).local_posterior
        if rec is None:
            raise ValueError("posterior sets were not stored for this run")
        return rec

    def fused(self, i: int, k: int) -> ConstrainedZonotope:
        rec = self.record(i, k).fused
        if rec is None:
            raise ValueError("fused sets were not stored for this run")
        return rec

    def hull(self, i: int, k: int) -> Box:
        return self.record(i, k).fused_hull

    def diameter_ub(self, i: int, k: int) -> float:
        return self.record(i, k).fused_diameter_ub

    def hull_widths(self, i: int) -> np.ndarray:
        """(horizon+1, n) array of fused hull widths for sensor i."""
        K = self.scenario.horizon
        return np.vstack([self.hull(i, k).width for k in range(K + 1)])


def run_dsmf(scenario: Scenario, trajectory: Trajectory,
             store: str = STORE_ALL) -> BeliefHistory:
    """Run the filter over the whole horizon of a simulated trajectory."""
    if trajectory.horizon != scenario.horizon:
        raise ValueError("trajectory horizon differs from scenario")
    graph = scenario.graph
    plant = scenario.plant
    max_gen, max_con = scenario.max_gen, scenario.max_con
    scopes = {i: fusion_neighborhood(graph, i)
              for i in range(1, scenario.num_sensors + 1)}
    history = BeliefHistory(scenario, store=store)
    fused_prev: dict[int, ConstrainedZonotope] = {}
    for k in range(scenario.horizon + 1):
        priors: dict[int, ConstrainedZonotope] = {}
        for i in range(1, scenario.num_sensors + 1):
            if k == 0:
                priors[i] = cz_reduce(scenario.initial_beliefs[i],
                                      max_gen, max_con)
            else:
                priors[i] = predict(fused_prev[i], plant,
                                    max_gen=max_gen, max_con=max_con)
        posteriors: dict[int, ConstrainedZonotope] = {}
        for i in range(1, scenario.num_sensors + 1):
            sensor = scenario.sensor(i)
            if sensor.num_outputs == 0:
                posteriors[i] = priors[i]
            else:
                posteriors[i] = local_update(priors[i], sensor,
                                             trajectory.measurement(k, i))
        fused_now: dict[int, ConstrainedZonotope] = {}
        for i in range(1, scenario.num_sensors + 1):
            neighbors = [posteriors[j] for j in scopes[i] if j != i]
            fused_i = fuse(posteriors[i], neighbors,
                           max_gen=max_gen, max_con=max_con)
            try:
                hull = cz_interval_hull(fused_i)
            except EmptySetError:
                _raise_empty(scenario, trajectory, posteriors, scopes[i],
                             i, k)
            fused_now[i] = fused_i
            width = hull.width
            diam_ub = float(np.linalg.norm(width))
            history._put(i, k, StepRecord(
                prior=priors[i] if store == STORE_ALL else None,
                local_posterior=(posteriors[i] if store == STORE_ALL
                                 else None),
                fused=fused_i if store != STORE_HULLS else None,
                fused_hull=hull,
                fused_diameter_ub=diam_ub,
            ))
        fused_prev = fused_now
    return history


def _raise_empty(scenario, trajectory, posteriors, scope, i, k):
    """Attribute an empty fused belief to the phase that produced it."""
    for j in scope:
        if cz_is_empty(posteriors[j]):
            sensor = scenario.sensor(j)
            y = (trajectory.measurement(k, j)
                 if sensor.num_outputs else None)
            raise EmptyBeliefError(k, j, "update", measurement=y)
    raise EmptyBeliefError(k, i, "fuse")
