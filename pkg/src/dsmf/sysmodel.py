"""Plant and sensor definitions, ground-truth simulation, lumped outputs.

The plant is x_{k+1} = A x_k + B w_k with w_k ranging over a bounded box;
sensor i sees y_k^i = C_i x_k + v_k^i with its own bounded noise box. A
sensor with a 0-row C takes no measurements. Noise realizations are drawn
uniformly inside their boxes from a single seeded stream in a fixed order
(w_0, v_0^1..v_0^N, w_1, ...), which makes whole runs reproducible from
the scenario seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .graph import SensorGraph, SourceComponent
from .setops import Box, ConstrainedZonotope, cz_contains_point


@dataclass(frozen=True, eq=False)
class PlantModel:
    A: np.ndarray
    B: np.ndarray
    W: Box

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float)).copy()
        B = np.atleast_2d(np.asarray(self.B, dtype=float)).copy()
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatchError("A must be square")
        if B.shape[0] != A.shape[0]:
            raise DimensionMismatchError("B must have as many rows as A")
        if self.W.dim != B.shape[1]:
            raise DimensionMismatchError("W dimension must match B columns")
        if not self.W.is_bounded():
            raise ValueError("process-noise box must be bounded")
        A.flags.writeable = False
        B.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def noise_dim(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True, eq=False)
class SensorModel:
    id: int
    C: np.ndarray
    V: Box

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float).copy()
        if C.ndim != 2:
            raise DimensionMismatchError("C must be a matrix (q x n)")
        if self.V.dim != C.shape[0]:
            raise DimensionMismatchError("V dimension must match C rows")
        if not self.V.is_bounded():
            raise ValueError("measurement-noise box must be bounded")
        C.flags.writeable = False
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "id", int(self.id))

    @property
    def num_outputs(self) -> int:
        return self.C.shape[0]

    @staticmethod
    def silent(sensor_id: int, state_dim: int) -> "SensorModel":
        """A sensor that takes no measurements (0-row C)."""
        return SensorModel(sensor_id, np.zeros((0, state_dim)),
                           Box(np.zeros(0), np.zeros(0)))


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-9
    eig: float = 1e-7


@dataclass(frozen=True, eq=False)
class Scenario:
    plant: PlantModel
    sensors: tuple[SensorModel, ...]
    graph: SensorGraph
    initial_beliefs: dict[int, ConstrainedZonotope]
    true_initial_state: np.ndarray
    horizon: int
    seed: int
    max_gen: int
    max_con: int
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        n = self.plant.dim
        sensors = tuple(self.sensors)
        ids = [s.id for s in sensors]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("sensor ids must be 1..N in order")
        if self.graph.num_sensors != len(sensors):
            raise DimensionMismatchError("graph size differs from sensors")
        for s in sensors:
            if s.num_outputs and s.C.shape[1] != n:
                raise DimensionMismatchError(
                    f"sensor {s.id}: C has {s.C.shape[1]} columns, "
                    f"state dimension is {n}"
                )
        x0 = np.asarray(self.true_initial_state, dtype=float).ravel().copy()
        if x0.shape[0] != n:
            raise DimensionMismatchError("true initial state has wrong size")
        beliefs = dict(self.initial_beliefs)
        if set(beliefs) != set(ids):
            raise ValueError("initial beliefs must cover every sensor id")
        for i, belief in beliefs.items():
            if belief.dim != n:
                raise DimensionMismatchError(
                    f"initial belief of sensor {i} has dimension "
                    f"{belief.dim}, expected {n}"
                )
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.max_gen < n or self.max_con < 0:
            raise ValueError("invalid reduction budgets")
        x0.flags.writeable = False
        object.__setattr__(self, "sensors", sensors)
        object.__setattr__(self, "initial_beliefs", beliefs)
        object.__setattr__(self, "true_initial_state", x0)

    @property
    def num_sensors(self) -> int:
        return len(self.sensors)

    def sensor(self, i: int) -> SensorModel:
        return self.sensors[i - 1]

    def check_initial_containment(self) -> None:
        """Soundness precondition: every initial belief holds the truth."""
        for i, belief in sorted(self.initial_beliefs.items()):
            if not cz_contains_point(belief, self.true_initial_state):
                raise ValueError(
                    f"true initial state outside initial belief of "
                    f"sensor {i}"
                )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One noise realization of a scenario.

    states has horizon+1 rows; process_noises has horizon rows;
    measurements/measurement_noises map (k, sensor_id) for every step
    0..horizon and every measuring sensor.
    """

    states: np.ndarray
    process_noises: np.ndarray
    measurements: dict[tuple[int, int], np.ndarray]
    measurement_noises: dict[tuple[int, int], np.ndarray]

    @property
    def horizon(self) -> int:
        return self.states.shape[0] - 1

    def state(self, k: int) -> np.ndarray:
        return self.states[k]

    def measurement(self, k: int, sensor_id: int) -> np.ndarray:
        return self.measurements[(k, sensor_id)]


def simulate_truth(scenario: Scenario) -> Trajectory:
    """Simulate states, noises and measurements for the whole horizon."""
    scenario.check_initial_containment()
    plant = scenario.plant
    n, p = plant.dim, plant.noise_dim
    K = scenario.horizon
    rng = np.random.default_rng(scenario.seed)
    states = np.empty((K + 1, n))
    states[0] = scenario.true_initial_state
    noises = np.empty((K, p))
    measurements: dict[tuple[int, int], np.ndarray] = {}
    meas_noises: dict[tuple[int, int], np.ndarray] = {}

    def measure(k: int) -> None:
        for s in scenario.sensors:
            if s.num_outputs == 0:
                continue
            v = s.V.sample(rng)
            meas_noises[(k, s.id)] = v
            measurements[(k, s.id)] = s.C @ states[k] + v

    for k in range(K):
        noises[k] = plant.W.sample(rng)
        measure(k)
        states[k + 1] = plant.A @ states[k] + plant.B @ noises[k]
    measure(K)
    return Trajectory(states=states, process_noises=noises,
                      measurements=measurements,
                      measurement_noises=meas_noises)


def replay(scenario: Scenario, trajectory: Trajectory) -> np.ndarray:
    """Re-run the dynamics from the stored noises (bit-for-bit check)."""
    plant = scenario.plant
    K = trajectory.horizon
    states = np.empty_like(trajectory.states)
    states[0] = scenario.true_initial_state
    for k in range(K):
        states[k + 1] = plant.A @ states[k] + plant.B @ trajectory.process_noises[k]
    return states


def joint_measurement_matrix(scenario: Scenario,
                             component: SourceComponent) -> np.ndarray:
    """Stack the C_i of the component's members in ascending id order.

    Sensors without measurements contribute nothing (their C has zero
    rows already, so the stack just skips them).
    """
    n = scenario.plant.dim
    blocks = [scenario.sensor(i).C for i in sorted(component.vertices)]
    blocks = [b for b in blocks if b.shape[0] > 0]
    if not blocks:
        return np.zeros((0, n))
    return np.vstack(blocks)
