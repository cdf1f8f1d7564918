"""Scenario files: strict JSON ingestion, serialization, bundled data.

A scenario file is a JSON document with sections ``plant``, ``sensors``,
``graph``, ``init`` and ``run`` (plus an optional free-text
``description``). Matrices are row-major nested lists, noise ranges are
lo/hi arrays, and initial beliefs are boxes or constrained zonotopes,
with an optional ``default`` entry applied to sensors not listed. Unknown
keys are rejected and every diagnostic carries the JSON path of the
offending field together with a stable error code.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .decomp import matrix_rank
from .errors import ScenarioError
from .graph import SensorGraph
from .setops import Box, ConstrainedZonotope
from .sysmodel import PlantModel, Scenario, SensorModel, Tolerances

DEFAULT_BELIEF_HALF_WIDTH = 20.0
DEFAULT_GEN_FACTOR = 20  # max generators per state dimension
DEFAULT_CON_FACTOR = 10  # max constraints per state dimension

_TOP_KEYS = {"description", "plant", "sensors", "graph", "init", "run"}
_PLANT_KEYS = {"A", "B", "W"}
_SENSOR_KEYS = {"id", "C", "V"}
_GRAPH_KEYS = {"edges"}
_INIT_KEYS = {"true_x0", "beliefs"}
_RUN_KEYS = {"horizon", "seed", "max_gen", "max_con", "tolerances"}
_TOL_KEYS = {"rank", "eig"}
_BOX_KEYS = {"lo", "hi"}
_SET_KEYS = {"box", "cz"}
_CZ_KEYS = {"center", "generators", "conA", "conB"}


def _fail(code: str, where: str, message: str):
    raise ScenarioError(code, where, message)


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        _fail(ScenarioError.BAD_VALUE, where, "expected an object")
    for key in obj:
        if key not in allowed:
            _fail(ScenarioError.UNKNOWN_KEY, f"{where}.{key}",
                  f"unknown key (allowed: {sorted(allowed)})")


def _require(obj, key, where):
    if key not in obj:
        _fail(ScenarioError.MISSING_KEY, f"{where}.{key}", "required")
    return obj[key]


def _vector(raw, where) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        _fail(ScenarioError.BAD_VALUE, where, "expected a numeric array")
    if arr.ndim != 1:
        _fail(ScenarioError.BAD_VALUE, where, "expected a flat array")
    if not np.all(np.isfinite(arr)):
        _fail(ScenarioError.BAD_VALUE, where, "entries must be finite")
    return arr


def _matrix(raw, where) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        _fail(ScenarioError.BAD_VALUE, where,
              "expected a rectangular numeric matrix")
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        _fail(ScenarioError.BAD_VALUE, where, "expected a matrix")
    if not np.all(np.isfinite(arr)):
        _fail(ScenarioError.BAD_VALUE, where, "entries must be finite")
    return arr


def _box(raw, where) -> Box:
    _check_keys(raw, _BOX_KEYS, where)
    lo = _vector(_require(raw, "lo", where), f"{where}.lo")
    hi = _vector(_require(raw, "hi", where), f"{where}.hi")
    if lo.shape != hi.shape:
        _fail(ScenarioError.DIM_MISMATCH, where, "lo and hi lengths differ")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        _fail(ScenarioError.UNBOUNDED_BOX, where, "bounds must be finite")
    if np.any(lo > hi):
        _fail(ScenarioError.BAD_VALUE, where, "lo exceeds hi")
    return Box(lo, hi)


def _belief_set(raw, where, n) -> ConstrainedZonotope:
    _check_keys(raw, _SET_KEYS, where)
    if ("box" in raw) == ("cz" in raw):
        _fail(ScenarioError.BAD_VALUE, where,
              "give exactly one of 'box' or 'cz'")
    if "box" in raw:
        box = _box(raw["box"], f"{where}.box")
        if box.dim != n:
            _fail(ScenarioError.DIM_MISMATCH, f"{where}.box",
                  f"expected dimension {n}")
        return ConstrainedZonotope.from_box(box)
    czraw = raw["cz"]
    _check_keys(czraw, _CZ_KEYS, f"{where}.cz")
    center = _vector(_require(czraw, "center", f"{where}.cz"),
                     f"{where}.cz.center")
    gens = _matrix(_require(czraw, "generators", f"{where}.cz"),
                   f"{where}.cz.generators")
    con_a = czraw.get("conA")
    con_b = czraw.get("conB")
    if (con_a is None) != (con_b is None):
        _fail(ScenarioError.BAD_VALUE, f"{where}.cz",
              "conA and conB must come together")
    if center.shape[0] != n:
        _fail(ScenarioError.DIM_MISMATCH, f"{where}.cz.center",
              f"expected dimension {n}")
    if gens.size and gens.shape[0] != n:
        _fail(ScenarioError.DIM_MISMATCH, f"{where}.cz.generators",
              f"expected {n} rows")
    try:
        if con_a is None:
            return ConstrainedZonotope(center, gens.reshape(n, -1))
        A = _matrix(con_a, f"{where}.cz.conA")
        b = _vector(con_b, f"{where}.cz.conB")
        return ConstrainedZonotope(center, gens.reshape(n, -1), A, b)
    except ValueError as err:
        _fail(ScenarioError.DIM_MISMATCH, f"{where}.cz", str(err))


def loads_scenario(text: str) -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        _fail(ScenarioError.PARSE_ERROR,
              f"line {err.lineno}, column {err.colno}", err.msg)
    _check_keys(raw, _TOP_KEYS, "$")

    plant_raw = _require(raw, "plant", "$")
    _check_keys(plant_raw, _PLANT_KEYS, "plant")
    A = _matrix(_require(plant_raw, "A", "plant"), "plant.A")
    if A.shape[0] != A.shape[1] or A.shape[0] == 0:
        _fail(ScenarioError.DIM_MISMATCH, "plant.A", "must be square")
    n = A.shape[0]
    if matrix_rank(A, tol=1e-12) < n:
        _fail(ScenarioError.SINGULAR_A, "plant.A",
              "system matrix must be non-singular")
    B = _matrix(_require(plant_raw, "B", "plant"), "plant.B")
    if B.shape[0] != n:
        _fail(ScenarioError.DIM_MISMATCH, "plant.B",
              f"expected {n} rows")
    W = _box(_require(plant_raw, "W", "plant"), "plant.W")
    if W.dim != B.shape[1]:
        _fail(ScenarioError.DIM_MISMATCH, "plant.W",
              f"expected dimension {B.shape[1]}")
    plant = PlantModel(A=A, B=B, W=W)

    sensors_raw = _require(raw, "sensors", "$")
    if not isinstance(sensors_raw, list) or not sensors_raw:
        _fail(ScenarioError.BAD_VALUE, "sensors",
              "expected a non-empty list")
    sensors = []
    for idx, sraw in enumerate(sensors_raw):
        where = f"sensors[{idx}]"
        _check_keys(sraw, _SENSOR_KEYS, where)
        sid = _require(sraw, "id", where)
        if not isinstance(sid, int) or sid != idx + 1:
            _fail(ScenarioError.BAD_VALUE, f"{where}.id",
                  f"ids must run 1..N in order (expected {idx + 1})")
        if ("C" in sraw) != ("V" in sraw):
            _fail(ScenarioError.BAD_VALUE, where,
                  "C and V must come together")
        if "C" not in sraw:
            sensors.append(SensorModel.silent(sid, n))
            continue
        C = _matrix(sraw["C"], f"{where}.C")
        if C.size == 0:
            C = C.reshape(0, n)
        if C.shape[1] != n:
            _fail(ScenarioError.DIM_MISMATCH, f"{where}.C",
                  f"expected {n} columns")
        V = _box(sraw["V"], f"{where}.V")
        if V.dim != C.shape[0]:
            _fail(ScenarioError.DIM_MISMATCH, f"{where}.V",
                  f"expected dimension {C.shape[0]}")
        sensors.append(SensorModel(sid, C, V))
    N = len(sensors)

    graph_raw = _require(raw, "graph", "$")
    _check_keys(graph_raw, _GRAPH_KEYS, "graph")
    edges_raw = _require(graph_raw, "edges", "graph")
    if not isinstance(edges_raw, list):
        _fail(ScenarioError.BAD_VALUE, "graph.edges", "expected a list")
    edges = []
    for idx, e in enumerate(edges_raw):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(v, int) for v in e)):
            _fail(ScenarioError.BAD_VALUE, f"graph.edges[{idx}]",
                  "expected [from, to] integer pair")
        if not all(1 <= v <= N for v in e):
            _fail(ScenarioError.BAD_VALUE, f"graph.edges[{idx}]",
                  f"vertex outside 1..{N}")
        edges.append((e[0], e[1]))
    graph = SensorGraph(N, edges)

    init_raw = _require(raw, "init", "$")
    _check_keys(init_raw, _INIT_KEYS, "init")
    x0 = _vector(_require(init_raw, "true_x0", "init"), "init.true_x0")
    if x0.shape[0] != n:
        _fail(ScenarioError.DIM_MISMATCH, "init.true_x0",
              f"expected dimension {n}")
    default_box = Box.symmetric(DEFAULT_BELIEF_HALF_WIDTH, n)
    default_belief = ConstrainedZonotope.from_box(default_box)
    beliefs = {i: default_belief for i in range(1, N + 1)}
    if "beliefs" in init_raw:
        braw = init_raw["beliefs"]
        if not isinstance(braw, dict):
            _fail(ScenarioError.BAD_VALUE, "init.beliefs",
                  "expected an object")
        if "default" in braw:
            shared = _belief_set(braw["default"], "init.beliefs.default", n)
            beliefs = {i: shared for i in range(1, N + 1)}
        for key, value in braw.items():
            if key == "default":
                continue
            where = f"init.beliefs.{key}"
            try:
                sid = int(key)
            except ValueError:
                _fail(ScenarioError.UNKNOWN_KEY, where,
                      "keys are sensor ids or 'default'")
            if not 1 <= sid <= N:
                _fail(ScenarioError.BAD_VALUE, where,
                      f"sensor id outside 1..{N}")
            beliefs[sid] = _belief_set(value, where, n)

    run_raw = _require(raw, "run", "$")
    _check_keys(run_raw, _RUN_KEYS, "run")
    horizon = _require(run_raw, "horizon", "run")
    seed = _require(run_raw, "seed", "run")
    if not isinstance(horizon, int) or horizon < 0:
        _fail(ScenarioError.BAD_VALUE, "run.horizon",
              "expected a non-negative integer")
    if not isinstance(seed, int):
        _fail(ScenarioError.BAD_VALUE, "run.seed", "expected an integer")
    max_gen = run_raw.get("max_gen", DEFAULT_GEN_FACTOR * n)
    max_con = run_raw.get("max_con", DEFAULT_CON_FACTOR * n)
    if not isinstance(max_gen, int) or max_gen < n:
        _fail(ScenarioError.BAD_VALUE, "run.max_gen",
              f"expected an integer >= {n}")
    if not isinstance(max_con, int) or max_con < 0:
        _fail(ScenarioError.BAD_VALUE, "run.max_con",
              "expected a non-negative integer")
    tol = Tolerances()
    if "tolerances" in run_raw:
        tol_raw = run_raw["tolerances"]
        _check_keys(tol_raw, _TOL_KEYS, "run.tolerances")
        tol = Tolerances(
            rank=float(tol_raw.get("rank", tol.rank)),
            eig=float(tol_raw.get("eig", tol.eig)),
        )
        if tol.rank <= 0 or tol.eig <= 0:
            _fail(ScenarioError.BAD_VALUE, "run.tolerances",
                  "tolerances must be positive")

    return Scenario(plant=plant, sensors=tuple(sensors), graph=graph,
                    initial_beliefs=beliefs, true_initial_state=x0,
                    horizon=horizon, seed=seed,
                    max_gen=max_gen, max_con=max_con, tolerances=tol)


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        _fail(ScenarioError.PARSE_ERROR, str(path), str(err))
    return loads_scenario(text)


def _floats(arr) -> list:
    return [float(v) for v in np.asarray(arr).ravel()]


def _matrix_rows(mat) -> list:
    mat = np.asarray(mat)
    return [[float(v) for v in row] for row in mat]


def _set_to_dict(belief: ConstrainedZonotope) -> dict:
    cz = {"center": _floats(belief.center),
          "generators": _matrix_rows(belief.generators)}
    if belief.num_constraints:
        cz["conA"] = _matrix_rows(belief.con_a)
        cz["conB"] = _floats(belief.con_b)
    return {"cz": cz}


def scenario_to_dict(scenario: Scenario, description=None) -> dict:
    out: dict = {}
    if description:
        out["description"] = description
    plant = scenario.plant
    out["plant"] = {
        "A": _matrix_rows(plant.A),
        "B": _matrix_rows(plant.B),
        "W": {"lo": _floats(plant.W.lower), "hi": _floats(plant.W.upper)},
    }
    out["sensors"] = []
    for s in scenario.sensors:
        entry: dict = {"id": s.id}
        if s.num_outputs:
            entry["C"] = _matrix_rows(s.C)
            entry["V"] = {"lo": _floats(s.V.lower),
                          "hi": _floats(s.V.upper)}
        out["sensors"].append(entry)
    out["graph"] = {"edges": [[j, i]
                              for j, i in sorted(scenario.graph.edges)]}
    out["init"] = {
        "true_x0": _floats(scenario.true_initial_state),
        "beliefs": {str(i): _set_to_dict(b)
                    for i, b in sorted(scenario.initial_beliefs.items())},
    }
    out["run"] = {
        "horizon": scenario.horizon,
        "seed": scenario.seed,
        "max_gen": scenario.max_gen,
        "max_con": scenario.max_con,
        "tolerances": {"rank": scenario.tolerances.rank,
                       "eig": scenario.tolerances.eig},
    }
    return out


def save_scenario(scenario: Scenario, path, description=None) -> None:
    data = scenario_to_dict(scenario, description=description)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def bundled_scenario_path(name: str = "paper_sec5") -> str:
    """Filesystem path of a scenario shipped with the package."""
    ref = resources.files("dsmf").joinpath(f"data/{name}.scenario")
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return str(ref)


def load_bundled(name: str = "paper_sec5") -> Scenario:
    return load_scenario(bundled_scenario_path(name))
