"""Scenario files: one transfer experiment as a JSON document.

See ``SCENARIO_SCHEMA`` for the accepted keys.  Parsing validates the
document, resolves frequency rules and returns a frozen ``Scenario``;
``Scenario.to_dict`` emits the normalised form, which parses back to an
equal object.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ccaqst import lattice, pgst
from ccaqst.constants import DEFAULT_SECTOR_BUDGET, DEFAULT_TAIL_TOL
from ccaqst.errors import AnalysisError, CcaError, InvalidConfigurationError, ScenarioError
from ccaqst.fock import StateSpec, TransferSetup, bose_occupancy, default_cutoff, expand_thermal

_number = {"type": "number"}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}

STATE_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {
            "properties": {"kind": {"const": "fock"}, "level": {"type": "integer", "minimum": 0}},
            "required": ["level"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "fock"},
                "coefficients": {"type": "array", "items": _complex, "minItems": 1},
            },
            "required": ["coefficients"],
            "additionalProperties": False,
        },
        {
            "properties": {"kind": {"const": "coherent"}, "amplitude": _complex},
            "required": ["amplitude"],
            "additionalProperties": False,
        },
        {
            "properties": {"kind": {"const": "thermal"}, "beta": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["beta"],
            "additionalProperties": False,
        },
        {
            "properties": {"kind": {"const": "thermal"}, "n_bar": {"type": "number", "minimum": 0}},
            "required": ["n_bar"],
            "additionalProperties": False,
        },
    ],
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["n", "coupling", "sent_state", "rest_states", "time_grid"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": 1},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "n": {"type": "integer", "minimum": 2},
        "coupling": {
            "type": "object",
            "required": ["scheme"],
            "properties": {
                "scheme": {"enum": ["uniform", "modulated", "ballistic", "custom"]},
                "j": {"type": "number", "exclusiveMinimum": 0},
                "k": {"type": "integer", "minimum": 0},
                "j_end": {"type": "number"},
                "j_bulk": {"type": "number", "exclusiveMinimum": 0},
                "values": {"type": "array", "items": _number},
            },
            "additionalProperties": False,
        },
        "omega": {"type": "number", "minimum": 0},
        "omega_rule": {
            "type": "object",
            "required": ["kind", "k"],
            "properties": {
                "kind": {"enum": ["uniform_pgst", "modulated"]},
                "k": {"type": "integer", "minimum": 0},
                "tau": {"type": "number", "exclusiveMinimum": 0},
                "t_max": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "omega_source": {"type": "object"},
        "sent_state": STATE_SCHEMA,
        "rest_states": {"oneOf": [STATE_SCHEMA, {"type": "array", "items": STATE_SCHEMA}]},
        "time_grid": {
            "type": "object",
            "required": ["start", "end", "points"],
            "properties": {
                "start": {"type": "number", "minimum": 0},
                "end": _number,
                "points": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "cutoff": {"type": "integer", "minimum": 2},
        "tail_tol": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "thermal_omega": {"type": "number", "exclusiveMinimum": 0},
        "thermal_model": {"enum": ["local", "unit"]},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "budget": {"type": "integer", "minimum": 1},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)

MIN_RULE_MAGNITUDE = 0.5


def _cplx(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)


def _cplx_json(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _normalise_state(doc: dict) -> dict:
    kind = doc["kind"]
    if kind == "fock" and "level" in doc:
        return {"kind": "fock", "level": int(doc["level"])}
    if kind == "fock":
        return {"kind": "fock", "coefficients": [_cplx_json(_cplx(c)) for c in doc["coefficients"]]}
    if kind == "coherent":
        return {"kind": "coherent", "amplitude": _cplx_json(_cplx(doc["amplitude"]))}
    if "beta" in doc:
        return {"kind": "thermal", "beta": float(doc["beta"])}
    return {"kind": "thermal", "n_bar": float(doc["n_bar"])}


@dataclass(frozen=True)
class Scenario:
    """A validated experiment description with its frequency resolved."""

    n: int
    coupling: dict
    omega: float
    sent_state: dict
    rest_states: tuple
    time_grid: tuple[float, float, int]
    cutoff: int
    tail_tol: float = DEFAULT_TAIL_TOL
    thermal_omega: float | None = None
    thermal_model: str = "local"
    tau: float | None = None
    budget: int = DEFAULT_SECTOR_BUDGET
    name: str = ""
    omega_rule: dict | None = field(default=None, compare=False)

    # -- resolved objects -------------------------------------------------

    @property
    def array(self) -> lattice.CavityArray:
        return _build_array(self.n, self.coupling, self.omega)

    @property
    def thermal_frequency(self) -> float:
        if self.thermal_omega is not None:
            return self.thermal_omega
        return 1.0 if self.thermal_model == "unit" else self.omega

    def state_spec(self, doc: dict) -> StateSpec:
        return _state_spec(doc, self.thermal_frequency)

    def sent_spec(self) -> StateSpec:
        return self.state_spec(self.sent_state)

    def rest_specs(self) -> tuple[StateSpec, ...]:
        return tuple(self.state_spec(d) for d in self.rest_states)

    def times(self) -> np.ndarray:
        start, end, points = self.time_grid
        return np.linspace(start, end, points)

    def setup(self) -> TransferSetup:
        return TransferSetup(self.array, self.sent_spec(), self.rest_specs(), self.cutoff, self.tail_tol,
                             self.budget)

    def to_dict(self) -> dict:
        out = {
            "schema_version": 1,
            "name": self.name,
            "n": self.n,
            "coupling": dict(self.coupling),
            "omega": self.omega,
            "sent_state": dict(self.sent_state),
            "rest_states": [dict(d) for d in self.rest_states],
            "time_grid": {"start": self.time_grid[0], "end": self.time_grid[1], "points": self.time_grid[2]},
            "cutoff": self.cutoff,
            "tail_tol": self.tail_tol,
            "thermal_model": self.thermal_model,
            "budget": self.budget,
        }
        if self.thermal_omega is not None:
            out["thermal_omega"] = self.thermal_omega
        if self.tau is not None:
            out["tau"] = self.tau
        if self.omega_rule is not None:
            out["omega_source"] = dict(self.omega_rule)
        return out


def _state_spec(doc: dict, thermal_frequency: float) -> StateSpec:
    kind = doc["kind"]
    if kind == "fock" and "level" in doc:
        return StateSpec.fock(doc["level"])
    if kind == "fock":
        return StateSpec.superposition([_cplx(c) for c in doc["coefficients"]])
    if kind == "coherent":
        return StateSpec.coherent(_cplx(doc["amplitude"]))
    if "n_bar" in doc:
        return StateSpec.thermal(doc["n_bar"])
    return StateSpec.thermal(bose_occupancy(doc["beta"], thermal_frequency))


def _build_array(n: int, coupling: dict, omega: float) -> lattice.CavityArray:
    scheme = coupling["scheme"]
    if scheme == "uniform":
        return lattice.build_uniform(n, coupling.get("j", 1.0), omega)
    if scheme == "modulated":
        return lattice.build_modulated(n, coupling.get("k", 0), omega)
    if scheme == "ballistic":
        if "j_end" not in coupling:
            raise ScenarioError("coupling.j_end", "required for the ballistic scheme")
        return lattice.build_ballistic(n, coupling["j_end"], coupling.get("j_bulk", 1.0), omega)
    values = coupling.get("values")
    if values is None:
        raise ScenarioError("coupling.values", "required for the custom scheme")
    if len(values) != n - 1:
        raise ScenarioError("coupling.values", f"expected {n - 1} couplings, got {len(values)}")
    return lattice.build_custom(values, omega)


def resolve_omega_rule(array: lattice.CavityArray, rule: dict) -> float:
    n = array.n_cavities
    k = rule["k"]
    if rule["kind"] == "modulated":
        omega = 4 * k + 1 - n
    else:
        bare = array.with_omega(0.0)
        if "tau" in rule:
            tau = float(rule["tau"])
            value = complex(pgst.alpha_end(bare, tau))
            magnitude, phase = abs(value), math.atan2(value.imag, value.real)
        else:
            window = pgst.find_transfer_time(bare, rule.get("t_max", 5.0 * n), grid=max(4000, int(40 * rule.get("t_max", 5.0 * n))))
            tau, magnitude, phase = window.tau, window.magnitude, window.phase
        if magnitude < MIN_RULE_MAGNITUDE:
            raise AnalysisError(
                f"omega_rule: |alpha_N| only reaches {magnitude:.3f} at tau={tau:.4f}; no usable transfer time")
        omega = pgst.phase_matching_omega(tau, phase, k)
    if omega < -1e-12:
        raise ScenarioError("omega_rule", f"rule resolves to negative omega {omega:g}; increase k")
    return max(float(omega), 0.0)


def _field_path(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    return path or "<root>"


def _check_cutoff(cutoff: int, specs, tail_tol: float) -> None:
    if cutoff < 2:
        raise InvalidConfigurationError(f"cutoff must be at least 2, got {cutoff}")
    for spec in specs:
        if spec.is_pure:
            spec.levels(cutoff, tail_tol)
        else:
            expand_thermal(spec.n_bar, cutoff, tail_tol)


def parse_scenario_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("<root>", "scenario must be a JSON object")
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ScenarioError(_field_path(err), err.message)

    n = doc["n"]
    grid = doc["time_grid"]
    start, end, points = float(grid["start"]), float(grid["end"]), int(grid["points"])
    if points < 2:
        raise ScenarioError("time_grid.points", f"need at least 2 points, got {points}")
    if not end > start:
        raise ScenarioError("time_grid.end", f"end ({end}) must exceed start ({start})")

    has_omega, has_rule = "omega" in doc, "omega_rule" in doc
    if has_omega == has_rule:
        raise ScenarioError("omega", "give exactly one of 'omega' or 'omega_rule'")

    coupling = dict(doc["coupling"])
    try:
        bare = _build_array(n, coupling, 0.0)
    except ScenarioError:
        raise
    except InvalidConfigurationError as exc:
        raise ScenarioError("coupling", str(exc)) from exc
    if has_rule:
        rule = dict(doc["omega_rule"])
        omega = resolve_omega_rule(bare, rule)
    else:
        rule = doc.get("omega_source")
        omega = float(doc["omega"])

    rest_doc = doc["rest_states"]
    if isinstance(rest_doc, dict):
        rest = tuple(_normalise_state(rest_doc) for _ in range(n - 1))
    else:
        if len(rest_doc) != n - 1:
            raise ScenarioError("rest_states", f"expected {n - 1} states (or one to broadcast), got {len(rest_doc)}")
        rest = tuple(_normalise_state(d) for d in rest_doc)
    sent = _normalise_state(doc["sent_state"])
    if sent["kind"] == "thermal":
        raise ScenarioError("sent_state", "the sent state must be pure")

    tail_tol = float(doc.get("tail_tol", DEFAULT_TAIL_TOL))
    thermal_omega = doc.get("thermal_omega")
    thermal_model = doc.get("thermal_model", "local")
    w_th = thermal_omega if thermal_omega is not None else (1.0 if thermal_model == "unit" else omega)
    needs_thermal = any(d["kind"] == "thermal" and "beta" in d for d in rest)
    if needs_thermal and not w_th > 0:
        raise ScenarioError("thermal_omega", "thermal states given by beta need a positive mode frequency")
    try:
        sent_spec = _state_spec(sent, w_th)
    except CcaError as exc:
        raise ScenarioError("sent_state", str(exc)) from exc
    try:
        rest_specs = [_state_spec(d, w_th) for d in rest]
    except CcaError as exc:
        raise ScenarioError("rest_states", str(exc)) from exc
    try:
        cutoff = int(doc["cutoff"]) if "cutoff" in doc else default_cutoff(sent_spec, rest_specs, tail_tol)
        _check_cutoff(cutoff, [sent_spec, *rest_specs], tail_tol)
    except CcaError as exc:
        raise ScenarioError("cutoff", str(exc)) from exc

    return Scenario(
        n=n,
        coupling=coupling,
        omega=omega,
        sent_state=sent,
        rest_states=rest,
        time_grid=(start, end, points),
        cutoff=cutoff,
        tail_tol=tail_tol,
        thermal_omega=None if thermal_omega is None else float(thermal_omega),
        thermal_model=thermal_model,
        tau=None if "tau" not in doc else float(doc["tau"]),
        budget=int(doc.get("budget", DEFAULT_SECTOR_BUDGET)),
        name=doc.get("name", ""),
        omega_rule=None if rule is None else dict(rule),
    )


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ScenarioError("<file>", f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError("<file>", f"invalid JSON: {exc}") from exc
    return parse_scenario_dict(doc)


# -- presets ---------------------------------------------------------------

FIGURES = ("fig1", "fig2", "fig3")


def preset_index() -> dict:
    return json.loads(resources.files("ccaqst.presets").joinpath("index.json").read_text(encoding="utf-8"))


def preset_document(name: str) -> dict:
    return json.loads(resources.files("ccaqst.presets").joinpath(f"{name}.json").read_text(encoding="utf-8"))


def load_preset(name: str) -> Scenario:
    return parse_scenario_dict(preset_document(name))


def figure_presets(figure: str) -> list[dict]:
    """Curve entries ({"name", "style", "pair"}) for one figure."""
    index = preset_index()
    if figure not in index:
        raise InvalidConfigurationError(f"unknown figure {figure!r}; choose from {sorted(index)}")
    return index[figure]["curves"]
