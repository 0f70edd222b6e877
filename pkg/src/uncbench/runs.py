"""JSON documents: scenario specs, run records, sweep and search specs."""
from dataclasses import dataclass, field
import csv
import datetime
import io
import math

from . import __version__, config
from .bounds import INEQUALITIES, BoundReport, ReportOptions, full_report
from .errors import InputError, SpecError, UncbenchError
from .models import MODELS, STATE_KINDS, pair_names, scenario
from .search import (
    FAMILIES,
    SaturationOptions,
    ViolationOptions,
    family_spec,
    saturation_search,
    violation_search,
)

SCHEMA_VERSION = 1

PARAM_FIELDS = {
    "oscillator": {"n_trunc": (int, True), "hbar": (float, False)},
    "spin": {"j": (float, True)},
}
STATE_FIELDS = {
    "fock": {"k": (int, True)},
    "coherent": {"re": (float, True), "im": (float, True)},
    "bloch": {"theta": (float, True), "phi": (float, False)},
}


def _require_mapping(data, where):
    if not isinstance(data, dict):
        raise SpecError(where, "expected a JSON object")
    return data


def _number(value, kind, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(where, f"expected a number, got {value!r}")
    if kind is int:
        if value != int(value):
            raise SpecError(where, f"expected an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise SpecError(where, "must be finite")
    return value


def _fields(data, schema, where):
    data = _require_mapping(data, where)
    for key in data:
        if key not in schema:
            raise SpecError(f"{where}.{key}", "unknown field")
    out = {}
    for key, (kind, required) in schema.items():
        if key in data:
            out[key] = _number(data[key], kind, f"{where}.{key}")
        elif required:
            raise SpecError(f"{where}.{key}", "missing required field")
    return out


def _check_version(data, where="schema_version"):
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpecError(where, f"unsupported schema version {version!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    model: str
    params: dict
    state: dict
    pair: tuple
    evaluate: tuple = None
    tolerances: dict = None

    @classmethod
    def from_dict(cls, data):
        data = _require_mapping(data, "scenario")
        _check_version(data)
        allowed = {"schema_version", "model", "params", "state", "pair", "evaluate", "tolerances"}
        for key in data:
            if key not in allowed:
                raise SpecError(key, "unknown field")
        model = data.get("model")
        if model not in MODELS:
            raise SpecError("model", f"unknown model {model!r}; expected one of {list(MODELS)}")
        params = _fields(data.get("params", {}), PARAM_FIELDS[model], "params")

        state = _require_mapping(data.get("state"), "state")
        kind = state.get("kind")
        if kind not in STATE_KINDS[model]:
            raise SpecError("state.kind", f"unknown state kind {kind!r} for model {model!r}")
        rest = {k: v for k, v in state.items() if k != "kind"}
        state = {"kind": kind, **_fields(rest, STATE_FIELDS[kind], "state")}

        pair = data.get("pair")
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise SpecError("pair", "expected a list of two operator names")
        names = pair_names(model)
        for i, name in enumerate(pair):
            if name not in names:
                raise SpecError(f"pair[{i}]", f"unknown operator {name!r}; expected one of {list(names)}")

        evaluate = data.get("evaluate")
        if evaluate is not None:
            if not isinstance(evaluate, (list, tuple)):
                raise SpecError("evaluate", "expected a list of inequality ids")
            for i, ident in enumerate(evaluate):
                if ident not in INEQUALITIES:
                    raise SpecError(f"evaluate[{i}]", f"unknown inequality {ident!r}")
            evaluate = tuple(evaluate)

        tolerances = data.get("tolerances")
        if tolerances is not None:
            _require_mapping(tolerances, "tolerances")
            for key, value in tolerances.items():
                where = f"tolerances.{key}"
                _number(value, float, where)
                try:
                    config.check_overrides({key: value})
                except InputError as exc:
                    raise SpecError(where, str(exc)) from None
            tolerances = {k: float(v) for k, v in tolerances.items()}
        return cls(model, params, state, tuple(pair), evaluate, tolerances)

    def to_dict(self):
        out = {
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "params": dict(self.params),
            "state": dict(self.state),
            "pair": list(self.pair),
        }
        if self.evaluate is not None:
            out["evaluate"] = list(self.evaluate)
        if self.tolerances is not None:
            out["tolerances"] = dict(self.tolerances)
        return out

    def replace_value(self, path, value):
        """Copy with ``params.<name>`` or ``state.<name>`` set to ``value``."""
        section, _, name = path.partition(".")
        data = self.to_dict()
        if section not in ("params", "state") or not name or name == "kind":
            raise SpecError("sweep.param", f"cannot sweep {path!r}")
        data[section][name] = value
        return ScenarioSpec.from_dict(data)


def run_scenario(spec):
    sc = scenario(spec)
    meta = sc.metadata
    options = ReportOptions(
        evaluate=spec.evaluate,
        oscillator=meta.get("oscillator_moments"),
        hbar=meta.get("hbar", 1.0),
        notes=tuple(meta.get("notes", ())),
        tolerances=spec.tolerances,
    )
    return full_report(sc.A, sc.B, sc.psi, options)


@dataclass
class RunRecord:
    spec: ScenarioSpec
    report: BoundReport
    versions: dict = field(default_factory=lambda: {"tool": __version__, "schema": SCHEMA_VERSION})
    timestamp: str = ""
    seed: int = None

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "spec": self.spec.to_dict(),
            "report": self.report.as_dict(),
            "versions": dict(self.versions),
            "timestamp": self.timestamp,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        _check_version(data)
        return cls(
            spec=ScenarioSpec.from_dict(data["spec"]),
            report=BoundReport.from_dict(data["report"]),
            versions=dict(data["versions"]),
            timestamp=data["timestamp"],
            seed=data.get("seed"),
        )


def make_record(spec, seed=None):
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return RunRecord(spec=spec, report=run_scenario(spec), timestamp=stamp, seed=seed)


# ---- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    scenario: ScenarioSpec
    param: str
    start: float
    stop: float
    step: float

    @classmethod
    def from_dict(cls, data):
        data = _require_mapping(data, "sweep document")
        _check_version(data)
        for key in data:
            if key not in ("schema_version", "scenario", "sweep"):
                raise SpecError(key, "unknown field")
        spec = ScenarioSpec.from_dict(data.get("scenario"))
        sweep = data.get("sweep")
        if isinstance(sweep, list):
            raise SpecError("sweep", "exactly one swept parameter is allowed")
        sweep = _require_mapping(sweep, "sweep")
        for key in sweep:
            if key not in ("param", "start", "stop", "step"):
                raise SpecError(f"sweep.{key}", "unknown field")
        param = sweep.get("param")
        if not isinstance(param, str):
            raise SpecError("sweep.param", "expected a parameter path such as 'state.theta'")
        section, _, name = param.partition(".")
        schema = PARAM_FIELDS[spec.model] if section == "params" else (
            STATE_FIELDS[spec.state["kind"]] if section == "state" else {})
        if name not in schema:
            raise SpecError("sweep.param", f"cannot sweep {param!r} for this scenario")
        vals = {}
        for key in ("start", "stop", "step"):
            if key not in sweep:
                raise SpecError(f"sweep.{key}", "missing required field")
            vals[key] = _number(sweep[key], float, f"sweep.{key}")
        if not vals["step"] > 0:
            raise SpecError("sweep.step", "step must be positive")
        if vals["stop"] < vals["start"]:
            raise SpecError("sweep.stop", "stop must not be below start")
        return cls(spec, param, vals["start"], vals["stop"], vals["step"])

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario.to_dict(),
            "sweep": {"param": self.param, "start": self.start, "stop": self.stop, "step": self.step},
        }

    def values(self):
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(count)]


def fmt(x):
    return format(float(x), ".17g")


def sweep_rows(sweep):
    """Rows (param, lhs, rhs, margin, inequality); undefined bounds give NaN."""
    wanted = sweep.scenario.evaluate or INEQUALITIES
    section, _, name = sweep.param.partition(".")
    kind = (PARAM_FIELDS[sweep.scenario.model] if section == "params"
            else STATE_FIELDS[sweep.scenario.state["kind"]])[name][0]
    rows = []
    for value in sweep.values():
        v = int(round(value)) if kind is int else value
        report = run_scenario(sweep.scenario.replace_value(sweep.param, v))
        found = {bv.id: bv for bv in report.bounds}
        for ident in wanted:
            bv = found.get(ident)
            if bv is None:
                rows.append((value, math.nan, math.nan, math.nan, ident))
            else:
                rows.append((value, bv.lhs, bv.rhs, bv.margin, ident))
    return rows


def sweep_csv(sweep):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "lhs", "rhs", "margin", "inequality"])
    for value, lhs, rhs, margin, ident in sweep_rows(sweep):
        writer.writerow([fmt(value), fmt(lhs), fmt(rhs), fmt(margin), ident])
    return buf.getvalue()


# ---- searches ---------------------------------------------------------------

@dataclass(frozen=True)
class SearchSpec:
    kind: str
    body: dict
    seed: int = None

    @classmethod
    def from_dict(cls, data):
        data = _require_mapping(data, "search document")
        _check_version(data)
        kind = data.get("kind")
        seed = data.get("seed")
        if seed is not None:
            seed = _number(seed, int, "seed")
            if seed < 0:
                raise SpecError("seed", "seed must be non-negative")
        if kind == "violation":
            allowed = {"schema_version", "kind", "seed", "family", "inequality",
                       "resolution", "starts", "tolerances"}
            for key in data:
                if key not in allowed:
                    raise SpecError(key, "unknown field")
            family = data.get("family")
            if isinstance(family, str):
                family = {"id": family}
            family = _require_mapping(family, "family")
            if family.get("id") not in FAMILIES:
                raise SpecError("family.id", f"unknown family {family.get('id')!r}")
            try:
                family_spec(family)
            except UncbenchError as exc:
                raise SpecError("family", str(exc)) from None
            ineq = data.get("inequality")
            if ineq not in INEQUALITIES:
                raise SpecError("inequality", f"unknown inequality {ineq!r}")
            body = {"family": family, "inequality": ineq}
            for key in ("resolution", "starts"):
                if key in data:
                    body[key] = _number(data[key], int, key)
                    if body[key] < 1:
                        raise SpecError(key, "must be at least 1")
            if "tolerances" in data:
                try:
                    body["tolerances"] = config.check_overrides(_require_mapping(data["tolerances"], "tolerances"))
                except InputError as exc:
                    raise SpecError("tolerances", str(exc)) from None
        elif kind == "saturation":
            allowed = {"schema_version", "kind", "seed", "model", "params", "pair",
                       "starts", "gamma_resolution"}
            for key in data:
                if key not in allowed:
                    raise SpecError(key, "unknown field")
            model = data.get("model")
            if model not in MODELS:
                raise SpecError("model", f"unknown model {model!r}")
            params = _fields(data.get("params", {}), PARAM_FIELDS[model], "params")
            pair = data.get("pair")
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise SpecError("pair", "expected a list of two operator names")
            for i, name in enumerate(pair):
                if name not in pair_names(model):
                    raise SpecError(f"pair[{i}]", f"unknown operator {name!r}")
            body = {"model": model, "params": params, "pair": list(pair)}
            for key in ("starts", "gamma_resolution"):
                if key in data:
                    body[key] = _number(data[key], int, key)
                    if body[key] < 1:
                        raise SpecError(key, "must be at least 1")
        else:
            raise SpecError("kind", f"expected 'violation' or 'saturation', got {kind!r}")
        return cls(kind, body, seed)

    def to_dict(self):
        out = {"schema_version": SCHEMA_VERSION, "kind": self.kind, **self.body}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def run_search(spec, seed):
    """Run a search document; returns the output document (a dict)."""
    b = spec.body
    if spec.kind == "violation":
        defaults = ViolationOptions()
        opts = ViolationOptions(
            seed=seed,
            resolution=b.get("resolution", defaults.resolution),
            starts=b.get("starts", defaults.starts),
            tolerances=b.get("tolerances"),
        )
        result = violation_search(b["family"], b["inequality"], opts)
    else:
        sc = scenario({"model": b["model"], "params": b["params"], "pair": b["pair"],
                       "state": {"kind": "fock", "k": 0} if b["model"] == "oscillator"
                       else {"kind": "bloch", "theta": 0.0}})
        defaults = SaturationOptions()
        opts = SaturationOptions(
            seed=seed,
            starts=b.get("starts", defaults.starts),
            gamma_resolution=b.get("gamma_resolution", defaults.gamma_resolution),
            edge_levels=2 if b["model"] == "oscillator" else 0,
        )
        result = saturation_search(sc.A, sc.B, opts=opts)
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "search": {**spec.to_dict(), "seed": seed},
        "status": result.status,
        "violation": result.status == "violation_certified",
        "result": result.as_dict(),
    }
