"""JSON and CSV serialization.

Matrices are written row-major as ``{"re": [[...]], "im": [[...]]}``.
Every document is checked against a JSON schema on both read and write.
Infinite values are written as the string ``"inf"``.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .core import (
    DensityMatrix,
    Effect,
    ModelRepresentation,
    ProbabilityTable,
    map_from_kraus,
    map_from_unitary,
    superop_from_choi,
    QuantumMap,
)
from .errors import InvalidArgument
from .gauge import GaugeTransform, antiunitary_gauge, depolarizing, unitary_gauge
from .tomography import GstDataset

_REAL_GRID = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_REAL_ARRAY = {"type": "array"}  # 2-D or 3-D (kraus)

_ELEMENT = {
    "type": "object",
    "required": ["re", "im"],
    "properties": {"label": {"type": "string"}, "re": _REAL_ARRAY, "im": _REAL_ARRAY},
    "additionalProperties": False,
}
_MAP = {
    "type": "object",
    "required": ["kind", "re", "im"],
    "properties": {
        "label": {"type": "string"},
        "kind": {"enum": ["superop", "choi", "kraus", "unitary"]},
        "re": _REAL_ARRAY,
        "im": _REAL_ARRAY,
    },
    "additionalProperties": False,
}
MODEL_SCHEMA = {
    "type": "object",
    "required": ["dim", "states", "maps", "effects"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "unitary_complete": {"type": "boolean"},
        "label": {"type": "string"},
        "extra_maps": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "states": {"type": "array", "items": _ELEMENT},
        "maps": {"type": "array", "items": _MAP},
        "effects": {"type": "array", "items": _ELEMENT},
    },
    "additionalProperties": False,
}
GAUGE_SCHEMA = {
    "type": "object",
    "required": ["dim", "kind"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "kind": {"enum": ["superop", "unitary", "antiunitary", "depolarizing"]},
        "label": {"type": "string"},
        "F": {"type": "number"},
        "re": _REAL_GRID,
        "im": _REAL_GRID,
    },
    "additionalProperties": False,
}
_PVEC = {"type": "array", "items": {"type": "number"}}
DATASET_SCHEMA = {
    "type": "object",
    "required": ["dim", "kind", "g", "maps", "state_indices", "effect_indices",
                 "state_labels", "effect_labels"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "kind": {"enum": ["exact", "sampled"]},
        "shots": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "g": _REAL_GRID,
        "maps": {"type": "object", "additionalProperties": _REAL_GRID},
        "state_indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "effect_indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "state_labels": {"type": "array", "items": {"type": "string"}},
        "effect_labels": {"type": "array", "items": {"type": "string"}},
        "extra_states": {"type": "object", "additionalProperties": _PVEC},
        "extra_effects": {"type": "object", "additionalProperties": _PVEC},
    },
    "additionalProperties": False,
}
VERDICT_SCHEMA = {
    "type": "object",
    "required": ["status", "diagnostics"],
    "properties": {
        "status": {"enum": ["Trivial", "NotUnique", "NecessaryConditionHolds",
                            "UniqueByTheorem2", "UniqueByTheorem3"]},
        "F": {"type": ["number", "string", "null"]},
        "diagnostics": {"type": "object"},
        "counterexample": MODEL_SCHEMA,
    },
    "additionalProperties": False,
}


def validate(doc: dict, schema: dict, what: str = "document") -> dict:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise InvalidArgument(f"invalid {what}: {exc.message}") from None
    return doc


# ---------------------------------------------------------------------------
# Primitive encoders
# ---------------------------------------------------------------------------


def encode_matrix(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def decode_matrix(doc: dict) -> np.ndarray:
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float)
    if re.shape != im.shape:
        raise InvalidArgument(f"re/im shapes differ: {re.shape} vs {im.shape}")
    return re + 1j * im


def jsonable(x):
    """Recursively convert numpy scalars/arrays, tuples and infinities."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return encode_matrix(x)
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        f = float(x)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def decode_float(x) -> float:
    if isinstance(x, str):
        return float(x)  # "inf" / "-inf"
    return float(x)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _write(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc))


def _read(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: not valid JSON ({exc})") from None


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


def model_to_dict(rep: ModelRepresentation) -> dict:
    doc = {"dim": rep.dim, "unitary_complete": rep.unitary_complete}
    if rep.label:
        doc["label"] = rep.label
    if rep.extra_maps:
        doc["extra_maps"] = list(rep.extra_maps)
    doc["states"] = [{"label": s.label, **encode_matrix(s.mat)} for s in rep.states]
    doc["maps"] = [{"label": m.label, "kind": "superop", **encode_matrix(m.superop)}
                   for m in rep.maps]
    doc["effects"] = [{"label": e.label, **encode_matrix(e.mat)} for e in rep.effects]
    return validate(doc, MODEL_SCHEMA, "model")


def _decode_map(doc: dict) -> QuantumMap:
    label = doc.get("label", "")
    data = decode_matrix(doc)
    kind = doc["kind"]
    if kind == "superop":
        return QuantumMap(data, label)
    if kind == "choi":
        return superop_from_choi(data, label)
    if kind == "unitary":
        return map_from_unitary(data, label)
    if data.ndim != 3:
        raise InvalidArgument("kraus maps need a list of matrices in re/im")
    return map_from_kraus(list(data), label)


def model_from_dict(doc: dict) -> ModelRepresentation:
    validate(doc, MODEL_SCHEMA, "model")
    states = [DensityMatrix(decode_matrix(s), s.get("label", "")) for s in doc["states"]]
    maps = [_decode_map(m) for m in doc["maps"]]
    effects = [Effect(decode_matrix(e), e.get("label", "")) for e in doc["effects"]]
    return ModelRepresentation(doc["dim"], states, maps, effects,
                               unitary_complete=doc.get("unitary_complete", False),
                               label=doc.get("label", ""),
                               extra_maps=tuple(doc.get("extra_maps", ())))


def save_model(rep: ModelRepresentation, path) -> None:
    _write(model_to_dict(rep), path)


def load_model(path) -> ModelRepresentation:
    """Read a model file; documents wrapping a model under ``"model"`` are unwrapped."""
    doc = _read(path)
    if isinstance(doc, dict) and "dim" not in doc and isinstance(doc.get("model"), dict):
        doc = doc["model"]
    return model_from_dict(doc)


# ---------------------------------------------------------------------------
# Gauges
# ---------------------------------------------------------------------------


def gauge_to_dict(t: GaugeTransform) -> dict:
    doc = {"dim": t.dim, "kind": "superop", "label": t.label, **encode_matrix(t.superop)}
    return validate(doc, GAUGE_SCHEMA, "gauge")


def gauge_from_dict(doc: dict) -> GaugeTransform:
    validate(doc, GAUGE_SCHEMA, "gauge")
    kind, dim = doc["kind"], doc["dim"]
    if kind == "depolarizing":
        if "F" not in doc:
            raise InvalidArgument("depolarizing gauge needs F")
        return depolarizing(doc["F"], dim)
    if "re" not in doc or "im" not in doc:
        raise InvalidArgument(f"{kind} gauge needs re/im")
    m = decode_matrix(doc)
    if kind == "unitary":
        g = unitary_gauge(m)
    elif kind == "antiunitary":
        g = antiunitary_gauge(m)
    else:
        g = GaugeTransform(m, doc.get("label", ""))
    if g.dim != dim:
        raise InvalidArgument(f"gauge matrix does not act on d={dim}")
    return g


def save_gauge(t: GaugeTransform, path) -> None:
    _write(gauge_to_dict(t), path)


def load_gauge(path) -> GaugeTransform:
    return gauge_from_dict(_read(path))


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


def _unique_labels(labels) -> list[str]:
    seen: dict = {}
    out = []
    for j, lab in enumerate(labels):
        key = lab if lab not in seen else f"{lab}#{j}"
        seen[key] = True
        out.append(key)
    return out


def dataset_to_dict(ds: GstDataset) -> dict:
    doc = {"dim": ds.dim, "kind": ds.kind}
    if ds.shots is not None:
        doc["shots"] = ds.shots
    if ds.seed is not None:
        doc["seed"] = ds.seed
    keys = _unique_labels([lab for lab, _ in ds.maps])
    doc.update({
        "g": np.asarray(ds.g, dtype=float).tolist(),
        "maps": {key: np.asarray(gj, dtype=float).tolist()
                 for key, (_, gj) in zip(keys, ds.maps)},
        "state_indices": list(ds.state_indices),
        "effect_indices": list(ds.effect_indices),
        "state_labels": list(ds.state_labels),
        "effect_labels": list(ds.effect_labels),
        "extra_states": {str(i): np.asarray(p, dtype=float).tolist()
                         for i, p in sorted(ds.extra_states.items())},
        "extra_effects": {str(k): np.asarray(p, dtype=float).tolist()
                          for k, p in sorted(ds.extra_effects.items())},
    })
    return validate(doc, DATASET_SCHEMA, "dataset")


def dataset_from_dict(doc: dict) -> GstDataset:
    validate(doc, DATASET_SCHEMA, "dataset")
    return GstDataset(
        dim=doc["dim"],
        g=np.asarray(doc["g"], dtype=float),
        maps=[(lab, np.asarray(gj, dtype=float)) for lab, gj in doc["maps"].items()],
        state_indices=tuple(doc["state_indices"]),
        effect_indices=tuple(doc["effect_indices"]),
        state_labels=list(doc["state_labels"]),
        effect_labels=list(doc["effect_labels"]),
        extra_states={int(i): np.asarray(p, dtype=float)
                      for i, p in doc.get("extra_states", {}).items()},
        extra_effects={int(k): np.asarray(p, dtype=float)
                       for k, p in doc.get("extra_effects", {}).items()},
        kind=doc["kind"],
        shots=doc.get("shots"),
        seed=doc.get("seed"),
    )


def save_dataset(ds: GstDataset, path) -> None:
    _write(dataset_to_dict(ds), path)


def load_dataset(path) -> GstDataset:
    return dataset_from_dict(_read(path))


# ---------------------------------------------------------------------------
# Verdicts and tables
# ---------------------------------------------------------------------------


def verdict_to_dict(verdict) -> dict:
    doc = {"status": verdict.status, "F": jsonable(verdict.F),
           "diagnostics": jsonable(verdict.diagnostics)}
    if verdict.counterexample is not None:
        doc["counterexample"] = model_to_dict(verdict.counterexample)
    return validate(doc, VERDICT_SCHEMA, "verdict")


def table_to_csv(table: ProbabilityTable) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    sampled = table.kind == "sampled"
    writer.writerow(["i", "seq", "k", "p"] + (["shots"] if sampled else []))
    for i, seq, k, p in table.to_rows():
        writer.writerow([i, seq, k, repr(float(p))] + ([table.shots] if sampled else []))
    return buf.getvalue()


def table_from_csv(text: str) -> list[tuple]:
    """Rows ``(i, seq tuple, k, p)`` parsed back from :func:`table_to_csv`."""
    rows = []
    for rec in csv.DictReader(_io.StringIO(text)):
        seq = tuple(int(j) for j in rec["seq"].split(";")) if rec["seq"] else ()
        rows.append((int(rec["i"]), seq, int(rec["k"]), float(rec["p"])))
    return rows


__all__ = [
    "MODEL_SCHEMA", "GAUGE_SCHEMA", "DATASET_SCHEMA", "VERDICT_SCHEMA", "validate",
    "encode_matrix", "decode_matrix", "jsonable", "dumps",
    "model_to_dict", "model_from_dict", "save_model", "load_model",
    "gauge_to_dict", "gauge_from_dict", "save_gauge", "load_gauge",
    "dataset_to_dict", "dataset_from_dict", "save_dataset", "load_dataset",
    "verdict_to_dict", "table_to_csv", "table_from_csv",
]
