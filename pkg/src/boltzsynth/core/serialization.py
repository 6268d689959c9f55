"""
JSON file formats for distributions, models and support sets.

Every document carries a "schema" tag and readers reject tags they do not
know. Floats are written with Python's shortest round-trip repr, so a
write followed by a read reproduces every value bit for bit.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from ..systems.error_handling import (
    DimensionError,
    InputError,
    SchemaError,
)
from ..utils.constants import (
    NORMALIZATION_TOLERANCE,
    SCHEMA_DBN,
    SCHEMA_DIST,
    SCHEMA_RBM,
    SCHEMA_SUPPORT,
)
from .bitvector import BitVector, check_width
from .distribution import DiscreteDistribution, normalize
from .models import DbnModel, RbmModel, SigmoidLayer

logger = logging.getLogger(__name__)


def _float_list(values: np.ndarray) -> list[Any]:
    return list(values.tolist())


def _field(document: dict[str, Any], name: str, schema: str) -> Any:
    if name not in document:
        raise SchemaError(f"{schema} document is missing field '{name}'")
    return document[name]


def _integer(document: dict[str, Any], name: str, schema: str) -> int:
    value = _field(document, name, schema)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(
            f"{schema} field '{name}' must be an integer, got {value!r}"
        )
    return value


def _numeric_array(value: Any, name: str, schema: str) -> np.ndarray:
    """A rectangular array of JSON numbers as float64."""
    try:
        raw = np.asarray(value)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{schema} field '{name}' is not rectangular: {e}") from e
    if raw.size and raw.dtype.kind not in "iuf":
        raise SchemaError(f"{schema} field '{name}' must hold only numbers")
    return raw.astype(np.float64)


def _expect_schema(document: Any, *schemas: str) -> str:
    if not isinstance(document, dict):
        raise SchemaError("expected a JSON object at the top level")
    schema = document.get("schema")
    if schema not in schemas:
        raise SchemaError(
            f"unknown schema tag {schema!r}; expected one of {list(schemas)}"
        )
    return str(schema)


def load_document(path: str | Path) -> Any:
    """
    Read a JSON document from disk.

    Raises:
        InputError: If the file cannot be read
        SchemaError: If the file is not valid JSON
    """
    file_path = Path(path)
    try:
        with open(file_path, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise InputError(f"file not found: {file_path}") from e
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {file_path}: {e}")
        raise SchemaError(f"invalid JSON in {file_path}: {e}") from e
    except OSError as e:
        raise InputError(f"cannot read {file_path}: {e}") from e


def dump_document(document: dict[str, Any], path: str | Path) -> None:
    """Write a JSON document with a trailing newline."""
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_text(dumps_document(document), encoding="utf-8")


def dumps_document(document: dict[str, Any]) -> str:
    return json.dumps(document, indent=2) + "\n"


# Distributions


def distribution_to_dict(d: DiscreteDistribution) -> dict[str, Any]:
    return {"schema": SCHEMA_DIST, "n": d.n, "probs": _float_list(d.probs)}


def distribution_from_dict(document: Any) -> DiscreteDistribution:
    """
    Parse a dist/1 document.

    Tables whose total drifts from one by more than the normalization
    tolerance are rescaled with a warning; all-zero tables are rejected.
    """
    _expect_schema(document, SCHEMA_DIST)
    n = _integer(document, "n", SCHEMA_DIST)
    check_width(n)
    probs = _field(document, "probs", SCHEMA_DIST)
    if not isinstance(probs, list) or len(probs) != (1 << n):
        raise DimensionError(f"dist/1 with n={n} needs {1 << n} probabilities")
    d = DiscreteDistribution(n, _numeric_array(probs, "probs", SCHEMA_DIST))
    total = d.total()
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        logger.warning(f"Distribution sums to {total!r}; renormalizing")
        return normalize(d)
    return d


def write_distribution(d: DiscreteDistribution, path: str | Path) -> None:
    dump_document(distribution_to_dict(d), path)


def read_distribution(path: str | Path) -> DiscreteDistribution:
    return distribution_from_dict(load_document(path))


# Models


def rbm_to_dict(model: RbmModel) -> dict[str, Any]:
    return {
        "schema": SCHEMA_RBM,
        "n_visible": model.n_visible,
        "n_hidden": model.n_hidden,
        "W": _float_list(model.weights),
        "B": _float_list(model.visible_bias),
        "C": _float_list(model.hidden_bias),
    }


def rbm_from_dict(document: Any) -> RbmModel:
    _expect_schema(document, SCHEMA_RBM)
    n_visible = _integer(document, "n_visible", SCHEMA_RBM)
    n_hidden = _integer(document, "n_hidden", SCHEMA_RBM)
    if n_visible < 0 or n_hidden < 0:
        raise SchemaError(f"rbm/1 declares negative sizes {n_hidden}x{n_visible}")
    weights = _numeric_array(_field(document, "W", SCHEMA_RBM), "W", SCHEMA_RBM)
    model = RbmModel(
        weights if weights.size else np.zeros((n_hidden, n_visible)),
        _numeric_array(_field(document, "B", SCHEMA_RBM), "B", SCHEMA_RBM),
        _numeric_array(_field(document, "C", SCHEMA_RBM), "C", SCHEMA_RBM),
    )
    if model.n_visible != n_visible or model.n_hidden != n_hidden:
        raise DimensionError(
            f"rbm/1 declares {n_hidden}x{n_visible} but carries "
            f"{model.n_hidden}x{model.n_visible}"
        )
    return model


def layer_to_dict(layer: SigmoidLayer) -> dict[str, Any]:
    return {
        "n_in": layer.n_in,
        "n_out": layer.n_out,
        "weights": _float_list(layer.weights),
        "offsets": _float_list(layer.offsets),
    }


def layer_from_dict(document: Any) -> SigmoidLayer:
    if not isinstance(document, dict):
        raise SchemaError("layer entries must be JSON objects")
    layer = SigmoidLayer(
        _numeric_array(_field(document, "weights", SCHEMA_DBN), "weights", SCHEMA_DBN),
        _numeric_array(_field(document, "offsets", SCHEMA_DBN), "offsets", SCHEMA_DBN),
    )
    declared = (
        _integer(document, "n_in", SCHEMA_DBN),
        _integer(document, "n_out", SCHEMA_DBN),
    )
    if declared != (layer.n_in, layer.n_out):
        raise DimensionError(
            f"layer declares {declared[0]}->{declared[1]} but carries "
            f"{layer.n_in}->{layer.n_out}"
        )
    return layer


def dbn_to_dict(model: DbnModel) -> dict[str, Any]:
    return {
        "schema": SCHEMA_DBN,
        "n": model.width,
        "top": rbm_to_dict(model.top),
        "layers": [layer_to_dict(layer) for layer in model.layers],
    }


def dbn_from_dict(document: Any) -> DbnModel:
    _expect_schema(document, SCHEMA_DBN)
    n = _integer(document, "n", SCHEMA_DBN)
    layers = _field(document, "layers", SCHEMA_DBN)
    if not isinstance(layers, list):
        raise SchemaError("dbn/1 'layers' must be a list")
    model = DbnModel(
        rbm_from_dict(_field(document, "top", SCHEMA_DBN)),
        tuple(layer_from_dict(layer) for layer in layers),
    )
    if model.width != n:
        raise DimensionError(f"dbn/1 declares n={n} but its top has {model.width}")
    return model


def model_to_dict(model: RbmModel | DbnModel) -> dict[str, Any]:
    if isinstance(model, DbnModel):
        return dbn_to_dict(model)
    return rbm_to_dict(model)


def write_model(model: RbmModel | DbnModel, path: str | Path) -> None:
    dump_document(model_to_dict(model), path)


def read_model(path: str | Path) -> RbmModel | DbnModel:
    """Read an rbm/1 or dbn/1 file, dispatching on its schema tag."""
    document = load_document(path)
    schema = _expect_schema(document, SCHEMA_RBM, SCHEMA_DBN)
    if schema == SCHEMA_DBN:
        return dbn_from_dict(document)
    return rbm_from_dict(document)


# Supports


def support_from_dict(document: Any) -> tuple[BitVector, ...]:
    _expect_schema(document, SCHEMA_SUPPORT)
    n = _integer(document, "n", SCHEMA_SUPPORT)
    check_width(n)
    states = _field(document, "states", SCHEMA_SUPPORT)
    if not isinstance(states, list) or any(
        isinstance(index, bool) or not isinstance(index, int) for index in states
    ):
        raise SchemaError("support/1 'states' must be a list of integer indices")
    return tuple(BitVector(n, index) for index in sorted(set(states)))


def support_to_dict(n: int, states: list[BitVector]) -> dict[str, Any]:
    return {
        "schema": SCHEMA_SUPPORT,
        "n": n,
        "states": sorted(state.index for state in states),
    }


def read_support(path: str | Path) -> tuple[BitVector, ...]:
    return support_from_dict(load_document(path))
