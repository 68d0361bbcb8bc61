"""JSON schemas for the command-line configs and the JSON output envelope.

Every subcommand validates its config against the schema here before touching
any engine; unknown keys are rejected so typos fail loudly.  The output
envelope is one uniform shape (command, columns, rows) shared by all
subcommands.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

_MAKEHAM = {
    "type": "object",
    "properties": {
        "alpha": {"type": "number", "minimum": 0},
        "beta": {"type": "number", "minimum": 0},
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "increasing": {"type": "boolean"},
    },
    "required": ["alpha", "beta", "gamma"],
    "additionalProperties": False,
}

_LEVEL = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
_ETA = {"type": "number", "exclusiveMinimum": 0}
_HORIZON = {"type": "integer", "minimum": 1}
_COUNT = {"type": "integer", "minimum": 0}
_AGE = {"type": "number", "minimum": 0}
_NUMBER_ROW = {"type": "array", "items": {"type": "number"}}

BINOMIAL = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "binomial subcommand config",
    "type": "object",
    "properties": {
        "n": _COUNT,
        "age": _AGE,
        "T": _HORIZON,
        "makeham": _MAKEHAM,
        "level": _LEVEL,
        "eta": _ETA,
        "gtable_out": {"type": "string"},
    },
    "required": ["n", "age", "T", "makeham"],
    "additionalProperties": False,
}

GAUSSIAN_APPROX = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "gaussian-approx subcommand config",
    "type": "object",
    "properties": {
        "cohorts": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"n": _COUNT, "age": _AGE, "makeham": _MAKEHAM},
                "required": ["n", "age"],
                "additionalProperties": False,
            },
        },
        "T": _HORIZON,
        "makeham": _MAKEHAM,
        "level": _LEVEL,
        "eta": _ETA,
    },
    "required": ["cohorts", "T"],
    "additionalProperties": False,
}

EIOPA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "eiopa subcommand config",
    "type": "object",
    "properties": {
        "n": _COUNT,
        "age": _AGE,
        "T": _HORIZON,
        "makeham": _MAKEHAM,
        "params": {
            "type": "object",
            "properties": {
                "coc": {"type": "number", "exclusiveMinimum": 0},
                "stress": {"type": "number", "exclusiveMinimum": 0},
                "rates": _NUMBER_ROW,
                "stress_rates": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
    "required": ["n", "age", "T", "makeham"],
    "additionalProperties": False,
}

AR = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "ar subcommand config",
    "type": "object",
    "properties": {
        "alpha": {"type": "number"},
        "alphas": _NUMBER_ROW,
        "sigma": {"type": "number", "exclusiveMinimum": 0},
        "sigmas": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "T": _HORIZON,
        "level": _LEVEL,
        "eta": _ETA,
    },
    "additionalProperties": False,
}

GAUSSIAN = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "gaussian subcommand config",
    "type": "object",
    "properties": {
        "cov": {"type": "array", "minItems": 1, "items": _NUMBER_ROW},
        "cov_csv": {"type": "string"},
        "schedule": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "level": _LEVEL,
        "eta": _ETA,
    },
    "additionalProperties": False,
}

_TREE_NODE = {
    "type": "object",
    "properties": {
        "p": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "x": {"type": "number"},
        "children": {"type": "array", "items": {"$ref": "#/definitions/node"}},
    },
    "required": ["p", "x"],
    "additionalProperties": False,
}

ORACLE = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "oracle subcommand config",
    "type": "object",
    "definitions": {"node": _TREE_NODE},
    "properties": {
        "tree": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/node"}},
        "tree_file": {"type": "string"},
        "nested": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["iid", "ar", "constant"]},
                "sigmas": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "number", "exclusiveMinimum": 0},
                },
                "alphas": _NUMBER_ROW,
                "values": {"type": "array", "minItems": 1, "items": {"type": "number"}},
                "outer": {"type": "integer", "minimum": 1},
                "inner": {"type": "integer", "minimum": 1000},
            },
            "required": ["kind", "outer", "inner"],
            "additionalProperties": False,
        },
        "level": _LEVEL,
        "eta": _ETA,
    },
    "additionalProperties": False,
}

OUTPUT = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "JSON output envelope",
    "type": "object",
    "properties": {
        "command": {"type": "string"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {"type": "array", "items": {"type": ["number", "string"]}},
        },
    },
    "required": ["command", "columns", "rows"],
    "additionalProperties": False,
}

CONFIG_SCHEMAS = {
    "binomial": BINOMIAL,
    "gaussian-approx": GAUSSIAN_APPROX,
    "eiopa": EIOPA,
    "ar": AR,
    "gaussian": GAUSSIAN,
    "oracle": ORACLE,
}


def validate_config(command: str, config) -> None:
    """Schema-validate a subcommand config (raises jsonschema.ValidationError)."""
    jsonschema.validate(config, CONFIG_SCHEMAS[command])


def dump_schemas(directory) -> list[str]:
    """Write every schema as pretty JSON into ``directory``; returns the paths."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, schema in {**CONFIG_SCHEMAS, "output": OUTPUT}.items():
        path = out / f"{name}.json"
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n", encoding="ascii")
        written.append(str(path))
    return written
