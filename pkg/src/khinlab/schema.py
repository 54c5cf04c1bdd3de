"""JSON schemas of the reports emitted by the command line (schema_version 1)."""

SCHEMA_VERSION = 1

_number = {"type": "number"}
_string = {"type": "string"}
_decimal_list = {"type": "array", "items": _string}

ATOMS = {
    "type": "object",
    "required": ["atoms"],
    "additionalProperties": False,
    "properties": {
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["value", "prob"],
                "additionalProperties": False,
                "properties": {"value": _string, "prob": _string},
            },
        }
    },
}

WEIGHT = {
    "oneOf": [
        {
            "type": "object",
            "required": ["independent"],
            "additionalProperties": False,
            "properties": {"independent": ATOMS},
        },
        {
            "type": "object",
            "required": ["sign_function"],
            "additionalProperties": False,
            "properties": {
                "sign_function": {
                    "type": "object",
                    "required": ["k", "values"],
                    "additionalProperties": False,
                    "properties": {
                        "k": {"type": "integer", "minimum": 0},
                        "values": _decimal_list,
                        "aux": ATOMS,
                    },
                }
            },
        },
    ]
}

MOMENT_REPORT = {
    "type": "object",
    "required": ["p", "absolute_moment", "norm", "second_norm", "method",
                 "standard_error", "sample_count", "exact_arithmetic", "p_text", "ci_kind"],
    "properties": {
        "p": _number,
        "absolute_moment": {"type": "number", "minimum": 0},
        "norm": {"type": "number", "minimum": 0},
        "second_norm": {"type": "number", "minimum": 0},
        "method": {"enum": ["exact", "monte-carlo"]},
        "standard_error": {"type": "number", "minimum": 0},
        "sample_count": {"type": "integer", "minimum": 0},
        "exact_arithmetic": {"type": "boolean"},
        "p_text": _string,
        "ci_kind": {"enum": ["none", "normal-approximation"]},
    },
}


def _envelope(kind: str, body: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "required": ["schema_version", "kind", *required],
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "kind": {"const": kind},
            **body,
        },
    }


MOMENTS = _envelope(
    "moments",
    {
        "coefficients": _decimal_list,
        "weight": {"anyOf": [WEIGHT, {"type": "null"}]},
        "seed": {"type": ["integer", "null"]},
        "reports": {"type": "array", "items": MOMENT_REPORT},
    },
    ["coefficients", "weight", "reports"],
)

CONSTANTS = _envelope(
    "constants",
    {
        "quantity": {"enum": ["haagerup_Bq", "zero_mass", "limit_check", "refined_threshold"]},
        "inputs": {"type": "object", "additionalProperties": _string},
        "values": {"type": "object", "additionalProperties": _string},
    },
    ["quantity", "inputs", "values"],
)

_constants_fields = ["mode", "p", "q", "r", "s", "s_threshold", "b", "a", "tau", "delta0",
                     "t", "L", "C1", "k_r2", "w_q", "C2", "p_text", "q_text"]

EXTRACT = _envelope(
    "extract",
    {
        "weight": WEIGHT,
        "report": {
            "type": "object",
            "required": _constants_fields,
            "properties": {
                **{k: _number for k in _constants_fields},
                "mode": {"enum": ["classic", "refined"]},
                "p_text": _string,
                "q_text": _string,
            },
        },
    },
    ["weight", "report"],
)

VERIFY = _envelope(
    "verify",
    {
        "report": {
            "type": "object",
            "required": ["suite", "seed", "case_count", "pass_count", "failures", "wall_time"],
            "properties": {
                "suite": _string,
                "seed": {"type": "integer", "minimum": 0},
                "case_count": {"type": "integer", "minimum": 0},
                "pass_count": {"type": "integer", "minimum": 0},
                "wall_time": {"type": "number", "minimum": 0},
                "mode": {"type": ["string", "null"]},
                "failures": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["case_index", "case_seed", "inputs", "expected_bound", "observed"],
                    },
                },
            },
        }
    },
    ["report"],
)

COUNTEREXAMPLE = _envelope(
    "counterexample",
    {
        "report": {
            "type": "object",
            "required": ["weight", "coefficients", "s", "norms", "exact_zero",
                         "coefficient_norm", "rejections", "literal_pair"],
            "properties": {
                "weight": WEIGHT,
                "coefficients": _decimal_list,
                "s": _number,
                "norms": {"type": "object", "additionalProperties": _number},
                "exact_zero": {"type": "boolean"},
                "coefficient_norm": _number,
            },
        }
    },
    ["report"],
)

SCHEMAS = {
    "moments": MOMENTS,
    "constants": CONSTANTS,
    "extract": EXTRACT,
    "verify": VERIFY,
    "counterexample": COUNTEREXAMPLE,
}
