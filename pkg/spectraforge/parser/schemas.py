"""JSON schemas for the documents spectraforge reads."""

_ENTRY = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

MATRIX_SCHEMA = {
    "type": "object",
    "required": ["field", "n", "rows"],
    "properties": {
        "field": {"enum": ["real", "complex"]},
        "n": {"type": "integer", "minimum": 1},
        "rows": {"type": "array", "items": {"type": "array", "items": _ENTRY}},
    },
}

SPECTRAHEDRON_SCHEMA = {
    "type": "object",
    "required": ["field", "n"],
    "properties": {
        "field": {"enum": ["real", "complex"]},
        "n": {"type": "integer", "minimum": 1},
        "kind": {"enum": ["elliptope", "density", "custom"]},
        "constraints": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["A", "c"],
                "properties": {
                    "label": {"type": ["string", "null"]},
                    "A": MATRIX_SCHEMA,
                    "c": {"type": "number"},
                },
            },
        },
    },
    "anyOf": [{"required": ["constraints"]}, {"required": ["kind"]}],
}

SOLVER_SCHEMA = {
    "type": "object",
    "properties": {
        "restarts": {"type": "integer", "minimum": 1},
        "max_iters": {"type": "integer", "minimum": 1},
        "step_scale": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "workers": {"type": "integer", "minimum": 1},
    },
}

PCA_PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["study", "intervals", "p"],
    "properties": {
        "study": {"const": "pca_cover"},
        "intervals": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
        "p": {"type": "integer", "minimum": 1},
        "trace_target": {"type": "number"},
        "moments": {"type": "object", "additionalProperties": {"type": "number"}},
        "planted": MATRIX_SCHEMA,
        "rank_bound": {"type": "integer", "minimum": 1},
        "top_q": {"type": "integer", "minimum": 1},
        "solver": SOLVER_SCHEMA,
    },
    "anyOf": [{"required": ["moments", "trace_target"]}, {"required": ["planted"]}],
}

ENTROPY_PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["study", "moments", "basis_size"],
    "properties": {
        "study": {"const": "quantum_moments"},
        "moments": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        "basis_size": {"type": "integer", "minimum": 2},
        "field": {"enum": ["real", "complex"]},
        "rank_one": {"type": "boolean"},
        "solver": SOLVER_SCHEMA,
    },
}
