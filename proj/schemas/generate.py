"""Writes the v1 report schemas. Run from the repository root."""
import json
import pathlib

VERSION = "1.0.0"
OUT = pathlib.Path(__file__).parent / "v1"

number = {"type": ["number", "null"]}
defs = {
    "complex": {"type": "array", "items": number, "minItems": 2, "maxItems": 2},
    "vector3": {"type": "array", "items": {"$ref": "#/$defs/complex"}, "minItems": 3, "maxItems": 3},
    "matrix3": {"type": "array", "items": {"$ref": "#/$defs/vector3"}, "minItems": 3, "maxItems": 3},
    "poly": {
        "type": "object",
        "required": ["vars", "terms"],
        "additionalProperties": False,
        "properties": {
            "vars": {"type": "array", "items": {"type": "string"}},
            "terms": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["exp", "coef"],
                    "additionalProperties": False,
                    "properties": {
                        "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                        "coef": {"$ref": "#/$defs/complex"},
                    },
                },
            },
        },
    },
    "stats": {
        "type": "object",
        "required": ["steps", "rejected", "chart_switches"],
        "additionalProperties": False,
        "properties": {k: {"type": "integer", "minimum": 0} for k in ["steps", "rejected", "chart_switches"]},
    },
    "loop": {
        "type": "object",
        "required": ["base_point", "segments"],
        "properties": {
            "base_point": {"$ref": "#/$defs/complex"},
            "segments": {
                "type": "array",
                "items": {
                    "oneOf": [
                        {
                            "type": "object",
                            "required": ["kind", "from", "to"],
                            "properties": {
                                "kind": {"const": "segment"},
                                "from": {"$ref": "#/$defs/complex"},
                                "to": {"$ref": "#/$defs/complex"},
                            },
                        },
                        {
                            "type": "object",
                            "required": ["kind", "center", "radius", "theta0", "theta1"],
                            "properties": {
                                "kind": {"const": "arc"},
                                "center": {"$ref": "#/$defs/complex"},
                                "radius": {"type": "number", "exclusiveMinimum": 0},
                                "theta0": {"type": "number"},
                                "theta1": {"type": "number"},
                            },
                        },
                    ]
                },
            },
        },
    },
    "fibers": {
        "type": ["object", "null"],
        "required": ["finite", "multiplicities", "infinity", "all"],
        "properties": {
            "finite": {"type": "array", "items": {"$ref": "#/$defs/complex"}},
            "multiplicities": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "infinity": {"type": "boolean"},
            "all": {"type": "boolean"},
        },
    },
    "rejection": {
        "type": ["object", "null"],
        "required": ["constraint", "violation", "possibility", "component", "witness_monomial"],
        "additionalProperties": False,
        "properties": {
            "constraint": {"type": "string"},
            "violation": {"type": "string"},
            "possibility": {"enum": [0, 4, 5, 6]},
            "component": {"type": "integer", "minimum": 0},
            "witness_monomial": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
    },
    "holonomy_body": {
        "type": "object",
        "required": ["matrix", "residual", "n_samples", "stats"],
        "properties": {
            "matrix": {"$ref": "#/$defs/matrix3"},
            "residual": {"type": "number", "minimum": 0},
            "n_samples": {"type": "integer", "minimum": 4},
            "stats": {"$ref": "#/$defs/stats"},
        },
    },
}

jordan = {"enum": ["I", "II1", "II2", "III1", "III2", "III3"]}
type_label = {"enum": ["P3", "P1R2", "P2", "Identity", "R2", "P1"]}


def schema(kind, required, properties, extra=None):
    s = {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "$id": f"riccati/v1/{kind}.schema.json",
        "title": f"{kind} report",
        "type": "object",
        "required": ["schema_version", "kind"] + required,
        "properties": {"schema_version": {"const": VERSION}, "kind": {"const": kind}, **properties},
        "$defs": defs,
    }
    if extra:
        s.update(extra)
    return s


reports = {
    "classification": schema(
        "classification",
        ["jordan_case", "paper_type", "fixed_points", "fixed_lines", "is_all", "normal_form", "conjugator"],
        {
            "jordan_case": jordan,
            "paper_type": type_label,
            "fixed_points": {"type": "array", "items": {"$ref": "#/$defs/vector3"}},
            "fixed_lines": {"type": "array", "items": {"$ref": "#/$defs/vector3"}},
            "is_all": {"type": "boolean"},
            "normal_form": {"$ref": "#/$defs/matrix3"},
            "conjugator": {"$ref": "#/$defs/matrix3"},
            "near_threshold": {"type": "boolean"},
        },
    ),
    "normal_form": schema(
        "normal_form",
        ["target", "accepted", "form", "rejection", "fibers"],
        {
            "target": {"enum": ["cp2", "cn"]},
            "n": {"type": "integer", "minimum": 1},
            "accepted": {"type": "boolean"},
            "form": {
                "type": ["object", "null"],
                "properties": {
                    **{k: {"$ref": "#/$defs/poly"} for k in ["p", "a", "b", "c", "A", "B", "C", "D", "E"]},
                    "q": {
                        "type": "array",
                        "items": {"type": "array", "items": {"$ref": "#/$defs/poly"}, "minItems": 3, "maxItems": 3},
                    },
                },
                "required": ["p"],
            },
            "rejection": {"$ref": "#/$defs/rejection"},
            "fibers": {"$ref": "#/$defs/fibers"},
        },
    ),
    "holonomy": schema(
        "holonomy",
        ["matrix", "residual", "n_samples", "stats"],
        {},
        {"allOf": [{"$ref": "#/$defs/holonomy_body"}]},
    ),
    "holonomy_generators": schema(
        "holonomy_generators",
        ["base_point", "generators", "product_defect"],
        {
            "base_point": {"$ref": "#/$defs/complex"},
            "product_defect": {"type": "number", "minimum": 0},
            "generators": {
                "type": "array",
                "items": {
                    "allOf": [{"$ref": "#/$defs/holonomy_body"}],
                    "required": ["at_infinity", "fiber", "loop"],
                    "properties": {
                        "at_infinity": {"type": "boolean"},
                        "fiber": {"oneOf": [{"$ref": "#/$defs/complex"}, {"type": "null"}]},
                        "loop": {"$ref": "#/$defs/loop"},
                    },
                },
            },
        },
    ),
    "synthesis": schema(
        "synthesis",
        ["passed", "product_defect", "reconstructed_product_defect", "generators"],
        {
            "passed": {"type": "boolean"},
            "product_defect": {"type": "number", "minimum": 0},
            "reconstructed_product_defect": {"type": "number", "minimum": 0},
            "generators": {
                "type": "array",
                "minItems": 2,
                "items": {
                    "type": "object",
                    "required": [
                        "index", "input", "jordan_case", "paper_type", "normal_form", "conjugator", "model",
                        "analytic_holonomy", "analytic_vs_normal_form", "numeric_vs_analytic",
                        "numeric_residual", "reconstruction", "passed",
                    ],
                    "properties": {
                        "index": {"type": "integer", "minimum": 0},
                        "input": {"$ref": "#/$defs/matrix3"},
                        "jordan_case": jordan,
                        "paper_type": type_label,
                        "normal_form": {"$ref": "#/$defs/matrix3"},
                        "conjugator": {"$ref": "#/$defs/matrix3"},
                        "model": {
                            "type": "object",
                            "required": ["case", "center"],
                            "properties": {
                                "case": {"enum": ["A", "B", "C", "D", "E"]},
                                "center": {"$ref": "#/$defs/complex"},
                                **{k: {"$ref": "#/$defs/complex"} for k in ["alpha1", "alpha2", "lambda", "nu", "mu"]},
                            },
                        },
                        "analytic_holonomy": {"$ref": "#/$defs/matrix3"},
                        "analytic_vs_normal_form": {"type": "number", "minimum": 0},
                        "numeric_vs_analytic": {"type": "number", "minimum": 0},
                        "numeric_residual": {"type": "number", "minimum": 0},
                        "reconstruction": {"type": "number", "minimum": 0},
                        "passed": {"type": "boolean"},
                    },
                },
            },
        },
    ),
    "error": schema(
        "error",
        ["command", "error"],
        {
            "command": {"type": "string"},
            "error": {
                "type": "object",
                "required": ["kind", "message"],
                "properties": {"kind": {"type": "string"}, "message": {"type": "string"}},
            },
        },
    ),
    "batch": schema(
        "batch",
        ["exit_code", "results"],
        {
            "exit_code": {"enum": [0, 1, 2, 3, 4]},
            "results": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["command", "exit_code", "report"],
                    "properties": {
                        "command": {"enum": ["classify", "check", "holonomy", "synthesize"]},
                        "exit_code": {"enum": [0, 1, 2, 3, 4]},
                        "report": {"type": "object", "required": ["schema_version", "kind"]},
                    },
                },
            },
        },
    ),
}

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for kind, s in reports.items():
        (OUT / f"{kind}.schema.json").write_text(json.dumps(s, indent=2, ensure_ascii=False) + "\n")
