"""The published schema files must match the in-code definitions, accept
every hand-valid document, and reject structurally broken ones."""

import json
from pathlib import Path

import jsonschema
import pytest

from streetweave.pipeline import render_spec_text
from streetweave.schemas import RENDERPLAN_SCHEMA, SPEC_SCHEMA
from streetweave.specparse import parse_spec

from conftest import DATA_DIR

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schema"


def test_spec_schema_file_in_sync():
    shipped = json.loads((SCHEMA_DIR / "streetweave.schema.json").read_text())
    assert shipped == SPEC_SCHEMA


def test_renderplan_schema_file_in_sync():
    shipped = json.loads((SCHEMA_DIR / "renderplan.schema.json").read_text())
    assert shipped == RENDERPLAN_SCHEMA


VALID_DOCS = [
    {"map": [{}], "unit": [{"type": "segment", "method": "line"}], "data": [{"physical": "n.json"}]},
    {
        "map": [{"streetColor": "#222222", "streetWidth": 2, "background": "dark"}],
        "unit": [
            {"type": "segment", "method": "matrix", "rows": 2, "columns": 3,
             "color": [{"field": "a"}, {"field": "b"}]},
            {"type": "node", "chart": {"mark": "bar"}},
            {"type": "point", "opacity": 0.5, "zoom": [3, 12]},
        ],
        "data": [
            {"physical": "n.json"},
            {"thematic": {"path": "t.csv", "latColumn": "y", "lonColumn": "x"}},
        ],
        "relation": {"spatial": "nn", "value": 50, "aggregation": "max"},
        "query": {"address": "41.88,-87.63", "radius": 120},
    },
]

INVALID_DOCS = [
    {"map": [], "unit": [{"type": "segment"}], "data": [{"physical": "x"}]},
    {"map": [{}], "unit": [{"type": "edge"}], "data": [{"physical": "x"}]},
    {"map": [{}], "unit": [{"type": "segment", "method": "blob"}], "data": [{"physical": "x"}]},
    {"map": [{}], "unit": [{"type": "segment"}], "data": [{}]},
    {"map": [{"background": "grey"}], "unit": [{"type": "segment"}], "data": [{"physical": "x"}]},
    {"map": [{}], "unit": [{"type": "segment"}], "data": [{"physical": "x"}],
     "relation": {"spatial": "buffer", "value": -1, "aggregation": "mean"}},
]


@pytest.mark.parametrize("doc", VALID_DOCS)
def test_schema_accepts_valid_documents(doc):
    jsonschema.validate(doc, SPEC_SCHEMA)
    spec, diags = parse_spec(json.dumps(doc))
    assert spec is not None


@pytest.mark.parametrize("doc", INVALID_DOCS)
def test_schema_rejects_invalid_documents(doc):
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, SPEC_SCHEMA)
    spec, _ = parse_spec(json.dumps(doc))
    assert spec is None


def test_emitted_plans_validate_against_plan_schema():
    spec_text = (DATA_DIR / "golden_spec.json").read_text()
    plan = json.loads(render_spec_text(spec_text, base_dir=DATA_DIR).text)
    jsonschema.validate(plan, RENDERPLAN_SCHEMA)


def test_scenario_plans_validate_against_plan_schema(sample_dir):
    from streetweave.sampledata import SCENARIOS, scenario_text

    for name in SCENARIOS:
        plan = json.loads(render_spec_text(scenario_text(name), base_dir=sample_dir).text)
        jsonschema.validate(plan, RENDERPLAN_SCHEMA)
