import json
from fractions import Fraction

import pytest
from hypothesis import given

from jrplab import serialize
from jrplab.model import Schedule
from strategies import small_instances


@given(small_instances())
def test_instance_round_trip(inst):
    doc = json.loads(serialize.dumps(serialize.instance_to_dict(inst)))
    assert serialize.instance_from_dict(doc) == inst


def test_schedule_round_trip(tmp_path):
    s = Schedule.from_pairs([({"B", "A"}, 1.5), ({"A"}, 0.25)])
    path = tmp_path / "s.json"
    serialize.write_json(serialize.schedule_to_dict(s), path)
    assert serialize.load_schedule(path) == s
    assert serialize.read_json(path)["shipments"][0] == {"t": 0.25, "retailers": ["A"]}


def test_num_handles_huge_rationals_and_infinity():
    assert serialize.num(Fraction(3, 2)) == 1.5
    assert serialize.num(Fraction(10) ** 400) == "1.000000000000e+400"
    assert serialize.num(float("inf")) == "inf"


@pytest.mark.parametrize("doc", [{}, {"C": 1, "retailers": [{"id": "A"}], "orders": []},
                                 {"C": 1, "retailers": [], "orders": [{"retailer": "A", "arrival": 0,
                                                                        "waiting": {"kind": "bogus"}}]}])
def test_malformed_instance_is_value_error(doc):
    with pytest.raises(ValueError):
        serialize.instance_from_dict(doc)


def test_invalid_json_is_value_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(ValueError):
        serialize.load_instance(p)
