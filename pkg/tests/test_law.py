import io
import json
from fractions import Fraction as F

import pytest
from hypothesis import given

from ivbounds.law import (
    CounterfactualJoint,
    LawError,
    ObservedLaw,
    law_from_counts,
    law_from_json,
    law_from_pmfs,
    law_to_json,
    read_counts_csv,
    read_law,
    validate_law,
    write_counts_csv,
)

from conftest import count_laws


def test_counts_two_arms():
    law = law_from_counts([("a", 0, 0, 1), ("a", 1, 1, 1), ("b", 0, 0, 1), ("b", 1, 1, 3)])
    assert law.K == 2
    assert law.arm_labels == ("a", "b")
    assert law.arm(1) == {(0, 0): F(1, 2), (0, 1): 0, (1, 0): 0, (1, 1): F(1, 2)}
    assert law.arm(2) == {(0, 0): F(1, 4), (0, 1): 0, (1, 0): 0, (1, 1): F(3, 4)}
    assert law.exact


def test_counts_single_cell():
    law = law_from_counts([("z1", 0, 0, 5)])
    assert law.K == 1
    assert law.p(1, 0, 0) == 1


def test_arm_order_is_first_appearance():
    law = law_from_counts([("hi", 1, 1, 2), ("lo", 0, 0, 1), ("hi", 0, 1, 2)])
    assert law.arm_labels == ("hi", "lo")
    assert law.p(1, 0, 1) == F(1, 2)


@pytest.mark.parametrize(
    "rows, msg",
    [
        ([("a", 0, 0, 2), ("c", 0, 0, 0), ("c", 1, 1, 0)], "empty instrument arm"),
        ([("a", 0, 0, -1)], "negative"),
        ([("a", 2, 0, 1)], "0 or 1"),
        ([("a", 0, 3, 1)], "0 or 1"),
        ([("a", 0, 0, 1.5)], "integer"),
    ],
)
def test_counts_errors(rows, msg):
    with pytest.raises(LawError, match=msg):
        law_from_counts(rows)


def test_validate_ok(example_law):
    assert validate_law(example_law) == []
    assert validate_law(example_law.to_float(), 1e-9) == []


def test_validate_short_arm():
    law = law_from_pmfs([{"00": 0.5, "11": 0.5}, {"00": 0.49, "11": 0.49}], ["a", "b"])
    problems = validate_law(law, 1e-9)
    assert len(problems) == 1
    assert "'b'" in problems[0]


def test_validate_negative():
    law = law_from_pmfs([{"00": 1.2, "11": -0.2}])
    problems = validate_law(law, 1e-9)
    assert any("negative probability" in p for p in problems)


def test_structural_errors():
    with pytest.raises(LawError):
        ObservedLaw(0, {})
    with pytest.raises(LawError, match="distinct"):
        law_from_pmfs([{"00": 1}, {"00": 1}], ["a", "a"])
    with pytest.raises(LawError, match="cover"):
        ObservedLaw(1, {(1, 0, 0): 1})


@given(count_laws())
def test_counts_laws_validate_exactly(law):
    assert validate_law(law, 0) == []


@given(count_laws())
def test_json_round_trip(law):
    text = json.dumps(law_to_json(law))
    assert law_from_json(json.loads(text)) == law


def test_float_json_round_trip():
    law = law_from_pmfs([{"00": 0.25, "01": 0.25, "10": 0.4, "11": 0.1}], ["x"])
    back = law_from_json(json.loads(json.dumps(law_to_json(law))))
    assert back == law and not back.exact


def test_csv_round_trip(tmp_path):
    counts = {("a", 0, 0): 5, ("a", 0, 1): 3, ("a", 1, 0): 1, ("a", 1, 1): 1, ("b", 1, 1): 4}
    text = write_counts_csv(counts)
    law = read_counts_csv(io.StringIO(text))
    assert law.p(2, 1, 1) == 1 and law.p(1, 0, 0) == F(1, 2)
    path = tmp_path / "c.csv"
    path.write_text(text)
    assert read_law(path) == law


def test_csv_bad_header():
    with pytest.raises(LawError, match="header"):
        read_counts_csv(io.StringIO("arm,x,y,n\na,0,0,1\n"))


def test_csv_bad_value():
    with pytest.raises(LawError, match="line 2"):
        read_counts_csv(io.StringIO("z,x,y,count\na,0,0,many\n"))


def test_json_bad_keys():
    with pytest.raises(LawError, match="xy"):
        law_from_json({"arms": [{"label": "a", "pmf": {"0": 1}}]})


def test_to_exact_uses_decimal_repr():
    law = law_from_pmfs([{"00": 0.6, "01": 0.4}]).to_exact()
    assert law.p(1, 0, 0) == F(3, 5)


def test_subset_relabels():
    law = law_from_counts([("a", 0, 0, 1), ("b", 1, 1, 1), ("c", 0, 1, 1)])
    sub = law.subset([3, 1])
    assert sub.arm_labels == ("c", "a")
    assert sub.p(1, 0, 1) == 1


def test_joint_margins_and_json():
    j = CounterfactualJoint({(0, 0): F(1, 10), (0, 1): F(2, 10), (1, 0): F(3, 10), (1, 1): F(4, 10)})
    assert j.p_y0(1) == F(7, 10)
    assert j.p_y1(1) == F(6, 10)
    assert j.ace == F(-1, 10)
    assert CounterfactualJoint.from_json(j.to_json()) == j
    assert CounterfactualJoint({(0, 0): F(1, 2)}).validate() == ["entries sum to 1/2"]
