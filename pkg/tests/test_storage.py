from __future__ import annotations

import json
from fractions import Fraction

import pytest

from veech.errors import InvalidQueryError
from veech.exactnum import CycloElem
from veech.monitoring import StageMonitor
from veech.search import Reason, RootTuple
from veech.storage import (
    SCHEMA_VERSION,
    TIMINGS_SUFFIX,
    Report,
    decode_elem,
    load_report,
    save_timings,
    to_jsonable,
    write_report,
)


@pytest.fixture
def report():
    elem = CycloElem.zeta(7) + Fraction(1, 3)
    return Report(
        "demo",
        {"ratio": Fraction(-3, 4), "elem": elem, "tuple": RootTuple(7, (1, 5, 3)), "reason": Reason.GCD},
        {"rows": (("n", "value"), [(7, Fraction(1, 2)), (14, (1, 11, 5))])},
        ["first line"],
    )


def test_rationals_are_strings():
    assert to_jsonable(Fraction(3, 4)) == "3/4"
    assert to_jsonable(Fraction(2)) == "2/1"
    assert to_jsonable([Fraction(1, 2), 3, None, True]) == ["1/2", 3, None, True]


def test_field_elements_and_roots():
    assert to_jsonable(CycloElem.rational(Fraction(1, 2))) == {"modulus": 1, "coeffs": ["1/2"]}
    assert to_jsonable(RootTuple(7, (1, 5, 3))) == {"n": 7, "roots": [[7, 1], [7, 5], [7, 3]]}
    assert to_jsonable({3, 1, 2}) == [1, 2, 3]
    assert to_jsonable(Reason.NOT_CUBIC) == "not-cubic"


def test_unknown_types_are_refused():
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_decode_elem():
    elem = CycloElem.zeta(7, 3) * Fraction(2, 5) - 1
    assert decode_elem(to_jsonable(elem)) == elem


def test_json_is_versioned_sorted_and_float_free(report):
    text = report.render("json", {"q_max": 8})
    data = json.loads(text)
    assert data["schema"] == SCHEMA_VERSION
    assert data["command"] == "demo"
    assert data["config"] == {"q_max": 8}
    assert data["ratio"] == "-3/4"
    assert list(data) == sorted(data)
    assert "." not in json.dumps(data["elem"])
    assert text == report.render("json", {"q_max": 8})


def test_csv_has_fixed_columns(report):
    lines = report.render("csv").splitlines()
    assert lines[0] == "table,n,value"
    assert lines[1] == "rows,7,1/2"
    assert lines[2] == "rows,14,1 11 5"


def test_text(report):
    text = report.render("text")
    assert text.startswith("demo\nfirst line\n")
    assert "rows (2 rows)" in text


def test_unknown_format(report):
    with pytest.raises(InvalidQueryError):
        report.render("xml")


def test_write_and_load(report, tmp_path):
    path = tmp_path / "report.json"
    assert write_report(report, "json", str(path))
    data = load_report(str(path))
    assert data["tuple"]["roots"][0] == [7, 1]
    assert load_report(str(tmp_path / "missing.json")) == {}


def test_write_to_stdout(report, capsys):
    assert write_report(report, "text")
    assert capsys.readouterr().out.startswith("demo")


def test_unreadable_report(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert load_report(str(path)) == {}
    assert "[ERROR]" in capsys.readouterr().err


def test_other_schema_is_rejected(tmp_path):
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"schema": 0}))
    assert load_report(str(path)) == {}


def test_unwritable_path(report, tmp_path, capsys):
    assert not write_report(report, "json", str(tmp_path / "no" / "such" / "dir.json"))
    assert "[ERROR]" in capsys.readouterr().err


def test_timings_sidecar(tmp_path):
    monitor = StageMonitor("demo")
    with monitor.stage("work"):
        pass
    monitor.record_size("items", 3)
    assert save_timings(monitor, "") is None
    sidecar = save_timings(monitor, str(tmp_path / "report.json"))
    assert sidecar.endswith(TIMINGS_SUFFIX)
    data = json.loads(open(sidecar).read())
    assert data["run"] == "demo"
    assert data["sizes"] == {"items": 3}
    assert "work" in data["timings"]
