from __future__ import annotations

import asyncio
import json

import pytest

from veech.cli import parse_candidate, run
from veech.errors import InvalidQueryError
from veech.search import RootTuple
from veech.twist import VEECH_LABEL


def invoke(capsys, *argv):
    code = asyncio.run(run(list(argv)))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def invoke_json(capsys, *argv):
    code, out, _ = invoke(capsys, *argv, "--format", "json")
    return code, json.loads(out)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("VEECH_Q_MAX", "VEECH_PREC_BITS", "VEECH_WORKERS", "VEECH_TOLERANCE", "VEECH_OUT", "VEECH_FORMAT"):
        monkeypatch.delenv(name, raising=False)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def test_parse_candidate():
    assert parse_candidate("7:1,5,3") == RootTuple(7, (1, 5, 3))
    with pytest.raises(InvalidQueryError):
        parse_candidate("7-1-5-3")


@pytest.mark.parametrize("argv", [
    ["dz", "--k", "1", "--d", "1"],
    ["search-relations", "pair64"],
    ["verify-flat", "--candidate", "7:1,5,3", "--t1", "half"],
    ["nonsense"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        asyncio.run(run(argv))
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# dz
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,d,expected", [("6", "3", "1260 3276"), ("6", "1", "60")])
def test_dz_text(capsys, k, d, expected):
    code, out, _ = invoke(capsys, "dz", "--k", k, "--d", d, "--format", "text")
    assert code == 0
    assert out.splitlines()[1] == expected


def test_dz_json(capsys):
    code, data = invoke_json(capsys, "dz", "--k", "6", "--d", "3")
    assert code == 0
    assert data["maximal"] == [1260, 3276]
    assert data["schema"] == 1


def test_format_from_environment_and_flag(capsys, monkeypatch):
    monkeypatch.setenv("VEECH_FORMAT", "csv")
    _, out, _ = invoke(capsys, "dz", "--k", "4", "--d", "3")
    assert out.splitlines() == ["table,order", "maximal,252"]
    _, out, _ = invoke(capsys, "--format", "text", "dz", "--k", "4", "--d", "3")
    assert out.splitlines() == ["dz", "252", "maximal (1 rows)", "  order", "  252"]


def test_bad_environment_is_an_error(capsys, monkeypatch):
    monkeypatch.setenv("VEECH_Q_MAX", "0")
    code, out, err = invoke(capsys, "dz", "--k", "6", "--d", "3")
    assert code == 1
    assert out == ""
    assert "[ERROR]" in err


def test_report_file_and_timings(capsys, tmp_path):
    path = tmp_path / "dz.json"
    code, out, err = invoke(capsys, "dz", "--k", "6", "--d", "3", "--out", str(path))
    assert code == 0
    assert out == ""
    assert "[STAGE] dz" in err
    assert json.loads(path.read_text())["maximal"] == [1260, 3276]
    timings = json.loads((tmp_path / "dz.json.timings.json").read_text())
    assert "dz" in timings["timings"]
    assert "timings" not in path.read_text()


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------

def test_enumerate_eighteen(capsys):
    code, data = invoke_json(capsys, "enumerate", "--n", "18")
    assert code == 0
    record = data["moduli"]["18"]
    assert len(record["symmetric"]) == 12
    assert len(record["asymmetric"]) == 32


def test_enumerate_empty_modulus(capsys):
    code, out, _ = invoke(capsys, "enumerate", "--n", "8", "--format", "csv")
    assert code == 0
    tables = {line.split(",")[0] for line in out.splitlines()}
    assert "symmetric" not in tables
    assert "asymmetric" not in tables


def test_enumerate_small_modulus(capsys):
    code, out, err = invoke(capsys, "enumerate", "--n", "2")
    assert code == 1
    assert "[ERROR]" in err


# ---------------------------------------------------------------------------
# search-relations
# ---------------------------------------------------------------------------

def test_pair63(capsys):
    code, out, _ = invoke(capsys, "search-relations", "pair63", "--format", "text")
    assert code == 0
    assert "cosine degree at order 21: 6" in out


def test_restricted_det819_is_worker_independent(capsys):
    argv = ["search-relations", "det819", "--m1", "63", "91"]
    code, one, _ = invoke(capsys, *argv, "--workers", "1", "--format", "json")
    _, two, _ = invoke(capsys, *argv, "--workers", "2", "--format", "json")
    assert code == 0
    assert one == two
    assert json.loads(one)["audit"]["dichotomy_pass"] is True
    assert json.loads(one)["spot_mismatches"] == 0


# ---------------------------------------------------------------------------
# verify-flat
# ---------------------------------------------------------------------------

def test_verify_flat_untwisted_case_one(capsys):
    code, data = invoke_json(capsys, "verify-flat", "--candidate", "7:1,5,3")
    assert code == 0
    assert data["C1"]["crossings"] == [[1, 0], [0, 1]]
    assert data["C1"]["parabolic"] is True
    assert data["C1"]["closed_forms_agree"] is True
    assert data["pass"] is True


def test_verify_flat_half_twist_fails(capsys):
    code, out, _ = invoke(capsys, "verify-flat", "--candidate", "7:1,5,3", "--t1", "1/2", "--format", "text")
    assert code == 2
    assert "C1-side crossings" in out
    assert "moduli ratio rational: FAIL" in out


def test_verify_flat_14gon(capsys):
    code, out, _ = invoke(capsys, "verify-flat", "--candidate", "14gon", "--format", "text")
    assert code == 0
    assert "agreement with classify survivor: PASS" in out


def test_verify_flat_rejects_non_candidates(capsys):
    code, _, err = invoke(capsys, "verify-flat", "--candidate", "8:1,3,5")
    assert code == 1
    assert "[ERROR]" in err


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def test_classify_narrow_q(capsys):
    code, data = invoke_json(capsys, "classify", "--q-max", "1")
    assert code == 0
    assert data["orbit_count"] == 1
    assert data["orbits"][0]["label"] == VEECH_LABEL
    members = data["orbits"][0]["members"]
    assert len(members) == 2
    assert all(m["t1"] == "0/1" and m["t3"] == "0/1" for m in members)
    assert data["complete"] is True
    assert data["config"]["q_max"] == 1


@pytest.mark.slow
def test_classify_report_is_worker_independent(capsys):
    _, one, _ = invoke(capsys, "classify", "--workers", "1", "--format", "json")
    _, two, _ = invoke(capsys, "classify", "--workers", "3", "--format", "json")
    assert one == two
