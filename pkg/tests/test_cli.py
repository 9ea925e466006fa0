import io
import json
import subprocess
import sys

import pytest

from latdefect.cli import parse_input, run, serialize_input
from latdefect.exceptions import InputError

from conftest import D2, SEGMENTS, TWO_D2

SEGMENTS_DOC = {"ambient_dim": 2, "configurations": [{"points": [[0, 0], [1, 0], [2, 0]]},
                                                   {"points": [[0, 0], [0, 1], [0, 2]]}]}


def doc(*configs, n=2, **extra):
    out = {"ambient_dim": n, "configurations": [{"points": [list(p) for p in c]} for c in configs]}
    out.update(extra)
    return out


def call(tmp_path, command, document, *flags, name="in.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    buf = io.StringIO()
    code = run([command, str(path), *flags], stdout=buf)
    return code, json.loads(buf.getvalue()), path


# --- parsing ------------------------------------------------------------------

def test_parse_segments_matrices():
    d = parse_input(json.dumps(SEGMENTS_DOC).encode())
    f = d.family()
    assert [c.points for c in f] == [tuple(map(tuple, SEGMENTS[0])), tuple(map(tuple, SEGMENTS[1]))]


def test_parse_segment():
    f = parse_input('{"ambient_dim":1,"configurations":[{"points":[[0],[1]]}]}').family()
    assert f[0].points == ((0,), (1,))


def test_parse_duplicates_warn():
    d = parse_input('{"ambient_dim":2,"configurations":[{"points":[[0,0],[0,0],[1,1]]}]}')
    assert len(d.family()[0]) == 2 and len(d.warnings) == 1


@pytest.mark.parametrize("text, fragment", [
    ('{"ambient_dim": 2, "configurations": [', "line 1"),
    ('{"ambient_dim": 2, "configurations": [{"points": [[0, 0.5]]}]}', "points[0][1]"),
    ('{"ambient_dim": 2, "configurations": [{"points": [[0, 0, 0]]}]}', "points[0]"),
    ('{"ambient_dim": 2, "configurations": [{"points": []}]}', "empty"),
    ('{"ambient_dim": 2, "configurations": []}', "configurations"),
    ('[1, 2]', "object"),
])
def test_parse_errors_name_the_field(text, fragment):
    with pytest.raises(InputError) as exc:
        parse_input(text)
    assert fragment in str(exc.value)


def test_round_trip():
    original = {"ambient_dim": 2, "configurations": [
        {"points": [[0, 0], [1, 0], [0, 1]], "label": "A0"}, {"points": [[0, 0], [2, 2]]}]}
    d = parse_input(json.dumps(original))
    assert json.loads(serialize_input(d)) == original
    assert parse_input(serialize_input(d)) == d


# --- commands -----------------------------------------------------------------

def test_defective_simplex_pair(tmp_path):
    code, rep, _ = call(tmp_path, "defective", doc(D2, D2))
    assert code == 0
    r = rep["result"]
    assert r["verdict"] == "Defective" and r["rule"] == "MixedVolumeOne" and r["simplex_family"]
    assert rep["tool_version"] and len(rep["input_sha256"]) == 64 and "elapsed_seconds" in rep


def test_mixed_volume_segments(tmp_path):
    code, rep, _ = call(tmp_path, "mixed-volume", SEGMENTS_DOC)
    assert code == 0 and rep["result"]["value"] == 4
    assert rep["result"]["polarization"]["terms"]
    assert rep["result"]["interior_lattice_points"]["applicable"] is False


def test_mixed_volume_both_methods(tmp_path):
    code, rep, _ = call(tmp_path, "mixed-volume", doc(D2, TWO_D2))
    assert rep["result"]["value"] == 2
    assert rep["result"]["interior_lattice_points"]["value"] == 2


def test_lambda_interior_points(tmp_path):
    code, rep, _ = call(tmp_path, "interior-points", doc([(0, 0), (3, 0), (0, 3)]), "--lambda")
    assert code == 0 and rep["result"]["points"] == []
    assert rep["result"]["lattice"]["basis_columns"] == [[3, 0], [0, 3]]


def test_interior_points_of_segments_sum(tmp_path):
    _, rep, _ = call(tmp_path, "interior-points", SEGMENTS_DOC)
    assert rep["result"]["points"] == [[1, 1]]


@pytest.mark.parametrize("command, flags, key", [
    ("spanning", (), "spanning"),
    ("codegree", (), "codegrees"),
    ("width", (), "widths"),
    ("cayley-sum", (), "points"),
    ("cayley-detect", ("--k", "2"), "found"),
    ("join-type", (), "join_type"),
    ("fi-search", (), "found"),
    ("oracle-ehrhart", (), "volumes"),
])
def test_commands_run(tmp_path, command, flags, key):
    code, rep, _ = call(tmp_path, command, doc(D2), *flags)
    assert code == 0, rep
    assert key in rep["result"]


def test_precondition_exit_code(tmp_path):
    code, rep, _ = call(tmp_path, "mixed-volume", doc(D2))
    assert code == 2 and rep["error"]["kind"] == "precondition"
    assert "configurations" in rep["error"]["message"]
    code, rep, _ = call(tmp_path, "fi-search", doc([(0, 0), (2, 0), (0, 2)]))
    assert code == 2 and "spanning" in rep["error"]["message"]


def test_input_error_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    buf = io.StringIO()
    assert run(["spanning", str(path)], stdout=buf) == 1
    assert json.loads(buf.getvalue())["error"]["kind"] == "input"


def test_fi_verify_round_trip(tmp_path):
    code, rep, _ = call(tmp_path, "fi-search", SEGMENTS_DOC)
    cert = rep["result"]["certificate"]
    code, rep, _ = call(tmp_path, "fi-verify", dict(SEGMENTS_DOC, certificate=cert))
    assert code == 0 and rep["result"]["valid"]
    cert["c"] = 5
    code, rep, _ = call(tmp_path, "fi-verify", dict(SEGMENTS_DOC, certificate=cert))
    assert code == 0 and not rep["result"]["valid"]


def test_oracle_witness_records_seed(tmp_path):
    code, rep, _ = call(tmp_path, "oracle-witness", SEGMENTS_DOC, "--samples", "50", "--seed", "4")
    assert code == 0 and rep["seed"] == 4
    assert rep["result"]["found"] is False and rep["result"]["separable_impossibility"] is True


def test_oracle_witness_with_coefficients(tmp_path):
    # x + y - 2 and x^2 + y^2 - 2, coefficients in sorted point order
    d = doc(D2, [(0, 0), (2, 0), (0, 2)],
            coefficients=[[-2, 1, 1], [-2, 1, 1]])
    d["configurations"][0]["points"] = [[0, 0], [0, 1], [1, 0]]
    d["configurations"][1]["points"] = [[0, 0], [0, 2], [2, 0]]
    code, rep, path = call(tmp_path, "oracle-witness", d, "--samples", "200")
    assert code == 0 and rep["result"]["found"]
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(rep))
    buf = io.StringIO()
    assert run(["oracle-witness", str(path), "--recheck", str(saved)], stdout=buf) == 0


@pytest.mark.parametrize("command, document, flags", [
    ("defective", doc(D2, D2), ()),
    ("defective", doc(D2, TWO_D2), ()),
    ("defective", doc([(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]), ()),
    ("defective", SEGMENTS_DOC, ()),
    ("mixed-volume", doc(D2, TWO_D2), ()),
    ("interior-points", SEGMENTS_DOC, ()),
    ("interior-points", doc([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]), ("--lambda",)),
    ("width", doc(TWO_D2), ()),
    ("cayley-detect", doc([(0, 0), (1, 0), (0, 1), (1, 1)]), ("--k", "1")),
    ("fi-search", SEGMENTS_DOC, ()),
    ("spanning", SEGMENTS_DOC, ()),
])
def test_recheck_replays_reports(tmp_path, command, document, flags):
    code, rep, path = call(tmp_path, command, document, *flags)
    assert code == 0
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(rep))
    buf = io.StringIO()
    assert run([command, str(path), "--recheck", str(saved), *flags], stdout=buf) == 0
    assert json.loads(buf.getvalue())["result"]["recheck"] is True


def test_recheck_flags_tampered_report(tmp_path):
    code, rep, path = call(tmp_path, "interior-points", SEGMENTS_DOC)
    rep["result"]["points"] = [[0, 0]]
    saved = tmp_path / "report.json"
    saved.write_text(json.dumps(rep))
    buf = io.StringIO()
    assert run(["interior-points", str(path), "--recheck", str(saved)], stdout=buf) == 3


def test_module_entry_point(tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(doc(D2, D2)))
    out = subprocess.run([sys.executable, "-m", "latdefect", "defective", str(path)],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["verdict"] == "Defective"


def test_matrix_converter():
    from latdefect.cli import document_from_matrices

    d = document_from_matrices([[[0, 1, 2], [0, 0, 0]], [[0, 0, 0], [0, 1, 2]]], labels=["A0", "A1"])
    assert parse_input(json.dumps(d)).family() == parse_input(json.dumps(SEGMENTS_DOC)).family()
    with pytest.raises(InputError):
        document_from_matrices([[[0, 1], [0]]])
