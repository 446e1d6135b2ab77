import json
import subprocess
import sys

import numpy as np
import pytest

from gauscoh.channels import GaussianChannel, displacement_channel, identity_channel, random_channel
from gauscoh.cli import emit_report, main
from gauscoh.io import RecordError, parse_record, to_record
from gauscoh.states import GaussianState, vacuum_state
from gauscoh.superchannels import GaussianSuperchannel, identity_superchannel, random_superchannel


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        data = obj if isinstance(obj, (dict, list, str)) else to_record(obj)
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_vacuum(capsys, write):
    code, out, _ = run(capsys, "validate", "--state", write("vac.json", vacuum_state()))
    assert code == 0
    assert "valid" in out and "(1)" in out
    code, out, _ = run(capsys, "validate", "--state", write("vac.json", vacuum_state()), "--format", "json")
    rep = json.loads(out)
    assert rep["valid"] and rep["symplectic_eigenvalues"] == [1.0] and rep["version"] == 1


def test_validate_rejections_exit_one(capsys, write):
    bad = GaussianState(0.5 * np.eye(2), np.zeros(2))
    code, out, err = run(capsys, "validate", "--state", write("bad.json", bad))
    assert code == 1 and "invalid" in out and "uncertainty" in err
    code, _, _ = run(capsys, "validate", "--channel",
                     write("c.json", GaussianChannel(2 * np.eye(2), np.zeros((2, 2)), np.zeros(2))))
    assert code == 1
    sc = GaussianSuperchannel(np.eye(2), np.diag([1.0, 2.0]), np.zeros((2, 2)), np.zeros(2))
    code, _, err = run(capsys, "validate", "--superchannel", write("sc.json", sc))
    assert code == 1 and "orthogonal" in err


def test_coherence_of_displacement_channel(capsys, write):
    path = write("disp.json", displacement_channel(1.0))
    code, out, _ = run(capsys, "coherence", "--channel", path, "--format", "json")
    res = json.loads(out)
    assert code == 0
    assert res["status"] == "converged"
    assert res["value"] == pytest.approx(2.0, abs=1e-9)
    assert res["argmax_nu"] == pytest.approx([1.0], abs=1e-3)
    assert set(res) >= {"value", "status", "argmax_nu", "evaluations"}
    code, out, _ = run(capsys, "coherence", "--channel", path)
    assert "bits" in out and "converged" in out
    code, out, _ = run(capsys, "coherence", "--channel", path, "--closed-form", "--format", "json")
    assert json.loads(out)["evaluations"] == 0


def test_coherence_of_state(capsys, write):
    code, out, _ = run(capsys, "coherence", "--state",
                       write("coh.json", GaussianState(np.eye(2), [2.0, 0.0])), "--format", "json")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(2.0)


def test_strict_divergence(capsys, write):
    s = np.sqrt(0.5)
    B = np.array([[s, 0, -s, 0], [0, s, 0, -s], [s, 0, s, 0], [0, s, 0, s]])
    path = write("bs.json", GaussianChannel(B, np.zeros((4, 4)), np.zeros(4)))
    code, out, _ = run(capsys, "coherence", "--channel", path, "--format", "json")
    assert code == 0 and json.loads(out)["status"] == "divergent"
    code, out, err = run(capsys, "coherence", "--channel", path, "--strict", "--format", "json")
    assert code == 1 and json.loads(out)["value"] is None and "divergent" in err


def test_classify_identity(capsys, write):
    code, out, _ = run(capsys, "classify", "--channel", write("id.json", identity_channel(2)))
    assert code == 0 and "incoherent" in out
    code, out, _ = run(capsys, "classify", "--channel", write("id.json", identity_channel(2)), "--format", "json")
    rep = json.loads(out)
    assert rep["verdict"] == "incoherent" and rep["structure"]["r"] == [0, 1]


def test_classify_names_failing_clause(capsys, write):
    code, out, _ = run(capsys, "classify", "--channel", write("d.json", displacement_channel(0.5)))
    assert code == 0 and "coherent" in out and "displacement" in out
    sc = GaussianSuperchannel(np.eye(2), np.eye(2), np.zeros((2, 2)), np.array([0.1, 0.0]))
    code, out, _ = run(capsys, "classify", "--superchannel", write("sc.json", sc), "--format", "json")
    assert json.loads(out)["failed_clause"] == "dbar"


def test_apply_and_choi(capsys, write):
    code, out, _ = run(capsys, "apply", "--channel", write("d.json", displacement_channel(1.0)),
                       "--state", write("v.json", vacuum_state()), "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["d0"] == [2.0, 0.0] and rec["V"] == [[1.0, 0.0], [0.0, 1.0]]
    code, out, _ = run(capsys, "choi", "--channel", write("id.json", identity_channel()), "--r", "0",
                       "--format", "json")
    assert json.loads(out)["V"] == np.eye(4).tolist()


def test_superchannel_commands(capsys, write):
    sc_path = write("sc.json", identity_superchannel())
    c_path = write("c.json", random_channel(1, 2))
    code, out, _ = run(capsys, "superchannel", "apply", "--sc", sc_path, "--channel", c_path, "--format", "json")
    assert code == 0
    assert parse_record("channel", json.loads(out)).T.tolist() == random_channel(1, 2).T.tolist()
    code, out, _ = run(capsys, "superchannel", "decompose", "--sc", sc_path, "--format", "json")
    rep = json.loads(out)
    assert rep["pre"]["T"] == np.eye(2).tolist() and rep["post"]["N"] == np.zeros((2, 2)).tolist()
    code, out, _ = run(capsys, "superchannel", "decompose", "--sc", sc_path)
    assert "pre channel" in out and "post channel" in out


def test_oracle_commands(capsys, write):
    path = write("coh.json", GaussianState(np.eye(2), [2.0, 0.0]))
    code, out, _ = run(capsys, "oracle", "cr", "--state", path, "--cutoff", "80", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["abs_err"] <= 1e-4 and rep["cutoff"] == 80
    code, out, _ = run(capsys, "oracle", "char", "--state", path, "--cutoff", "100", "--format", "json")
    rep = json.loads(out)
    assert rep["grid_points"] == 25 and rep["abs_err"] <= 1e-5
    code, out, _ = run(capsys, "oracle", "char", "--state", path, "--cutoff", "60", "--lambda", "0.3", "0.2")
    assert code == 0 and "abs_err" in out


def test_oracle_rejects_unsupported_state(capsys, write):
    path = write("sq.json", GaussianState(np.diag([2.0, 0.5]), np.zeros(2)))
    code, _, err = run(capsys, "oracle", "cr", "--state", path, "--cutoff", "40")
    assert code == 1 and "nu * I2" in err


@pytest.mark.parametrize("content, needle", [
    ("{not json", "malformed JSON"),
    ({"V": [[1, 0], [0, 1]]}, "missing field 'd0'"),
    ({"V": [1, 0, 0, 1], "d0": [0, 0]}, "field 'V' must be a nested row-major matrix"),
    ({"V": [[1, 0], [0, 1]], "d0": ["a", 0]}, "field 'd0' is not a numeric array"),
    ({"V": [[1, 0], [0, 1]], "d0": [0, 0, 0]}, "d0"),
    ({"n": 2, "V": [[1, 0], [0, 1]], "d0": [0, 0]}, "field 'n'"),
])
def test_parse_errors_exit_two(capsys, write, content, needle):
    code, _, err = run(capsys, "validate", "--state", write("x.json", content))
    assert code == 2 and needle in err


def test_missing_file_exit_two(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--state", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_channel_field_errors(write, capsys):
    code, _, err = run(capsys, "validate", "--channel", write("c.json", {"T": [[1, 0], [0, 1]], "N": [[0, 0], [0, 0]]}))
    assert code == 2 and "missing field 'd'" in err
    code, _, err = run(capsys, "superchannel", "decompose", "--sc", write("s.json", {"A": [[1]], "O": [[1]], "Y": [[1]], "dbar": [0]}))
    assert code == 2


def test_unknown_command_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


@pytest.mark.parametrize("kind, obj", [
    ("state", GaussianState(np.array([[2.5, 0.3], [0.3, 1.7]]), [0.1, -2.0 / 3.0])),
    ("channel", random_channel(2, 11)),
    ("superchannel", random_superchannel(2, 12)),
])
def test_json_round_trip_is_bit_identical(kind, obj):
    text = json.dumps(to_record(obj))
    again = json.dumps(to_record(parse_record(kind, json.loads(text))))
    assert again == text


def test_emitted_records_round_trip(capsys, write):
    path = write("d.json", random_channel(1, 4))
    _, out, _ = run(capsys, "superchannel", "apply", "--sc", write("sc.json", random_superchannel(1, 5)),
                    "--channel", path, "--format", "json")
    c = parse_record("channel", json.loads(out))
    assert json.dumps(to_record(c), indent=2) == out.strip()


def test_sample_determinism_and_seed_override(capsys, monkeypatch):
    _, first, _ = run(capsys, "sample", "incoherent-superchannel", "--modes", "2", "--seed", "3", "--format", "json")
    _, second, _ = run(capsys, "sample", "incoherent-superchannel", "--modes", "2", "--seed", "3", "--format", "json")
    assert first == second
    _, other, _ = run(capsys, "sample", "incoherent-superchannel", "--modes", "2", "--seed", "4", "--format", "json")
    assert other != first
    monkeypatch.setenv("GAUSCOH_SEED", "3")
    _, overridden, _ = run(capsys, "sample", "incoherent-superchannel", "--modes", "2", "--seed", "4", "--format", "json")
    assert overridden == first
    parse_record("superchannel", json.loads(first))


def test_coherence_output_is_deterministic(capsys, write):
    path = write("c.json", random_channel(2, 8))
    outs = {run(capsys, "coherence", "--channel", path, "--format", "json")[1] for _ in range(2)}
    assert len(outs) == 1


def test_emit_report_text_table():
    text = emit_report({"value": 2.0, "status": "converged", "argmax_nu": [1.0]}, "text")
    lines = text.splitlines()
    assert lines[0].startswith("value") and "2 bits" in lines[0]
    assert len({line.index(line.split()[1]) for line in lines}) == 1


def test_module_entry_point(tmp_path):
    path = tmp_path / "vac.json"
    path.write_text(json.dumps(to_record(vacuum_state())))
    proc = subprocess.run([sys.executable, "-m", "gauscoh", "validate", "--state", str(path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "valid" in proc.stdout
