import json
import subprocess
import sys

import pytest

from apndesigns.affine import OrbitDesign
from apndesigns.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out)


def test_block_kasami(capsys, tmp_path):
    path = tmp_path / "b.json"
    code, _, _ = run(capsys, "block", "--family", "kasami", "--n", "5", "--i", "1", "--out", str(path))
    data = json.loads(path.read_text())
    assert code == 0 and data["schema"] == "1" and len(data["members"]) == 16


def test_block_bad_gold_params(capsys):
    code, _, err = run(capsys, "block", "--family", "gold", "--n", "4", "--i", "2")
    assert code == 2 and "gcd" in err


def test_block_segre_is_ov6(capsys):
    code, data = run_json(capsys, "block", "--family", "oval-segre", "--n", "5")
    assert code == 0 and data["params"]["s"] == 6


def test_missing_family_params(capsys):
    assert run(capsys, "block", "--family", "kasami", "--n", "5")[0] == 2
    assert run(capsys, "block", "--family", "random", "--n", "5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["block", "--family", "nosuch"])
    assert exc.value.code == 2


def test_verify_kasami(capsys):
    code, out, _ = run(capsys, "verify", "--family", "kasami", "--n", "5", "--i", "1", "--format", "text")
    assert code == 0 and out.strip() == "3-(32,16,112), stab=1, blocks=992"


def test_verify_with_criteria_from_block_file(capsys, tmp_path):
    path = tmp_path / "b.json"
    run(capsys, "block", "--family", "kasami", "--n", "5", "--i", "2", "--out", str(path))
    code, data = run_json(capsys, "verify", "--block", str(path), "--criteria")
    assert code == 0 and data["criteria"]["agree"] and data["criteria"]["source"] == "transfer pair"
    assert data["t2"] == {"t": 2, "v": 32, "k": 16, "lambda": 240}


def test_verify_random_is_negative(capsys):
    code, data = run_json(capsys, "verify", "--family", "random", "--n", "5", "--k", "16", "--seed", "1")
    assert code == 1 and "not_a_design" in data["t3"]


def test_code_reports(capsys):
    code, out, _ = run(capsys, "code", "--family", "kasami", "--n", "5", "--i", "1", "--dual", "--format", "text")
    assert code == 0 and out.strip() == "[32,11,12], dual [32,21,6], self-dual false"


def test_code_exact_flag_over_budget(capsys):
    code, _, err = run(capsys, "code", "--family", "kasami", "--n", "7", "--i", "2", "--exact")
    assert code == 2 and "bounded" in err


def test_conjecture_exit_codes(capsys):
    code, data = run_json(capsys, "conjecture", "--id", "unique-root", "--n", "5,7")
    assert code == 0 and [r["verdict"] for r in data["results"]] == ["holds", "holds"]
    assert run(capsys, "conjecture", "--id", "niho-AP", "--n", "5")[0] == 1
    assert run(capsys, "conjecture", "--id", "welch-AP", "--n", "9")[0] == 3


def test_classify(capsys):
    code, data = run_json(capsys, "classify", "--labels", "KA_5_1,KA_5_4,KA_5_2")
    assert code == 0 and data["classes"] == [["KA_5_1", "KA_5_4"], ["KA_5_2"]]
    code, data = run_json(capsys, "classify", "--labels", "AP_5_13")
    assert data["classes"] == [["AP_5_13"]]


def test_walsh(capsys):
    code, data = run_json(capsys, "walsh", "--family", "kasami", "--n", "5", "--i", "1")
    assert code == 0 and data["semi_bent"] is True
    assert sum(data["distribution"].values()) == 32


def test_orbit_binary(capsys, tmp_path):
    path = tmp_path / "o.bin"
    code, _, _ = run(capsys, "orbit", "--label", "AP_5_5", "--binary", "--out", str(path))
    D = OrbitDesign.from_binary(path.read_bytes())
    assert code == 0 and D.num_blocks == 62 and D.stab_order == 16


def test_output_is_reproducible(capsys):
    argv = ("verify", "--family", "random", "--n", "5", "--k", "9", "--seed", "7", "--no-timestamp")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    code, out, _ = run(capsys, "block", "--family", "kasami", "--n", "5", "--i", "1")
    assert "timestamp" in json.loads(out)


def test_threads_flag(capsys, monkeypatch):
    monkeypatch.delenv("APNDESIGNS_THREADS", raising=False)
    code, out, _ = run(capsys, "verify", "--label", "KA_5_1", "--threads", "2", "--format", "text")
    assert code == 0 and out.startswith("3-(32,16,112)")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "apndesigns", "block", "--label", "OV_5_6",
                          "--format", "text"], capture_output=True, text=True)
    assert res.returncode == 0 and "k=16" in res.stdout
