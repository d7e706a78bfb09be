import json
import subprocess
import sys


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "rbscat.cli", *args],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_build_rbs_json_and_determinism(tmp_path):
    code1, out1, _ = run_cli("build", "rbs", "--ring", "F2", "--n", "2")
    code2, out2, _ = run_cli("build", "rbs", "--ring", "F2", "--n", "2")
    assert code1 == code2 == 0
    assert out1 == out2  # byte-stable
    doc = json.loads(out1)
    assert doc["schema"] == "fincat/1"
    assert len(doc["objects"]) == 4
    assert doc["ring"] == {"kind": "Fp", "p": 2, "k": 1}


def test_build_rbs_rank_zero():
    code, out, _ = run_cli("build", "rbs", "--ring", "F2", "--n", "0")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["objects"]) == 1 and len(doc["morphisms"]) == 1


def test_build_tits():
    code, out, _ = run_cli("build", "tits", "--q", "2", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["dims"] == [14, 21]
    assert doc["steinberg_rank"] == 8


def test_homology_roundtrip(tmp_path):
    art = tmp_path / "rbs.json"
    code, out, _ = run_cli("build", "rbs", "--ring", "F3", "--n", "2",
                           "--out", str(art))
    assert code == 0
    code, out, _ = run_cli("homology", "--artifact", str(art),
                           "--depth", "2", "--coeff", "Z", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["betti"]["1"] == 0
    assert doc["torsion"]["1"] == [2]


def test_homology_inline_f2():
    code, out, _ = run_cli("homology", "rbs", "--ring", "F2", "--n", "2",
                           "--depth", "3", "--coeff", "F2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["betti"] == {"0": 1, "1": 0, "2": 0}


def test_verify_pass_and_fail_codes():
    code, out, _ = run_cli("verify", "steinberg", "--q", "2", "--n", "2")
    assert code == 0
    assert "PASS" in out
    code, _, err = run_cli("verify", "definitely-not-a-check")
    assert code == 1


def test_verify_json_report():
    code, out, _ = run_cli("verify", "poset-regularity", "--ring", "F2",
                           "--n", "2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "pass"
    assert doc["name"] == "poset-regularity"
    assert "provenance" in doc


def test_verify_list():
    code, out, _ = run_cli("verify", "--list")
    assert code == 0
    assert "steinberg" in out and "q-suite" in out


def test_guard_exit_code(tmp_path):
    cfg = tmp_path / "guards.json"
    cfg.write_text(json.dumps({"max_gl_candidates": 10}))
    code, _, err = run_cli("--config", str(cfg), "build", "rbs",
                           "--ring", "F3", "--n", "2")
    assert code == 2
    assert "guard" in err.lower()


def test_usage_exit_code():
    code, _, _ = run_cli("build", "nonsense")
    assert code == 1
    code, _, _ = run_cli()
    assert code == 1


def test_invalid_ring_exit_code():
    code, _, err = run_cli("build", "rbs", "--ring", "F6", "--n", "2")
    assert code == 1


def test_bench_kernels():
    code, out, _ = run_cli("bench", "snf", "--size", "25")
    assert code == 0 and "snf 25x25" in out
    code, out, _ = run_cli("bench", "nerve", "--depth", "4")
    assert code == 0 and "[1, 5, 25, 125, 625]" in out
    code, out, _ = run_cli("bench", "gl-enum", "--ring", "F2", "--n", "3")
    assert code == 0 and "168" in out
