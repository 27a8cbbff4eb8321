import io
import json
import subprocess
import sys

import pytest

from izroupoid.cli import run
from izroupoid.proofs import shipped_script_text

from conftest import GOLDEN


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def algebra_file(tmp_path):
    def write(table, name=None):
        p = tmp_path / f"{name or 'A'}.json"
        p.write_text(json.dumps({"name": name, "table": table}))
        return str(p)
    return write


@pytest.mark.parametrize("argv,golden,code", [
    (("check", "2s", "DM"), "check_2s_DM.txt", 1),
    (("check", "2s", "DM", "--format", "json"), "check_2s_DM.json", 1),
    (("enumerate", "--n", "2"), "enumerate_n2.txt", 0),
    (("enumerate", "--n", "2", "--format", "json"), "enumerate_n2.jsonl", 0),
    (("free", "--gen", "2b", "--k", "1"), "free_2b_k1.txt", 0),
    (("congruences", "4d", "--format", "json"), "congruences_4d.json", 0),
    (("lattice", "--family", "all5subsets"), "lattice.txt", 0),
    (("lattice", "--family", "all5subsets", "--format", "dot"), "lattice.dot", 0),
])
def test_golden_outputs(argv, golden, code):
    got_code, text = call(*argv)
    assert got_code == code
    assert text == (GOLDEN / golden).read_text()


def test_check_from_a_json_file(algebra_file):
    path = algebra_file([[0, 1], [1, 1]], "2s")
    code, text = call("check", path, "DM")
    assert code == 1 and "x=0, y=1" in text
    code, _ = call("check", path, "(x -> y) -> z = ((z' -> x) -> (y -> z)')'")
    assert code == 0


def test_threads_do_not_change_output():
    assert call("enumerate", "--n", "4", "--format", "json") == call("enumerate", "--n", "4", "--format", "json", "--threads", "3")


def test_enumerate_json_keys_are_sorted():
    _, text = call("enumerate", "--n", "3", "--format", "json")
    for line in text.splitlines():
        doc = json.loads(line)
        assert line == json.dumps(doc, sort_keys=True)


def test_budget_exhaustion_exit_code():
    code, _ = call("enumerate", "--n", "4", "--budget", "10")
    assert code == 3
    code, _ = call("free", "--gen", "2z", "2s", "2b", "3k", "4d", "--k", "2", "--budget", "5")
    assert code == 3


@pytest.mark.parametrize("argv", [
    (),
    ("nonsense",),
    ("check", "missing.json", "DM"),
    ("check", "2s", "NOPE"),
    ("check", "2s", "x -> = y"),
    ("enumerate",),
    ("relation", "2z", "--kind", "r1"),
    ("simple", "2s", "--format", "dot"),
    ("suite", "--corpus", "nowhere", "--labels", "I"),
])
def test_usage_and_input_errors(argv):
    assert call(*argv)[0] == 2


def test_malformed_algebra_files(algebra_file, tmp_path):
    assert call("simple", algebra_file([[0, 3], [0, 0]]))[0] == 2
    assert call("simple", algebra_file([[0, 0], [0]]))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("simple", str(bad))[0] == 2
    # simplicity is undefined on the one-element algebra
    assert call("simple", algebra_file([[0]]))[0] == 2


def test_simple_and_relations(algebra_file):
    assert call("simple", "3k")[0] == 0
    prod = [[3, 3, 3, 3], [2, 3, 2, 3], [1, 1, 3, 3], [0, 1, 2, 3]]  # 2b x 2b
    code, text = call("simple", algebra_file(prod, "b2xb2"))
    assert code == 1 and "not simple" in text
    code, text = call("relation", "2z", "--kind", "rpp", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["congruence"] and doc["blocks"] == [[0, 1]]
    assert call("relation", "3k", "--kind", "r1")[0] == 0


def test_member_verdicts():
    code, text = call("member", "2s", "--in", "4d")
    assert code == 1 and "separated by" in text
    code, text = call("member", "3k", "--in", "2z", "2s", "4d", "--format", "json")
    assert code == 0 and json.loads(text)["verdict"] == "member"


def test_lattice_of_explicit_families():
    code, text = call("lattice", "--family", "2z", "2s", "2z,2s", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and len(doc["nodes"]) == 3 and "shape" not in doc


def test_replay(tmp_path):
    code, text = call("replay", str(_shipped(tmp_path, "L3.3.20")))
    assert code == 0 and text == (GOLDEN / "replay_L3.3.20.txt").read_text()
    mutated = shipped_script_text("L3.3.20").replace("= (b -> a) by I20", "= (b -> a') by I20")
    p = tmp_path / "bad.prf"
    p.write_text(mutated)
    code, text = call("replay", str(p), "--format", "json")
    assert code == 1 and json.loads(text)["failing_step"] == 2


def test_replay_of_a_lemma_citing_script(tmp_path):
    assert call("replay", str(_shipped(tmp_path, "L4.3.bd2")))[0] == 0


def test_replay_chain_break_is_a_failure(tmp_path):
    p = tmp_path / "broken.prf"
    p.write_text(shipped_script_text("L3.3.20") + "(a -> b) = (a -> b)' by I20\n")
    code, text = call("replay", str(p))
    assert code == 1 and "chain break" in text


def test_suite_over_a_corpus_directory(tmp_path):
    _, jsonl = call("enumerate", "--n", "3", "--i20", "--format", "json")
    (tmp_path / "n3.jsonl").write_text(jsonl)
    code, text = call("suite", "--corpus", str(tmp_path), "--labels", "L3.3.1-L3.3.63")
    assert code == 0 and text.strip().endswith("checks passed")
    code, text = call("suite", "--corpus", str(tmp_path), "--labels", "BA")
    assert code == 1 and text.startswith("FAIL")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "izroupoid.cli", "check", "2b", "BA"], capture_output=True, text=True)
    assert proc.returncode == 0 and "holds" in proc.stdout


def _shipped(tmp_path, name):
    p = tmp_path / f"{name}.prf"
    p.write_text(shipped_script_text(name))
    return p
