import json

import numpy as np
import pytest

from twoway_teleport import cli


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def invoke_json(capsys, *argv):
    code, out, _ = invoke(capsys, *argv)
    return code, json.loads(out)


def complex_grid(m):
    return np.array(m["re"]) + 1j * np.array(m["im"])


@pytest.mark.parametrize("argv", [
    ["channel"],
    ["run", "--random", "--seed", "1"],
    ["branches", "--seed", "1"],
    ["metrics"],
    ["sample", "--shots", "64", "--seed", "1"],
])
def test_json_is_single_document_with_meta(capsys, argv):
    code, out, _ = invoke(capsys, *argv)
    assert code == 0
    doc, end = json.JSONDecoder().raw_decode(out)
    assert out[end:].strip() == ""
    assert set(doc) == {"meta", "result"}
    assert doc["meta"]["command"] == argv[0]
    assert {"seed", "table", "version"} <= set(doc["meta"])


def test_channel_nonzero_rows(capsys):
    _, doc = invoke_json(capsys, "channel")
    rows = doc["result"]["amplitudes"]
    assert [r["basis"] for r in rows] == ["000000", "010101", "101010", "111111"]
    assert all(r["re"] == 0.5 and r["im"] == 0.0 for r in rows)


def test_channel_full(capsys):
    _, doc = invoke_json(capsys, "channel", "--full")
    rows = doc["result"]["amplitudes"]
    assert len(rows) == 64
    assert sum(r["re"] != 0 for r in rows) == 4


def test_run_random_is_perfect(capsys):
    _, doc = invoke_json(capsys, "run", "--random", "--seed", "7", "--table", "derived")
    res = doc["result"]
    assert res["fidelity_a"] >= 1 - 1e-9 and res["fidelity_b"] >= 1 - 1e-9
    assert doc["meta"]["seed"] == 7 and doc["meta"]["table"] == "derived"


def test_run_classical_corner(capsys):
    _, doc = invoke_json(capsys, "run", "--a0", "1", "--a1", "0", "--b0", "1", "--b1", "0",
                         "--seed", "3", "--dump-density")
    e00 = np.zeros((4, 4))
    e00[0, 0] = 1
    for m in doc["result"]["density"].values():
        np.testing.assert_allclose(complex_grid(m), e00, atol=1e-12)


def test_run_complex_coefficients(capsys):
    _, doc = invoke_json(capsys, "run", "--a0", "0.6", "--a1", "0.8i", "--b0", "0.8", "--b1", "-0.6",
                         "--forced", "psi-,phi-", "--table", "paper")
    res = doc["result"]
    assert res["coefficients"]["a1"] == {"re": 0.0, "im": 0.8}
    assert res["outcome"] == {"alice": "psi-", "bob": "phi-"}
    assert res["fidelity_a"] == pytest.approx(1) and res["fidelity_b"] == pytest.approx(1)


def test_run_is_byte_identical(capsys):
    argv = ["run", "--random", "--seed", "123", "--dump-density"]
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)
    assert first == second


def test_branches_report(capsys):
    _, doc = invoke_json(capsys, "branches", "--seed", "5")
    res = doc["result"]
    assert len(res["branches"]) == 16
    assert all(abs(b["probability"] - 0.0625) < 1e-12 for b in res["branches"])
    assert all(b["fidelity_a"] >= 1 - 1e-9 and b["fidelity_b"] >= 1 - 1e-9 for b in res["branches"])
    assert res["success_probability"] == 1.0
    assert len(res["audit"]["rows"]) == 16
    assert sum(res["audit"]["verdict_counts"].values()) == 16


def test_branches_csv_prints_probability(capsys):
    _, out, _ = invoke(capsys, "branches", "--seed", "5", "--format", "csv")
    body = [l for l in out.splitlines() if l.startswith(("phi", "psi"))][:16]
    assert all(",0.0625," in l for l in body)


def test_metrics_default_table(capsys):
    code, doc = invoke_json(capsys, "metrics")
    assert code == 0
    rows = {(r["label"], r["bqt"]): r for r in doc["result"]["rows"]}
    assert rows[("Ours", "2<->2")]["eta"] == pytest.approx(0.4, abs=1e-12)
    assert rows[("Yan2013", "1<->1")]["matches_claim"] is True
    chen = rows[("Chen2020", "2(1)<->2")]
    assert chen["eta"] == 0.25 and chen["matches_claim"] is False
    assert doc["result"]["flagged"] == ["Chen2020"]


def test_metrics_zero_denominator(capsys, tmp_path):
    path = tmp_path / "rows.json"
    path.write_text(json.dumps([
        {"label": "ok", "qibt": 4, "qr": 6, "cr": 4, "aq": 0, "claimed_eta": 0.4},
        {"label": "empty", "qibt": 1, "qr": 0, "cr": 0, "aq": 0},
    ]))
    code, doc = invoke_json(capsys, "metrics", "--schemes", str(path))
    assert code == 1
    bad = doc["result"]["rows"][1]
    assert bad["eta"] is None and bad["error"]
    assert doc["result"]["rows"][0]["matches_claim"] is True


def test_metrics_missing_file_names_flag(capsys, tmp_path):
    code, _, err = invoke(capsys, "metrics", "--schemes", str(tmp_path / "nope.json"))
    assert code == 2 and "--schemes" in err


def test_sample_counts(capsys):
    _, doc = invoke_json(capsys, "sample", "--shots", "16000", "--seed", "3")
    res = doc["result"]
    counts = [r["count"] for r in res["counts"]]
    assert len(counts) == 16 and sum(counts) == 16000
    assert all(850 <= c <= 1150 for c in counts)
    assert res["dof"] == 15 and res["p_value"] > 0.001


def test_sample_minimum_shots(capsys):
    code, doc = invoke_json(capsys, "sample", "--shots", "16", "--seed", "0")
    assert code == 0 and sum(r["count"] for r in doc["result"]["counts"]) == 16


@pytest.mark.parametrize("argv,flag", [
    (["sample", "--shots", "15", "--seed", "0"], "--shots"),
    (["run", "--random"], "--seed"),
    (["run", "--a0", "1", "--a1", "1", "--b0", "1", "--b1", "0", "--seed", "1"], "--a0"),
    (["run", "--a0", "1", "--seed", "1"], "--a1"),
    (["run", "--a0", "x", "--a1", "0", "--b0", "1", "--b1", "0", "--seed", "1"], "--a0"),
    (["run", "--random", "--seed", "1", "--forced", "phi+"], "--forced"),
    (["run", "--random", "--a0", "1", "--seed", "1"], "--random"),
])
def test_validation_names_flag(capsys, argv, flag):
    code, out, err = invoke(capsys, *argv)
    assert code == 2 and out == ""
    assert flag in err


@pytest.mark.parametrize("fmt", ["csv", "markdown"])
def test_presentational_formats(capsys, fmt):
    code, out, _ = invoke(capsys, "channel", "--format", fmt)
    assert code == 0
    assert "010101" in out and "0.5" in out
    if fmt == "markdown":
        assert "| basis |" in out
    else:
        assert out.startswith("# ")
