from __future__ import annotations

import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ctxlab import acceptance, cli
from ctxlab.catalog import GHZ_TABLE, builtin
from ctxlab.io import density_to_json, scenario_to_json, state_to_json


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, _ = run(*argv, "--json")
    return code, json.loads(out)


def test_list():
    code, out, _ = run("list")
    assert code == 0 and "ceg18" in out and "cycle<n>" in out


def test_ks_ceg18():
    code, out, _ = run("ks", "ceg18")
    assert code == 0
    assert out.splitlines()[0] == "KS-contextual: yes (exhaustive, 0 assignments)"


def test_ks_chsh_counts():
    code, doc = run_json("ks", "--scenario", "chsh")
    assert code == 0 and doc["ks_contextual"] is False and doc["assignments"] == 16


def test_ineq_chsh():
    code, out, _ = run("ineq", "chsh", "--ineq", "chsh", "--state", "singlet")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "S = 3.41421356"
    assert "NC bound = 3" in lines and "algebraic bound = 4" in lines


def test_table_ghz_grid():
    code, doc = run_json("table", "ghz322", "--state", "ghz")
    assert code == 0
    assert [r["context"] for r in doc["rows"]] == list(GHZ_TABLE)
    for r in doc["rows"]:
        assert len(r["probabilities"]) == 8
        assert np.allclose(list(r["probabilities"].values()), np.array(GHZ_TABLE[r["context"]]) / 8)
    code, out, _ = run("table", "ghz322", "--state", "ghz")
    assert len([line for line in out.splitlines() if " | " in line]) == 9  # header + 8 rows


def test_table_without_layout():
    code, out, _ = run("table", "kcbs", "--state", "kcbs")
    assert code == 0 and out.count("K") >= 5


def test_classify_and_fraction():
    code, doc = run_json("classify", "chsh", "--state", "hardy")
    assert code == 0
    assert doc["flags"]["logically_contextual"] and not doc["flags"]["strongly_contextual"]
    assert doc["logical_witness"] == "++|ZS"
    code, doc = run_json("fraction", "kcbs", "--state", "kcbs")
    assert doc["contextual_fraction"] == pytest.approx(2 * np.sqrt(5) - 4, abs=1e-8)
    assert doc["format_version"] == 1


def test_show_and_enumerate():
    code, doc = run_json("show", "yu_oh")
    assert code == 0 and doc["atoms"] == 25 and doc["validity"] == "valid"
    code, doc = run_json("enumerate", "chsh")
    assert code == 0 and doc["count"] == 16 and not doc["truncated"]


def test_ks_assignment_uses_vector_set():
    code, doc = run_json("ks-assignment", "ceg17")
    assert code == 0 and doc["found"] and doc["vectors"] == 17
    code, doc = run_json("ks-assignment", "ceg18")
    assert code == 0 and not doc["found"]


def test_saturate_output(tmp_path):
    path = tmp_path / "kcbs.json"
    code, out, _ = run("saturate", "kcbs", "--output", str(path))
    assert code == 0 and "atoms: 10" in out
    code, doc = run_json("show", str(path))
    assert doc["atoms"] == 10


def test_file_inputs(tmp_path):
    sc = tmp_path / "chsh.json"
    sc.write_text(json.dumps(scenario_to_json(builtin("chsh").scenario)))
    st = tmp_path / "singlet.json"
    st.write_text(json.dumps(density_to_json(builtin("chsh").densities["singlet"], str(sc))))
    ineq = tmp_path / "w.json"
    ineq.write_text(json.dumps({"weights": {"++|ZS": 1, "--|ZS": 1}}))
    code, doc = run_json("ineq", "--state", str(st), "--ineq", str(ineq))
    assert code == 0 and doc["value"] == pytest.approx((1 + 1 / np.sqrt(2)) / 2, abs=1e-8)
    probs = tmp_path / "p.json"
    probs.write_text(json.dumps(state_to_json(builtin("chsh").states["pr_box"], "chsh")))
    code, doc = run_json("classify", "chsh", "--state", str(probs))
    assert code == 0 and doc["flags"]["strongly_contextual"]


def test_input_errors(tmp_path):
    assert run("ks", "nope")[0] == 2
    assert "unknown builtin" in run("ks", "nope")[2]
    assert run("classify", "chsh", "--state", "zzz")[0] == 2
    assert run("ineq", "chsh", "--ineq", "zzz")[0] == 2
    assert run("show")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run("show", str(bad))[0] == 2
    wrong_dim = tmp_path / "rho.json"
    wrong_dim.write_text(json.dumps(density_to_json(builtin("kcbs").densities["kcbs"])))
    code, _, err = run("classify", "chsh", "--state", str(wrong_dim))
    assert code == 2 and "dimension" in err
    assert run("ks", "chsh", "--limit", "0")[0] == 2
    assert run("nonsense")[0] == 2


def test_refusals():
    code, doc = run_json("enumerate", "chsh", "--limit", "3")
    assert code == 1 and doc["truncated"]
    code, _, err = run("fraction", "chsh", "--state", "singlet", "--limit", "3")
    assert code == 1 and "refused" in err


def test_json_byte_stable():
    a = run("fraction", "chsh", "--state", "hardy", "--json")[1]
    b = run("fraction", "chsh", "--state", "hardy", "--json")[1]
    assert a == b


def test_nine_significant_digits():
    _, doc = run_json("ineq", "kcbs", "--ineq", "kcbs", "--state", "kcbs")
    assert doc["value"] == 2.23606798


def test_no_color_when_disabled(monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True

    out = Tty()
    cli.run(["ks", "ceg18"], out=out, err=io.StringIO())
    assert "\033[" in out.getvalue()
    monkeypatch.setenv("CTXLAB_COLOR", "0")
    out = Tty()
    cli.run(["ks", "ceg18"], out=out, err=io.StringIO())
    assert "\033[" not in out.getvalue()


def test_selfcheck_exit_code(monkeypatch):
    def fake(passed):
        r = acceptance.CriterionResult("0", "fake", passed, ["ok"], 0.0)
        return lambda: [r]

    monkeypatch.setattr(acceptance, "run_all", fake(True))
    assert run("selfcheck")[0] == 0
    monkeypatch.setattr(acceptance, "run_all", fake(False))
    code, out, _ = run("selfcheck")
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ctxlab", "ks", "kcbs"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("KS-contextual: no")
