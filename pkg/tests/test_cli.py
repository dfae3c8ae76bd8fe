import json
import subprocess
import sys

import pytest

from bwcoh import natsys
from bwcoh.cli import main

from conftest import DATA, GOLDEN


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(list(argv) + ["--format", "json"], capsys)
    return code, json.loads(out), err


# bw


def test_bw_arrow_initial_object(capsys):
    code, out, _ = run(["bw", DATA / "arrow.json", DATA / "arrow_functor.json", "--ring", "z"], capsys)
    assert code == 0
    assert "H^0 = Z\nH^1 = 0\nH^2 = 0\nH^3 = 0" in out


def test_bw_terminal_constant(capsys):
    code, rep, _ = run_json(["bw", DATA / "terminal.json", DATA / "constant1.json", "--ring", "z"], capsys)
    assert code == 0
    assert [c["text"] for c in rep["cohomology"]] == ["Z", "0", "0", "0"]


def test_bw_z2_monoid_integral(capsys):
    argv = ["bw", DATA / "z2_monoid_category.json", DATA / "constant1.json", "--ring", "z", "--nmax", "4"]
    code, rep, _ = run_json(argv, capsys)
    assert code == 0
    assert [c["text"] for c in rep["cohomology"]] == ["Z", "0", "Z/2", "0", "Z/2"]


def test_bad_composition_table_names_triple(capsys):
    code, out, err = run(["bw", DATA / "bad_assoc.json", DATA / "constant1.json"], capsys)
    assert code == 2 and out == ""
    assert "bad_assoc.json" in err and "AssocViolation" in err
    assert "(f, g, h) = (x, y, x)" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(["bw", tmp_path / "nope.json", DATA / "constant1.json"], capsys)
    assert code == 2 and "nope.json" in err


def test_malformed_json_reports_position(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"objects": [\n  "a",\n}')
    code, _, err = run(["bw", bad, DATA / "constant1.json"], capsys)
    assert code == 2 and "broken.json" in err and "line 3" in err


def test_caps_override_warns(capsys):
    argv = ["bw", DATA / "arrow.json", DATA / "constant1.json", "--caps", "category_morphisms=99"]
    code, _, err = run(argv, capsys)
    assert code == 0
    assert "warning: overriding default caps: category_morphisms=99" in err


def test_unknown_cap_rejected(capsys):
    code, _, err = run(["bw", DATA / "arrow.json", DATA / "constant1.json", "--caps", "bogus=1"], capsys)
    assert code == 2 and "bogus" in err


def test_morphism_cap_enforced(capsys):
    argv = ["bw", DATA / "z2_monoid_category.json", DATA / "constant1.json", "--caps", "category_morphisms=1"]
    code, _, err = run(argv, capsys)
    assert code == 2 and "cap" in err


# group


def test_group_c4_sign_integral(capsys):
    code, out, _ = run(["group", DATA / "c4_sign.json", "--ring", "z"], capsys)
    assert code == 0
    assert "H^0 = 0\nH^1 = Z/2\nH^2 = 0\nH^3 = Z/2" in out


# diagram


def test_diagram_requires_convention(capsys):
    code, _, err = run(["diagram", DATA / "arrow_c2.json"], capsys)
    assert code == 2 and "--convention" in err


def test_discrete_bundle_passes_and_concentrates(capsys):
    code, rep, _ = run_json(["diagram", DATA / "discrete_c2_c3.json", "--convention", "plain"], capsys)
    assert code == 0 and rep["verdict"] == "PASS"
    assert all(v == 0 for col in rep["e2"][1:] for v in col)


def test_terminal_bundle_matches_group_command(capsys, tmp_path):
    action = {"g": [[-1]]}
    bundle = tmp_path / "terminal_c4.json"
    bundle.write_text(json.dumps({
        "index": "terminal",
        "groups": {"constant": {"cyclic": 4}},
        "module": {"modules": {"constant": {"dim": 1, "action": action}}},
    }))
    group = tmp_path / "c4.json"
    group.write_text(json.dumps({"group": {"cyclic": 4}, "module": {"dim": 1, "action": action}}))
    _, d, _ = run_json(["diagram", bundle, "--convention", "plain", "--ring", "f3"], capsys)
    _, g, _ = run_json(["group", group, "--ring", "f3"], capsys)
    assert d["cohomology"] == g["cohomology"]


@pytest.mark.parametrize("convention", ["plain", "cegarra"])
def test_golden_bundle_byte_identical(capsys, convention):
    argv = ["diagram", GOLDEN / "arrow_c2.bundle.json", "--convention", convention, "--nmax", "3", "--format", "json"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert out.encode() == (GOLDEN / f"arrow_c2.{convention}.json").read_bytes()


def test_clipped_tables(capsys):
    argv = ["diagram", DATA / "arrow_c2.json", "--convention", "plain", "--pmax", "1", "--qmax", "1"]
    _, rep, _ = run_json(argv, capsys)
    assert len(rep["e2"]) == 2 and all(len(col) <= 2 for col in rep["e2"])


# spectral


def test_spectral_zigzag(capsys):
    code, rep, _ = run_json(["spectral", DATA / "zigzag_dc.json", "--convention", "plain"], capsys)
    assert code == 0
    assert rep["pages"]["2"] != rep["einf"]
    assert all(v == 0 for col in rep["einf"] for v in col)


def test_spectral_of_bundle(capsys):
    code, rep, _ = run_json(["spectral", DATA / "arrow_c2.json", "--convention", "cegarra"], capsys)
    assert code == 0 and rep["converges"]


# psi


def test_psi_check_valid(capsys):
    code, out, _ = run(["psi", "check", DATA / "f2_psi.json"], capsys)
    assert code == 0 and "FAIL" not in out and "verdict: PASS" in out


def test_psi_check_planted_failure(capsys):
    code, out, _ = run(["psi", "check", DATA / "bad_psi.json"], capsys)
    assert code == 1
    assert "composition: FAIL  (n, m, x) = (t, t, v)" in out


def test_psi_sections_f2(capsys):
    code, rep, _ = run_json(["psi", "sections", DATA / "f2_psi.json"], capsys)
    assert code == 0
    assert rep["sections"] == rep["derivations"] == 1
    assert rep["pairs"][0]["derivation"] == {"0": "0", "1": "0"}


def test_psi_derivations_and_bw_agree(capsys):
    _, ders, _ = run_json(["psi", "derivations", DATA / "dual_idempotent.json"], capsys)
    code, bw, _ = run_json(["psi", "bw", DATA / "dual_idempotent.json"], capsys)
    assert code == 0
    assert 2 ** bw["cohomology"][0]["group"]["rank"] == len(ders["derivations"]) == 2


def test_psi_free(capsys):
    code, out, _ = run(["psi", "free", DATA / "free_idempotent.json"], capsys)
    assert code == 0
    assert "Ψ^t: a ↦ a^(t), a^(t) ↦ a^(t)" in out


# verify


def test_verify_module_scope(capsys):
    code, rep, _ = run_json(["verify", "groupcoh", "--seed", "3"], capsys)
    assert code == 0 and rep["verdict"] == "PASS"
    assert {p["module"] for p in rep["properties"]} == {"groupcoh"}


def test_verify_unknown_scope(capsys):
    code, _, err = run(["verify", "nonsense"], capsys)
    assert code == 2 and "nonsense" in err


def test_verify_diagramcoh_runs_25_convergence_cases(capsys):
    _, rep, _ = run_json(["verify", "diagramcoh"], capsys)
    conv = {p["name"]: p for p in rep["properties"]}["einf_converges_to_total"]
    assert conv["cases"] == 25 and conv["verdict"] == "PASS"


def test_flipped_sign_fails_verify(capsys, monkeypatch):
    monkeypatch.setattr(natsys, "_merge_sign", lambda j: 1)
    code, rep, _ = run_json(["verify", "natsys"], capsys)
    assert code == 1
    props = {p["name"]: p for p in rep["properties"]}
    assert props["bw_is_complex"]["verdict"] == "FAIL"


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "bwcoh", "group", str(DATA / "c4_sign.json"), "--ring", "z", "--format", "json"],
        capture_output=True, text=True, check=True,
    ).stdout
    assert json.loads(out)["cohomology"][1]["text"] == "Z/2"
