"""End-to-end checks for the command-line harness."""

import json

import pytest

from gcsov.cli import CliInputError, default_model, load_model, main


def write_model(tmp_path, payload, name="model.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


SPIN_HALF_PAIR = {"z": [0.0, 1.0], "lambda": [-0.5, -0.5]}


# ------------------------------------------------------------- model loading


def test_load_model_round_trips_complex_pairs(tmp_path):
    path = write_model(tmp_path, {
        "z": [[1.0, 0.0], [1.0, 0.5]],
        "lambda": [-0.5, [-0.5, 0.0]],
        "q": [0.05, 0.01],
        "mu0": [0.3, 0.1],
    })
    m = load_model(path)
    assert m.z[1] == 1.0 + 0.5j
    assert m.lam == (-0.5, -0.5)
    assert m.is_elliptic and m.elliptic.q == 0.05 + 0.01j
    assert m.elliptic.mu0 == 0.3 + 0.1j


def test_load_model_names_the_violated_constraint(tmp_path):
    # mu breaks only the sum rule (the perturbed site sits at z = 0)
    path = write_model(tmp_path, {
        "z": [0.0, 1.0, 2.5],
        "lambda": [-0.5, -0.5, -1.0],
        "mu": [0.7, 11.0 / 3.0, -64.0 / 15.0],
    })
    with pytest.raises(CliInputError) as err:
        load_model(path)
    msg = str(err.value)
    assert "mu_sum_rule" in msg
    assert "1.000e-01" in msg  # by how much


def test_load_model_rejects_garbage(tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("not json at all")
    with pytest.raises(CliInputError):
        load_model(str(p))
    with pytest.raises(CliInputError):
        load_model(str(tmp_path / "missing.json"))
    with pytest.raises(CliInputError):
        load_model(write_model(tmp_path, {"z": [0.0, 1.0]}))  # no lambda
    with pytest.raises(CliInputError):
        load_model(write_model(tmp_path, {"z": [[0, 1, 2]], "lambda": [0]}))


def test_default_models_are_admissible():
    m = default_model("rational")
    assert m.N == 3 and m.mu is not None
    e = default_model("elliptic")
    assert e.is_elliptic and abs(sum(e.mu)) < 1e-12


# ----------------------------------------------------------------- exit codes


def test_exit_code_three_for_bad_flags(capsys):
    assert main(["no-such-subcommand"]) == 3
    assert main(["spectrum", "--tol", "-1"]) == 3
    assert main(["spectrum", "--case", "elliptic"]) == 3
    assert main(["match", "--case", "elliptic"]) == 3
    capsys.readouterr()


def test_exit_code_three_for_inadmissible_model(tmp_path, capsys):
    path = write_model(tmp_path, {
        "z": [0.0, 1.0, 2.5],
        "lambda": [-0.5, -0.5, -1.0],
        "mu": [1.0, 1.0, 1.0],
    })
    assert main(["identity-suite", "--model", path]) == 3
    err = capsys.readouterr().err
    assert "mu_" in err and "residual" in err


def test_exit_code_two_when_an_identity_fails(tmp_path, capsys):
    # an absurd tolerance forces every residual over the line
    out = tmp_path / "r.json"
    code = main(["theta-eval", "--trials", "5", "--tol", "1e-30",
                 "--out", str(out)])
    assert code == 2
    doc = json.loads(out.read_text())
    assert doc["all_passed"] is False
    capsys.readouterr()


# ------------------------------------------------------------------ reports


def test_theta_eval_report_layout(tmp_path):
    out = tmp_path / "theta.json"
    assert main(["theta-eval", "--trials", "10", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    labels = [r["label"] for r in doc["records"]]
    assert labels == ["theta-quasi-periodicity", "theta-inversion",
                      "theta-qzero-degeneration", "wp-pole-behavior",
                      "kernel-product-law"]
    for r in doc["records"]:
        assert r["passed"] is True
        # 17 significant digits, lowercase scientific
        assert "e" in r["max_residual"] and "E" not in r["max_residual"]
        mant = r["max_residual"].split("e")[0].replace("-", "").replace(".", "")
        assert len(mant) == 17
        assert r["anchor"]
    assert doc["all_passed"] is True


def test_spectrum_csv_contains_the_singlet_row(tmp_path):
    import csv

    path = write_model(tmp_path, SPIN_HALF_PAIR)
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--model", path, "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["sector", "mu_1", "mu_2", "residual"]
    assert len(rows) == 2
    sector, mu1, mu2, resid = rows[1]
    assert sector == "singlet,weight=0"
    assert abs(complex(mu1) - 3.0) < 1e-8
    assert abs(complex(mu2) + 3.0) < 1e-8
    assert float(resid) < 1e-8


def test_identity_suite_rational_all_pass(tmp_path):
    out = tmp_path / "suite.json"
    assert main(["identity-suite", "--trials", "6", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    labels = {r["label"] for r in doc["records"]}
    assert "pairwise-commutators" in labels
    assert "singlet-tuple-constraints" in labels
    assert "rational-d-separated-form" in labels
    assert "rational-chart-roundtrip" in labels
    assert doc["all_passed"] is True


def test_sov_check_elliptic_smoke(tmp_path):
    out = tmp_path / "ell.json"
    assert main(["sov-check", "--case", "elliptic", "--trials", "1",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    labels = {r["label"] for r in doc["records"]}
    assert "elliptic-d-separated-form" in labels
    assert doc["all_passed"] is True


def test_bethe_subcommand_reports_solutions(tmp_path):
    out = tmp_path / "bethe.json"
    assert main(["bethe", "--roots", "0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["solutions"]) == 4  # all exponent patterns, no roots
    assert all(r["passed"] for r in doc["records"])
    assert all(s["roots"] == [] for s in doc["solutions"])


def test_match_bijects_on_the_default_model(tmp_path):
    out = tmp_path / "match.json"
    assert main(["match", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["unmatched_bethe"] == [] and doc["unmatched_spectrum"] == []
    assert len(doc["pairs"]) >= 1
    bij = [r for r in doc["records"] if r["label"] == "bethe-spectrum-bijection"]
    assert bij and bij[0]["passed"]


# --------------------------------------------------------------- determinism


def test_reports_are_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert main(["identity-suite", "--trials", "4", "--seed", "11",
                     "--out", str(target)]) == 0
    assert a.read_bytes() == b.read_bytes()

    c, d = tmp_path / "c.csv", tmp_path / "d.csv"
    model = write_model(tmp_path, SPIN_HALF_PAIR)
    for target in (c, d):
        assert main(["spectrum", "--model", model, "--out", str(target)]) == 0
    assert c.read_bytes() == d.read_bytes()


def test_different_seeds_change_the_samples_not_the_verdict(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["sov-check", "--trials", "3", "--seed", "1", "--out", str(a)]) == 0
    assert main(["sov-check", "--trials", "3", "--seed", "2", "--out", str(b)]) == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert da["all_passed"] and db["all_passed"]
    assert a.read_bytes() != b.read_bytes()
