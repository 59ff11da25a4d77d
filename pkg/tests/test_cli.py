"""Command-line front end: problem parsing, commands, exit codes,
certificates, golden outputs."""

import contextlib
import io
import json
import os

import pytest

from covar.cli import (
    ProblemError,
    ProblemFile,
    list_presets,
    load_certificate,
    main,
    parse_problem,
)

HERE = os.path.dirname(__file__)
GOLDEN = os.path.join(HERE, "golden")


def run_cli(argv):
    buf = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, buf.getvalue(), err.getvalue()


def strip_volatile(obj):
    if isinstance(obj, dict):
        return {k: strip_volatile(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [strip_volatile(x) for x in obj]
    return obj


# -- problem parsing ---------------------------------------------------------------


def test_presets_are_available():
    names = list_presets()
    assert "vandermonde_s2" in names and "scalar_counterexample" in names


def test_parse_preset():
    p = parse_problem("vandermonde_s2")
    assert p.group.order == 2
    assert len(p.covariants) == 2


def test_parse_then_serialize_is_identity_on_presets():
    from importlib import resources

    for name in list_presets():
        ref = resources.files("covar").joinpath("presets", name + ".json")
        text = ref.read_text(encoding="utf-8")
        problem = parse_problem(name)
        assert problem.canonical_text() == text, name


def test_dimension_error_names_the_field(tmp_path):
    bad = {"space": {"x_vars": ["x1", "x2"], "w_vars": ["w1", "w2"]},
           "group": {"type": "finite",
                     "generators": [{"x": [["0", "1", "0"], ["1", "0", "0"]],
                                     "w": [["1", "0"], ["0", "1"]]}]}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(ProblemError, match=r"group\.generators\[0\]\.x"):
        parse_problem(str(path))


def test_undeclared_variable_is_a_reference_error(tmp_path):
    bad = {"space": {"x_vars": ["x1", "x2"], "w_vars": ["w1", "w2"]},
           "group": {"type": "finite",
                     "generators": [{"x": [["0", "1"], ["1", "0"]],
                                     "w": [["0", "1"], ["1", "0"]]}]},
           "covariants": [["x1", "x9"]]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(ProblemError, match="x9"):
        parse_problem(str(path))


def test_unknown_template_is_rejected():
    with pytest.raises(ProblemError, match="unknown template"):
        parse_problem({"group": {"type": "symbolic", "n": 2,
                                 "x_template": "mystery", "w_template": "scalar"}})


def test_missing_file_is_a_problem_error():
    with pytest.raises(ProblemError, match="no such problem"):
        parse_problem("/nonexistent/path.json")


# -- commands and exit codes ----------------------------------------------------------


def test_verify_command_ok():
    code, out, _ = run_cli(["verify", "vandermonde_s2"])
    assert code == 0 and "PASS" in out


def test_verify_command_refutes(tmp_path):
    prob = {"space": {"x_vars": ["x1", "x2"], "w_vars": ["w1", "w2"]},
            "group": {"type": "finite",
                      "generators": [{"x": [["0", "1"], ["1", "0"]],
                                      "w": [["0", "1"], ["1", "0"]]}]},
            "covariants": [["x1", "x1"]]}
    path = tmp_path / "bad_cov.json"
    path.write_text(json.dumps(prob))
    code, out, _ = run_cli(["verify", str(path)])
    assert code == 1 and "FAIL" in out


def test_independence_exit_codes():
    code, _, _ = run_cli(["independence", "vandermonde_s2"])
    assert code == 0
    code, out, _ = run_cli(["independence", "scalar_counterexample"])
    assert code == 1
    assert "rank" in out


def test_noname_build_and_verify_roundtrip(tmp_path):
    cert_path = str(tmp_path / "cert.json")
    code, out, _ = run_cli(["noname-build", "vandermonde_s2", "--out", cert_path])
    assert code == 0
    assert os.path.exists(cert_path)
    # self-contained: verification does not touch the original problem file
    code2, out2, _ = run_cli(["noname-verify", cert_path])
    assert code2 == 0
    m, _problem = load_certificate(cert_path)
    assert str(m.f) == "x1*x2^2 - x1^2*x2"


def test_noname_build_rejects_dependent_family(tmp_path):
    prob = {"space": {"x_vars": ["x1", "x2"], "w_vars": ["w1", "w2"]},
            "group": {"type": "finite",
                      "generators": [{"x": [["0", "1"], ["1", "0"]],
                                      "w": [["0", "1"], ["1", "0"]]}]},
            "covariants": [["x1", "x2"], ["2*x1", "2*x2"]]}
    path = tmp_path / "dep.json"
    path.write_text(json.dumps(prob))
    code, out, _ = run_cli(["noname-build", str(path)])
    assert code == 1


def test_noname_verify_detects_corruption(tmp_path):
    cert_path = str(tmp_path / "cert.json")
    run_cli(["noname-build", "vandermonde_s2", "--out", cert_path])
    with open(cert_path) as fh:
        cert = json.load(fh)
    cert["phi"][0][0] = "(x2^2 + 1)/(x1*x2^2 - x1^2*x2)"
    with open(cert_path, "w") as fh:
        json.dump(cert, fh)
    code, out, _ = run_cli(["noname-verify", cert_path])
    assert code == 1 and "FAIL" in out


def test_symbolic_certificate_roundtrip(tmp_path):
    cert_path = str(tmp_path / "words.json")
    code, _, _ = run_cli(["noname-build", "matrix_words_gl2", "--out", cert_path])
    assert code == 0
    code2, _, _ = run_cli(["noname-verify", cert_path])
    assert code2 == 0


def test_generate_command():
    code, out, _ = run_cli(["generate", "s3_permutation", "--degree-bound", "3"])
    assert code == 0 and "3 generically independent covariants" in out


def test_generate_failure_reports_rank(tmp_path):
    prob = {"space": {"x_vars": ["x1"], "w_vars": ["w1"]},
            "group": {"type": "finite",
                      "generators": [{"x": [["-1"]], "w": [["-1"]]}]}}
    path = tmp_path / "sign.json"
    path.write_text(json.dumps(prob))
    code, out, _ = run_cli(["generate", str(path), "--degree-bound", "0"])
    assert code == 1 and "rank 0" in out


def test_clear_command():
    code, out, _ = run_cli(["clear", "rational_swap"])
    assert code == 0
    assert "independence_preserved" in out


def test_relation_command_dependent():
    code, out, _ = run_cli(["relation", "powers_s2_cubic"])
    assert code == 0
    assert "x1*x2" in out


def test_relation_command_independent():
    code, out, _ = run_cli(["relation", "vandermonde_s2"])
    assert code == 0
    assert "independent" in out


def test_lower_command():
    code, out, _ = run_cli(["lower", "powers_s2_cubic"])
    assert code == 0
    assert "degree_lowered" in out


def test_module_verdict_exit_codes():
    code, out, _ = run_cli(["module-verdict", "scalar_counterexample"])
    assert code == 1 and "abstain" in out
    code2, _, _ = run_cli(["module-verdict", "powers_s2_cubic"])
    assert code2 == 1  # dependent family under the asserted bridge
    code3, _, _ = run_cli(["module-verdict", "vandermonde_s2"])
    assert code3 == 0


def test_example_command_lists_presets():
    code, out, _ = run_cli(["example"])
    assert code == 0 and "vandermonde_s2" in out


def test_example_command_builds_family():
    code, out, _ = run_cli(["example", "matrix_words_gl2"])
    assert code == 0 and "a11" in out


def test_usage_errors_exit_two(tmp_path):
    code, _, err = run_cli(["independence", "/missing.json"])
    assert code == 2 and "error" in err
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    code2, _, err2 = run_cli(["independence", str(bad)])
    assert code2 == 2 and "invalid JSON" in err2
    with pytest.raises(SystemExit) as exc:
        run_cli(["not-a-command", "x"])
    assert exc.value.code == 2


def test_word_family_preset_n3_uses_certified_status():
    code, out, _ = run_cli(["example", "matrix_words_gl3"])
    assert code == 0
    code2, out2, _ = run_cli(["verify", "matrix_words_gl3"])
    assert code2 == 0 and "certified during family construction" in out2


def test_prime_field_problem(tmp_path):
    prob = {"field": {"prime": 5},
            "space": {"x_vars": ["x1", "x2"], "w_vars": ["w1", "w2"]},
            "group": {"type": "finite",
                      "generators": [{"x": [["0", "1"], ["1", "0"]],
                                      "w": [["0", "1"], ["1", "0"]]}]},
            "covariants": [["x1", "x2"], ["x1^2", "x2^2"]]}
    path = tmp_path / "gf5.json"
    path.write_text(json.dumps(prob))
    code, out, _ = run_cli(["noname-build", str(path), "--format", "machine"])
    assert code == 0
    payload = json.loads(out)
    assert payload["report"]["ok"]
    assert "positive characteristic" in payload["report"]["data"]["assumptions"][0]


def test_machine_format_is_json():
    code, out, _ = run_cli(["independence", "vandermonde_s2",
                            "--format", "machine"])
    payload = json.loads(out)
    assert payload["report"]["ok"] is True


def test_reports_deterministic_for_fixed_seed():
    runs = [run_cli(["independence", "vandermonde_s2", "--seed", "5",
                     "--format", "machine"])[1] for _ in range(2)]
    a, b = (strip_volatile(json.loads(r)) for r in runs)
    assert a == b


@pytest.mark.parametrize("golden_name,argv", [
    ("vandermonde_noname.json",
     ["noname-build", "vandermonde_s2", "--format", "machine"]),
    ("scalar_independence.json",
     ["independence", "scalar_counterexample", "--format", "machine"]),
    ("powers_relation.json",
     ["relation", "powers_s2_cubic", "--format", "machine"]),
    ("s3_generate.json",
     ["generate", "s3_permutation", "--degree-bound", "3", "--format", "machine"]),
])
def test_golden_outputs(golden_name, argv):
    with open(os.path.join(GOLDEN, golden_name)) as fh:
        golden = json.load(fh)
    expected_code = golden.pop("_exit_code")
    code, out, _ = run_cli(argv)
    assert code == expected_code
    assert strip_volatile(json.loads(out)) == golden
