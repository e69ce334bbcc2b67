import json

import pytest

from ifock.cli import main, parse_poly, parse_tol, parse_z
from ifock.verify import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParsers:
    def test_z(self):
        assert parse_z("1,0") == 1
        assert parse_z("0.5,-2") == complex(0.5, -2)
        assert parse_z("3") == 3
        with pytest.raises(ConfigError):
            parse_z("a,b")

    def test_poly(self):
        assert parse_poly("family:3") == ("family", 3)
        assert parse_poly("1,0,2") == ("coeffs", [1.0, 0.0, 2.0])
        assert parse_poly("[1, 2]") == ("coeffs", [1.0, 2.0])
        for bad in ("family:x", "family:-1", "1,,2", '["a"]'):
            with pytest.raises(ConfigError):
                parse_poly(bad)

    def test_tol(self):
        assert parse_tol(["unitarity=1e-6"]) == {"unitarity": 1e-6}
        with pytest.raises(ConfigError):
            parse_tol(["unitarity"])


class TestJacobi:
    def test_poisson_omega(self, capsys):
        code, out, _ = run(capsys, "jacobi", "--measure", "poisson:a=2", "--depth", "5")
        assert code == 0
        data = json.loads(out)
        assert data["omega"] == [2, 4, 6, 8]
        assert data["alpha"] == [2, 3, 4, 5, 6]

    def test_gaussian_alpha(self, capsys):
        code, out, _ = run(capsys, "jacobi", "--measure", "gaussian:m=0,var=1", "--depth", "3")
        assert code == 0 and json.loads(out)["alpha"] == [0, 0, 0]

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "j.json"
        assert main(["jacobi", "--measure", "poisson:a=1", "--depth", "3", "--output", str(path)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(path.read_text())["omega"] == [1, 2]

    def test_malformed(self, capsys):
        code, _, err = run(capsys, "jacobi", "--measure", "gauss:1")
        assert code == 2 and "ifock" in err

    def test_bad_depth(self, capsys):
        assert run(capsys, "jacobi", "--measure", "poisson:a=1", "--depth", "0")[0] == 2

    def test_invalid_values(self, capsys):
        assert run(capsys, "jacobi", "--measure", "gaussian:m=0,var=-1")[0] == 3
        assert run(capsys, "jacobi", "--measure", "poisson:a=0")[0] == 3

    def test_raw_too_short(self, capsys):
        assert run(capsys, "jacobi", "--measure", "raw:[1,2,3]")[0] == 2

    def test_raw_not_positive(self, capsys):
        # m2 < m1^2
        assert run(capsys, "jacobi", "--measure", "raw:[1,1,0.5,1]")[0] == 3


class TestFockAndSb:
    def test_fock_dump(self, capsys):
        code, out, _ = run(capsys, "fock", "dump", "--measure", "poisson:a=2", "--depth", "4")
        assert code == 0
        data = json.loads(out)
        assert [data["AlphaN"][n][n][0] for n in range(4)] == [2, 3, 4, 5]
        assert data["A"][0][1] == [2.0, 0.0]
        assert data["A_star"][1][0] == [1.0, 0.0]

    def test_sb_family(self, capsys):
        code, out, _ = run(capsys, "sb", "--measure", "gaussian:m=0,var=1", "--poly", "family:3", "--z", "1,0")
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx([1.0, 0.0], abs=1e-12)

    def test_sb_eval_explicit(self, capsys):
        code, out, _ = run(capsys, "sb", "eval", "--measure", "poisson:a=1", "--poly", "family:2", "--z=0.5,0.5")
        assert code == 0
        assert json.loads(out)["value"] == pytest.approx([0.0, 0.5], abs=1e-12)

    def test_sb_quadrature_matches_series(self, capsys):
        base = ["sb", "--measure", "gaussian:m=0.5,var=1.3", "--poly", "1,-2,0.5", "--z", "0.3,0.2"]
        _, s, _ = run(capsys, *base)
        _, q, _ = run(capsys, *base, "--method", "quadrature")
        assert json.loads(q)["value"] == pytest.approx(json.loads(s)["value"], abs=1e-10)

    def test_sb_series(self, capsys):
        # x^2 = P_2 + var for the centred Gaussian, so S(x^2) = z^2 + var
        code, out, _ = run(capsys, "sb", "series", "--measure", "gaussian:m=0,var=2", "--poly", "0,0,1")
        assert code == 0
        data = json.loads(out)
        assert data["coeffs"] == [[2.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
        # ||x^2||^2 = E[x^4] = 3 var^2
        assert data["norm"] == pytest.approx(12 ** 0.5)

    def test_sb_missing_z(self, capsys):
        assert run(capsys, "sb", "--measure", "poisson:a=1", "--poly", "family:1")[0] == 2

    def test_sb_family_too_deep_for_raw(self, capsys):
        assert run(capsys, "sb", "--measure", "raw:[1,0,1,0]", "--poly", "family:5", "--z", "1")[0] == 2


class TestCmeasure:
    def test_poisson_gamma(self, capsys):
        code, out, _ = run(capsys, "cmeasure", "verify", "--measure", "poisson:a=1", "--max-degree", "6")
        assert code == 0
        data = json.loads(out)
        assert data["gamma_diagonal"] == [1, 1, 2, 6, 24, 120, 720]
        assert data["pass"] is True
        assert all(c["pass"] for c in data["checks"])

    def test_raw_refused(self, capsys):
        assert run(capsys, "cmeasure", "verify", "--measure", "raw:[1,0,1,0]")[0] == 2


class TestVerifyAll:
    def test_pass_and_deterministic(self, capsys):
        args = ("verify-all", "--measure", "poisson:a=1", "--seed", "4")
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2
        data = json.loads(out1)
        assert data["pass"] and data["config"]["seed"] == 4
        assert data["skipped"] == []

    def test_check_failure(self, capsys):
        code, out, _ = run(capsys, "verify-all", "--measure", "gaussian:m=0,var=1", "--tol", "unitarity=1e-300")
        assert code == 1
        data = json.loads(out)
        failed = [c["name"] for c in data["checks"] if not c["pass"]]
        assert failed == ["unitarity"]
        assert data["config"]["tolerances"]["unitarity"] == 1e-300

    def test_unknown_tolerance(self, capsys):
        assert run(capsys, "verify-all", "--measure", "poisson:a=1", "--tol", "nonsense=1")[0] == 2

    def test_missing_measure(self, capsys):
        assert run(capsys, "verify-all")[0] == 2

    def test_positivity_violation(self, capsys):
        code, _, err = run(capsys, "verify-all", "--measure", "raw:[1,1,0.5,1]")
        assert code == 3 and "invalid measure" in err

    def test_seed_precedence(self, capsys, monkeypatch, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"measure": "gaussian:m=0,var=1", "seed": 1, "depth": 14}))
        _, out, _ = run(capsys, "verify-all", "--config", str(cfg))
        assert json.loads(out)["config"]["seed"] == 1
        assert json.loads(out)["config"]["depth"] == 14
        monkeypatch.setenv("IFOCK_SEED", "2")
        _, out, _ = run(capsys, "verify-all", "--config", str(cfg))
        assert json.loads(out)["config"]["seed"] == 2
        _, out, _ = run(capsys, "verify-all", "--config", str(cfg), "--seed", "3")
        assert json.loads(out)["config"]["seed"] == 3

    def test_bad_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("IFOCK_SEED", "x")
        assert run(capsys, "verify-all", "--measure", "poisson:a=1")[0] == 2

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"measure": "poisson:a=1", "colour": "red"}))
        assert run(capsys, "verify-all", "--config", str(cfg))[0] == 2
        assert run(capsys, "verify-all", "--config", str(tmp_path / "missing.json"))[0] == 2

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "verify-all", "--measure", "poisson:a=1", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "name,defect,tolerance,pass"
        assert any(line.startswith("poisson_factorization_fock,") for line in lines)
        assert all(line.endswith(",true") for line in lines[1:])

    def test_raw_skips_named_checks(self, capsys):
        code, out, _ = run(capsys, "verify-all", "--measure", "raw:[1,0,1,0,3,0,15,0,105]")
        data = json.loads(out)
        assert code == 0
        assert "prop_a" in [s["name"] if isinstance(s, dict) else s for s in data["skipped"]]
