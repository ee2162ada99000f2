import csv
import io
import json

import pytest

from gtmprod.cli import main


@pytest.fixture()
def cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("GTMPROD_CACHE_DIR", str(tmp_path))
    monkeypatch.delenv("GTMPROD_CONFIG", raising=False)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSeq:
    def test_theta_prefix(self, capsys, cache_env):
        code, out, _ = run(capsys, "seq", "--seq", "gtm:3:011", "--count", "9")
        assert code == 0 and out.strip() == "011100100"

    def test_sign_values(self, capsys, cache_env):
        code, out, _ = run(capsys, "seq", "--seq", "gtm:2:1", "--count", "4",
                           "--values", "sign")
        assert code == 0 and out.strip() == "+1 -1 -1 +1"

    def test_bad_spec_is_usage_error(self, capsys, cache_env):
        code, _, err = run(capsys, "seq", "--seq", "gtm:9", "--count", "4")
        assert code == 2 and "error" in err


class TestSum:
    def test_value(self, capsys, cache_env):
        code, out, _ = run(capsys, "sum", "--seq", "gtm:3:001", "--n", "10")
        assert code == 0 and out.strip() == "2"


class TestCheck:
    def test_ok(self, capsys, cache_env):
        code, out, _ = run(capsys, "check", "--term", "(2n+1)/(2n+2)",
                           "--mode", "delta")
        assert code == 0 and out.strip() == "ok"

    def test_rejected_exit_3(self, capsys, cache_env):
        code, out, _ = run(capsys, "check", "--term", "(2n+1)/(2n+2)",
                           "--mode", "theta")
        assert code == 3 and out.strip() == "rejected: sum-of-roots"

    def test_parse_error_exit_2(self, capsys, cache_env):
        code, _, err = run(capsys, "check", "--term", "(2n+1", "--mode", "delta")
        assert code == 2 and "position" in err


class TestEval:
    def test_woods_robbins(self, capsys, cache_env):
        code, out, _ = run(capsys, "eval", "--seq", "gtm:2:1", "--mode", "delta",
                           "--from", "0", "--term", "(2n+1)/(2n+2)",
                           "--tol", "1e-9")
        assert code == 0
        assert "0.707106781186" in out
        est = [l for l in out.splitlines() if l.startswith("est_error")][0]
        assert float(est.split("=")[1]) <= 1e-9

    def test_rejected_exit_3(self, capsys, cache_env):
        code, _, err = run(capsys, "eval", "--seq", "gtm:2:0", "--mode", "delta",
                           "--term", "(2n+1)/(2n+2)")
        assert code == 3 and "trivial-pattern" in err

    def test_unachievable_eps_exit_4(self, capsys, cache_env):
        code, _, err = run(capsys, "eval", "--seq", "gtm:2:1", "--mode", "delta",
                           "--term", "(2n+1)/(2n+2)", "--tol", "1e-18")
        assert code == 4 and "numeric failure" in err

    def test_json_document(self, capsys, cache_env):
        code, out, _ = run(capsys, "--format", "json", "eval", "--seq", "gtm:2:1",
                           "--mode", "delta", "--term", "(2n+1)/(2n+2)")
        doc = json.loads(out)
        assert code == 0 and abs(doc["value"] - 0.7071067811865476) < 1e-10
        assert doc["terms_used"] >= 20000


class TestDirichlet:
    def test_zeta2(self, capsys, cache_env):
        code, out, _ = run(capsys, "dirichlet", "--seq", "gtm:2:0", "--s", "2")
        assert code == 0 and "1.64493406684823" in out
        assert (cache_env / "dirichlet.cache").exists()

    def test_pole_usage_error(self, capsys, cache_env):
        code, _, err = run(capsys, "dirichlet", "--seq", "gtm:2:0", "--s", "1")
        assert code == 2


class TestVerify:
    def test_filtered_json(self, capsys, cache_env):
        code, out, _ = run(capsys, "--format", "json", "verify",
                           "--filter", "g2.*", "--tol", "1e-8")
        doc = json.loads(out)
        assert code == 0
        assert doc["summary"] == {"total": 4, "pass": 4, "fail": 0}
        row = doc["results"][0]
        assert set(row) == {"id", "paper", "method", "lhs_value", "rhs_value",
                            "abs_dlog", "est_error", "terms_used", "pass"}

    def test_csv_header(self, capsys, cache_env):
        code, out, _ = run(capsys, "--format", "csv", "verify", "--filter", "wr")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 1
        assert rows[0]["id"] == "wr" and rows[0]["pass"] == "True"

    def test_failure_exit_1(self, capsys, cache_env, tmp_path):
        bad = tmp_path / "bad.catalog"
        bad.write_text("w1|Eq.(W-R)|gtm:2:1|delta|0|(2n+1)/(2n+2)|1/2|x\n")
        code, out, _ = run(capsys, "verify", "--catalog", str(bad))
        assert code == 1 and "FAIL" in out

    def test_missing_catalog_exit_2(self, capsys, cache_env):
        code, _, err = run(capsys, "verify", "--catalog", "/nonexistent/zzz")
        assert code == 2


class TestDeterminism:
    def test_repeat_invocations_byte_identical(self, capsys, cache_env):
        args = ("--format", "json", "eval", "--seq", "gtm:3:001", "--mode", "delta",
                "--term", "(3n+2)/(3n+3)")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_verify_deterministic(self, capsys, cache_env):
        args = ("--format", "json", "verify", "--filter", "ex1.7.1*", "--tol", "1e-8")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2


class TestUsage:
    def test_no_command(self, capsys, cache_env):
        assert run(capsys, )[0] == 2

    def test_unknown_flag(self, capsys, cache_env):
        assert run(capsys, "seq", "--nope", "1")[0] == 2

    def test_config_file_defaults(self, capsys, cache_env, tmp_path, monkeypatch):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"format": "json"}))
        monkeypatch.setenv("GTMPROD_CONFIG", str(cfg))
        code, out, _ = run(capsys, "sum", "--seq", "gtm:2:1", "--n", "5")
        assert code == 0 and json.loads(out)["partial_sum"] == -1
