"""Command-line surface: flags, outputs, exit codes."""

from __future__ import annotations

import hashlib
import json

import pytest

from bungee_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_bungee_point(self, capsys):
        code, out, _ = run(capsys, "classify", "--f", "1/z^2", "--z0", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "bungee"
        assert doc["confidence"] == "heuristic"
        assert doc["oscillations"] == 2
        assert doc["termination"] == {"kind": "pole", "step": 9}
        assert doc["z0"] == [2.0, 0.0]
        assert doc["params"]["max_iter"] == 1000

    def test_complex_seed_syntax(self, capsys):
        code, out, _ = run(capsys, "classify", "--f", "z^2", "--z0", "0.1,0.2")
        assert code == 0
        assert json.loads(out)["verdict"] == "bounded"

    def test_stderr_carries_human_summary(self, capsys):
        _, _, err = run(capsys, "classify", "--f", "z^2", "--z0", "2")
        assert "escaping" in err and "overflow" in err

    def test_orbit_knobs(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--f", "1/z^2", "--z0", "2",
            "--max-iter", "50", "--escape-radius", "1e6",
            "--bound-radius", "1e3", "--min-osc", "2",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["params"]["max_iter"] == 50
        assert doc["params"]["min_oscillations"] == 2

    def test_parse_error_exits_2(self, capsys):
        code, _, err = run(capsys, "classify", "--f", "z+", "--z0", "0")
        assert code == 2
        assert "z+" in err and "^" in err  # caret marks the offset

    def test_unknown_name_exits_2(self, capsys):
        code, _, err = run(capsys, "classify", "--f", "w^2", "--z0", "0")
        assert code == 2
        assert "w" in err

    def test_bad_seed_exits_2(self, capsys):
        code, _, err = run(capsys, "classify", "--f", "z^2", "--z0", "nope")
        assert code == 2


class TestRender:
    def test_writes_ppm_and_reports_hash(self, capsys, tmp_path):
        out_file = tmp_path / "img.ppm"
        code, out, _ = run(
            capsys, "render", "--f", "z^2",
            "--grid", "0,0,4,4,24,24", "--max-iter", "80",
            "--out", str(out_file),
        )
        assert code == 0
        doc = json.loads(out)
        data = out_file.read_bytes()
        assert data.startswith(b"P6\n24 24\n255\n")
        assert doc["sha256"] == hashlib.sha256(data).hexdigest()
        assert doc["out"] == str(out_file)
        assert doc["stats"]["counts"]["bungee"] == 0
        assert doc["stats"]["total"] == 24 * 24

    def test_grid_defaults_allow_four_numbers(self, capsys, tmp_path):
        out_file = tmp_path / "img.ppm"
        code, out, _ = run(
            capsys, "render", "--f", "z^2", "--grid", "0,0,2,2,8,8",
            "--max-iter", "40", "--out", str(out_file),
        )
        assert code == 0

    def test_malformed_grid_exits_2(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "render", "--f", "z^2", "--grid", "0,0,4",
            "--out", str(tmp_path / "x.ppm"),
        )
        assert code == 2

    def test_deterministic_across_worker_counts(self, capsys, tmp_path):
        digests = []
        for w in ("1", "4"):
            out_file = tmp_path / f"img{w}.ppm"
            code, out, _ = run(
                capsys, "render", "--f", "1/z^2",
                "--grid", "0,0,4,4,32,32", "--workers", w,
                "--out", str(out_file),
            )
            assert code == 0
            digests.append(json.loads(out)["sha256"])
        assert digests[0] == digests[1]


class TestFixedPoints:
    def test_squaring_map(self, capsys):
        code, out, _ = run(capsys, "fixed-points", "--f", "z^2", "--grid", "0,0,4,4")
        assert code == 0
        doc = json.loads(out)
        kinds = {r["kind"] for r in doc["fixed_points"]}
        assert kinds == {"attracting", "repelling"}

    def test_indifferent_report(self, capsys):
        code, out, _ = run(capsys, "fixed-points", "--f", "z*exp(-z^2)",
                           "--grid", "0,0,2,2")
        assert code == 0
        doc = json.loads(out)
        close = [r for r in doc["fixed_points"] if abs(complex(*r["location"])) < 1e-6]
        assert close and close[0]["kind"] == "rationally_indifferent"


class TestVerify:
    def test_commute_pass(self, capsys):
        code, out, _ = run(
            capsys, "verify", "commute", "--f", "z^2", "--g", "1/z^2",
            "--samples", "400", "--seed", "42",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["violations"] == 0
        assert doc["detail"]["commutes"] is True

    def test_commute_failure_exits_1(self, capsys):
        code, out, _ = run(
            capsys, "verify", "commute", "--f", "z*exp(z^2)",
            "--g", "0.5*z*exp(z^2)", "--samples", "400",
        )
        assert code == 1
        assert json.loads(out)["detail"]["commutes"] is False

    def test_translate_counterexample_exits_1(self, capsys):
        code, out, _ = run(
            capsys, "verify", "translate", "--f", "1+z+exp(-z)",
            "--C", "2*pi*i", "--samples", "100",
        )
        assert code == 1
        doc = json.loads(out)
        assert doc["detail"]["identity_holds"] is False
        assert doc["detail"]["first_failure"]["n"] == 2

    def test_translate_exact_period_exits_0(self, capsys):
        code, out, _ = run(
            capsys, "verify", "translate", "--f", "sin(z)",
            "--C", "2*pi", "--samples", "100",
        )
        assert code == 0
        assert json.loads(out)["detail"]["identity_holds"] is True

    def test_containment_subcommand(self, capsys):
        code, out, _ = run(
            capsys, "verify", "containment", "--f", "z^2", "--g", "1/z^2",
            "--samples", "500", "--max-iter", "300",
        )
        assert code == 0
        docs = json.loads(out)
        assert isinstance(docs, list) and len(docs) == 2
        assert all(d["violations"] == 0 for d in docs)

    def test_invariance_subcommand(self, capsys):
        # expressions starting with "-" need the --flag=value spelling
        code, out, _ = run(
            capsys, "verify", "invariance", "--f", "z*exp(z^2)",
            "--g=-z*exp(z^2)", "--kind", "escaping", "--samples", "400",
        )
        assert code == 0

    def test_verify_without_relation_exits_2(self, capsys):
        code, _, err = run(capsys, "verify")
        assert code == 2

    def test_out_file(self, capsys, tmp_path):
        out_file = tmp_path / "report.json"
        code, _, _ = run(
            capsys, "verify", "commute", "--f", "z^2", "--g", "1/z^2",
            "--samples", "200", "--out", str(out_file),
        )
        assert code == 0
        doc = json.loads(out_file.read_text())
        assert doc["detail"]["commutes"] is True


class TestPresets:
    def test_sec4_power_passes(self, capsys):
        code, out, err = run(capsys, "verify", "--preset", "sec4-power",
                             "--samples", "500")
        assert code == 0
        checks = json.loads(out)
        assert isinstance(checks, list) and checks
        assert all(c["passed"] for c in checks)
        assert {"name", "passed", "expectation", "report"} <= set(checks[0])
        assert "PASS" in err

    def test_scaled_family_expects_failure_and_passes(self, capsys):
        # the preset asserts non-commutation, so the run passes overall
        code, out, _ = run(capsys, "verify", "--preset", "scaled-family",
                           "--samples", "400")
        assert code == 0
        checks = json.loads(out)
        assert all(c["passed"] for c in checks)
        commute = [c for c in checks if "commute" in c["name"]]
        assert commute and commute[0]["report"]["violations"] > 0

    def test_unknown_preset_exits_2(self, capsys):
        code, _, err = run(capsys, "verify", "--preset", "no-such-thing")
        assert code == 2
        assert "no-such-thing" in err

    def test_preset_with_relation_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "verify", "--preset", "sec4-power", "commute",
                         "--f", "z^2", "--g", "z^2")
        assert code == 2

    def test_list_presets(self, capsys):
        code, out, _ = run(capsys, "verify", "--list-presets")
        assert code == 0
        names = {d["name"] for d in json.loads(out)}
        assert {"sec4-power", "sec4-expfamily", "all-paper"} <= names

    def test_top_level_preset_alias(self, capsys):
        code, out, _ = run(capsys, "preset", "indifferent-fixed-point")
        assert code == 0
        assert all(c["passed"] for c in json.loads(out))

    def test_top_level_preset_list(self, capsys):
        code, out, _ = run(capsys, "preset", "--list")
        assert code == 0
        assert any(d["name"] == "all-paper" for d in json.loads(out))


class TestUsage:
    def test_no_command_exits_2(self, capsys):
        assert run(capsys, )[0] == 2

    def test_unknown_command_exits_2(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2
