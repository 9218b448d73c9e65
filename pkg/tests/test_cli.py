"""End-to-end CLI tests, run in-process through main()."""

import json

import pytest

from biobounds.cli import format_real, main
from biobounds.numerics import PrecisionContext
from gmpy2 import mpfr


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestFormatting:
    def test_seventeen_significant_digits(self):
        ctx = PrecisionContext(256)
        assert format_real(ctx.real("0.5098")) == "5.0980000000000000e-01"
        assert format_real(ctx.real("-2.0369e-48")) == "-2.0369000000000000e-48"
        assert float(format_real(ctx.real("1e-300"))) == 1e-300

    def test_specials(self):
        assert format_real(mpfr("0")) == "0.0"
        assert format_real(mpfr("-inf")) == "-inf"

    def test_survives_magnitudes_beyond_double(self):
        ctx = PrecisionContext(256)
        with ctx.activate():
            import gmpy2

            huge = gmpy2.exp2(mpfr(5000))
        text = format_real(huge)
        assert text.endswith("e+1505")


class TestCiCommand:
    def test_two_sided_example(self, capsys):
        payload = run_json(
            capsys, "ci", "--fmr-hat", "0.5", "--n", "10001", "--alpha", "0.05",
            "--sided", "two",
        )
        assert payload["command"] == "ci"
        assert payload["inputs"]["n"] == 10001  # inputs echoed
        assert float(payload["results"]["upper"]) == pytest.approx(0.5098, abs=1e-4)
        assert payload["precision_bits"] == 256

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "ci", "--fmr-hat", "0.5", "--n", "101", "--output-format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "field,value"
        assert any(line.startswith("results.upper,") for line in lines)


class TestEstimateFmr:
    def test_from_score_file(self, capsys, tmp_path):
        scores = tmp_path / "scores.txt"
        scores.write_text("0.1\n0.9\n0.4\n0.8\n")
        payload = run_json(
            capsys, "estimate-fmr", "--scores", str(scores), "--threshold", "0.5",
        )
        assert float(payload["results"]["fmr_hat"]) == 0.5
        assert payload["results"]["n_comparisons"] == 4
        assert "ci_upper" in payload["results"]

    def test_from_counts(self, capsys):
        payload = run_json(
            capsys, "estimate-fmr", "--false-matches", "3", "--total", "1000",
        )
        assert float(payload["results"]["fmr_hat"]) == pytest.approx(0.003)

    def test_requires_one_input_mode(self, capsys):
        code, _, err = run_cli(capsys, "estimate-fmr", "--alpha", "0.05")
        assert code == 2
        assert "provide" in err


class TestAttackCommands:
    def test_critical_fmr_small_database(self, capsys):
        payload = run_json(
            capsys, "attack", "critical-fmr", "--n-users", "10",
            "--security-bits", "112",
        )
        assert float(payload["results"]["critical_fmr"]) == pytest.approx(
            1.335e-35, rel=1e-3
        )
        assert payload["results"]["critical_fmr_log10"] == pytest.approx(-34.87, abs=0.01)

    def test_bounds_with_ci_flags(self, capsys):
        payload = run_json(
            capsys, "attack", "bounds", "--fmr-hat", "1e-3", "--n-comparisons",
            "100000", "--n-users", "10",
        )
        assert payload["results"]["fmr_basis"] == "ci"
        assert "ci_upper" in payload["inputs"]
        assert float(payload["results"]["log2_lower"]) <= float(
            payload["results"]["log2_upper"]
        )

    def test_dependent_model_violation_names_condition(self, capsys):
        code, _, err = run_cli(
            capsys, "attack", "bounds", "--fmr", "0.2", "--n-users", "10",
            "--model", "dependent",
        )
        assert code == 2
        assert "1/(2N)" in err

    def test_critical_population(self, capsys):
        payload = run_json(
            capsys, "attack", "critical-population", "--fmr", "1e-6",
            "--security-bits", "10",
        )
        assert payload["results"]["n_users"] == 676
        assert payload["results"]["unattainable"] is False

    def test_critical_population_from_measurement(self, capsys):
        # CI upper bound substituted: strictly fewer users than the point value
        payload = run_json(
            capsys, "attack", "critical-population", "--fmr-hat", "1e-6",
            "--n-comparisons", "10000000", "--security-bits", "10",
        )
        assert payload["results"]["fmr_basis"] == "ci_upper"
        assert 0 < payload["results"]["n_users"] < 676

    def test_paradox_n(self, capsys):
        payload = run_json(
            capsys, "attack", "paradox-n", "--n-users", "1000",
            "--security-bits", "50",
        )
        assert float(payload["results"]["log2_n_comparisons"]) > 60


class TestBirthdayCommands:
    def test_exact_example(self, capsys):
        payload = run_json(
            capsys, "birthday", "exact", "--fmr", "0.2", "--k-users", "5",
            "--n-users", "3",
        )
        assert float(payload["results"]["probability"]) == pytest.approx(
            0.533333, abs=1e-5
        )

    def test_approx(self, capsys):
        payload = run_json(
            capsys, "birthday", "approx", "--fmr", "1e-6", "--n-users", "1178",
        )
        assert float(payload["results"]["probability"]) == pytest.approx(0.5, abs=0.01)

    def test_critical_population(self, capsys):
        payload = run_json(
            capsys, "birthday", "critical-population", "--fmr", "1e-6",
            "--p-max", "0.5",
        )
        assert payload["results"]["n_users"] == 1177

    def test_critical_fmr(self, capsys):
        payload = run_json(
            capsys, "birthday", "critical-fmr", "--n-users", "1000000000",
            "--p-max", "0.5",
        )
        assert float(payload["results"]["critical_fmr"]) == pytest.approx(
            1.386e-18, rel=1e-3
        )

    def test_gap_sweep(self, capsys):
        payload = run_json(
            capsys, "birthday", "gap", "--fmr", "1e-3", "--n-users", "10",
            "--k-sweep", "1000,10000",
        )
        gaps = payload["results"]["gaps"]
        assert len(gaps) == 2
        assert float(gaps[1]["gap"]) < float(gaps[0]["gap"])

    def test_oversized_deployment_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "birthday", "exact", "--fmr", "0.1", "--k-users", "4",
            "--n-users", "10",
        )
        assert code == 2
        assert "extrapolate" in err


class TestSimulateCommand:
    def test_verdict_and_determinism(self, capsys):
        args = (
            "simulate", "attack", "--fmr", "1e-3", "--n-users", "10",
            "--trials", "100000", "--seed", "42",
        )
        code, out1, _ = run_cli(capsys, *args)
        assert code == 0
        code, out2, _ = run_cli(capsys, *args)
        assert out1 == out2  # byte-identical rerun
        payload = json.loads(out1)
        assert payload["results"]["verdict"] == "PASS"
        assert payload["results"]["median_rounds"] in (69, 70, 71)

    def test_zero_trials_is_validation_error(self, capsys):
        code, _, err = run_cli(
            capsys, "simulate", "attack", "--fmr", "1e-3", "--n-users", "10",
            "--trials", "0", "--seed", "1",
        )
        assert code == 2
        assert "trials" in err


class TestGridCommand:
    def test_emits_file(self, capsys, tmp_path):
        out = tmp_path / "fig1.csv"
        payload = run_json(
            capsys, "grid", "--preset", "fig1", "--out", str(out),
            "--x-steps", "3", "--y-steps", "3",
        )
        assert payload["results"]["rows"] == 9
        assert out.exists()
        text = out.read_text()
        assert text.startswith("x,y,value\n")
        assert "# precision_bits: 256" in text


class TestExitCodesAndPrecision:
    def test_unknown_flag_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "ci", "--fmr-hat", "0.5", "--n", "10",
                             "--no-such-flag")
        assert code == 2

    def test_domain_violation_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, "attack", "critical-population", "--fmr", "2.0",
            "--security-bits", "10",
        )
        assert code == 2
        assert "FMR must be in (0, 1)" in err

    def test_precision_flag(self, capsys):
        payload = run_json(
            capsys, "ci", "--fmr-hat", "0.5", "--n", "101",
            "--precision-bits", "128",
        )
        assert payload["precision_bits"] == 128

    def test_precision_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("BIOBOUNDS_PRECISION_BITS", "192")
        payload = run_json(capsys, "ci", "--fmr-hat", "0.5", "--n", "101")
        assert payload["precision_bits"] == 192

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("BIOBOUNDS_PRECISION_BITS", "192")
        payload = run_json(
            capsys, "ci", "--fmr-hat", "0.5", "--n", "101",
            "--precision-bits", "320",
        )
        assert payload["precision_bits"] == 320
