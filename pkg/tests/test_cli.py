import csv
import json
import subprocess
import sys

import pytest

from dhardy.cli import EXIT_FINDING, EXIT_OK, EXIT_USAGE, OUTPUT_ENV, main
from dhardy.hardy import FIG2_C
from dhardy.lattice import from_csv, gen_bessel_datum, relative_linf_error, to_csv


def read_csv(path):
    return list(csv.DictReader(path.read_text().splitlines()))


def test_bessel_prints_cross_check(capsys):
    assert main(["bessel", "1", "2", "0"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["scaled"][0] == pytest.approx(0.21526928924893765, rel=1e-13)
    assert out["relative_error"] < 1e-9


def test_bessel_large_argument_skips_oracle(capsys):
    assert main(["bessel", "3", "900", "0"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["oracle"] is None and "700" in out["oracle_note"]


def test_evolve_time_zero_is_identity(tmp_path):
    src = tmp_path / "in.csv"
    to_csv(gen_bessel_datum(1j, 1.0, 0.5), src)
    dst = tmp_path / "out.csv"
    assert main(["evolve", "--in", str(src), "--t", "0", "--out", str(dst)]) == EXIT_OK
    assert dst.read_bytes() == src.read_bytes()


def test_evolve_methods_agree(tmp_path):
    src = tmp_path / "in.csv"
    f0 = gen_bessel_datum(1.0, 1.0, 0.25, sign_alternate=True)
    to_csv(f0, src)
    for method in ("kernel", "spectral"):
        code = main(["--out-dir", str(tmp_path), "evolve", "--in", str(src), "--t", "1",
                     "--method", method, "--out", str(tmp_path / f"{method}.csv")])
        assert code == EXIT_OK
    a, b = from_csv(tmp_path / "kernel.csv"), from_csv(tmp_path / "spectral.csv")
    assert relative_linf_error(a, b) < 1e-10


def test_evolve_bad_input(tmp_path):
    assert main(["evolve", "--in", str(tmp_path / "missing.csv"), "--t", "1"]) == EXIT_USAGE
    src = tmp_path / "in.csv"
    to_csv(gen_bessel_datum(1.0, 1.0, 0.5), src)
    assert main(["evolve", "--eq", "heat", "--in", str(src), "--t", "-1"]) == EXIT_USAGE


def test_figure1(tmp_path):
    assert main(["--out-dir", str(tmp_path), "figure1"]) == EXIT_OK
    rows = read_csv(tmp_path / "fig1.csv")
    assert len(rows) == 101 and list(rows[0]) == ["k", "value", "parity"]
    assert rows[50]["k"] == "0" and float(rows[50]["value"]) == pytest.approx(1.0)


def test_figure2(tmp_path):
    assert main(["--out-dir", str(tmp_path), "figure2"]) == EXIT_OK
    rows = read_csv(tmp_path / "fig2.csv")
    assert list(rows[0]) == ["k", "abs_g1", "bound_beta5", "bound_beta4_9"]
    assert len(rows) == 51
    assert all(float(r["bound_beta5"]) >= float(r["abs_g1"]) for r in rows)
    assert any(float(r["bound_beta4_9"]) < float(r["abs_g1"]) for r in rows)


def test_figure2_claim_fails_elsewhere(tmp_path):
    # near the peak the beta = 4.9 bound holds too, so the claim is not reproduced
    assert main(["--out-dir", str(tmp_path), "figure2", "--klo", "0", "--khi", "5"]) == EXIT_FINDING


def test_gate_sharp(capsys):
    assert main(["gate", "--example", "sharp_schrodinger", "--alpha", "1", "--beta", "1"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["sum"] == 2.0 and out["gate"] == "NotCovered"
    assert out["envelope_ok_t0"] and out["envelope_ok_t1"] and out["consistent"]


def test_gate_violated_envelope_is_a_finding(tmp_path):
    path = tmp_path / "gate.json"
    code = main(["gate", "--example", "sharp_schrodinger", "--alpha", "0.5", "--beta", "0.5", "--out", str(path)])
    assert code == EXIT_FINDING
    data = json.loads(path.read_text())
    assert data["gate"] == "CoveredMustBeZero" and not data["envelope_ok_t0"]


def test_gate_usage_errors():
    assert main(["gate", "--example", "nope", "--alpha", "1", "--beta", "1"]) == EXIT_USAGE
    assert main(["gate", "--example", "heat_sharp", "--alpha", "1", "--beta", "1"]) == EXIT_USAGE
    assert main(["gate", "--example", "sharp_schrodinger", "--alpha", "-1", "--beta", "1"]) == EXIT_USAGE
    assert main(["gate", "--example", "sharp_schrodinger", "--alpha", "1", "--beta", "1", "--h", "0"]) == EXIT_USAGE


def test_lines_explicit(tmp_path):
    assert main(["--out-dir", str(tmp_path), "lines", "--preset", "cor41"]) == EXIT_OK
    rows = read_csv(tmp_path / "lines_cor41.csv")
    assert list(rows[0]) == ["line_id", "y", "log_lhs", "log_rhs", "margin"]
    assert len(rows) == 164
    assert {r["line_id"] for r in rows} == {"L1", "L2", "L3", "L4"}


def test_lines_signal_source(tmp_path):
    args = ["--out-dir", str(tmp_path), "lines", "--preset", "cor41", "--source", "signal", "--h", "0.5"]
    assert main(args) == EXIT_OK
    assert max(float(r["margin"]) for r in read_csv(tmp_path / "lines_cor41.csv")) <= 1e-8


def test_lines_uncertifiable_is_usage_error(tmp_path):
    args = ["--out-dir", str(tmp_path), "lines", "--preset", "cor42", "--source", "signal"]
    assert main(args) == EXIT_USAGE


def test_converge(tmp_path):
    args = ["--out-dir", str(tmp_path), "converge", "--eq", "heat", "--h-list", "0.2,0.1,0.05"]
    assert main(args) == EXIT_OK
    rows = read_csv(tmp_path / "converge_heat.csv")
    errs = [float(r["error_linf"]) for r in rows]
    assert errs[0] > errs[1] > errs[2] > 0
    assert main(["converge", "--h-list", "0.2,x"]) == EXIT_USAGE
    assert main(["converge", "--h-list", "0.1,0.2,0.05"]) == EXIT_USAGE


def test_limit(tmp_path):
    assert main(["--out-dir", str(tmp_path), "limit"]) == EXIT_OK
    rows = read_csv(tmp_path / "limit.csv")
    assert [r["j"] for r in rows] == ["4", "8", "16", "32"]
    assert float(rows[-1]["error"]) == pytest.approx(2.5510592121597627e-04, rel=1e-10)
    assert main(["limit", "--jmax", "2"]) == EXIT_USAGE


def test_env_var_sets_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert main(["figure1", "--kmax", "3"]) == EXIT_OK
    assert (tmp_path / "env" / "fig1.csv").exists()


def test_out_dash_writes_stdout(capsys):
    assert main(["figure1", "--kmax", "1", "--out", "-"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("k,value,parity\n-1,")


def test_runs_are_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["--out-dir", str(tmp_path / d), "figure2"]) == EXIT_OK
        assert main(["--out-dir", str(tmp_path / d), "lines", "--preset", "cor42"]) == EXIT_OK
    for name in ("fig2.csv", "lines_cor42.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_usage_errors():
    assert main([]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["limit", "--bogus"]) == EXIT_USAGE
    assert main(["--help"]) == EXIT_OK


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dhardy.cli", "limit", "--jmax", "8", "--out", "-"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "j,error"


def test_figure2_constant():
    assert FIG2_C == pytest.approx(5 ** -0.25)


def test_out_dir_accepted_after_command(tmp_path):
    assert main(["figure1", "--kmax", "2", "--out-dir", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "fig1.csv").exists()


def test_status_messages_stay_off_stdout(capsys):
    assert main(["lines", "--preset", "cor41", "--points", "3", "--out", "-"]) == EXIT_OK
    out, err = capsys.readouterr()
    assert out.startswith("line_id,") and len(out.splitlines()) == 13
    assert "max margin" in err
