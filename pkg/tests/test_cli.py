import io
import subprocess
import sys

import pytest

from chiralblockade.cli import EXIT_INVALID, EXIT_OK, EXIT_SOLVER, main
from chiralblockade.sweep import read_csv

FIG2 = ["--set", "kappa_c=2.5", "--set", "delta_c=2", "--set", "delta_m=2",
        "--set", "g_a=2", "--set", "o_drive=0.01"]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_optimal():
    code, text = run("optimal", *FIG2)
    assert code == EXIT_OK
    assert "e_opt   = 7.7651677757" in text
    assert "0.7605" in text


def test_optimal_degenerate():
    code, text = run("optimal", "--set", "g_a=1")
    assert code == EXIT_OK and "undefined" in text


def test_g2_prints_both_methods():
    code, text = run("g2", *FIG2, "--set", "use_optimal_drive=true")
    assert code == EXIT_OK
    assert "g2_a_analytic" in text and "g2_a_master" in text
    assert "g2_b_analytic = decoupled" in text


def test_g2_reverse_field_and_method():
    code, text = run("g2", *FIG2, "--set", "use_optimal_drive=true", "--reverse-field",
                     "--method", "master")
    assert code == EXIT_OK
    assert "analytic" not in text
    values = dict(line.split(" = ") for line in map(str.strip, text.splitlines()))
    assert float(values["g2_b_master"]) < 1e-2 < 1 < float(values["g2_a_master"])


def test_amplitudes_table():
    code, text = run("amplitudes", *FIG2, "--set", "e=1e-4", "--set", "g_b=0.2", "--set", "j=0.3")
    assert code == EXIT_OK
    rows = text.splitlines()[1:]
    assert len(rows) == 10
    assert all(float(r.split()[-1]) < 1e-8 for r in rows)


def test_sweep_writes_csv(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("kappa_c = 2.5\ng_a = 2\ndelta_c = 2\ndelta_m = 2\no_drive = 0.01\n"
                   "sweep.1 = phi, 0, 3, 4\nuse_optimal_drive = magnitude\n")
    out = tmp_path / "sub" / "s.csv"
    code, _ = run("sweep", "--config", str(cfg), "--out", str(out), "--jobs", "2", "--truncation", "2")
    assert code == EXIT_OK
    table = read_csv(out)
    assert len(table.rows) == 4 and table.columns[0] == "phi"


def test_sweep_to_stdout(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("g_a = 1\no_drive = 0.01\nmethod = analytic\nsweep.1 = delta_c, 0, 1, 2\n")
    code, text = run("sweep", "--config", str(cfg))
    assert code == EXIT_OK
    assert text.startswith("# chiralblockade") and len(text.strip().splitlines()[-1].split(",")) == 6


@pytest.mark.parametrize("argv", [
    ["g2", "--set", "zeta=1"],
    ["g2", "--set", "g_a"],
    ["sweep"],
    ["sweep", "--config", "/nonexistent/file.cfg"],
    ["g2", "--truncation", "5"],
    ["bogus"],
])
def test_invalid_input_exit_code(argv):
    assert run(*argv)[0] == EXIT_INVALID


def test_solver_error_exit_code():
    code, _ = run("optimal", "--set", "kappa_c=0", "--set", "g_a=1", "--set", "o_drive=0.01")
    assert code == EXIT_SOLVER


def test_check_suite():
    code, text = run("check")
    assert code == EXIT_OK
    assert "FAIL" not in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chiralblockade", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
