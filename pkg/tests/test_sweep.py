import math
from pathlib import Path

import numpy as np
import pytest

from chiralblockade.errors import ConfigError
from chiralblockade.model import SystemParams, fig2_params
from chiralblockade.sweep import (
    ResultTable,
    RunSpec,
    SweepAxis,
    evaluate_point,
    format_value,
    load_config,
    parse_config,
    read_csv,
    run_sweep,
    write_csv,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

BASE = """\
kappa_c = 2.5
delta_c = 2
delta_m = 2
g_a = 2
o_drive = 0.01
"""


def small_spec(**kw):
    text = BASE + "g_b = 0.3\nj = 0.5\nsweep.1 = phi, 0, 6.283185307179586, 7\nuse_optimal_drive = magnitude\n"
    return parse_config(text).replace(**kw)


def test_minimal_config_defaults():
    spec = parse_config("g_a = 2  # trailing comment\n\n# note\nsweep.1 = phi, 0, 1, 3\n")
    assert spec.method == "both" and spec.truncation == 2 and spec.modes == ("a", "b")
    assert spec.use_optimal_drive == "false" and not spec.reverse_field
    assert spec.axes == (SweepAxis("phi", 0.0, 1.0, 3),)
    assert spec.base == SystemParams(g_a=2.0)


def test_aliases_and_explicit_keys():
    spec = parse_config("kappa_a = 3\nkappa_c = 2\ne = 0.1\n")
    assert spec.base.kappa_a == 3 and spec.base.kappa_b == 2
    assert spec.base.e_l == spec.base.e_r == 0.1


def test_reverse_field_swaps_effective_params():
    spec = parse_config(BASE + "g_b = 0.5\nreverse_field = true\n")
    params, _ = spec.resolve_point(())
    assert params.g_a == 0.5 and params.g_b == 2.0


@pytest.mark.parametrize("text,fragment,line", [
    ("g_a = 1\nsweep.1 = zeta, 0, 1, 3\n", "zeta", 2),
    ("g_a = 1\nfoo = 2\n", "unknown key 'foo'", 2),
    ("\n\ndelta_c = abc\n", "expected a number", 3),
    ("sweep.1 = phi, 0, 1\n", "name, start, stop, count", 1),
    ("sweep.1 = phi, 0, 1, 2.5\n", "integer", 1),
    ("reverse_field = maybe\n", "true/false", 1),
    ("g_a 2\n", "key = value", 1),
    ("sweep.3 = phi, 0, 1, 3\n", "1 or 2", 1),
])
def test_parse_errors(text, fragment, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert fragment in str(err.value)
    assert err.value.line == line


@pytest.mark.parametrize("text", [
    "sweep.1 = phi, 0, 1, 1\n",
    "method = fast\n",
    "modes = a, c\n",
    "truncation = 4\n",
    "kappa_a = -1\n",
    "sweep.2 = phi, 0, 1, 3\n",
    "sweep.1 = phi, 0, 1, 3\nsweep.2 = phi, 0, 1, 3\n",
])
def test_invalid_specs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_config_round_trip():
    spec = small_spec(method="master", truncation=3, output="x.csv", modes=("b",))
    assert parse_config(spec.to_config()) == spec


def test_shipped_configs_parse():
    files = sorted(CONFIGS.glob("*.cfg"))
    assert len(files) >= 10
    for f in files:
        spec = load_config(f)
        assert spec.axes and spec.base.kappa_m == 1


def test_grid_is_row_major():
    spec = RunSpec(axes=(SweepAxis("g_b", 0, 1, 2), SweepAxis("phi", 0, 2, 3)))
    assert spec.grid() == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


def test_columns():
    spec = small_spec()
    assert spec.columns() == [
        "phi", "e_opt", "phi_opt",
        "g2_a_analytic", "log10_g2_a_analytic", "g2_b_analytic", "log10_g2_b_analytic",
        "g2_a_master", "log10_g2_a_master", "n_a_master",
        "g2_b_master", "log10_g2_b_master", "n_b_master",
        "status",
    ]


def test_sweep_rows_and_logs():
    table = run_sweep(small_spec())
    assert len(table.rows) == 7
    for name in ("g2_a_master", "g2_b_master", "g2_a_analytic"):
        g2, lg = table.column(name), table.column("log10_" + name)
        pos = g2 > 0
        assert np.all(np.isfinite(lg[pos]))
        assert np.allclose(10 ** lg[pos], g2[pos], rtol=1e-12)
    assert all(r[-1] == "ok" for r in table.rows)


def test_phi_not_overridden_when_swept():
    spec = small_spec(use_optimal_drive="true")
    params, cond = spec.resolve_point((1.0,))
    assert params.phi == 1.0 and params.e_l == cond.e_opt


def test_optimal_phase_applied_when_not_swept():
    spec = parse_config(BASE + "use_optimal_drive = true\n")
    params, cond = spec.resolve_point(())
    assert params.phi == cond.phi_opt and params.e_l == params.e_r == cond.e_opt


def test_decoupled_mode_sentinel(tmp_path):
    spec = parse_config(BASE + "sweep.1 = phi, 0, 1, 2\nuse_optimal_drive = magnitude\n")
    table = run_sweep(spec)
    assert all(math.isnan(v) for v in table.column("g2_b_analytic"))
    assert all("analytic_b:decoupled" in r[-1] for r in table.rows)
    write_csv(table, tmp_path / "t.csv")
    data_line = (tmp_path / "t.csv").read_text().splitlines()[-1].split(",")
    assert data_line[table.columns.index("g2_b_analytic")] == ""


def test_undriven_single_point():
    spec = RunSpec(base=fig2_params(o_drive=0.0))
    table = run_sweep(spec)
    assert len(table.rows) == 1
    assert abs(table.column("n_a_master")[0]) <= 1e-12
    assert abs(table.column("n_b_master")[0]) <= 1e-12


def test_solver_errors_become_flagged_rows():
    # lossless resonant cavity: the closed forms are singular at delta_c = 0
    spec = parse_config(
        "kappa_c = 0\ng_a = 1\no_drive = 0.01\nmethod = analytic\nsweep.1 = delta_c, -1, 1, 3\n"
    )
    table = run_sweep(spec)
    assert len(table.rows) == 3
    assert table.rows[1][-1].startswith("analytic:SingularDenominatorError")
    assert table.rows[0][-1] != table.rows[1][-1]


def test_csv_round_trip_bit_exact(tmp_path):
    table = ResultTable(["x", "y", "status"], [[0.1, 1 / 3, "ok"], [-2.5e-300, None, "note"]],
                        ["chiralblockade test"])
    path = tmp_path / "t.csv"
    write_csv(table, path)
    back = read_csv(path)
    assert back.columns == table.columns and back.provenance == table.provenance
    assert back.rows == table.rows
    # naive re-parse
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert float(lines[1].split(",")[1]) == 1 / 3


def test_format_value():
    assert format_value(None) == ""
    assert format_value(0.1) == "1.0000000000000001e-01"
    assert float(format_value(math.pi)) == math.pi


def test_provenance_contains_config(tmp_path):
    spec = small_spec()
    table = run_sweep(spec)
    write_csv(table, tmp_path / "t.csv")
    text = (tmp_path / "t.csv").read_text()
    for line in spec.to_config().splitlines():
        assert f"#   {line}\n" in text


def test_row_length_validated():
    with pytest.raises(ValueError):
        ResultTable(["a", "b"], [[1.0]])


def test_deterministic_bytes(tmp_path):
    spec = small_spec()
    write_csv(run_sweep(spec), tmp_path / "a.csv")
    write_csv(run_sweep(spec), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_parallel_equals_serial():
    spec = small_spec()
    assert run_sweep(spec, jobs=3).rows == run_sweep(spec, jobs=1).rows


def test_reverse_field_exchanges_columns():
    spec = small_spec()
    fwd = run_sweep(spec)
    rev = run_sweep(spec.replace(reverse_field=True))
    for method in ("analytic", "master"):
        a_rev = rev.column(f"g2_a_{method}")
        b_fwd = fwd.column(f"g2_b_{method}")
        assert np.allclose(a_rev, b_fwd, rtol=1e-8, atol=0)
    assert np.allclose(rev.column("n_a_master"), fwd.column("n_b_master"), rtol=1e-8, atol=0)
