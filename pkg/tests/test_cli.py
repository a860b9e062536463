"""CLI surface: output formats, exit codes, byte stability."""

import io
import json
import subprocess
import sys

import pytest

from sylwave import cli
from sylwave.numerics import PrecisionContext


def run_cli(*argv):
    buf = io.StringIO()
    import contextlib

    with contextlib.redirect_stdout(buf):
        code = cli.main(list(argv))
    return code, buf.getvalue()


def test_wave_poly_output():
    code, out = run_cli("wave", "--k", "2", "--N", "5", "--poly")
    assert code == 0
    assert out.strip() == "[2n+15, -2n-15]/128"
    code, out = run_cli("wave", "--k", "5", "--N", "5", "--poly")
    assert code == 0
    assert out.strip() == "[4, -1, -1, -1, -1]/25"


def test_dilog_zero_output_digits():
    code, out = run_cli("dilog-zero", "--A", "0", "--B", "-1", "--digits", "40")
    assert code == 0
    assert out.startswith("w(0,-1) = 0.9161978162")
    assert "-0.1824588972" in out.replace(" ", "")


def test_identity_pass_line():
    code, out = run_cli("identity", "--N", "150", "--n", "150")
    assert code == 0
    assert out.startswith("PASS residual=")


def test_exit_codes():
    # usage error: k > N
    code, _ = run_cli("wave", "--k", "9", "--N", "5")
    assert code == 2
    # argparse-level error
    assert cli.main(["no-such-command"]) == 2
    # precision/no-zero style errors map to 2 (domain) as documented
    code, _ = run_cli("dilog-zero", "--A", "5", "--B", "-1")
    assert code == 2


def test_wave_marker_and_verified():
    code, out = run_cli("wave", "--k", "2", "--N", "8", "--n", "8")
    assert code == 0 and " = ~" in out
    code, out = run_cli("wave", "--k", "2", "--N", "8", "--n", "8", "--verify")
    assert code == 0 and " = ~" not in out


def test_table_figure2_csv_and_stability():
    code1, out1 = run_cli("table", "--id", "figure2", "--format", "csv")
    code2, out2 = run_cli("table", "--id", "figure2", "--format", "csv")
    assert code1 == code2 == 0
    assert out1 == out2  # byte-stable
    rows = [line.split(",") for line in out1.strip().splitlines()]
    got = {int(r[1]): float(r[2]) for r in rows}
    assert abs(got[275] - (-4.17495e-10)) < 1e-15
    assert abs(got[600] - (-8.36948e-11)) < 1e-16


def test_table_json_format():
    code, out = run_cli("table", "--id", "figure2", "--format", "json")
    assert code == 0
    objs = [json.loads(line) for line in out.strip().splitlines()]
    assert objs[0]["labels"] == ["n", "275"]
    assert all(isinstance(v, str) for o in objs for v in o["values"])
    # values round-trip through the scalar parser
    from sylwave.numerics import scalar_parse

    ctx = PrecisionContext(40)
    for o in objs:
        scalar_parse(o["values"][0], ctx)


def test_classsum_command():
    code, out = run_cli("classsum", "--cls", "D", "--N", "1203", "--sigma", "-401", "--digits", "40")
    assert code == 0
    val = float(out.split(" = ")[1].split()[0].lstrip("~"))
    assert abs(val - (-2.17904e12)) < 1e7
    assert "terms=602" in out


def test_asym_and_coeffs_commands():
    code, out = run_cli("asym", "--family", "a", "--lam", "1", "--N", "1200", "--m", "2")
    assert code == 0
    val = float(out.split(" = ")[1].lstrip("~"))
    assert abs(val - 1.71839e30) < 1e25
    code, out = run_cli("coeffs", "--family", "a", "--lam", "1/3", "--m", "1", "--digits", "40")
    assert code == 0
    assert out.startswith("a_0(1/3)")


def test_constants_command():
    code, out = run_cli("constants", "--lam", "1", "--digits", "40")
    assert code == 0
    assert "U = 0.0680761620" in out.replace("~", "")
    assert "2pi/V = 31.96311" in out.replace("~", "")


def test_waves_sum_and_prestricted():
    code, out = run_cli("waves-sum", "--N", "8", "--n", "8", "--K", "8")
    assert code == 0
    assert abs(float(out.split(" = ")[1].lstrip("~")) - 22) < 1e-12
    code, out = run_cli("prestricted", "--N", "4", "--n", "-10")
    assert code == 0 and out.strip().endswith("= -1")


def test_cache_round_trip(tmp_path):
    cache = str(tmp_path / "cache")
    code, _ = run_cli("pn", "--n", "50", "--cache-dir", cache)
    assert code == 0
    import os

    assert os.path.exists(os.path.join(cache, "partitions.txt"))
    with open(os.path.join(cache, "partitions.txt")) as fh:
        assert fh.readline().strip() == "sylwave-cache v1"
    code, out = run_cli("pn", "--n", "50", "--cache-dir", cache)
    assert code == 0 and out.strip().endswith(str(204226))


def test_run_table_a1_row_matches_reference():
    from sylwave.cli import TableSpec, run_table
    from fractions import Fraction

    ctx = PrecisionContext(80)
    spec = TableSpec("a1_approx", {"lams": (Fraction(1),)})
    rows = run_table(spec, ctx)
    assert rows[0].labels == ("N", "1200", "lambda", "1")
    vals = [float(v) for v in rows[0].values]
    want = [1.89943e30, 1.71839e30, 1.72504e30, 1.72506e30, 1.72507e30]
    for g, w in zip(vals, want):
        assert abs(g - w) < abs(w) * 1e-5


def test_table_slow_gating():
    code, out = run_cli("table", "--id", "first_wave_sizes", "--rows", "1500")
    assert code == 0 and "skipped(slow)" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sylwave.cli", "pn", "--n", "8"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "p(8) = 22"
