"""
Purpose: Test the cli module: grid parsing, sweep axes, record formatting
and the click commands end to end.
"""
import csv
import io
import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from cli import (EXIT_FAILURE, EXIT_INFEASIBLE, EXIT_OK, VERSION, RunConfig,
                 apply_axis, config_hash, format_records, main, parse_grid,
                 run, validate)
from custom_exceptions import ConfigurationError


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def disc2_path(tmp_path, disc2_document):
    path = tmp_path / "disc2.json"
    path.write_text(json.dumps(disc2_document))
    return str(path)


def test_parse_grid_inclusive():
    """Test if 0.05:0.5:0.05 has 10 points ending at 0.5."""
    grid = parse_grid("0.05:0.5:0.05")
    assert len(grid) == 10
    assert grid[0] == 0.05
    assert grid[-1] == 0.5
    assert grid[2] == 0.15


def test_parse_grid_lists_and_single_values():
    """Test if comma lists and single numbers parse."""
    assert parse_grid("0.1,0.2,0.4") == (0.1, 0.2, 0.4)
    assert parse_grid("3") == (3.0,)


@pytest.mark.parametrize("text", ["1:0:1", "0:1:0", "a:b:c", "0.1,0.1",
                                  "0.2,0.1,0.3", "nan"])
def test_parse_grid_rejects(text):
    """Test if empty, zero-step, garbled and non-monotone grids raise."""
    with pytest.raises(ConfigurationError):
        parse_grid(text)


def test_apply_axis_copies(disc2_document):
    """Test if sweeping omega leaves the original document alone."""
    moved = apply_axis(disc2_document, "omega", 0.3)
    assert moved["photon"]["omega"] == 0.3
    assert disc2_document["photon"]["omega"] == 0.1
    assert apply_axis(disc2_document, "m", 6.0)["quadrature"] == {"m": 6}


def test_apply_axis_needs_matching_variant(disc2_document):
    """Test if alpha2 cannot be swept on a bounds document."""
    with pytest.raises(ConfigurationError):
        apply_axis(disc2_document, "alpha2", 0.1)


def test_config_hash_is_canonical():
    """Test if key order does not change the hash."""
    first = config_hash({"a": 1, "b": [1, 2]})
    assert first == config_hash({"b": [1, 2], "a": 1})
    assert first != config_hash({"a": 2, "b": [1, 2]})
    assert len(first) == 64


def test_run_config_checks():
    """Test if unknown commands, formats and axes are refused."""
    with pytest.raises(ConfigurationError):
        RunConfig("plot")
    with pytest.raises(ConfigurationError):
        RunConfig("quadrature", fmt="xml")
    with pytest.raises(ConfigurationError):
        RunConfig("quadrature", sweep=("beta", (1.0,)))


def test_format_records_union_of_columns():
    """Test if CSV columns are the first-seen union of keys."""
    records = [{"a": 1, "b": [1, 2]}, {"a": 2, "c": None}]
    text = format_records(records, "csv")
    assert text.splitlines() == ["a,b,c", "1,1;2,", "2,,"]
    assert json.loads(format_records(records, "json")) == records


def test_quadrature_command():
    """Test if quadrature --m 2 prints nodes 1/3, 1 and weights 3/4, 1/4."""
    result = CliRunner().invoke(main, ["quadrature", "--m", "2"])
    assert result.exit_code == EXIT_OK
    rows = rows_of(result.stdout)
    assert [float(r["node"]) for r in rows] == pytest.approx([1 / 3, 1.0])
    assert [float(r["weight"]) for r in rows] == pytest.approx([0.75, 0.25])
    assert rows[0]["version"] == VERSION
    assert rows[1]["tau"] == ""


def test_quadrature_sweep_over_m(tmp_path):
    """Test if sweeping m = 2, 3, 4 writes 9 rows to the output file."""
    output = tmp_path / "rules.json"
    result = CliRunner().invoke(main, ["quadrature", "--sweep", "m", "2:4:1",
                                       "--format", "json", "-o",
                                       str(output)])
    assert result.exit_code == EXIT_OK
    records = json.loads(output.read_text())
    assert len(records) == 9
    assert {r["m"] for r in records} == {2, 3, 4}
    assert len({r["config_hash"] for r in records}) == 3


def test_quadrature_without_m_fails():
    """Test if a missing --m exits with 1."""
    result = CliRunner().invoke(main, ["quadrature"])
    assert result.exit_code == EXIT_FAILURE


def test_bpsk_table_command():
    """Test if the binary table at alpha2 = 0.1 follows the erf formula."""
    result = CliRunner().invoke(main, ["bpsk-table", "--alpha2", "0.1"])
    assert result.exit_code == EXIT_OK
    rows = rows_of(result.stdout)
    assert len(rows) == 4
    first = [r for r in rows if r["x"] == "1" and r["b"] == "1"][0]
    expected = 0.5 * (math.erf(math.sqrt(0.2)) + 1.0)
    assert float(first["p"]) == pytest.approx(expected, abs=1e-6)


def test_version_option():
    """Test if --version prints the package version."""
    result = CliRunner().invoke(main, ["--version"])
    assert VERSION in result.output


def test_validate_command(disc2_path):
    """Test if a good document validates without solving."""
    result = CliRunner().invoke(main, ["validate", disc2_path])
    assert result.exit_code == EXIT_OK
    lines = result.stdout.splitlines()
    assert lines[0] == "ok"
    assert lines[1] == "scenario: n_x=2 outcomes=[2] n_trunc=0"


def test_validate_reports_errors(tmp_path, disc2_document):
    """Test if a bad omega table exits with 1 and names the field."""
    data = dict(disc2_document, photon={"variant": "bounds",
                                        "omega": [[0.1, 0.2], [0.1, 0.2]]})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    result = CliRunner().invoke(main, ["validate", str(path)])
    assert result.exit_code == EXIT_FAILURE
    assert "photon.omega" in result.output


def test_witness_command(disc2_path):
    """Test if the witness command bounds two-state discrimination by 0.8."""
    result = CliRunner().invoke(main, ["witness", "--scenario", disc2_path])
    assert result.exit_code == EXIT_OK
    row, = rows_of(result.stdout)
    assert float(row["upper_bound"]) == pytest.approx(0.8, abs=1e-5)
    assert row["status"] == "optimal"


def test_witness_sweep_over_omega(disc2_path):
    """Test if a sweep emits one record per grid point in order."""
    result = CliRunner().invoke(main, ["witness", "--scenario", disc2_path,
                                       "--sweep", "omega", "0.1,0.2",
                                       "--format", "json"])
    assert result.exit_code == EXIT_OK
    records = json.loads(result.stdout)
    assert [r["omega"] for r in records] == [0.1, 0.2]
    assert records[1]["upper_bound"] == pytest.approx(0.9, abs=1e-5)
    assert records[0]["input"]["photon"]["omega"] == [[0.1], [0.1]]


def test_infeasible_point_exit_code(tmp_path, disc2_document):
    """Test if pinning W above its maximum exits with 2."""
    path = tmp_path / "over.json"
    path.write_text(json.dumps(dict(disc2_document, witness_value=0.95)))
    output = tmp_path / "out.csv"
    code = run(RunConfig("minentropy", document=str(path),
                         output=str(output)))
    assert code == EXIT_INFEASIBLE
    row, = rows_of(output.read_text())
    assert row["status"] == "infeasible"


@pytest.mark.parametrize("path", sorted(
    str(p) for p in (Path(__file__).parent / "configs").glob("*.json")))
def test_shipped_configs_validate(path):
    """Test if every example document in configs/ validates."""
    code, lines = validate(path)
    assert code == EXIT_OK, lines
