"""Tests for data.py -- CSV tables, manifests, digests and input parsing."""

import math

import numpy as np
import pytest

from petzrenyi.data import (
    HEADERS,
    RunManifest,
    format_float,
    load_subspace_file,
    parse_cauchy_data,
    parse_subspace,
    parse_test_function,
    read_csv,
    require_verified,
    sha256_file,
    verify_outputs,
    write_csv,
)
from petzrenyi.errors import ConvergenceError, UsageError

CANONICAL_INI = """\
[ambient]
dimension = 2
metric = canonical
complex_structure = canonical

[subspace]
basis = 1 0 1.4142135623730951 0; 0 1 0 -1.4142135623730951
"""


class TestFormatFloat:
    def test_seventeen_digits(self):
        assert format_float(0.1) == "0.10000000000000001"

    @pytest.mark.parametrize("x", [1.0 / 3.0, math.pi * 1e-300, -2.5e17, 0.0])
    def test_text_round_trip(self, x):
        assert float(format_float(x)) == x

    def test_special_values(self):
        assert format_float(math.nan) == "nan"
        assert format_float(math.inf) == "inf"
        assert format_float(-math.inf) == "-inf"


class TestCsv:
    def test_write_and_read(self, tmp_path):
        path = write_csv(tmp_path / "sub" / "t.csv", ("name", "x", "n", "ok"),
                         [("a", 0.5, 3, True), ("b", np.float64(0.25), np.int64(2), False)])
        header, rows = read_csv(path)
        assert header == ["name", "x", "n", "ok"]
        assert rows == [["a", "0.5", "3", "true"], ["b", "0.25", "2", "false"]]

    def test_row_width_must_match(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "t.csv", ("a", "b"), [(1.0,)])

    def test_headers(self):
        assert HEADERS["alpha_curve"] == ("alpha", "entropy", "err_estimate")
        assert HEADERS["subspace_table"] == ("alpha", "spectral", "fock", "abs_diff")

    def test_sha256_of_empty_file(self, tmp_path):
        path = tmp_path / "empty"
        path.write_bytes(b"")
        assert sha256_file(path) == (
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        )


class TestRunManifest:
    def test_write_and_read(self, tmp_path):
        table = write_csv(tmp_path / "alpha_curve.csv", HEADERS["alpha_curve"], [(0.5, 1.0, 0.0)])
        manifest = RunManifest("chiral", {"beta": "1", "tol": "1e-10"})
        manifest.record(table)
        path = manifest.write(tmp_path)

        back = RunManifest.read(path)
        assert back.model == "chiral"
        assert back.parameters == {"beta": "1", "tol": "1e-10"}
        assert back.outputs == {"alpha_curve.csv": sha256_file(table)}
        assert back.status == "complete"

    def test_lines_are_sorted(self):
        manifest = RunManifest("wedge", {"tol": "1", "beta": "2"}, {"b.csv": "x", "a.csv": "y"})
        assert manifest.lines()[3:] == ["beta = 2", "tol = 1", "output.a.csv = y", "output.b.csv = x"]

    def test_read_needs_model(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("beta = 1\n", encoding="utf-8")
        with pytest.raises(UsageError) as info:
            RunManifest.read(path)
        assert info.value.key == "model"

    def test_verify_detects_changes(self, tmp_path):
        table = write_csv(tmp_path / "endpoints.csv", HEADERS["endpoints"], [("x", 1.0, 0.0)])
        manifest = RunManifest("subspace")
        manifest.record(table)
        assert verify_outputs(manifest, tmp_path) == []
        require_verified(manifest, tmp_path)

        table.write_text("quantity,value,err_estimate\nx,2,0\n", encoding="utf-8")
        assert verify_outputs(manifest, tmp_path) == ["endpoints.csv"]
        with pytest.raises(ConvergenceError):
            require_verified(manifest, tmp_path)

    def test_missing_output(self, tmp_path):
        manifest = RunManifest("subspace", outputs={"gone.csv": "0" * 64})
        assert verify_outputs(manifest, tmp_path) == ["gone.csv"]


class TestTestFunctions:
    def test_bump(self):
        f = parse_test_function("bump 0.5 1.5")
        assert f.support == (0.5, 1.5)

    def test_bump_with_amplitude(self):
        plain = parse_test_function("bump 0.5 1.5")
        f = parse_test_function(" bump 0.5 1.5 2 ")
        assert f.value(np.array(1.0)) == pytest.approx(2 * plain.value(np.array(1.0)))

    def test_poly_bump(self):
        f = parse_test_function("poly-bump 0.5 1.5 3")
        assert f.value(np.array(1.0)) == pytest.approx(1.0)

    def test_poly_bump_order_must_be_integer(self):
        with pytest.raises(UsageError):
            parse_test_function("poly-bump 0.5 1.5 2.5")

    @pytest.mark.parametrize("text", ["bogus", "bump 0.5", "bump a b", "poly-bump 1 2"])
    def test_rejects(self, text):
        with pytest.raises(UsageError) as info:
            parse_test_function(text)
        assert info.value.key == "test_function"

    def test_csv(self, tmp_path):
        exact = parse_test_function("poly-bump 0.5 1.5 4")
        u = np.linspace(0.5, 1.5, 101)
        path = write_csv(tmp_path / "f.csv", ("u", "f", "fprime"),
                         zip(u, exact.value(u), exact.derivative(u)))
        f = parse_test_function(f"csv:{path}")
        assert f.support == (0.5, 1.5)
        assert f.value(np.array(1.0)) == pytest.approx(1.0, abs=1e-6)

    def test_csv_missing_column(self, tmp_path):
        path = write_csv(tmp_path / "f.csv", ("u", "f"), [(0.5, 0.0), (1.0, 1.0)])
        with pytest.raises(UsageError):
            parse_test_function(f"csv:{path}")

    def test_csv_missing_file(self, tmp_path):
        with pytest.raises(UsageError):
            parse_test_function(f"csv:{tmp_path / 'nope.csv'}")


class TestCauchyData:
    @pytest.mark.parametrize("kind", ["gauss-bump", "momentum-bump", "wave-packet"])
    def test_kinds(self, kind):
        data = parse_cauchy_data(f"{kind} 2.0 1.0", mass=1.5)
        assert data.mass == 1.5
        assert data.support == (1.0, 3.0)

    def test_trailing_scale(self):
        plain = parse_cauchy_data("gauss-bump 2.0 1.0")
        scaled = parse_cauchy_data("gauss-bump 2.0 1.0 3")
        assert scaled.phi(np.array(2.0)) == pytest.approx(3 * plain.phi(np.array(2.0)))

    @pytest.mark.parametrize("text", ["square 2 1", "gauss-bump 2", "gauss-bump x 1"])
    def test_rejects(self, text):
        with pytest.raises(UsageError):
            parse_cauchy_data(text)


class TestSubspaceInput:
    def test_load_ini(self, tmp_path, canonical):
        path = tmp_path / "l.ini"
        path.write_text(CANONICAL_INI, encoding="utf-8")
        L, vector = load_subspace_file(path)
        assert vector is None
        np.testing.assert_allclose(L.basis, canonical.basis)

    def test_load_ini_with_vector(self, tmp_path, rng):
        path = tmp_path / "l.ini"
        path.write_text(CANONICAL_INI + "vector = 0.1 0 0.1414213562373095 0\n", encoding="utf-8")
        L, f = parse_subspace(str(path), rng)
        np.testing.assert_allclose(f, [0.1, 0.0, 0.1414213562373095, 0.0])
        assert L.contains(f)

    def test_vector_of_wrong_size(self, tmp_path, rng):
        path = tmp_path / "l.ini"
        path.write_text(CANONICAL_INI + "vector = 1 0\n", encoding="utf-8")
        with pytest.raises(UsageError):
            parse_subspace(str(path), rng)

    def test_missing_section(self, tmp_path):
        path = tmp_path / "l.ini"
        path.write_text("[ambient]\ndimension = 2\n", encoding="utf-8")
        with pytest.raises(UsageError):
            load_subspace_file(path)

    def test_bad_matrix(self, tmp_path):
        path = tmp_path / "l.ini"
        path.write_text(CANONICAL_INI.replace("1 0 1.414", "1 x 1.414"), encoding="utf-8")
        with pytest.raises(UsageError):
            load_subspace_file(path)

    def test_canonical_shorthand(self, rng):
        L, f = parse_subspace("canonical 2.0", rng)
        assert L.contains(f)
        assert float(L.ambient.norm(f)) == pytest.approx(0.5)

    def test_random_shorthand(self, rng):
        L, f = parse_subspace("random 2", rng, vector_norm=0.3)
        assert L.ambient.dim_real == 8
        assert L.contains(f)
