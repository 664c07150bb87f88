"""
Tests for the command-line interface.
"""

import json
import os
from unittest.mock import patch

import pytest

from spectral_tensor.__main__ import EXIT_DATA, EXIT_OK, EXIT_USAGE, create_parser, main
from spectral_tensor.bench import cigar_pair
from spectral_tensor.fields import read_field, write_field
from spectral_tensor.tensor import DiffusionTensor, TensorField


@pytest.fixture
def cigars(tensor_file):
    """Two files holding crossing cigar tensors."""
    s1, s2 = cigar_pair(60.0)
    return tensor_file("a.txt", s1), tensor_file("b.txt", s2)


class TestParser:
    """Test argument parsing."""

    def test_subcommands(self):
        """Test that every subcommand is registered."""
        parser = create_parser()
        args = parser.parse_args(["dist", "a.txt", "b.txt", "--metric", "le"])

        assert args.command == "dist"
        assert args.metric == "le"

    def test_unknown_command(self, capsys):
        """Test that usage errors exit with status 1."""
        assert main(["nope"]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err

    def test_missing_argument(self):
        """Test a missing positional argument."""
        assert main(["dist", "only-one.txt"]) == EXIT_USAGE

    def test_unavailable_format(self, cigars):
        """Test that a format the command cannot produce is a usage error."""
        assert main(["dist", *cigars, "--format", "svg"]) == EXIT_USAGE


class TestDist:
    """Test the dist command."""

    def test_identical_tensors(self, tensor_file, anisotropic, capsys):
        """Test that the distance between equal tensors prints 0."""
        a = tensor_file("a.txt", anisotropic)
        b = tensor_file("b.txt", anisotropic)

        assert main(["dist", a, b]) == EXIT_OK
        assert capsys.readouterr().out == "0\n"

    @pytest.mark.parametrize("metric", ["ai", "le", "spectral-rot", "sq"])
    def test_json(self, cigars, metric, capsys):
        """Test JSON output for every metric."""
        assert main(["dist", *cigars, "--metric", metric, "--format", "json"]) == EXIT_OK

        payload = json.loads(capsys.readouterr().out)
        assert payload["metric"] == metric
        assert payload["distance"] > 0.0

    def test_json_floats_match_csv_text(self, cigars, capsys):
        """Test that JSON floats carry the same 17 significant digits as CSV."""
        assert main(["dist", *cigars]) == EXIT_OK
        csv_value = capsys.readouterr().out.strip()
        assert main(["dist", *cigars, "--format", "json"]) == EXIT_OK
        text = capsys.readouterr().out

        assert csv_value == format(float(csv_value), ".17g")
        assert f'"distance": {csv_value}' in text
        assert json.loads(text)["distance"] == float(csv_value)

    def test_invalid_tensor(self, tmp_path, cigars, capsys):
        """Test that bad input data exits with status 2."""
        bad = tmp_path / "bad.txt"
        bad.write_text("1 0 0 1 0 -1\n")

        assert main(["dist", str(bad), cigars[0]]) == EXIT_DATA
        assert "spectral-tensor dist: error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, cigars):
        """Test that an unreadable file exits with status 2."""
        assert main(["dist", str(tmp_path / "missing.txt"), cigars[0]]) == EXIT_DATA

    def test_invalid_environment(self, cigars):
        """Test that a bad environment setting is reported as a data error."""
        with patch.dict(os.environ, {"SPECTRAL_TENSOR_THREADS": "many"}):
            assert main(["dist", *cigars]) == EXIT_DATA


class TestMean:
    """Test the mean command."""

    def test_weighted_mean_csv(self, cigars, capsys):
        """Test CSV output of a weighted mean."""
        assert main(["mean", *cigars, "--weights", "0.25,0.75"]) == EXIT_OK

        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "dxx,dxy,dxz,dyy,dyz,dzz"
        assert len(lines[1].split(",")) == 6

    def test_mean_to_field(self, cigars, tmp_path):
        """Test writing the mean as a one-voxel field."""
        out = tmp_path / "mean.dtf"

        assert main(["mean", *cigars, "--metric", "ai", "--format", "dtf", "--out", str(out)]) == 0
        assert read_field(out).dims == (1, 1, 1)

    def test_bad_weights(self, cigars, capsys):
        """Test that weights not summing to one are rejected."""
        assert main(["mean", *cigars, "--weights", "0.5,0.6"]) == EXIT_DATA
        assert "sum" in capsys.readouterr().err

    def test_spectral_rotation_has_no_mean(self, cigars):
        """Test that the rotation-matrix measure cannot average."""
        assert main(["mean", *cigars, "--metric", "spectral-rot"]) == EXIT_DATA


class TestInterp:
    """Test the interp and grid-interp commands."""

    def test_curve(self, cigars, capsys):
        """Test the curve table."""
        assert main(["interp", *cigars, "--steps", "5"]) == EXIT_OK

        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("t,HA,FA,det,phi,")
        assert len(lines) == 6

    def test_grid_point(self, tensor_file, capsys):
        """Test a single point in a square cell."""
        corners = tensor_file("corners.txt", *(cigar_pair(a)[1] for a in (0, 30, 60, 90)))

        assert main(["grid-interp", corners, "--point", "0.5,0.5", "--format", "json"]) == 0

        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 1
        assert rows[0]["HA"] == pytest.approx(1.6094379124341003, abs=1e-10)

    def test_grid_samples(self, tensor_file, tmp_path):
        """Test a sampled cell written as a field."""
        corners = tensor_file("corners.txt", *(cigar_pair(a)[1] for a in (0, 30, 60, 90)))
        out = tmp_path / "grid.dtf"

        argv = ["grid-interp", corners, "--grid", "3", "--format", "dtf", "--out", str(out)]

        assert main(argv) == EXIT_OK
        assert read_field(out).dims == (3, 3, 1)

    def test_wrong_corner_count(self, cigars):
        """Test that a cell needs 4 or 8 corners."""
        assert main(["grid-interp", cigars[0], "--point", "0.5,0.5"]) == EXIT_DATA


class TestResample:
    """Test the resample command."""

    def test_resample(self, tmp_path):
        """Test resampling a two-voxel field."""
        s1, s2 = cigar_pair(60.0)
        source = tmp_path / "in.dtf"
        out = tmp_path / "out.txt"
        write_field(TensorField((2, 1, 1), (1.0, 1.0, 1.0), (s1, s2)), source)

        argv = ["resample", str(source), "--dims", "5,1,1", "--out", str(out), "--threads", "2"]

        assert main(argv) == EXIT_OK
        assert out.read_text().startswith("# dtf-text 5 1 1")
        assert read_field(out).voxel(0, 0, 0) == s1

    def test_resample_needs_out(self, tmp_path):
        """Test that the output path is required."""
        source = tmp_path / "in.dtf"
        write_field(TensorField.constant((1, 1, 1), DiffusionTensor.identity()), source)

        assert main(["resample", str(source), "--dims", "2,2,2"]) == EXIT_USAGE

    def test_bad_dims(self, tmp_path):
        """Test dims validation."""
        assert main(["resample", "x.dtf", "--dims", "2,2", "--out", "y.dtf"]) == EXIT_USAGE


class TestTables:
    """Test the anisotropy, sweep and bench tables."""

    def test_aniso_sweep(self, capsys):
        """Test a header plus one row per step."""
        assert main(["aniso-sweep", "--steps", "100"]) == EXIT_OK

        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "t,HA,FA,RA,GA"
        assert len(lines) == 101
        assert lines[-1].split(",")[1] == "inf"

    def test_aniso(self, cigars, capsys):
        """Test the per-tensor indices."""
        assert main(["aniso", cigars[0], "--format", "json"]) == EXIT_OK

        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["HA"] == pytest.approx(1.6094379124341003)

    def test_sweep(self, capsys):
        """Test the sweep table."""
        assert main(["sweep", "--mode", "angle", "--steps", "5"]) == EXIT_OK

        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "s,angle_deg,ai,le,spectral-rot,sq"
        assert len(lines) == 6

    def test_bench(self, capsys):
        """Test the benchmark report."""
        assert main(["bench", "--n", "100", "--seed", "9"]) == EXIT_OK

        text = capsys.readouterr().out
        report = json.loads(text)
        assert report["n"] == 100
        assert report["seed"] == 9
        assert set(report["times"]) == {"ai", "le", "spectral-rot", "sq"}
        for seconds in report["times"].values():
            assert format(seconds, ".17g") in text

    def test_bench_too_small(self):
        """Test the benchmark sample floor."""
        assert main(["bench", "--n", "10"]) == EXIT_DATA


class TestRender:
    """Test the render command."""

    def test_demo(self, tmp_path, capsys):
        """Test the crossed-cigar demo."""
        assert main(["render", "--demo", "fig1", "--out", str(tmp_path / "fig1")]) == EXIT_OK

        assert (tmp_path / "fig1-sq.svg").exists()
        assert (tmp_path / "fig1-le.svg").exists()
        assert capsys.readouterr().out.startswith("framework,path,HA")

    def test_tensor_list(self, cigars, capsys):
        """Test rendering a tensor list to standard output."""
        assert main(["render", cigars[0]]) == EXIT_OK
        assert "<svg" in capsys.readouterr().out

    def test_needs_input(self):
        """Test that render needs a file or a demo."""
        assert main(["render"]) == EXIT_USAGE
