import json

import numpy as np
import pytest

from cwkit.cli import main, parse_region
from cwkit.directions import Cap, FiniteSet, FullSphere, UnionOfCaps
from cwkit.errors import ParseError, RaggedRows
from cwkit.io import ingest_samples, load_atomic_csv, load_directions_csv


@pytest.fixture
def gaussian_files(tmp_path):
    rng = np.random.default_rng(123)
    paths = []
    for n in (100, 1000, 5000):
        p = tmp_path / f"seq_{n}.csv"
        rows = rng.standard_normal((n, 2))
        p.write_text("".join(f"{float(a)!r},{float(b)!r}\n" for a, b in rows))
        paths.append(p)
    return paths


class TestIngest:
    def test_csv_basic(self, tmp_path):
        f = tmp_path / "pts.csv"
        f.write_text("1.0,2.0\n3.0,4.0\n5.5,6.5\n")
        s = ingest_samples(f)
        assert s.n == 3 and s.dim == 2
        assert s.label == "pts"

    def test_csv_header_skipped(self, tmp_path):
        f = tmp_path / "pts.csv"
        f.write_text("x,y\n1.0,2.0\n")
        assert ingest_samples(f).n == 1

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ParseError) as err:
            ingest_samples(f)
        assert err.value.row == 2
        assert err.value.column == 2

    def test_ragged_rows(self, tmp_path):
        f = tmp_path / "ragged.csv"
        f.write_text("1.0,2.0\n3.0,4.0,5.0\n")
        with pytest.raises(RaggedRows) as err:
            ingest_samples(f)
        assert err.value.row == 2

    def test_ndjson(self, tmp_path):
        f = tmp_path / "pts.ndjson"
        f.write_text('[1, 2, 3]\n[4, 5, 6]\n')
        s = ingest_samples(f)
        assert s.n == 2 and s.dim == 3

    def test_ndjson_bad_line(self, tmp_path):
        f = tmp_path / "pts.ndjson"
        f.write_text('[1, 2]\n{"not": "array"}\n')
        with pytest.raises(ParseError) as err:
            ingest_samples(f, fmt="ndjson")
        assert err.value.row == 2


class TestParseRegion:
    def test_full(self):
        r = parse_region("full", dim_hint=3)
        assert isinstance(r, FullSphere) and r.dim == 3

    def test_cap(self):
        r = parse_region("cap:1,0,0:0.7853981633974483")
        assert isinstance(r, Cap)
        assert r.half_angle == pytest.approx(np.pi / 4)

    def test_union(self):
        r = parse_region("union:1,0:0.5;0,1:0.5")
        assert isinstance(r, UnionOfCaps) and len(r.caps) == 2

    def test_finite(self):
        r = parse_region("finite:1,0;0,1")
        assert isinstance(r, FiniteSet) and len(r.directions) == 2

    def test_unknown(self):
        with pytest.raises(ValueError):
            parse_region("banana:1")


class TestSubcommands:
    def test_sample_directions(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["sample-directions", "--dim", "3", "--directions", "20",
                     "--seed", "4", "--out", str(out)])
        assert code == 0
        dirs = load_directions_csv(out / "directions.csv")
        assert len(dirs) == 20
        assert all(abs(np.linalg.norm(u.coords) - 1) <= 1e-12 for u in dirs)
        # 17 significant digits requested in the output format
        first = (out / "directions.csv").read_text().splitlines()[0]
        assert any(len(cell.split(".")[-1].rstrip("0123456789e-")) == 0 and len(cell) >= 10
                   for cell in first.split(","))

    def test_sample_directions_in_cap(self, tmp_path):
        out = tmp_path / "out"
        code = main(["sample-directions", "--dim", "2", "--directions", "50",
                     "--region", "cap:1,0:1.5707963267948966", "--seed", "1",
                     "--out", str(out)])
        assert code == 0
        dirs = load_directions_csv(out / "directions.csv")
        assert all(u.coords[0] >= 0 for u in dirs)

    def test_gallery_sample_and_project(self, tmp_path):
        out1 = tmp_path / "s"
        assert main(["gallery-sample", "--dist", "gaussian", "--dim", "2", "--n", "500",
                     "--seed", "2", "--out", str(out1)]) == 0
        out2 = tmp_path / "p"
        assert main(["project", "--input", str(out1 / "sample.csv"),
                     "--direction", "1,0", "--out", str(out2)]) == 0
        text = (out2 / "projected.csv").read_text().splitlines()
        assert text[0] == "value,weight"
        assert len(text) >= 400

    def test_carleman_lognormal_closed_form(self, tmp_path):
        out = tmp_path / "c"
        assert main(["carleman", "--dist", "lognormal", "--carleman-order", "30",
                     "--out", str(out)]) == 0
        payload = json.loads((out / "carleman.json").read_text())
        assert payload["verdict"] == "converging"
        assert payload["partial_sums"][-1] == pytest.approx(0.581976706869, abs=1e-5)

    def test_carleman_gaussian(self, tmp_path):
        out = tmp_path / "c"
        assert main(["carleman", "--dist", "gaussian", "--carleman-order", "100",
                     "--out", str(out)]) == 0
        payload = json.loads((out / "carleman.json").read_text())
        assert payload["verdict"] == "diverging"
        assert 20.0 <= payload["partial_sums"][-1] <= 24.0

    def test_counterexample(self, tmp_path):
        out = tmp_path / "ce"
        assert main(["counterexample", "--kernels", "1,0;0,1", "--out", str(out)]) == 0
        p = load_atomic_csv(out / "counterexample_p.csv")
        q = load_atomic_csv(out / "counterexample_q.csv")
        dirs = load_directions_csv(out / "certified_directions.csv")
        assert p.n == q.n == 2
        assert len(dirs) == 2

    def test_reconstruct(self, tmp_path):
        from cwkit.directions import sample_uniform
        from cwkit.moments import MixedMoments, mixed_to_directional, multi_indices_upto

        table = {a: 0.0 for a in multi_indices_upto(2, 2)}
        table[(0, 0)] = 1.0
        table[(2, 0)] = 0.25
        table[(1, 1)] = -0.5
        table[(0, 2)] = 1.5
        mm = MixedMoments(dim=2, max_order=2, table=table)
        obs = tmp_path / "obs.csv"
        lines = []
        for u in sample_uniform(2, 8, seed=3):
            lines.append(f"{float(u.coords[0])!r},{float(u.coords[1])!r},{mixed_to_directional(mm, u, 2)!r}")
        obs.write_text("\n".join(lines) + "\n")
        out = tmp_path / "rec"
        assert main(["reconstruct", "--input", str(obs), "--order", "2",
                     "--out", str(out)]) == 0
        payload = json.loads((out / "reconstruction.json").read_text())
        got = dict(zip(map(tuple, payload["exponents"]), payload["coefficients"]))
        assert got[(2, 0)] == pytest.approx(0.25, abs=1e-10)
        assert got[(1, 1)] == pytest.approx(-0.5, abs=1e-10)
        assert got[(0, 2)] == pytest.approx(1.5, abs=1e-10)
        csv_lines = (out / "mixed_moments.csv").read_text().splitlines()
        assert csv_lines[0] == "alpha1,alpha2,value"
        assert csv_lines[1].startswith("2,0,")

    def test_trace_and_tightness(self, tmp_path, gaussian_files):
        inputs = ",".join(str(p) for p in gaussian_files)
        out = tmp_path / "tr"
        assert main(["trace", "--inputs", inputs, "--target", str(gaussian_files[-1]),
                     "--direction", "0,1", "--metric", "w1", "--out", str(out)]) == 0
        lines = (out / "trace.csv").read_text().splitlines()
        assert lines[0] == "direction_id,n,distance"
        assert len(lines) == 4
        out2 = tmp_path / "tb"
        assert main(["tightness", "--inputs", inputs, "--epsilon", "0.2",
                     "--directions", "10", "--seed", "3", "--out", str(out2)]) == 0
        payload = json.loads((out2 / "tightness.json").read_text())
        assert min(payload["achieved_coverage"]) >= 0.8


class TestVerdictCommand:
    def run_verdict_cli(self, tmp_path, gaussian_files, target, outname):
        inputs = ",".join(str(p) for p in gaussian_files)
        out = tmp_path / outname
        code = main(["verdict", "--inputs", inputs, "--target", target,
                     "--directions", "20", "--seed", "11", "--out", str(out)])
        return code, out

    def test_gaussian_exit_zero(self, tmp_path, gaussian_files):
        code, out = self.run_verdict_cli(tmp_path, gaussian_files, "gaussian", "v")
        assert code == 0
        payload = json.loads((out / "verdict.json").read_text())
        assert payload["overall"] == "consistent_with_convergence"
        assert (out / "traces.csv").exists()
        assert (out / "config_echo.cfg").exists()

    def test_shifted_exit_one(self, tmp_path, gaussian_files):
        shifted = tmp_path / "shifted.csv"
        rng = np.random.default_rng(9)
        rows = rng.standard_normal((20000, 2)) + np.array([1.0, 0.0])
        shifted.write_text("".join(f"{float(a)!r},{float(b)!r}\n" for a, b in rows))
        code, out = self.run_verdict_cli(tmp_path, gaussian_files, str(shifted), "v1")
        assert code == 1
        payload = json.loads((out / "verdict.json").read_text())
        assert payload["overall"] == "inconsistent"

    def test_echo_replay_byte_identical(self, tmp_path, gaussian_files):
        code, out = self.run_verdict_cli(tmp_path, gaussian_files, "gaussian", "v2")
        assert code == 0
        replay = tmp_path / "v2_replay"
        assert main(["run", "--config", str(out / "config_echo.cfg"),
                     "--out", str(replay)]) == 0
        for name in ("verdict.json", "traces.csv"):
            assert (out / name).read_bytes() == (replay / name).read_bytes()

    def test_seed_from_environment(self, tmp_path, gaussian_files, monkeypatch):
        monkeypatch.setenv("CWKIT_SEED", "11")
        inputs = ",".join(str(p) for p in gaussian_files)
        out_env = tmp_path / "venv_seed"
        assert main(["verdict", "--inputs", inputs, "--target", "gaussian",
                     "--directions", "20", "--out", str(out_env)]) == 0
        echo = (out_env / "config_echo.cfg").read_text()
        assert "seed = 11" in echo

    def test_flags_beat_config_file(self, tmp_path, gaussian_files):
        cfgfile = tmp_path / "base.cfg"
        cfgfile.write_text("# base settings\ndirections = 20\nseed = 4\nmetric = w1\n")
        inputs = ",".join(str(p) for p in gaussian_files)
        out = tmp_path / "vflag"
        assert main(["verdict", "--config", str(cfgfile), "--inputs", inputs,
                     "--target", "gaussian", "--seed", "9", "--out", str(out)]) == 0
        echo = (out / "config_echo.cfg").read_text()
        assert "seed = 9" in echo        # flag wins
        assert "metric = w1" in echo     # config survives where no flag given
        assert "directions = 20" in echo


class TestErrorPaths:
    def test_missing_file_exit_two(self, tmp_path, capsys):
        code = main(["verdict", "--inputs", str(tmp_path / "nope.csv"),
                     "--target", "gaussian", "--out", str(tmp_path / "o")])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] in ("FileNotFoundError", "OSError")

    def test_parse_error_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\nx,y\n")
        code = main(["project", "--input", str(bad), "--direction", "1,0",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ParseError"
        assert err["row"] == 2

    def test_missing_required_option(self, tmp_path, capsys):
        code = main(["project", "--direction", "1,0", "--out", str(tmp_path / "o")])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert "input" in err["message"]
