import json

import numpy as np
import pytest

from asfbounds.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSimulate:
    def test_writes_three_files_and_manifest(self, tmp_path, capsys):
        prefix = str(tmp_path / "run_")
        code, _, _ = run_cli(["simulate", "--n", "1000", "--seed", "7", "--out", prefix], capsys)
        assert code == 0
        matched = (tmp_path / "run_matched.csv").read_text().splitlines()
        assert len(matched) == 1001
        assert (tmp_path / "run_revealed.csv").exists()
        assert (tmp_path / "run_stated.csv").exists()
        manifest = json.loads((tmp_path / "run_manifest.json").read_text())
        assert manifest["command"] == "simulate"
        import hashlib

        for path, digest in manifest["outputs"].items():
            assert hashlib.sha256(open(path, "rb").read()).hexdigest() == digest

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        a = str(tmp_path / "a_")
        b = str(tmp_path / "b_")
        run_cli(["simulate", "--n", "500", "--seed", "3", "--out", a], capsys)
        run_cli(["simulate", "--n", "500", "--seed", "3", "--out", b], capsys)
        for name in ("matched.csv", "revealed.csv", "stated.csv"):
            assert (tmp_path / f"a_{name}").read_bytes() == (tmp_path / f"b_{name}").read_bytes()

    def test_unwritable_path(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        code, _, err = run_cli(
            ["simulate", "--n", "10", "--seed", "0", "--out", str(blocker / "x_")], capsys
        )
        assert code == 2
        assert "error" in err


class TestAnalytic:
    def test_healthy_attribute(self, capsys):
        code, out, _ = run_cli(["analytic", "--x", "0"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["true_asf"] == pytest.approx(0.5, abs=1e-8)
        assert payload["bounds"]["lower"] == pytest.approx(0.371, abs=2e-3)
        assert payload["bounds"]["upper"] == pytest.approx(0.654, abs=2e-3)
        assert payload["e_values"]["1"] == pytest.approx(0.5, abs=1e-9)
        assert payload["e_values"]["0"] == pytest.approx(0.25, abs=1e-9)

    def test_unhealthy_attribute(self, capsys):
        code, out, _ = run_cli(["analytic", "--x", "1"], capsys)
        payload = json.loads(out)
        assert payload["bounds"]["lower"] == pytest.approx(0.346, abs=2e-3)
        assert payload["bounds"]["upper"] == pytest.approx(0.559, abs=2e-3)
        assert payload["e_values"]["1"] == pytest.approx(0.8270, abs=5e-4)

    def test_domain_error_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["analytic", "--x", "2"])
        assert exc.value.code == 2


@pytest.fixture(scope="module")
def simulated_files(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli_sim")
    prefix = str(tmp / "big_")
    assert main(["simulate", "--n", "100000", "--seed", "12", "--out", prefix]) == 0
    return tmp


class TestBounds:
    def test_recovers_benchmark_bounds(self, simulated_files, capsys):
        code, out, _ = run_cli(
            ["bounds", str(simulated_files / "big_revealed.csv"),
             str(simulated_files / "big_stated.csv"), "--x", "0"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["lower"] == pytest.approx(0.371, abs=0.02)
        assert payload["upper"] == pytest.approx(0.654, abs=0.02)
        assert {entry["z"] for entry in payload["per_z"]} == {0, 1}

    def test_absurd_cell_floor_is_estimation_failure(self, simulated_files, capsys):
        code, _, err = run_cli(
            ["bounds", str(simulated_files / "big_revealed.csv"),
             str(simulated_files / "big_stated.csv"), "--x", "0",
             "--z-drop-floor", "1000000000"],
            capsys,
        )
        assert code == 1
        assert "no retained z" in err

    def test_two_point_discrete_fixture(self, tmp_path, capsys):
        # conditional report masses (0.2, 0.8) at x=0, uniform marginal,
        # mean decision 0.6: the identified interval is (0.375, 0.75)
        stated_rows = ["p1,x"]
        stated_rows += ["0.75,0"] * 32 + ["0.25,0"] * 8
        stated_rows += ["0.75,1"] * 8 + ["0.25,1"] * 32
        (tmp_path / "stated.csv").write_text("\n".join(stated_rows) + "\n")
        revealed_rows = ["d,x"] + ["1,0"] * 24 + ["0,0"] * 16 + ["1,1"] * 20
        (tmp_path / "revealed.csv").write_text("\n".join(revealed_rows) + "\n")
        code, out, _ = run_cli(
            ["bounds", str(tmp_path / "revealed.csv"), str(tmp_path / "stated.csv"),
             "--x", "0", "--discrete-p"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["lower"] == pytest.approx(0.375, abs=1e-6)
        assert payload["upper"] == pytest.approx(0.75, abs=1e-6)

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["bounds", str(tmp_path / "nope.csv"), str(tmp_path / "nope2.csv"), "--x", "0"],
            capsys,
        )
        assert code == 2


@pytest.fixture(scope="module")
def small_files(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli_small")
    prefix = str(tmp / "s_")
    assert main(["simulate", "--n", "400", "--seed", "5", "--out", prefix]) == 0
    return tmp


class TestInfer:
    def test_deterministic_reruns(self, small_files, tmp_path, capsys):
        args = ["infer", str(small_files / "s_revealed.csv"),
                str(small_files / "s_stated.csv"), "--x", "0",
                "--B", "20", "--seed", "9"]
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        payload = json.loads(out_a.read_text())
        assert payload["lb_hat"] <= payload["ub_hat"]
        assert payload["B"] == 20

    def test_alpha_nesting(self, small_files, capsys):
        base = ["infer", str(small_files / "s_revealed.csv"),
                str(small_files / "s_stated.csv"), "--x", "0",
                "--B", "20", "--seed", "9"]
        _, wide_out, _ = run_cli(base + ["--alpha", "0.05"], capsys)
        _, narrow_out, _ = run_cli(base + ["--alpha", "0.5"], capsys)
        wide = json.loads(wide_out)
        narrow = json.loads(narrow_out)
        assert wide["lo"] <= narrow["lo"] and narrow["hi"] <= wide["hi"]


class TestMatched:
    def test_unanimous_choice(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        rows = ["d,p1,x"] + [f"1,{rng.uniform():.6f},0" for _ in range(60)]
        (tmp_path / "m.csv").write_text("\n".join(rows) + "\n")
        code, out, _ = run_cli(
            ["matched", str(tmp_path / "m.csv"), "--x", "0", "--B", "20", "--seed", "1"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["mu_hat"] == 1.0
        assert payload["se"] == 0.0

    def test_benchmark_files(self, small_files, capsys):
        code, out, _ = run_cli(
            ["matched", str(small_files / "s_matched.csv"), "--x", "0",
             "--B", "20", "--seed", "2"],
            capsys,
        )
        payload = json.loads(out)
        assert code == 0
        assert 0.3 <= payload["mu_hat"] <= 0.7
        assert payload["ci_lower"] <= payload["mu_hat"] <= payload["ci_upper"]


class TestReplicate:
    def test_smoke_grid_and_determinism(self, tmp_path, capsys):
        args = ["replicate", "--scale", "desk", "--seed", "1",
                "--reps", "2", "--B-boot", "20", "--n-values", "300",
                "--xi-scales", "1.0", "--workers", "2"]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        rows = out_a.read_text().strip().splitlines()
        assert rows[0].startswith("n,xi_scale,coverage")
        assert len(rows) == 2
        assert json.loads((tmp_path / "a.csv.manifest.json").read_text())["command"] == "replicate"


class TestWorkersEnvVar:
    def test_env_var_sets_default(self, monkeypatch):
        from asfbounds.cli import build_parser

        monkeypatch.setenv("ASFBOUNDS_WORKERS", "3")
        args = build_parser().parse_args(["matched", "m.csv", "--x", "0"])
        assert args.workers == 3

    def test_flag_overrides_env(self, monkeypatch):
        from asfbounds.cli import build_parser

        monkeypatch.setenv("ASFBOUNDS_WORKERS", "3")
        args = build_parser().parse_args(["matched", "m.csv", "--x", "0", "--workers", "1"])
        assert args.workers == 1
