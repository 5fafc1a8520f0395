"""CLI contract: subcommand plumbing, JSON reports, exit codes, and kernel
selection."""

import json
import os
import subprocess
import sys

import pytest

from pickdrop.cli import (
    EXIT_FORMAT,
    EXIT_GUARD,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def gen_stream(tmp_path, capsys, **overrides):
    path = tmp_path / "s.pdsk"
    args = {
        "kind": "planted-heavy", "n": "64", "m": "512",
        "heavy_frequency": "120", "seed": "1",
    }
    args.update({k: str(v) for k, v in overrides.items()})
    code, _ = run_cli(
        capsys, "generate", "--kind", args["kind"], "--n", args["n"],
        "--m", args["m"], "--heavy-frequency", args["heavy_frequency"],
        "--seed", args["seed"], "--out", str(path), "--json",
    )
    assert code == EXIT_OK
    return path


class TestGenerate:
    def test_writes_stream_and_sidecar(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys)
        assert path.exists()
        sidecar = json.loads((tmp_path / "s.pdsk.stats.json").read_text())
        assert sidecar["frequencies"]["1"] == 120

    def test_inconsistent_spec_is_usage_error(self, tmp_path, capsys):
        code, _ = run_cli(capsys, "generate", "--kind", "planted-heavy",
                          "--n", "4", "--m", "4", "--heavy-frequency", "9",
                          "--out", str(tmp_path / "x"))
        assert code == EXIT_USAGE


class TestHeavy:
    def test_report_is_sound_against_sidecar(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys)
        code, out = run_cli(capsys, "heavy", "--input", str(path), "--k", "3",
                            "--eps", "0.25", "--length", "512", "--json")
        assert code == EXIT_OK
        report = json.loads(out)
        sidecar = json.loads((tmp_path / "s.pdsk.stats.json").read_text())
        truth = int(sidecar["frequencies"].get(str(report["element"]), 0))
        assert report["estimate"] <= truth
        assert report["element"] == 1  # the planted id is found

    def test_doubling_mode(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys)
        code, out = run_cli(capsys, "heavy", "--input", str(path), "--k", "3",
                            "--eps", "0.25", "--doubling", "--json")
        assert code == EXIT_OK
        assert json.loads(out)["mode"] == "doubling"

    def test_missing_input(self, tmp_path, capsys):
        code, _ = run_cli(capsys, "heavy", "--input",
                          str(tmp_path / "nope.pdsk"), "--k", "3",
                          "--eps", "0.25")
        assert code == EXIT_IO

    def test_malformed_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("1\nnot-a-number\n")
        code, _ = run_cli(capsys, "heavy", "--input", str(bad), "--k", "3",
                          "--eps", "0.25")
        assert code == EXIT_FORMAT

    def test_determinism(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys)
        argv = ("heavy", "--input", str(path), "--k", "3", "--eps", "0.25",
                "--length", "512", "--seed", "7", "--json")
        _, a = run_cli(capsys, *argv)
        _, b = run_cli(capsys, *argv)
        assert a == b


class TestFk:
    def test_reports_estimate(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys, kind="zipf", n=128, m=1024,
                          heavy_frequency=0)
        code, out = run_cli(capsys, "fk", "--input", str(path), "--k", "3",
                            "--eps", "0.3", "--trials", "3", "--json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["schema"] == 1
        assert report["estimate"] > 0


class TestVerify:
    def test_pairs_exits_clean(self, capsys):
        code, out = run_cli(capsys, "verify", "pairs", "--max-len", "3",
                            "--max-entry", "2", "--json")
        assert code == EXIT_OK
        assert json.loads(out)["violations"] == 0

    def test_promise(self, capsys):
        code, out = run_cli(capsys, "verify", "promise", "--n", "256",
                            "--k", "3", "--trials", "2000", "--json")
        assert code == EXIT_OK
        assert json.loads(out)["false_positive_rate"] == 0.0

    def test_oracle_guard_exit_code(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys, n=64, m=4096, heavy_frequency=100)
        code, _ = run_cli(capsys, "verify", "oracle", "--input", str(path),
                          "--t", "8", "--trials", "100")
        assert code == EXIT_GUARD  # 8^512 tuples is far past the guard

    def test_oracle_small(self, tmp_path, capsys):
        path = gen_stream(tmp_path, capsys, kind="all-equal", n=2, m=8,
                          heavy_frequency=0)
        code, out = run_cli(capsys, "verify", "oracle", "--input", str(path),
                            "--t", "2", "--trials", "20000", "--json")
        assert code == EXIT_OK
        assert json.loads(out)["ok"]


class TestBench:
    def test_reports_both_backends(self, capsys):
        code, out = run_cli(capsys, "bench", "--runs", "2000", "--repeats",
                            "1", "--json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert "python" in report["backends"]
        assert report["active_kernel"] in ("python", "cython")
        if "cython" in report["backends"]:
            assert report["outputs_identical"]


class TestKernelSelection:
    def test_force_python_env(self):
        env = dict(os.environ, PICKDROP_FORCE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c", "import pickdrop; print(pickdrop.KERNEL_NAME)"],
            capture_output=True, text=True, env=env, check=True,
        )
        assert out.stdout.strip() == "python"

    def test_default_kernel_importable(self):
        out = subprocess.run(
            [sys.executable, "-c", "import pickdrop; print(pickdrop.KERNEL_NAME)"],
            capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() in ("python", "cython")
