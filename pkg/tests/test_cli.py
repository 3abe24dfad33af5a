import csv
import io
import json
import math
import os

import numpy as np
import pytest

from rlrp import cli
from rlrp.benchmark import BenchmarkScenario, DESK_SCALE, run_benchmark
from rlrp.core import NumericalError
from rlrp.imageio import read_image, write_image
from rlrp.metrics import CSV_COLUMNS
from rlrp.noise import NoiseSpec


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_usage_errors(capsys):
    assert run(["frobnicate"], capsys)[0] == 1
    code, _, err = run(["decompose"], capsys)
    assert code == 1 and "error" in err
    assert run(["synth", "--size", "abc"], capsys)[0] == 1


def test_config_error_is_usage(tmp_path, capsys):
    img = tmp_path / "in.rlf"
    write_image(np.random.default_rng(0).random((16, 16)), img)
    code, _, err = run(["decompose", img, "--s", "2.0"], capsys)
    assert code == 1 and "rs>2" in err
    code, _, err = run(["decompose", img, "--phi", "blur", "--method", "rlrp-pps"], capsys)
    assert code == 1


def test_io_errors(tmp_path, capsys):
    code, _, err = run(["decompose", tmp_path / "missing.pgm"], capsys)
    assert code == 2 and err
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\n\x00")
    code, _, err = run(["decompose", bad], capsys)
    assert code == 2 and "byte" in err


def test_numerical_failure_exit_code(tmp_path, capsys, monkeypatch):
    img = tmp_path / "in.rlf"
    write_image(np.ones((12, 12)), img)

    def boom(*a, **k):
        raise NumericalError("non-finite iterate at iteration 1")

    monkeypatch.setattr(cli, "solve", boom)
    code, _, err = run(["decompose", img], capsys)
    assert code == 3 and "numerical" in err


def test_synth_is_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["synth", "--size", 64, "--rank", 2, "--regions", 3, "--seed", 7,
                    "--out-dir", tmp_path / d], capsys)[0] == 0
    names = sorted(os.listdir(tmp_path / "a"))
    assert names == ["synth.cartoon.rlf", "synth.composite.rlf", "synth.manifest.json", "synth.texture.rlf"]
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
    manifest = json.loads((tmp_path / "a" / "synth.manifest.json").read_text())
    assert manifest["seed"] == 7 and manifest["rank"] == 2 and manifest["weights"][0] == 0.7
    assert np.unique(read_image(tmp_path / "a" / "synth.cartoon.rlf")).size <= 3


def test_paper_parameter_decompose_writes_outputs(tmp_path, capsys):
    run(["synth", "--size", 32, "--out-dir", tmp_path, "--format", "pgm"], capsys)
    src = tmp_path / "in.pgm"
    os.rename(tmp_path / "synth.composite.pgm", src)
    code, out, _ = run(["decompose", "--phi", "identity", "--method", "rlrp-pps", "--tau", 0.015, "--mu", 0.2,
                        "--c", 0.01, "--beta", 0.2, "--gamma", 1.6, "--r", 1, "--s", 2.01, "--eps", 1e-2, src], capsys)
    assert code == 0
    for part in ("u", "v", "restored"):
        assert read_image(tmp_path / f"in.{part}.pgm").shape == (32, 32)
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 2
    assert rows[1][1] == "rlrp-pps" and rows[1][5] == "nan"


def test_corrupt_writes_replayable_noise(tmp_path, capsys):
    clean = np.random.default_rng(2).random((16, 16))
    write_image(clean, tmp_path / "c.rlf")
    assert run(["corrupt", tmp_path / "c.rlf", "--noise", "cauchy", "--intensity", 0.05, "--seed", 4], capsys)[0] == 0
    obs = read_image(tmp_path / "c.observed.rlf")
    noise = read_image(tmp_path / "c.observed.noise.rlf")
    assert np.array_equal(obs, clean + noise)


@pytest.mark.parametrize("seed", [0, 3])
def test_pipeline_matches_in_memory_benchmark(tmp_path, capsys, seed):
    d = tmp_path
    run(["synth", "--size", 32, "--seed", seed, "--out-dir", d], capsys)
    comp = d / "synth.composite.rlf"
    run(["corrupt", comp, "-o", d / "obs.rlf", "--seed", seed, "--intensity", 0.1], capsys)
    metrics = d / "m.csv"
    for method in ("rlrp-pps", "clrp"):
        code, _, _ = run(["decompose", d / "obs.rlf", "--method", method, "--reference", comp,
                          "--metrics", metrics, "--seed", seed, "--out-prefix", d / method], capsys)
        assert code == 0
    cli_rows = list(csv.DictReader(metrics.open()))
    mem = run_benchmark(BenchmarkScenario(size=32, seeds=(seed,), noise=NoiseSpec.student_t(2.0, 0.1)),
                        workers=1).rows
    mem = {r.method: r for r in mem}
    for row in cli_rows:
        ref = mem[row["method"]]
        assert float(row["snr_db"]) == pytest.approx(ref.snr_db, abs=1e-12)
        assert float(row["ssim"]) == pytest.approx(ref.ssim, abs=1e-12)
        assert int(row["iterations"]) == ref.iterations


def test_diag_trace(tmp_path, capsys):
    img = tmp_path / "in.rlf"
    write_image(np.random.default_rng(1).random((16, 16)), img)
    code, out, _ = run(["diag", img, "--max-iter", 12, "--eps", 1e-12], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 12 and rows[0]["gap"] == "" and float(rows[-1]["q_residual"]) >= 0
    code, out, _ = run(["diag", img, "--phi", "blur", "--method", "rlrp-pdhg", "--max-iter", 5,
                        "-o", tmp_path / "t.csv"], capsys)
    rows = list(csv.DictReader((tmp_path / "t.csv").open()))
    assert code == 0 and len(rows) == 5 and float(rows[-1]["ergodic_gap"]) >= 0


def test_benchmark_subcommand(tmp_path, capsys):
    sc = tmp_path / "r.cfg"
    sc.write_text("[scenario]\nsize = 32\nseeds = 0\n[solver]\nmax_iter = 20\n")
    code, out, _ = run(["benchmark", sc, "--workers", 1], capsys)
    assert code == 0
    assert (tmp_path / "r.csv").read_text().startswith(",".join(CSV_COLUMNS))
    assert (tmp_path / "r.summary.csv").read_text() == out


def test_infinite_c_flag(tmp_path, capsys):
    img = tmp_path / "in.rlf"
    write_image(np.random.default_rng(3).random((16, 16)), img)
    assert run(["decompose", img, "--c", "inf", "--max-iter", 5], capsys)[0] == 0
    assert math.isinf(cli.build_parser().parse_args(["decompose", "x", "--c", "inf"]).c)
    assert DESK_SCALE.c == cli.build_parser().parse_args(["decompose", "x"]).c


def test_iteration_cap_default_follows_phi():
    parse = cli.build_parser().parse_args
    assert cli._cfg_from(parse(["decompose", "x"])).max_iter == 200
    assert cli._cfg_from(parse(["decompose", "x", "--phi", "downsample"])).max_iter == 500
    assert cli._cfg_from(parse(["decompose", "x", "--phi", "downsample", "--max-iter", "9"])).max_iter == 9
