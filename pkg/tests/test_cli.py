import json

import pytest

from summex.cli import run_command
from summex.ingest import load_binned
from summex.synthetic import make_synthetic, write_csv, write_ground_truth


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cliwork")
    raw, groups = make_synthetic(seed=0)
    csv_path = root / "data.csv"
    write_csv(raw, csv_path)
    gt_path = root / "gt.tsv"
    write_ground_truth(groups, gt_path)
    return root, csv_path, gt_path


@pytest.fixture(scope="module")
def mined(workdir, capsys_factory=None):
    root, csv_path, _ = workdir
    cat = root / "data.cat"
    code = run_command(
        ["mine", "--input", str(csv_path), "--bins", "10", "--support", "10", "--out", str(cat)]
    )
    assert code == 0
    return root, csv_path, cat, cat.with_suffix(".cat.bin")


def run_json(capsys, argv):
    code = run_command(argv)
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1]) if out else None


class TestMine:
    def test_happy_path_writes_catalog_and_binned(self, mined, capsys):
        root, csv_path, cat, binned_path = mined
        assert cat.exists() and binned_path.exists()
        data = load_binned(binned_path)
        assert data.n_rows == 600 and data.n_attrs == 4

    def test_missing_input_fails_with_diagnostic(self, tmp_path, capsys):
        code = run_command(
            ["mine", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "x.cat")]
        )
        assert code == 1
        assert "not found" in capsys.readouterr().err

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_command(["mine", "--bogus-flag", "x"])
        assert exc.value.code == 2

    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_command(["frobnicate"])
        assert exc.value.code == 2


class TestCalibrateAndSwap:
    def test_calibrate_writes_scales(self, mined, capsys):
        root, _, cat, binned_path = mined
        scales = root / "scales.txt"
        code, out = run_json(
            capsys,
            ["calibrate", "--input", str(binned_path), "--catalog", str(cat),
             "--sample-size", "60", "--seed", "4", "--out", str(scales)],
        )
        assert code == 0 and scales.exists()
        assert len(out["means"]) == 3

    def test_swap_prints_summary(self, mined, capsys):
        root, _, cat, binned_path = mined
        code, out = run_json(
            capsys,
            ["swap", "--input", str(binned_path), "--catalog", str(cat), "--k", "5"],
        )
        assert code == 0
        assert len(out["summary"]) == 5
        assert all(card["uniformity"] >= 2.0 for card in out["itemsets"])


class TestPipelineEquivalence:
    def test_t1_equals_swap(self, mined, capsys):
        root, _, cat, binned_path = mined
        base = ["--input", str(binned_path), "--catalog", str(cat), "--k", "6"]
        code1, swap_out = run_json(capsys, ["swap"] + base)
        code2, pipe_out = run_json(capsys, ["pipeline"] + base + ["--t", "1"])
        assert code1 == 0 and code2 == 0
        assert pipe_out["summary"] == swap_out["summary"]
        assert pipe_out["steps"] == 0

    def test_pipeline_writes_log(self, mined, capsys):
        root, _, cat, binned_path = mined
        log = root / "run.jsonl"
        code, out = run_json(
            capsys,
            ["pipeline", "--input", str(binned_path), "--catalog", str(cat),
             "--t", "5", "--k", "5", "--preset", "HU", "--out", str(log)],
        )
        assert code == 0 and log.exists()
        records = [json.loads(line) for line in log.read_text().splitlines()]
        assert records[0]["type"] == "header"
        assert len(records) == 1 + out["steps"] + 1

    def test_config_file_supplies_defaults_flags_win(self, mined, capsys, tmp_path):
        root, _, cat, binned_path = mined
        cfg = tmp_path / "run.conf"
        cfg.write_text("k = 3\nt = 4\nweights.preset = HD\n")
        code, out = run_json(
            capsys,
            ["pipeline", "--config", str(cfg), "--input", str(binned_path),
             "--catalog", str(cat), "--t", "2"],
        )
        assert code == 0
        assert len(out["summary"]) <= 3  # k from config
        assert out["steps"] == 1  # t from flag wins over config


class TestTrainAndEvaluate:
    def test_train_small_and_pipeline_with_checkpoint(self, mined, capsys):
        root, _, cat, binned_path = mined
        ckpt = root / "policy.ckpt"
        rewards = root / "rewards.csv"
        code, out = run_json(
            capsys,
            ["train", "--input", str(binned_path), "--catalog", str(cat),
             "--k", "5", "--episodes", "3", "--steps", "4", "--workers", "1",
             "--update-interval", "4", "--preset", "HU", "--out", str(ckpt),
             "--reward-log", str(rewards), "--seed", "1"],
        )
        assert code == 0 and ckpt.exists()
        assert rewards.read_text().startswith("episode,worker,reward")
        code, out = run_json(
            capsys,
            ["pipeline", "--input", str(binned_path), "--catalog", str(cat),
             "--strategy", "rlsum", "--checkpoint", str(ckpt), "--k", "5", "--t", "4"],
        )
        assert code == 0 and out["steps"] == 3

    def test_evaluate_writes_csv(self, mined, workdir, capsys):
        root, _, gt_path = workdir
        _, _, cat, binned_path = mined
        out_csv = root / "bench.csv"
        code, out = run_json(
            capsys,
            ["evaluate", "--input", str(binned_path), "--catalog", str(cat),
             "--k", "5", "--t", "6", "--variant", "top1sum:HU", "--variant", "random",
             "--ground-truth", str(gt_path), "--seeds", "0,1", "--out", str(out_csv)],
        )
        assert code == 0
        header = out_csv.read_text().splitlines()[0]
        assert header == (
            "variant,seed,step,operator,uni_raw,div_raw,nov_raw,uni_scaled,div_scaled,"
            "nov_scaled,utility,cum_utility,cum_relevance,wall_ms"
        )
        assert out["rows"] == 2 * 2 * 6
