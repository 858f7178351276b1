import json

import numpy as np
import pytest

from frot import build_grouped_measure, save_measure_csv, save_measure_json
from frot.cli import main
from frot.experiments import read_plan_csv
from frot.solvers import SolverFailure

pytestmark = pytest.mark.filterwarnings(
    "ignore:Sinkhorn stopped at t_max:RuntimeWarning"
)


@pytest.fixture()
def measure_files(tmp_path):
    rng = np.random.default_rng(0)
    src = build_grouped_measure(rng.normal(size=(6, 4)), [2, 2])
    dst = build_grouped_measure(rng.normal(loc=1.0, size=(6, 4)), [2, 2])
    src_path = tmp_path / "src.csv"
    dst_path = tmp_path / "dst.json"
    save_measure_csv(src, src_path)
    save_measure_json(dst, dst_path)
    return src_path, dst_path


def test_sinkhorn_subcommand(measure_files, tmp_path, capsys):
    src, dst = measure_files
    out = tmp_path / "out"
    code = main(["sinkhorn", "--source", str(src), "--target", str(dst),
                 "--epsilon", "0.5", "--out", str(out)])
    assert code == 0
    assert "sinkhorn" in capsys.readouterr().out
    plan = read_plan_csv(out / "plan.csv")
    assert abs(plan.sum() - 1.0) <= 1e-9
    doc = json.loads((out / "result.json").read_text())
    assert doc["schema_version"] == "1"
    assert doc["converged"]


def test_emd_subcommand(measure_files, tmp_path):
    src, dst = measure_files
    out = tmp_path / "out"
    assert main(["emd", "--source", str(src), "--target", str(dst),
                 "--out", str(out)]) == 0
    doc = json.loads((out / "result.json").read_text())
    assert doc["objective"] > 0


def test_frot_subcommand_fw_and_lp(measure_files, tmp_path):
    src, dst = measure_files
    out_fw = tmp_path / "fw"
    assert main(["frot", "--source", str(src), "--target", str(dst),
                 "--eta", "1.0", "--iters", "5", "--out", str(out_fw)]) == 0
    fw_doc = json.loads((out_fw / "result.json").read_text())
    assert len(fw_doc["alpha"]) == 2
    out_lp = tmp_path / "lp"
    assert main(["frot", "--source", str(src), "--target", str(dst),
                 "--solver", "lp", "--out", str(out_lp)]) == 0
    lp_doc = json.loads((out_lp / "result.json").read_text())
    assert fw_doc["max_group_cost"] >= lp_doc["objective"] - 1e-9


def test_frwd_subcommand(measure_files, tmp_path, capsys):
    src, dst = measure_files
    out = tmp_path / "out"
    assert main(["frwd", "--source", str(src), "--target", str(dst),
                 "--p", "2", "--out", str(out)]) == 0
    doc = json.loads((out / "result.json").read_text())
    assert doc["value"] > 0
    assert doc["order"] == 2.0


def test_synth_and_reingest(tmp_path):
    out = tmp_path / "synth"
    assert main(["synth", "--n", "6", "--m", "7", "--seed", "3",
                 "--out", str(out)]) == 0
    assert (out / "source.csv").exists()
    assert main(["emd", "--source", str(out / "source.csv"),
                 "--target", str(out / "target.csv"),
                 "--out", str(tmp_path / "emd")]) == 0


def test_select_features_subcommand(tmp_path, capsys):
    out = tmp_path / "fs"
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"n_per_class": 16, "n_features": 6,
                                  "trials": 2, "top_k": 2}))
    assert main(["select-features", "--seed", "1", "--out", str(out),
                 "--config", str(config)]) == 0
    doc = json.loads((out / "rankings.json").read_text())
    assert len(doc["trials"]) == 2
    assert "select-features" in capsys.readouterr().out


def test_experiment_subcommand_with_config_override(tmp_path):
    out = tmp_path / "exp"
    config = tmp_path / "cfg.json"
    # config overrides the flag value for n and m
    config.write_text(json.dumps({"n": 6, "m": 6, "sinkhorn_t_max": 200}))
    assert main(["experiment", "--scenario", "noise_robustness",
                 "--n", "50", "--seed", "2", "--out", str(out),
                 "--config", str(config)]) == 0
    plan = read_plan_csv(out / "robust_plan.csv")
    assert plan.shape == (6, 6)


def test_validation_exit_code(tmp_path, capsys):
    code = main(["emd", "--source", str(tmp_path / "missing.csv"),
                 "--target", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_bad_measure_file_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope,columns\n1,2\n")
    code = main(["emd", "--source", str(bad), "--target", str(bad),
                 "--out", str(tmp_path / "out")])
    assert code == 2


def test_solver_failure_exit_code(measure_files, tmp_path, monkeypatch, capsys):
    src, dst = measure_files

    def boom(*args, **kwargs):
        raise SolverFailure("synthetic breakdown")

    monkeypatch.setattr("frot.cli.emd_exact_solve", boom)
    code = main(["emd", "--source", str(src), "--target", str(dst),
                 "--out", str(tmp_path / "out")])
    assert code == 1
    assert "solver failure" in capsys.readouterr().err


def test_argparse_validation_is_exit_code_2():
    with pytest.raises(SystemExit) as exc:
        main(["frot", "--solver", "bogus"])
    assert exc.value.code == 2
