import json

import pytest

from jointerg.harness import cli
from jointerg.harness.config import ConfigError, dump_config, load_config, parse_config
from jointerg.harness.runner import (EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL, EXIT_OK,
                                     bundled_configs, csv_to_rows, expected_configs, known_tags,
                                     run_config, select, verdicts_from_rows)

JOINT = """\
name = "tiny-joint"
kind = "joint-ergodicity"
tags = ["test"]
seed = "0"

[system]
ring = "Z"
phi = [["0.41421356237309504880168872420969807857"]]

[folner]
family = "centered_box"

[params]
polys = {polys}
observables = ["0.5*e(1) + 0.5*e(-1)", "0.5*e(1) + 0.5*e(-1)"]
schedule = ["50", "400"]
assert_independent = true

[checks]
final_below = "{below}"
strictly_decreasing = true
"""


def joint(polys='["n", "n^2"]', below="0.1"):
    return JOINT.format(polys=polys, below=below)


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_config_round_trip():
    cfg = parse_config(joint())
    again = parse_config(dump_config(cfg))
    assert again == cfg
    for cfg in bundled_configs():
        assert parse_config(dump_config(cfg)) == cfg


def test_bundled_manifest_complete():
    cfgs = bundled_configs()
    assert [c.path for c in cfgs] == expected_configs()
    assert len(cfgs) == 10
    assert "acceptance" in known_tags()


@pytest.mark.parametrize("text,fragment", [
    (joint().replace('final_below = "0.1"', "final_below = 0.1"), "quoted decimal"),
    (joint().replace('kind = "joint-ergodicity"', 'kind = "nope"'), "unknown kind"),
    ("extra = 1\n" + joint(), "unknown key"),
    ("name = \n", "TOML syntax"),
    (joint().replace("[folner]\n", '[folner]\nwidth = "3"\n'), r"unknown \[folner\] key 'width'"),
])
def test_config_errors_carry_line(text, fragment):
    with pytest.raises(ConfigError, match=fragment) as info:
        cfg = parse_config(text, "x.toml")
        cfg.real("checks", "final_below")
    assert "x.toml:" in str(info.value)


def test_misspelled_check_rejected():
    cfg = parse_config(joint().replace("strictly_decreasing", "strictly_decreasng"), "x.toml")
    with pytest.raises(ConfigError, match="strictly_decreasng") as info:
        run_config(cfg)
    assert "x.toml:" in str(info.value)


def test_dependent_polys_rejected_with_witness():
    cfg = parse_config(joint(polys='["n", "2n"]'))
    with pytest.raises(ConfigError, match=r"witness \[2, -1\]"):
        run_config(cfg)


def test_verdicts_recomputed_from_csv(tmp_path):
    cfg = parse_config(joint())
    rec = run_config(cfg, tmp_path)
    rows = csv_to_rows((tmp_path / "tiny-joint.csv").read_text())
    assert verdicts_from_rows(cfg, rows) == rec.verdicts
    assert rec.passed
    # tampering with the CSV flips the verdict
    rows[-1]["l2_distance"] = "0.5"
    assert not verdicts_from_rows(cfg, rows)["final_below"]


def test_summary_json(tmp_path):
    rec = run_config(parse_config(joint()), tmp_path, threads=2, seed=9)
    summary = json.loads((tmp_path / "tiny-joint.summary.json").read_text())
    assert summary["schema_version"] == 1
    assert summary["seed"] == 9 and summary["threads"] == 2
    assert summary["verdicts"] == rec.verdicts
    assert "wall_time_s" in summary
    assert "wall" not in (tmp_path / "tiny-joint.csv").read_text()


def test_csv_identical_across_threads(tmp_path):
    texts = set()
    for t in (1, 4, 8):
        run_config(parse_config(joint()), tmp_path / str(t), threads=t)
        texts.add((tmp_path / str(t) / "tiny-joint.csv").read_bytes())
    assert len(texts) == 1


def test_unknown_tag_lists_known():
    with pytest.raises(ConfigError, match="known tags: .*acceptance"):
        select("no-such-tag")


def test_cli_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert cli.main(["run", write(tmp_path, joint()), "--out-dir", out]) == EXIT_OK
    assert cli.main(["run", write(tmp_path, joint(below="0.000001")), "--out-dir", out]) == EXIT_FAIL
    assert cli.main(["run", write(tmp_path, joint(polys='["n", "3n"]')), "--out-dir", out]) == \
        EXIT_CONFIG
    assert cli.main(["run", str(tmp_path / "missing.toml"), "--out-dir", out]) == EXIT_CONFIG
    assert cli.main(["suite", "--tag", "bogus", "--out-dir", out]) == EXIT_CONFIG
    assert cli.main(["run", write(tmp_path, joint()), "--threads", "0"]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "witness" in err and "known tags" in err


def test_cli_budget_exit(tmp_path):
    text = joint().replace('family = "centered_box"', 'family = "centered_box"\nmax_size = "100"')
    assert cli.main(["run", write(tmp_path, text), "--out-dir", str(tmp_path)]) == EXIT_BUDGET


def test_cli_pet_trace(tmp_path, capsys):
    code = cli.main(["pet-trace", "n^2, n", "--ring", "Z", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "k = 4" in out and "weight (3)" in out
    trace = json.loads((tmp_path / "pet-trace.trace.json").read_text())
    assert trace["schema_version"] == 1
    assert cli.main(["pet-trace", "n^2, n^", "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert cli.main(["pet-trace", "n, n^2", "--mode", "specialized", "--max-size", "100",
                     "--out-dir", str(tmp_path)]) == EXIT_BUDGET


@pytest.mark.parametrize("name", ["pet_goldens.toml", "counterexample_a2.toml",
                                  "mean_ergodic_q.toml"])
def test_fast_bundled_configs_pass(name, tmp_path):
    cfg = next(c for c in bundled_configs() if c.path == name)
    assert run_config(cfg, tmp_path).passed


def test_load_config_reports_path(tmp_path):
    p = write(tmp_path, joint().replace('ring = "Z"', 'ring = "R"'))
    cfg = load_config(p)
    with pytest.raises(ConfigError, match="unknown ring") as info:
        cfg.rotation()
    assert str(info.value).startswith(p + ":")
