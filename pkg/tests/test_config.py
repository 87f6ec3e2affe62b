"""Configuration parsing: grammar, exhaustive error reporting, round-trip."""

import os

import numpy as np
import pytest

from satrx.config import (ConfigError, DetectorToken, RunConfig, build_plan,
                          parse_config, serialize_config)

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

GOOD = """
[scenario]
satellite_angles_deg = 0, -5.9, -2.8, 3, 5.7
lnb_boresight_deg = -3, 0, 3
lnb_offset_wavelengths = -1.5, 0, 1.5

[simulation]
constellation = 8psk
detectors = jml@wiener-hopf, lgsd@wiener-hopf(2/3/2), lgsd@mrc(2/3/2)
list_len = 20
group_sizes = 3, 2
snr_start_db = 8
snr_stop_db = 17
snr_step_db = 3
seed = 1

[output]
results_csv = out.csv
"""


def _errors(text):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    return exc.value.errors


# ------------------------------------------------------------------- parsing


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.satellite_angles_deg == (0.0, -5.9, -2.8, 3.0, 5.7)
    assert cfg.constellation == "8psk"
    assert [t.token for t in cfg.detectors] == [
        "jml@wiener-hopf", "lgsd@wiener-hopf(2/3/2)", "lgsd@mrc(2/3/2)"]
    assert cfg.list_len == 20
    assert cfg.group_sizes == (3, 2)
    assert cfg.snr_points == (8.0, 11.0, 14.0, 17.0)
    assert cfg.seed == 1
    assert cfg.results_csv == "out.csv"
    # defaults fill unset keys
    assert cfg.dish_diameter_m == 0.35
    assert cfg.min_symbols == 10_000
    assert cfg.summary_txt == "summary.txt"


def test_parse_inline_comments_and_spacing():
    cfg = parse_config(GOOD.replace("snr_step_db = 3",
                                    "snr_step_db = 3   # coarse grid"))
    assert cfg.snr_step_db == 3.0


def test_shipped_configs_parse(tmp_path):
    for name in ("default_8psk.ini", "quick_qpsk.ini"):
        with open(os.path.join(CONFIG_DIR, name)) as fh:
            cfg = parse_config(fh.read())
        plan = build_plan(cfg)
        assert plan.scenario.num_satellites == 5
        assert len(plan.detectors) >= 2


def test_default_benchmark_values():
    with open(os.path.join(CONFIG_DIR, "default_8psk.ini")) as fh:
        cfg = parse_config(fh.read())
    assert cfg.constellation == "8psk"
    assert cfg.list_len == 20
    assert cfg.group_sizes == (3, 2)
    assert cfg.noise_correlation == ((1.0, 0.1, 0.05), (0.1, 1.0, 0.1),
                                     (0.05, 0.1, 1.0))
    assert "lgsd@mrc(2/3/2)" in [t.token for t in cfg.detectors]


# ----------------------------------------------------------- detector tokens


@pytest.mark.parametrize("token,algo,pre,iters", [
    ("jml@wiener-hopf", "jml", "wiener-hopf", None),
    ("jml@mrc", "jml", "mrc", None),
    ("lgsd@mrc(2/3/2)", "lgsd", "mrc", (2, 3, 2)),
    ("lgsd@wiener-hopf(1/1/1)", "lgsd", "wiener-hopf", (1, 1, 1)),
])
def test_token_grammar_accepts(token, algo, pre, iters):
    cfg = parse_config(GOOD.replace(
        "detectors = jml@wiener-hopf, lgsd@wiener-hopf(2/3/2), lgsd@mrc(2/3/2)",
        f"detectors = {token}"))
    tok = cfg.detectors[0]
    assert (tok.algorithm, tok.preprocessor, tok.iters) == (algo, pre, iters)
    assert tok.token == token


@pytest.mark.parametrize("bad", [
    "zf@mrc", "jml", "jml@", "lgsd@mrc", "lgsd@mrc(2/3)", "jml@mrc(1/1/1)",
    "lgsd@mrc(2/3/2/4)", "lgsd@mrc(0/1/1)", "lgsd @ mrc(2/3/2)x",
])
def test_token_grammar_rejects(bad):
    errs = _errors(GOOD.replace(
        "detectors = jml@wiener-hopf, lgsd@wiener-hopf(2/3/2), lgsd@mrc(2/3/2)",
        f"detectors = {bad}"))
    assert any("detector" in e for e in errs)


def test_detector_token_object_validation():
    with pytest.raises(ValueError, match="triple"):
        DetectorToken("jml", "mrc", (1, 1, 1))
    with pytest.raises(ValueError, match="triple"):
        DetectorToken("lgsd", "mrc", None)
    assert DetectorToken("lgsd", "mrc", [2, 3, 2]).iters == (2, 3, 2)


# ----------------------------------------------------------- error reporting


def test_syntax_error_has_line_number():
    errs = _errors(GOOD.replace("seed = 1", "seed"))
    assert any("line" in e and "seed" in e for e in errs)


def test_duplicate_key_reported():
    errs = _errors(GOOD + "\n[simulation]\n")
    assert any("duplicate section" in e for e in errs)
    errs = _errors(GOOD.replace("seed = 1", "seed = 1\nseed = 2"))
    assert any("duplicate key" in e for e in errs)


def test_unknown_section_and_key():
    errs = _errors(GOOD + "\n[plotting]\ncolor = red\n")
    assert any("unknown section [plotting]" in e for e in errs)
    errs = _errors(GOOD.replace("seed = 1", "seed = 1\nturbo = yes"))
    assert any("unknown key 'turbo'" in e for e in errs)


def test_missing_required_key():
    errs = _errors(GOOD.replace("constellation = 8psk\n", ""))
    assert any("missing key 'constellation'" in e for e in errs)


def test_missing_section():
    errs = _errors("[simulation]\nconstellation = qpsk\n")
    assert any("missing section [scenario]" in e for e in errs)


def test_group_sizes_sum_message():
    errs = _errors(GOOD.replace("group_sizes = 3, 2", "group_sizes = 3, 3"))
    assert any("group sizes must sum to N (got 3+3=6, N=5)" in e
               for e in errs)


def test_all_errors_collected_at_once():
    """One bad config must report every independent problem in one raise."""
    text = GOOD
    text = text.replace("lnb_boresight_deg = -3, 0, 3",
                        "lnb_boresight_deg = -3, zero, 3")
    text = text.replace("constellation = 8psk", "constellation = 1024qam")
    text = text.replace(
        "detectors = jml@wiener-hopf, lgsd@wiener-hopf(2/3/2), lgsd@mrc(2/3/2)",
        "detectors = warp@mrc")
    text = text.replace("snr_step_db = 3", "snr_step_db = -1")
    text = text.replace("seed = 1", "seed = -4\nunknown_thing = 1")
    errs = _errors(text)
    assert len(errs) >= 5
    joined = "\n".join(errs)
    for needle in ("lnb_boresight_deg", "constellation", "detector",
                   "snr_step_db", "seed", "unknown key"):
        assert needle in joined, (needle, errs)


def test_semantic_checks():
    assert any("stop must be >= start" in e for e in
               _errors(GOOD.replace("snr_stop_db = 17", "snr_stop_db = 2")))
    assert any("min_symbols" in e for e in
               _errors(GOOD.replace("seed = 1", "seed = 1\nmin_symbols = 10")))
    assert any("list_len" in e for e in
               _errors(GOOD.replace("list_len = 20", "list_len = 0")))
    assert any("duplicate entries" in e for e in _errors(GOOD.replace(
        "detectors = jml@wiener-hopf, lgsd@wiener-hopf(2/3/2), lgsd@mrc(2/3/2)",
        "detectors = jml@mrc, jml@mrc")))
    assert any("[scenario]" in e for e in _errors(GOOD.replace(
        "lnb_boresight_deg = -3, 0, 3",
        "lnb_boresight_deg = -3, 0, 3, 6\nnoise_correlation = 1 0; 0 1")))


# ----------------------------------------------------------------- round-trip


def test_serialize_parse_roundtrip():
    cfg = parse_config(GOOD)
    assert parse_config(serialize_config(cfg)) == cfg


def test_serialize_roundtrip_with_all_optionals():
    with open(os.path.join(CONFIG_DIR, "default_8psk.ini")) as fh:
        cfg = parse_config(fh.read())
    assert parse_config(serialize_config(cfg)) == cfg


def test_snr_points_endpoint_inclusive():
    cfg = parse_config(GOOD.replace("snr_stop_db = 17", "snr_stop_db = 17.0")
                       .replace("snr_step_db = 3", "snr_step_db = 4.5"))
    assert cfg.snr_points == (8.0, 12.5, 17.0)


# ----------------------------------------------------------------- build_plan


def test_build_plan_structure():
    plan = build_plan(parse_config(GOOD))
    assert plan.master_seed == 1
    assert plan.constellation == "8psk"
    assert plan.snr_points == (8.0, 11.0, 14.0, 17.0)
    labels = [d.label for d in plan.detectors]
    assert labels == ["JML", "Enhanced-LGSD(2/3/2)", "LGSD(2/3/2)/MRC"]
    lg = plan.detectors[1]
    assert lg.config.list_len == 20
    assert lg.config.group_sizes == (3, 2)
    np.testing.assert_array_equal(plan.scenario.satellite_angles,
                                  [0.0, -5.9, -2.8, 3.0, 5.7])


def test_build_plan_seed_precedence():
    cfg = parse_config(GOOD)
    assert build_plan(cfg).master_seed == 1
    assert build_plan(cfg, seed=9).master_seed == 9


def test_build_plan_requires_some_seed():
    cfg = parse_config(GOOD.replace("seed = 1\n", ""))
    assert cfg.seed is None
    with pytest.raises(ConfigError, match="--seed"):
        build_plan(cfg)


def test_build_plan_lgsd_defaults():
    text = GOOD.replace("list_len = 20\n", "").replace(
        "group_sizes = 3, 2\n", "")
    plan = build_plan(parse_config(text))
    lg = plan.detectors[1]
    assert lg.config.list_len == 20  # 4N with N=5
    assert lg.config.group_sizes == (5,)


def test_run_config_is_plain_data():
    cfg = parse_config(GOOD)
    assert isinstance(cfg, RunConfig)
    assert cfg == parse_config(GOOD)  # value semantics
    with pytest.raises(AttributeError):
        cfg.seed = 2
