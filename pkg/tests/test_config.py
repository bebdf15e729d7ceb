"""Config parsing and validation for the flat key=value format."""

import pytest

from swarmtask.config import ConfigError, ExperimentConfig, parse_config, parse_config_text


def test_defaults():
    cfg = ExperimentConfig(algo="rw")
    assert (cfg.m, cfg.n) == (50, 50)
    assert cfg.follower_count == 50
    assert cfg.lambda_inv == 50000.0
    assert (cfg.demand_mean, cfg.demand_var) == (6.0, 3.0)
    assert (cfg.t_d, cfg.i) == (5, 2)
    assert (cfg.i_p, cfg.t_p, cfg.d_p) == (2, 3, 25.0)
    assert cfg.p_prop is None and cfg.t_rw is None
    assert cfg.levy_alpha == 1.5
    assert (cfg.rounds, cfg.trials, cfg.master_seed) == (2000, 50, 12345)


def test_minimal_config_text():
    cfg = parse_config_text("algo = prop\n")
    assert cfg.algo == "prop"
    assert cfg.m == 50   # everything else stays at defaults


def test_comments_blanks_and_overrides():
    text = """
    # grid size
    algo = dl
    m = 20
    n=30
    p_prop = 0.4   # fraction routed to record-following

    rounds = 100
    """
    cfg = parse_config_text(text)
    assert (cfg.m, cfg.n, cfg.rounds) == (20, 30, 100)
    assert cfg.algo == "dl" and cfg.p_prop == 0.4


def test_algo_case_folded():
    assert parse_config_text("algo = PROP\n").algo == "prop"


def test_missing_algo_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("m = 10\nn = 10\n")
    assert "algo" in str(err.value)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = rw\nwidth = 10\n")
    assert "width" in str(err.value)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = rw\nm = 10\nm = 12\n")
    assert "m" in str(err.value)


def test_malformed_line_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("algo = rw\njust some words\n")


def test_p_prop_required_for_dl_only():
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = dl\n")
    assert "p_prop" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = rw\np_prop = 0.5\n")
    assert "p_prop" in str(err.value)
    assert parse_config_text("algo = dl\np_prop = 1.0\n").p_prop == 1.0


def test_t_rw_required_for_hybrid_only():
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = hybrid\n")
    assert "t_rw" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = prop\nt_rw = 50\n")
    assert "t_rw" in str(err.value)
    assert parse_config_text("algo = hybrid\nt_rw = 0\n").t_rw == 0


def test_unknown_algo_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = greedy\n")
    assert "algo" in str(err.value)


@pytest.mark.parametrize("line,field", [
    ("m = 0", "m"),
    ("lambda_inv = -1", "lambda_inv"),
    ("demand_var = 0", "demand_var"),
    ("t_d = 0", "t_d"),
    ("trials = 0", "trials"),
    ("rounds = 0", "rounds"),
    ("levy_alpha = 0", "levy_alpha"),
])
def test_out_of_range_values_name_the_field(line, field):
    with pytest.raises(ConfigError) as err:
        parse_config_text(f"algo = rw\n{line}\n")
    assert field in str(err.value)


def test_p_prop_range_checked():
    with pytest.raises(ConfigError):
        parse_config_text("algo = dl\np_prop = 1.5\n")


def test_integer_fields_reject_fractions():
    with pytest.raises(ConfigError) as err:
        parse_config_text("algo = rw\nm = 2.5\n")
    assert "m" in str(err.value)


def test_non_numeric_value_rejected():
    with pytest.raises(ConfigError):
        parse_config_text("algo = rw\nlambda_inv = fast\n")
    with pytest.raises(ConfigError):
        parse_config_text("algo = rw\nlambda_inv = nan\n")


def test_replaced_copies_without_mutating():
    cfg = ExperimentConfig(algo="rw")
    other = cfg.replaced(algo="dl", p_prop=0.6).validate()
    assert other.algo == "dl" and other.p_prop == 0.6
    assert cfg.algo == "rw"   # original untouched
    with pytest.raises(ConfigError):
        cfg.replaced(algo="dl").validate()   # still needs p_prop


def test_parse_config_reads_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("algo = hybrid\nt_rw = 25\nrounds = 10\n")
    cfg = parse_config(str(path))
    assert cfg.algo == "hybrid" and cfg.t_rw == 25 and cfg.rounds == 10
