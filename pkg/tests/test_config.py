import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kppfront.config import ConfigError, RunConfig, parse_config, serialize_config

MINIMAL_SIMULATE = """
command = simulate
c = 0.5
mu = 1.0
h0 = 2.0
family = sine
sigma = 0.4
"""


def test_minimal_simulate_defaults():
    cfg = parse_config(MINIMAL_SIMULATE)
    assert cfg.N == 400
    assert cfg.H_floor is None  # resolved to max(10 h0/N, 1e-4 h0) by the solver
    assert cfg.T_max == 50.0
    assert cfg.backend == "auto"


def test_round_trip_identity():
    cfg = parse_config(MINIMAL_SIMULATE)
    assert parse_config(serialize_config(cfg)) == cfg


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="frobnicate"):
        parse_config(MINIMAL_SIMULATE + "frobnicate = 3\n")


def test_negative_mu_named():
    bad = MINIMAL_SIMULATE.replace("mu = 1.0", "mu = -2.0")
    with pytest.raises(ConfigError, match="'mu'"):
        parse_config(bad)


def test_missing_required_key():
    with pytest.raises(ConfigError, match="'sigma_lo'"):
        parse_config("command = threshold\nc = 0.2\nmu = 1.0\nh0 = 2.0\nsigma_hi = 1.0\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(MINIMAL_SIMULATE + "c = 0.7\n")


def test_unknown_command_rejected():
    with pytest.raises(ConfigError, match="command"):
        parse_config("command = explode\n")


def test_malformed_line_reports_lineno():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("command = simulate\nthis is not a pair\n")


def test_comments_and_blanks_ignored():
    cfg = parse_config("# header\n\ncommand = semiwave  # trailing\nmu = 2.0\n")
    assert cfg.command == "semiwave"
    assert cfg.mu == 2.0


def test_list_values():
    cfg = parse_config(MINIMAL_SIMULATE + "snapshot_times = 1.0, 2.5, 4\n")
    assert cfg.snapshot_times == (1.0, 2.5, 4.0)


@settings(max_examples=60, deadline=None)
@given(
    c=st.floats(min_value=1e-3, max_value=1.9),
    mu=st.floats(min_value=1e-3, max_value=100.0),
    h0=st.floats(min_value=1e-2, max_value=50.0),
    sigma=st.floats(min_value=1e-9, max_value=1e3),
    N=st.integers(min_value=16, max_value=4096),
    snaps=st.lists(st.floats(min_value=0.1, max_value=40.0), max_size=5),
)
def test_round_trip_property(c, mu, h0, sigma, N, snaps):
    cfg = RunConfig(
        command="simulate",
        c=c,
        mu=mu,
        h0=h0,
        family="sine",
        sigma=sigma,
        N=N,
        snapshot_times=tuple(snaps),
    )
    assert parse_config(serialize_config(cfg)) == cfg
