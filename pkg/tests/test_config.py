import pytest

from bangbang.cli import run_trace
from bangbang.config import (
    PRESETS,
    RELTOL_ENV,
    RunConfig,
    apply_environment,
    load_config,
    load_preset,
    parse_config,
    preset_text,
)
from bangbang.errors import ConfigError


@pytest.mark.parametrize("name,initial,pulses", [
    ("fig1", "bell", ()), ("fig2", "mixed", ()), ("fig3", "bell", (0.01,)), ("fig4", "mixed", (0.0135,)),
])
def test_presets_carry_reference_parameters(name, initial, pulses):
    cfg = load_preset(name)
    assert (cfg.scenario, cfg.initial, cfg.pulses) == (name, initial, pulses)
    assert (cfg.eta, cfg.omega_c, cfg.temperature) == (0.25, 100.0, 1.0)
    assert cfg.horizon == 0.25 and cfg.samples == 1001 and cfg.bracket_step == 1e-4


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        preset_text("fig9")


@pytest.mark.parametrize("name", PRESETS)
def test_round_trip_is_exact(name):
    cfg = load_preset(name)
    again = parse_config(cfg.to_text())
    assert again == cfg


def test_round_trip_preserves_output_bytes(tmp_path):
    cfg = RunConfig(initial="x", p00=0.4, p01=0.1, p10=0.2, p11=0.3, c_outer=0.1 + 0.2j, c_inner=-0.05j,
                    pulses=(0.003, 0.0071), horizon=0.01, samples=7, eta=0.1 / 3).validate()
    path = tmp_path / "run.cfg"
    path.write_text(cfg.to_text())
    assert run_trace(load_config(str(path))) == run_trace(cfg)


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\neta = 0.5   # stronger\nhorizon=0.1\n")
    assert cfg.eta == 0.5 and cfg.horizon == 0.1


@pytest.mark.parametrize("text,line,needle", [
    ("eta = 0.5\nbogus = 1\n", 2, "unknown key"),
    ("eta = 0.5\n\neta = 0.6\n", 3, "duplicate key"),
    ("horizon = soon\n", 1, "cannot parse"),
    ("eta\n", 1, "key = value"),
    ("initial = ghz\n", 1, "expected one of"),
    ("samples = 10\neta = -1\n", 2, "eta"),
    ("horizon = 0.01\npulses = 0.002, 0.02\n", 2, "pulses"),
    ("\n\nsamples = 1\n", 3, "samples"),
    ("eta = nan\n", 1, "cannot parse"),
])
def test_errors_name_the_line(text, line, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text, source="run.cfg")
    assert f"run.cfg:{line}:" in str(info.value)
    assert needle in str(info.value)


def test_environment_override():
    cfg = load_preset("fig1")
    assert apply_environment(cfg, {}) is cfg
    assert apply_environment(cfg, {RELTOL_ENV: "1e-8"}).rel_tol == 1e-8
    with pytest.raises(ConfigError):
        apply_environment(cfg, {RELTOL_ENV: "fast"})
    with pytest.raises(ConfigError):
        apply_environment(cfg, {RELTOL_ENV: "0"})


def test_uniform_schedule_from_config():
    cfg = parse_config("schedule = uniform\nuniform_n = 3\nuniform_t_start = 0.001\nuniform_dt = 0.002\nhorizon = 0.01\n")
    assert cfg.pulse_schedule().times == pytest.approx((0.003, 0.005, 0.007))
