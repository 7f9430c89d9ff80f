"""Command line front end: traces, sudden-death reports, sweeps, oracle checks.

All tabular output is CSV (UTF-8, LF, header row). Floats are written with
17 significant digits in lowercase scientific notation.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from .bath import BathSpec, PulseSchedule, decoherence_exponent
from .config import PRESETS, RunConfig, apply_environment, load_config, load_preset
from .dynamics import (
    EvolutionScenario,
    evolve,
    evolve_with_exponent,
    initial_state_bell,
    initial_state_mixed,
)
from .entanglement import concurrence_x, esd_time, revival_peak
from .errors import ConfigError, ConvergenceError, DomainError, ResourceError
from .oracle import (
    DiscreteBath,
    FockTruncation,
    discrete_bath_exponent,
    discretize,
    fock_displacement_trace,
    joint_evolution_oracle,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_RESOURCE = 4
EXIT_IO = 5

SWEEP_AXES = ("eta", "omega_c", "t_p", "N", "delta_t")

TRACE_COLUMNS = (
    "t", "concurrence", "gamma", "abs_c_outer", "abs_c_inner", "p00", "p01", "p10", "p11",
)


def fmt(x) -> str:
    if x is None:
        return "none"
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x):.16e}"


def _csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")
    return out.getvalue()


def sample_times(cfg: RunConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.horizon, cfg.samples)


def trace_rows(cfg: RunConfig):
    scenario = cfg.evolution_scenario()
    for t in sample_times(cfg):
        state, gamma = evolve_with_exponent(scenario, float(t))
        yield (
            float(t),
            concurrence_x(state),
            gamma,
            abs(state.c_outer),
            abs(state.c_inner),
            *state.populations,
        )


def run_trace(cfg: RunConfig) -> str:
    """CSV of the reduced state and concurrence on ``samples`` points of ``[0, horizon]``."""
    return _csv(TRACE_COLUMNS, trace_rows(cfg))


def run_esd(cfg: RunConfig) -> tuple[str, str]:
    """Return ``(csv, summary)`` for the sudden-death analysis of ``cfg``."""
    report = esd_time(cfg.evolution_scenario(), cfg.bracket_step)
    rows = [("esd", report.esd_time, "", "false")]
    for k, (start, end) in enumerate(report.revival_intervals):
        last = k == len(report.revival_intervals) - 1
        rows.append(("revival", start, end, "true" if last and report.open_ended else "false"))
    text = _csv(("event", "start", "end", "open_ended"), rows)
    if report.esd_time is None:
        summary = f"{cfg.scenario}: esd_time=none"
    else:
        spans = "; ".join(f"[{a:.6g}, {b:.6g}]" for a, b in report.revival_intervals) or "none"
        summary = f"{cfg.scenario}: esd_time={report.esd_time:.10g} revivals={spans}"
    return text, summary


def sweep_config(cfg: RunConfig, axis: str, value) -> RunConfig:
    """``cfg`` with one parameter replaced; see README for axis semantics."""
    if axis == "eta":
        return replace(cfg, eta=float(value))
    if axis == "omega_c":
        return replace(cfg, omega_c=float(value))
    if axis == "t_p":
        return replace(cfg, schedule="explicit", pulses=(float(value),))
    if axis == "N":
        n = int(value)
        dt = (cfg.horizon - cfg.uniform_t_start) / (n + 1)
        return replace(cfg, schedule="uniform", uniform_n=n, uniform_dt=dt)
    if axis == "delta_t":
        dt = float(value)
        n = max(0, math.ceil((cfg.horizon - cfg.uniform_t_start) / dt) - 1)
        return replace(cfg, schedule="uniform", uniform_n=n, uniform_dt=dt)
    raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")


def sweep_row(cfg: RunConfig, axis: str, value):
    row_cfg = sweep_config(cfg, axis, value).validate()
    scenario = row_cfg.evolution_scenario()
    state, gamma = evolve_with_exponent(scenario, row_cfg.horizon)
    report = esd_time(scenario, row_cfg.bracket_step)
    peak = revival_peak(scenario, report)
    shown = int(value) if axis == "N" else float(value)
    return (
        shown,
        len(row_cfg.pulse_schedule()),
        gamma,
        concurrence_x(state),
        report.esd_time,
        len(report.revival_intervals),
        peak,
    )


def run_sweep(cfg: RunConfig, axis: str, values) -> str:
    """One row per value: Gamma and C at the horizon, death time, revivals."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")
    header = (axis, "n_pulses", "gamma_horizon", "final_concurrence", "esd_time",
              "revival_count", "peak_revival_concurrence")
    return _csv(header, (sweep_row(cfg, axis, v) for v in values))


@dataclass(frozen=True)
class OracleCheck:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def run_oracle_suite() -> list[OracleCheck]:
    """Cross-check the closed-form paths against the brute-force oracles."""
    checks = []
    bath = BathSpec(0.25, 100.0, 1.0)
    db = discretize(bath, 200_000)
    for t, pulses in [(0.005, ()), (0.01, ()), (0.02, (0.01,)), (0.03, (0.01, 0.02))]:
        sched = PulseSchedule(pulses)
        exact = decoherence_exponent(bath, t, sched)
        approx = discrete_bath_exponent(db, t, sched)
        checks.append(OracleCheck(f"modes t={t:g} N={len(pulses)}", abs(approx / exact - 1), 1e-4))
    for x in (0.25, 1.0, 4.0):
        for b in (0.5, 2.0):
            trunc = FockTruncation.for_thermal(x, 1.0)
            value = fock_displacement_trace(x, 1.0, b, trunc)
            closed = math.exp(-0.5 * b * b / math.tanh(x / 2))
            checks.append(OracleCheck(f"fock w/T={x:g} |beta|={b:g}", abs(value - closed), 1e-8))
    single = DiscreteBath([2.0], [0.09], 1.0)
    for pulses in ((), (0.7,), (0.5, 1.0)):
        for init in (initial_state_bell(), initial_state_mixed()):
            sched = PulseSchedule(pulses)
            joint = joint_evolution_oracle(single, FockTruncation(150), init, sched, 1.5)
            closed = evolve(EvolutionScenario(init, single, sched, 1.5), 1.5)
            dev = float(np.abs(joint.to_matrix() - closed.to_matrix()).max())
            checks.append(OracleCheck(f"joint N={len(pulses)} c0={init.c_outer.real:g}", dev, 1e-6))
    return checks


def oracle_csv(checks) -> str:
    rows = [(c.name, c.deviation, c.tolerance, "pass" if c.passed else "FAIL") for c in checks]
    return _csv(("check", "deviation", "tolerance", "status"), rows)


def _parse_values(raw: str, axis: str):
    try:
        if axis == "N":
            return [int(v) for v in raw.split(",") if v.strip()]
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values: cannot parse {raw!r} for axis {axis}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bangbang",
        description="Two-qubit entanglement under collective dephasing and bang-bang pulses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--config", help="path to a key = value run configuration")
            src.add_argument("--preset", choices=PRESETS, help="use a shipped reference preset")
        p.add_argument("--out", help="output CSV path (default: config 'output' or stdout)")
        p.add_argument("--samples", type=int, help="override the number of trace samples")
        p.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")

    common(sub.add_parser("trace", help="concurrence and state trace"))
    common(sub.add_parser("esd", help="sudden-death time and revival intervals"))
    sweep = sub.add_parser("sweep", help="one summary row per parameter value")
    common(sweep)
    sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep.add_argument("--values", required=True, help="comma-separated values")
    common(sub.add_parser("oracle", help="brute-force cross-checks"), needs_config=False)
    preset = sub.add_parser("preset", help="trace for a shipped reference preset")
    preset.add_argument("name", choices=PRESETS)
    common(preset, needs_config=False)
    return parser


def _resolve_config(args) -> RunConfig:
    if getattr(args, "name", None):
        cfg = load_preset(args.name)
    elif args.preset:
        cfg = load_preset(args.preset)
    else:
        cfg = load_config(args.config)
    if args.samples is not None:
        cfg = replace(cfg, samples=args.samples)
    return apply_environment(cfg).validate()


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _note(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            checks = run_oracle_suite()
            _emit(oracle_csv(checks), args.out)
            failed = [c.name for c in checks if not c.passed]
            _note(args, f"oracle: {len(checks) - len(failed)}/{len(checks)} checks passed")
            return EXIT_CHECK_FAILED if failed else EXIT_OK
        cfg = _resolve_config(args)
        out = args.out or cfg.output
        if args.command in ("trace", "preset"):
            _emit(run_trace(cfg), out)
            _note(args, f"{cfg.scenario}: wrote {cfg.samples} samples")
        elif args.command == "esd":
            text, summary = run_esd(cfg)
            _emit(text, out)
            _note(args, summary)
        elif args.command == "sweep":
            values = _parse_values(args.values, args.axis)
            _emit(run_sweep(cfg, args.axis, values), out)
            _note(args, f"{cfg.scenario}: swept {args.axis} over {len(values)} values")
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except BrokenPipeError:
        return EXIT_OK
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
