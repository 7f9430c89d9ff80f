"""Flat ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment, blank lines are ignored.
Every error message carries ``source:line``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from typing import Optional

from .bath import BathSpec, PulseSchedule, QuadratureSpec
from .dynamics import EvolutionScenario, TwoQubitXState, initial_state_bell, initial_state_mixed
from .errors import BangBangError, ConfigError

PRESETS = ("fig1", "fig2", "fig3", "fig4")
RELTOL_ENV = "BANGBANG_QUAD_RELTOL"

_FLOAT_KEYS = {
    "eta", "omega_c", "temperature", "omega0", "horizon", "bracket_step",
    "uniform_t_start", "uniform_dt", "rel_tol", "abs_tol", "omega_max_factor",
    "p00", "p01", "p10", "p11",
}
_INT_KEYS = {"samples", "uniform_n", "max_refinements"}
_COMPLEX_KEYS = {"c_outer", "c_inner"}
_CHOICES = {"initial": ("bell", "mixed", "x"), "schedule": ("explicit", "uniform")}


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "custom"
    initial: str = "bell"
    p00: float = 0.5
    p01: float = 0.0
    p10: float = 0.0
    p11: float = 0.5
    c_outer: complex = 0.5 + 0j
    c_inner: complex = 0j
    eta: float = 0.25
    omega_c: float = 100.0
    temperature: float = 1.0
    omega0: float = 1.0
    schedule: str = "explicit"
    pulses: tuple[float, ...] = ()
    uniform_n: int = 0
    uniform_t_start: float = 0.0
    uniform_dt: float = 0.0
    horizon: float = 0.25
    samples: int = 1001
    bracket_step: float = 1e-4
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_refinements: int = 10_000
    omega_max_factor: float = 50.0
    output: Optional[str] = None
    # key -> (source, line) for error reporting; not serialized
    origin: dict = field(default_factory=dict, compare=False, repr=False)

    # derived objects --------------------------------------------------------
    def initial_state(self) -> TwoQubitXState:
        if self.initial == "bell":
            return initial_state_bell()
        if self.initial == "mixed":
            return initial_state_mixed()
        return TwoQubitXState(
            self.p00, self.p01, self.p10, self.p11, c_outer=self.c_outer, c_inner=self.c_inner
        )

    def bath(self) -> BathSpec:
        return BathSpec(self.eta, self.omega_c, self.temperature)

    def pulse_schedule(self) -> PulseSchedule:
        if self.schedule == "uniform":
            return PulseSchedule.uniform(self.uniform_n, self.uniform_t_start, self.uniform_dt)
        return PulseSchedule(self.pulses)

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(
            self.rel_tol, self.abs_tol, self.max_refinements, self.omega_max_factor
        )

    def evolution_scenario(self) -> EvolutionScenario:
        return EvolutionScenario(
            self.initial_state(),
            self.bath(),
            self.pulse_schedule(),
            self.horizon,
            self.quadrature(),
            self.omega0,
        )

    def validate(self) -> "RunConfig":
        """Build every derived object once, re-raising failures as :class:`ConfigError`."""
        checks = [
            (("initial", "p00", "p01", "p10", "p11", "c_outer", "c_inner"), self.initial_state),
            (("eta", "omega_c", "temperature"), self.bath),
            (("pulses", "uniform_n", "uniform_dt", "uniform_t_start"), self.pulse_schedule),
            (("rel_tol", "abs_tol", "max_refinements", "omega_max_factor"), self.quadrature),
            (("pulses", "uniform_n", "horizon"), self.evolution_scenario),
        ]
        for keys, build in checks:
            try:
                build()
            except BangBangError as exc:
                raise ConfigError(f"{self._where(keys)}{exc}") from None
        if self.samples < 2:
            raise ConfigError(f"{self._where(('samples',))}samples must be at least 2")
        if not self.bracket_step > 0:
            raise ConfigError(f"{self._where(('bracket_step',))}bracket_step must be positive")
        return self

    def _where(self, keys) -> str:
        for key in keys:
            if key in self.origin:
                source, line = self.origin[key]
                return f"{source}:{line}: {key}: "
        return ""

    def to_text(self) -> str:
        """Serialize; ``parse_config(cfg.to_text())`` reproduces ``cfg`` exactly."""
        lines = []
        for f in fields(self):
            if f.name == "origin":
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format_value(value)}")
        return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(key, raw, where):
    try:
        if key in _FLOAT_KEYS:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if key in _INT_KEYS:
            return int(raw)
        if key in _COMPLEX_KEYS:
            return complex(raw.replace(" ", ""))
        if key == "pulses":
            return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"{where}: {key}: cannot parse {raw!r}") from None
    if key in _CHOICES:
        if raw not in _CHOICES[key]:
            raise ConfigError(f"{where}: {key}: expected one of {', '.join(_CHOICES[key])}")
        return raw
    return raw


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    known = {f.name for f in fields(RunConfig)} - {"origin"}
    values = {}
    origin = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"{source}:{lineno}"
        if "=" not in body:
            raise ConfigError(f"{where}: expected 'key = value'")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in known:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        values[key] = _convert(key, raw, where)
        origin[key] = (source, lineno)
    return RunConfig(**values, origin=origin).validate()


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=path)


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("bangbang").joinpath("presets").joinpath(f"{name}.cfg").read_text("utf-8")


def load_preset(name: str) -> RunConfig:
    return parse_config(preset_text(name), source=f"preset:{name}")


def apply_environment(cfg: RunConfig, environ=None) -> RunConfig:
    """Honour ``BANGBANG_QUAD_RELTOL`` if set."""
    environ = os.environ if environ is None else environ
    raw = environ.get(RELTOL_ENV)
    if raw is None:
        return cfg
    try:
        rel_tol = float(raw)
    except ValueError:
        raise ConfigError(f"${RELTOL_ENV}: cannot parse {raw!r}") from None
    if not rel_tol > 0:
        raise ConfigError(f"${RELTOL_ENV}: must be positive")
    return replace(cfg, rel_tol=rel_tol)
