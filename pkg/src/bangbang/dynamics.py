"""Two-qubit X-states and their exact evolution under collective dephasing.

Basis order is |00>, |01>, |10>, |11>. Evolution is always computed from
t = 0 with the full applied schedule: the bath keeps memory across pulse
segments, so states at intermediate times cannot be used as restart points.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bath import BathSpec, PulseSchedule, QuadratureSpec, decoherence_exponent
from .errors import DomainError

TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12


@dataclass(frozen=True)
class TwoQubitXState:
    """Density matrix nonzero only on the diagonal and anti-diagonal.

    ``c_outer`` is ``<00|rho|11>`` and ``c_inner`` is ``<01|rho|10>``.
    """

    p00: float
    p01: float
    p10: float
    p11: float
    c_outer: complex = 0j
    c_inner: complex = 0j

    def __post_init__(self):
        for name in ("p00", "p01", "p10", "p11"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "c_outer", complex(self.c_outer))
        object.__setattr__(self, "c_inner", complex(self.c_inner))
        pops = self.populations
        if min(pops) < -POSITIVITY_TOL:
            raise DomainError(f"negative population in {pops}")
        if abs(sum(pops) - 1.0) > TRACE_TOL:
            raise DomainError(f"trace is {sum(pops)!r}, expected 1")
        if abs(self.c_outer) > math.sqrt(max(self.p00 * self.p11, 0.0)) + POSITIVITY_TOL:
            raise DomainError("|c_outer| exceeds sqrt(p00 p11); state is not positive")
        if abs(self.c_inner) > math.sqrt(max(self.p01 * self.p10, 0.0)) + POSITIVITY_TOL:
            raise DomainError("|c_inner| exceeds sqrt(p01 p10); state is not positive")

    @property
    def populations(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    @property
    def trace(self) -> float:
        return sum(self.populations)

    def to_matrix(self) -> np.ndarray:
        rho = np.diag(np.array(self.populations, dtype=complex))
        rho[0, 3] = self.c_outer
        rho[3, 0] = self.c_outer.conjugate()
        rho[1, 2] = self.c_inner
        rho[2, 1] = self.c_inner.conjugate()
        return rho

    @classmethod
    def from_matrix(cls, rho, atol: float = 1e-10) -> "TwoQubitXState":
        """Read an X-state out of a 4x4 matrix; other elements must vanish within ``atol``."""
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError(f"expected a 4x4 matrix, got shape {rho.shape}")
        mask = np.ones((4, 4), dtype=bool)
        mask[np.arange(4), np.arange(4)] = False
        mask[np.arange(4), 3 - np.arange(4)] = False
        stray = np.abs(rho[mask]).max()
        if stray > atol:
            raise DomainError(f"matrix is not an X-state (off-X element {stray:.3e})")
        diag = rho.diagonal()
        if np.abs(diag.imag).max() > atol:
            raise DomainError("populations must be real")
        return cls(*diag.real, c_outer=rho[0, 3], c_inner=rho[1, 2])

    def flipped(self, t_pulse: float, omega0: float) -> "TwoQubitXState":
        """Action of one collective pulse ``exp(i w0 sz t_p) sx`` on both qubits."""
        return TwoQubitXState(
            self.p11,
            self.p10,
            self.p01,
            self.p00,
            c_outer=cmath.exp(4j * omega0 * t_pulse) * self.c_outer.conjugate(),
            c_inner=self.c_inner.conjugate(),
        )


def initial_state_bell() -> TwoQubitXState:
    """``(|00> + |11>)/sqrt(2)``."""
    return TwoQubitXState(0.5, 0.0, 0.0, 0.5, c_outer=0.5)


def initial_state_mixed() -> TwoQubitXState:
    """Bell component of weight 0.6 mixed with |01>, |10> at 0.2 each; dies in finite time."""
    return TwoQubitXState(0.3, 0.2, 0.2, 0.3, c_outer=0.3)


@dataclass(frozen=True)
class EvolutionScenario:
    """Initial state, bath and pulse schedule on ``[0, horizon]``.

    ``bath`` is a :class:`BathSpec` (continuum, quadrature) or any object with
    an ``exponent(t, schedule)`` method such as ``oracle.DiscreteBath``.
    """

    initial: TwoQubitXState
    bath: BathSpec
    schedule: PulseSchedule = PulseSchedule()
    horizon: float = 1.0
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    omega0: float = 1.0

    def __post_init__(self):
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")
        self.schedule.check_horizon(self.horizon)

    def with_schedule(self, schedule: PulseSchedule) -> "EvolutionScenario":
        return replace(self, schedule=schedule)


def exponent(scenario: EvolutionScenario, t: float) -> float:
    """Gamma(t) for the pulses of ``scenario`` applied before ``t``."""
    applied = scenario.schedule.applied(t)
    if isinstance(scenario.bath, BathSpec):
        return decoherence_exponent(scenario.bath, t, applied, scenario.quad)
    return scenario.bath.exponent(t, applied)


def dephase(state: TwoQubitXState, gamma: float, applied: PulseSchedule, omega0: float = 1.0):
    """Apply a decay factor ``exp(-gamma)`` to the outer coherence, then the pulses.

    The toggling-frame bath factor is real and positive, so it commutes with
    the pulse algebra; the pulses only permute populations and conjugate and
    rephase the coherences.
    """
    out = replace(state, c_outer=state.c_outer * math.exp(-gamma))
    for tp in applied.times:
        out = out.flipped(tp, omega0)
    return out


def evolve_with_exponent(scenario: EvolutionScenario, t: float) -> tuple[TwoQubitXState, float]:
    """Reduced state at ``t`` together with the Gamma(t) that produced it."""
    if not 0 <= t <= scenario.horizon:
        raise DomainError(f"t={t!r} outside [0, {scenario.horizon!r}]")
    if t == 0:
        return scenario.initial, 0.0
    applied = scenario.schedule.applied(t)
    gamma = exponent(scenario, t)
    return dephase(scenario.initial, gamma, applied, scenario.omega0), gamma


def evolve(scenario: EvolutionScenario, t: float) -> TwoQubitXState:
    """Exact reduced state at time ``t``; pulses at or after ``t`` are ignored."""
    return evolve_with_exponent(scenario, t)[0]
