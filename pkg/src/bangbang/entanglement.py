"""Concurrence, sudden-death detection and revival intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dynamics import EvolutionScenario, TwoQubitXState, evolve
from .errors import DomainError

TIME_TOL = 1e-8
# concurrence at or below this is treated as dead (tangencies are quadrature noise)
DEATH_TOL = 1e-12

_SPIN_FLIP = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))  # sigma_y (x) sigma_y


def concurrence_x(state: TwoQubitXState) -> float:
    """Closed-form concurrence of an X-state.

    ``2 max(0, |c_inner| - sqrt(p00 p11), |c_outer| - sqrt(p01 p10))``
    """
    outer = math.sqrt(state.p00 * state.p11)
    inner = math.sqrt(state.p01 * state.p10)
    if abs(state.c_outer) > outer + 1e-12 or abs(state.c_inner) > inner + 1e-12:
        raise DomainError("X-state violates positivity")
    return 2.0 * max(0.0, abs(state.c_inner) - outer, abs(state.c_outer) - inner)


def concurrence_wootters(rho, tol: float = 1e-10) -> float:
    """Concurrence of an arbitrary two-qubit density matrix.

    Writes ``rho = W W^dagger`` from its eigendecomposition and takes the
    singular values of ``W^T (sy x sy) W``. These are the square roots of the
    eigenvalues of ``rho rho~`` but do not lose accuracy near zero.

    Raises
    ------
    DomainError
        If ``rho`` is not Hermitian, unit-trace and positive within ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError(f"trace is {np.trace(rho).real!r}, expected 1")
    evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if evals.min() < -tol:
        raise DomainError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    keep = evals > 1e-14
    w = evecs[:, keep] * np.sqrt(evals[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(w.T @ _SPIN_FLIP @ w, compute_uv=False)
    lam[: sv.size] = sv
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class ConcurrenceTrace:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise DomainError("times and values differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("times must be strictly increasing")
        if np.any((self.values < 0) | (self.values > 1)):
            raise DomainError("concurrence outside [0, 1]")


@dataclass(frozen=True)
class EsdReport:
    """First death time and the revival intervals that follow it.

    ``open_ended`` is set when the last interval is cut off by the horizon,
    i.e. its end is the horizon rather than a second death.
    """

    esd_time: Optional[float]
    revival_intervals: tuple[tuple[float, float], ...] = ()
    open_ended: bool = False

    def __post_init__(self):
        prev = -math.inf if self.esd_time is None else self.esd_time
        if self.revival_intervals and self.esd_time is None:
            raise DomainError("revivals reported without a death")
        for start, end in self.revival_intervals:
            if not prev <= start < end:
                raise DomainError("revival intervals must be ordered, disjoint and after death")
            prev = end


def concurrence_trace(scenario: EvolutionScenario, times) -> ConcurrenceTrace:
    times = np.asarray(times, dtype=float)
    values = np.array([concurrence_x(evolve(scenario, t)) for t in times])
    return ConcurrenceTrace(times, values)


def bisect_predicate(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Locate the switch of a boolean ``pred`` inside ``[lo, hi]`` to within ``tol/2``.

    ``pred(lo) != pred(hi)`` is assumed and not re-evaluated.
    """
    state_lo = pred(lo)
    while hi - lo > 0.5 * tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == state_lo:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def esd_time(
    scenario: EvolutionScenario,
    bracket_step: float,
    *,
    time_tol: float = TIME_TOL,
    death_tol: float = DEATH_TOL,
) -> EsdReport:
    """Scan C(t) on a uniform bracket grid and bisect every alive/dead switch.

    A state that is already separable at t = 0 is reported with
    ``esd_time = 0``.
    """
    if not bracket_step > 0:
        raise DomainError("bracket_step must be positive")
    horizon = scenario.horizon

    def alive(t):
        return concurrence_x(evolve(scenario, t)) > death_tol

    n = max(1, math.ceil(horizon / bracket_step - 1e-9))
    grid = np.minimum(np.arange(n + 1) * bracket_step, horizon)
    grid[-1] = horizon
    flags = [alive(t) for t in grid]

    switches = []
    for k in range(1, grid.size):
        if flags[k] != flags[k - 1]:
            root = bisect_predicate(alive, grid[k - 1], grid[k], time_tol)
            switches.append((root, flags[k]))

    if not flags[0]:
        death = 0.0
    elif switches:
        death = switches.pop(0)[0]
    else:
        return EsdReport(None)

    intervals = []
    start = None
    for when, now_alive in switches:
        if now_alive:
            start = when
        else:
            intervals.append((start, when))
            start = None
    open_ended = start is not None
    if open_ended:
        intervals.append((start, horizon))
    return EsdReport(death, tuple(intervals), open_ended)


def revival_peak(scenario: EvolutionScenario, report: EsdReport, samples: int = 65):
    """Largest sampled concurrence inside the revival intervals, or ``None``."""
    best = None
    for start, end in report.revival_intervals:
        for t in np.linspace(start, end, samples):
            c = concurrence_x(evolve(scenario, float(t)))
            best = c if best is None else max(best, c)
    return best
