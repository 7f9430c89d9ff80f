"""Ohmic bath, pulse schedules, filter function and the decoherence exponent.

Units: hbar = k_B = 1 and, by convention, the bath temperature sets the
scale (``temperature = 1``), so times are in units of 1/T and frequencies
in units of T.

The collective coupling ``sigma_z^(1) + sigma_z^(2)`` has eigenvalue +2 on
|00>, -2 on |11> and 0 on |01>, |10>. Each instantaneous pulse flips both
spins and therefore the sign of that coupling, so the outer coherence
<00|rho|11> is multiplied by ``exp(-Gamma(t))`` with

    Gamma(t) = 8 * int_0^inf dw I(w) coth(w / 2T) F(w, t)

where ``F`` is the toggling-frame filter function of the schedule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .quadrature import QuadResult, adaptive_gauss

# below this value of w / 2T the thermal factor uses its Laurent series
SMALL_ARGUMENT = 5e-7

_CHUNK = 1 << 20


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath ``I(w) = (eta/4) w exp(-w/omega_c)`` at ``temperature``."""

    eta: float
    omega_c: float
    temperature: float = 1.0

    def __post_init__(self):
        for name in ("eta", "omega_c", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature


@dataclass(frozen=True)
class PulseSchedule:
    """Instants of instantaneous collective spin flips.

    ``times`` must be strictly increasing and positive. An empty schedule
    is free evolution.
    """

    times: tuple[float, ...] = ()

    def __post_init__(self):
        times = tuple(float(x) for x in self.times)
        object.__setattr__(self, "times", times)
        for x in times:
            if not (math.isfinite(x) and x > 0):
                raise DomainError(f"pulse times must be positive and finite, got {x!r}")
        for a, b in zip(times, times[1:]):
            if not b > a:
                raise DomainError(f"pulse times must be strictly increasing ({a!r} >= {b!r})")

    @classmethod
    def uniform(cls, n: int, t_start: float, dt: float) -> "PulseSchedule":
        """``n`` pulses at ``t_start + k*dt`` for ``k = 1..n``."""
        if n < 0:
            raise DomainError("pulse count must be nonnegative")
        if n and not dt > 0:
            raise DomainError("pulse spacing must be positive")
        return cls(tuple(t_start + k * dt for k in range(1, n + 1)))

    @classmethod
    def filling(cls, n: int, horizon: float) -> "PulseSchedule":
        """``n`` equally spaced pulses cutting ``(0, horizon)`` into ``n+1`` equal segments."""
        if not horizon > 0:
            raise DomainError("horizon must be positive")
        return cls.uniform(n, 0.0, horizon / (n + 1))

    def __len__(self) -> int:
        return len(self.times)

    def applied(self, t: float) -> "PulseSchedule":
        """Sub-schedule of pulses strictly before ``t``."""
        return PulseSchedule(tuple(x for x in self.times if x < t))

    def check_horizon(self, t: float) -> None:
        if self.times and not self.times[-1] < t:
            raise DomainError(
                f"pulse at {self.times[-1]!r} is not before evaluation time {t!r}"
            )

    def toggling_integral(self, t: float) -> float:
        """Net signed time ``sum_j (-1)^j (t_{j+1} - t_j)``, i.e. ``sqrt(F(0, t))``."""
        edges = np.concatenate(([0.0], self.times, [t]))
        return float(np.dot((-1.0) ** np.arange(edges.size - 1), np.diff(edges)))


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_refinements: int = 10_000
    omega_max_factor: float = 50.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be at least 1")
        if not self.omega_max_factor >= 10:
            raise DomainError("omega_max_factor must be at least 10")


def _as_output(values, like):
    return float(values) if np.ndim(like) == 0 else values


def _check_frequency(omega):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0) or np.any(np.isnan(omega)):
        raise DomainError("frequency must be nonnegative")
    return omega


def spectral_density(bath: BathSpec, omega):
    """Ohmic spectral density with exponential cutoff, ``(eta/4) w e^{-w/omega_c}``."""
    w = _check_frequency(omega)
    return _as_output(0.25 * bath.eta * w * np.exp(-w / bath.omega_c), omega)


def thermal_factor(omega, temperature: float):
    """``coth(w / 2T)``; ``2T/w + w/6T`` for tiny arguments, ``inf`` at ``w = 0``."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    w = _check_frequency(omega)
    x = w / (2.0 * temperature)
    small = x < SMALL_ARGUMENT
    with np.errstate(divide="ignore"):
        out = np.where(
            small,
            1.0 / x + x / 3.0,
            1.0 / np.tanh(np.where(small, 1.0, x)),
        )
    return _as_output(out, omega)


def omega_coth(omega, temperature: float):
    """``w * coth(w / 2T)``, finite (``-> 2T``) as ``w -> 0``."""
    w = _check_frequency(omega)
    x = w / (2.0 * temperature)
    small = x < SMALL_ARGUMENT
    safe = np.where(small, 1.0, x)
    out = np.where(small, 2.0 * temperature * (1.0 + x * x / 3.0), w / np.tanh(safe))
    return _as_output(out, omega)


def _segments(t, schedule):
    edges = np.concatenate(([0.0], schedule.times, [t]))
    duration = np.diff(edges)
    middle = 0.5 * (edges[1:] + edges[:-1])
    sign = (-1.0) ** np.arange(duration.size)
    return duration, middle, sign


def filter_function(t: float, schedule: PulseSchedule, omega):
    """Toggling-frame filter ``|sum_j (-1)^j (e^{iw t_{j+1}} - e^{iw t_j})|^2 / w^2``.

    Each segment is written as ``d e^{iw m} sinc(w d / 2)`` (duration ``d``,
    midpoint ``m``), which is exact at ``w = 0`` and avoids cancellation at
    small ``w``.

    Parameters
    ----------
    t : float
        Evaluation time; every pulse must lie strictly before it.
    schedule : PulseSchedule
    omega : float or array_like
        Nonnegative frequencies.

    Returns
    -------
    float or ndarray
        ``F(w, t)`` with the shape of ``omega``; units of time squared.
    """
    if not t >= 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    schedule.check_horizon(t)
    w = _check_frequency(omega)
    duration, middle, sign = _segments(t, schedule)
    weight = sign * duration
    flat = w.ravel()
    out = np.empty(flat.shape)
    step = max(1, _CHUNK // duration.size)
    for start in range(0, flat.size, step):
        wk = flat[start:start + step, None]
        terms = weight * np.exp(1j * wk * middle) * np.sinc(wk * duration / (2 * np.pi))
        s = terms.sum(axis=1)
        out[start:start + step] = s.real ** 2 + s.imag ** 2
    return _as_output(out.reshape(w.shape), omega)


def tail_bound(bath: BathSpec, t: float, schedule: PulseSchedule, omega_max: float) -> float:
    """Upper bound on the part of Gamma from frequencies above ``omega_max``.

    Uses ``F <= min(t^2, 4 (N+1)^2 / w^2)`` and ``coth`` decreasing.
    """
    wc = bath.omega_c
    coth = thermal_factor(omega_max, bath.temperature)
    decay = math.exp(-omega_max / wc)
    by_time = 2 * bath.eta * coth * t * t * wc * (omega_max + wc) * decay
    by_count = 8 * bath.eta * (len(schedule) + 1) ** 2 * coth * (wc / omega_max) * decay
    return min(by_time, by_count)


def decoherence_integral(
    bath: BathSpec,
    t: float,
    schedule: PulseSchedule = PulseSchedule(),
    quad: QuadratureSpec = QuadratureSpec(),
) -> QuadResult:
    """Gamma(t) together with its error estimate (quadrature plus tail bound).

    The integral is done in ``u = w / omega_c`` over ``[0, omega_max_factor]``
    with ``eta`` factored out, so Gamma is exactly linear in ``eta``.
    """
    if not t >= 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    schedule.check_horizon(t)
    if t == 0:
        return QuadResult(0.0, 0.0, 0)
    wc, temp = bath.omega_c, bath.temperature
    u_max = quad.omega_max_factor

    def per_eta(u):
        w = wc * u
        return 2.0 * wc * np.exp(-u) * omega_coth(w, temp) * filter_function(t, schedule, w)

    # panels no wider than half an oscillation of cos(w t)
    panels = min(100_000, max(16, math.ceil(u_max * wc * t / math.pi)))
    abs_tol = quad.abs_tol / bath.eta
    res = adaptive_gauss(
        per_eta,
        0.0,
        u_max,
        initial_panels=panels,
        rel_tol=quad.rel_tol,
        abs_tol=abs_tol,
        max_subdivisions=quad.max_refinements,
    )
    tail = tail_bound(bath, t, schedule, u_max * wc) / bath.eta
    err = res.error + tail
    if err > max(abs_tol, quad.rel_tol * abs(res.value)):
        raise ConvergenceError(
            f"tail beyond {u_max:g} omega_c exceeds tolerance", bath.eta * err
        )
    return QuadResult(bath.eta * res.value, bath.eta * err, res.panels)


def decoherence_exponent(
    bath: BathSpec,
    t: float,
    schedule: PulseSchedule = PulseSchedule(),
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Decoherence exponent Gamma(t) >= 0 of the outer coherence.

    Raises
    ------
    ConvergenceError
        If the tolerance cannot be met within ``quad.max_refinements``.
    """
    return max(0.0, decoherence_integral(bath, t, schedule, quad).value)
