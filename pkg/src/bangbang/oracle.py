"""Brute-force validators for the closed-form dynamics.

Three independent routes:

* :func:`discrete_bath_exponent` replaces the frequency integral by a sum
  over explicit modes;
* :func:`fock_displacement_trace` evaluates a thermal expectation of the
  displacement operator in a truncated Fock basis;
* :func:`joint_evolution_oracle` propagates the full qubits-plus-modes
  density matrix through the exact segment propagators and pulse unitaries,
  then traces the modes out.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, PulseSchedule, filter_function, spectral_density, thermal_factor
from .dynamics import TwoQubitXState
from .errors import DomainError, ResourceError, TruncationError

THERMAL_TAIL_TOL = 1e-12
# eigenvalue of sigma_z^(1) + sigma_z^(2) on |00>, |01>, |10>, |11>
COLLECTIVE_Z = np.array([2.0, 0.0, 0.0, -2.0])


@dataclass(frozen=True, eq=False)
class DiscreteBath:
    """Finite set of modes with ``sum_k g_k^2 f(w_k) ~ int I(w) f(w) dw``."""

    mode_frequencies: np.ndarray
    couplings_sq: np.ndarray
    temperature: float = 1.0

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.mode_frequencies, dtype=float))
        g2 = np.atleast_1d(np.asarray(self.couplings_sq, dtype=float))
        if w.shape != g2.shape or w.ndim != 1:
            raise DomainError("mode_frequencies and couplings_sq must be 1-D of equal length")
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise DomainError("mode frequencies must be positive and strictly increasing")
        if np.any(g2 < 0):
            raise DomainError("squared couplings must be nonnegative")
        if not self.temperature >= 0:
            raise DomainError("temperature must be nonnegative")
        object.__setattr__(self, "mode_frequencies", w)
        object.__setattr__(self, "couplings_sq", g2)

    def __len__(self):
        return self.mode_frequencies.size

    def exponent(self, t: float, schedule: PulseSchedule) -> float:
        return discrete_bath_exponent(self, t, schedule)


def discretize(bath: BathSpec, n_modes: int, omega_max_factor: float = 20.0) -> DiscreteBath:
    """Midpoint grid on ``[0, omega_max_factor * omega_c]`` with ``g_k^2 = I(w_k) dw``."""
    dw = omega_max_factor * bath.omega_c / n_modes
    w = (np.arange(n_modes) + 0.5) * dw
    return DiscreteBath(w, spectral_density(bath, w) * dw, bath.temperature)


def _coth_or_one(omega, temperature):
    if temperature == 0:
        return np.ones_like(np.asarray(omega, dtype=float))
    return thermal_factor(omega, temperature)


def discrete_bath_exponent(
    db: DiscreteBath, t: float, schedule: PulseSchedule = PulseSchedule(), temperature=None
) -> float:
    """``sum_k 8 g_k^2 coth(w_k / 2T) F(w_k, t)``."""
    if len(db) == 0 or t == 0:
        return 0.0
    temp = db.temperature if temperature is None else temperature
    w = db.mode_frequencies
    f = filter_function(t, schedule, w)
    return float(np.sum(8.0 * db.couplings_sq * _coth_or_one(w, temp) * f))


@dataclass(frozen=True)
class FockTruncation:
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be at least 1")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @classmethod
    def for_thermal(cls, omega: float, temperature: float, tail: float = THERMAL_TAIL_TOL):
        """Smallest truncation meeting the thermal tail bound (at least ``n_max = 1``)."""
        if temperature == 0:
            return cls(1)
        x = omega / temperature
        return cls(max(1, math.floor(-math.log(tail) / x)))

    def thermal_tail(self, omega: float, temperature: float) -> float:
        """Thermal weight above ``n_max``: ``exp(-(n_max + 1) w / T)``."""
        if temperature == 0:
            return 0.0
        return math.exp(-(self.n_max + 1) * omega / temperature)

    def check(self, omega: float, temperature: float) -> None:
        tail = self.thermal_tail(omega, temperature)
        if not tail < THERMAL_TAIL_TOL:
            raise TruncationError(
                f"n_max={self.n_max} leaves thermal weight {tail:.3e} above the cut "
                f"(w={omega!r}, T={temperature!r})"
            )


def thermal_populations(omega: float, temperature: float, trunc: FockTruncation) -> np.ndarray:
    """Bose-Einstein occupation probabilities, renormalized on the kept levels."""
    p = np.zeros(trunc.dim)
    if temperature == 0:
        p[0] = 1.0
        return p
    x = omega / temperature
    p = np.exp(-x * np.arange(trunc.dim))
    return p / p.sum()


def displacement_matrix(beta: complex, n_max: int) -> np.ndarray:
    """Exact elements ``<m|D(beta)|n>`` for ``m, n <= n_max``.

    Along the ``a``-th subdiagonal ``<k+a|D|k> = f_k e^{i a arg beta}`` with
    ``f_k = sqrt(k!/(k+a)!) |beta|^a e^{-|beta|^2/2} L_k^{(a)}(|beta|^2)``;
    ``f_k`` obeys a forward three-term recurrence that stays bounded, so
    hundreds of levels are safe even for ``|beta|`` of a few. The upper
    triangle follows from ``<k|D|k+a> = (-1)^a conj(<k+a|D|k>)``.
    """
    beta = complex(beta)
    dim = n_max + 1
    if beta == 0:
        return np.eye(dim, dtype=complex)
    x = abs(beta) ** 2
    alpha = np.arange(dim, dtype=float)
    # f_0 = |beta|^a e^{-x/2} / sqrt(a!)
    f_cur = np.exp(0.5 * alpha * math.log(x) - 0.5 * x - 0.5 * np.array([math.lgamma(a + 1) for a in alpha]))
    f_prev = np.zeros(dim)
    f = np.zeros((dim, dim))  # f[a, k]
    f[:, 0] = f_cur
    for k in range(n_max):
        f_next = ((2 * k + 1 + alpha - x) * f_cur - np.sqrt(k * (k + alpha)) * f_prev) / np.sqrt(
            (k + 1) * (k + 1 + alpha)
        )
        f_prev, f_cur = f_cur, f_next
        f[:, k + 1] = f_cur
    phase = np.exp(1j * alpha * cmath.phase(beta))
    d = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        k = np.arange(dim - a)
        d[k + a, k] = f[a, : dim - a] * phase[a]
        if a:
            d[k, k + a] = (-1) ** a * np.conj(d[k + a, k])
    return d


def fock_displacement_trace(
    omega: float, temperature: float, beta_amplitude: complex, trunc: FockTruncation
) -> complex:
    """``Tr[rho_thermal D(beta)]`` summed over the truncated Fock basis.

    Raises
    ------
    TruncationError
        If the thermal weight above ``n_max`` exceeds ``1e-12``.
    """
    trunc.check(omega, temperature)
    p = thermal_populations(omega, temperature, trunc)
    diag = displacement_matrix(beta_amplitude, trunc.n_max).diagonal()
    return complex(np.dot(p, diag))


def pulse_operator(t_pulse: float, omega0: float = 1.0) -> np.ndarray:
    """Two-qubit pulse ``exp(i w0 sz t_p) sx`` applied to each qubit."""
    single = np.diag([np.exp(1j * omega0 * t_pulse), np.exp(-1j * omega0 * t_pulse)]) @ np.array(
        [[0, 1], [1, 0]], dtype=complex
    )
    return np.kron(single, single)


def _bath_dim(db: DiscreteBath, trunc: FockTruncation) -> int:
    return trunc.dim ** len(db)


def segment_unitary(db: DiscreteBath, trunc: FockTruncation, start: float, end: float) -> np.ndarray:
    """Exact interaction-picture propagator of the joint system over ``[start, end]``.

    Block diagonal in the qubit basis: the block for collective eigenvalue
    ``s`` is ``exp(i s^2 phi) prod_k D(s beta_k)`` with
    ``beta_k = g_k (e^{i w start} - e^{i w end}) / w`` and the second-order
    Magnus phase ``phi = sum_k g_k^2 (w d - sin w d) / w^2``.
    """
    w = db.mode_frequencies
    g = np.sqrt(db.couplings_sq)
    d = end - start
    beta = g * (np.exp(1j * w * start) - np.exp(1j * w * end)) / w
    phi = float(np.sum(db.couplings_sq * (w * d - np.sin(w * d)) / w**2))
    nb = _bath_dim(db, trunc)
    u = np.zeros((4 * nb, 4 * nb), dtype=complex)
    for q, s in enumerate(COLLECTIVE_Z):
        block = np.ones((1, 1), dtype=complex)
        for bk in beta:
            block = np.kron(block, displacement_matrix(s * bk, trunc.n_max))
        u[q * nb:(q + 1) * nb, q * nb:(q + 1) * nb] = np.exp(1j * s * s * phi) * block
    return u


def _check_budget(db, trunc, max_dim):
    if len(db) > 3:
        raise ResourceError(f"joint oracle supports at most 3 modes, got {len(db)}")
    dim = 4 * _bath_dim(db, trunc)
    if dim > max_dim:
        raise ResourceError(f"joint dimension {dim} exceeds budget {max_dim}")
    for w in db.mode_frequencies:
        trunc.check(float(w), db.temperature)


def pulse_pair_operator(
    db: DiscreteBath, trunc: FockTruncation, t_n: float, dt: float, omega0: float = 1.0
) -> np.ndarray:
    """``U_p(t_n + dt) U(dt) U_p(t_n) U(dt)``: free step, pulse, free step, pulse."""
    nb = _bath_dim(db, trunc)
    eye = np.eye(nb)
    first = segment_unitary(db, trunc, t_n - dt, t_n)
    second = segment_unitary(db, trunc, t_n, t_n + dt)
    p1 = np.kron(pulse_operator(t_n, omega0), eye)
    p2 = np.kron(pulse_operator(t_n + dt, omega0), eye)
    return p2 @ second @ p1 @ first


def joint_density_matrix(
    db: DiscreteBath,
    trunc: FockTruncation,
    initial: TwoQubitXState,
    schedule: PulseSchedule,
    t: float,
    omega0: float = 1.0,
    max_dim: int = 2500,
) -> np.ndarray:
    """Joint qubits-plus-modes state at ``t`` (qubit index major)."""
    _check_budget(db, trunc, max_dim)
    if not t >= 0:
        raise DomainError("time must be nonnegative")
    rho_bath = np.ones((1, 1))
    for w in db.mode_frequencies:
        rho_bath = np.kron(rho_bath, np.diag(thermal_populations(float(w), db.temperature, trunc)))
    rho = np.kron(initial.to_matrix(), rho_bath)
    if len(db) == 0:
        return rho
    eye = np.eye(rho_bath.shape[0])
    applied = schedule.applied(t).times
    edges = (0.0, *applied, t)
    for j in range(len(edges) - 1):
        u = segment_unitary(db, trunc, edges[j], edges[j + 1])
        if j < len(applied):
            u = np.kron(pulse_operator(applied[j], omega0), eye) @ u
        rho = u @ rho @ u.conj().T
    return rho


def partial_trace_bath(rho: np.ndarray) -> np.ndarray:
    nb = rho.shape[0] // 4
    return np.trace(rho.reshape(4, nb, 4, nb), axis1=1, axis2=3)


def joint_evolution_oracle(
    db: DiscreteBath,
    trunc: FockTruncation,
    initial: TwoQubitXState,
    schedule: PulseSchedule,
    t: float,
    omega0: float = 1.0,
    max_dim: int = 2500,
) -> TwoQubitXState:
    """Reduced two-qubit state from exact joint evolution (at most 3 modes).

    Raises
    ------
    ResourceError
        If the joint dimension exceeds ``max_dim`` or the Fock cut is too low.
    """
    rho = joint_density_matrix(db, trunc, initial, schedule, t, omega0, max_dim)
    return TwoQubitXState.from_matrix(partial_trace_bath(rho))
