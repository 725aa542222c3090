"""Rate-equation kinetics of an ensemble of excited two-atom pairs.

State variables (absolute counts out of n_0 pairs):

    n_e      pairs still holding their excitation (no photon yet)
    n_a      pairs whose remaining excited atom emits in channel A
    n_b      likewise for channel B
    cap_n_a  photons emitted so far in channel A
    cap_n_b  photons emitted so far in channel B
    cap_n_f  first photons emitted so far (any channel)

The coupled linear system

    dn_e/dt = -g_f n_e
    dn_i/dt = c_j n_e - g_i n_i
    dN_i/dt = c_i n_e + g_i n_i
    dN_f/dt = g_f n_e

is integrated with a fixed-step classical Runge-Kutta scheme.  With the
compatible channel rates (c_i equal to the single-atom rate g_i and
g_f = g_a + g_b) the per-channel counts reproduce the isolated-atom law
N_i(t) = n_0 (1 - exp(-g_i t)) exactly.

``first_emission_scale`` multiplies every first-emission rate (c_a, c_b
and hence g_f) by a common factor while leaving the relaxation of the
intermediate states untouched.  The two conservation identities

    2 n_e + n_a + n_b + cap_n_a + cap_n_b = 2 n_0
    cap_n_f + n_e = n_0

hold for any scale, but the per-channel counts deviate from the
single-atom law unless the scale is 1: the combined first-emission rate
is not adjustable independently of the channel rates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import RatePair
from .errors import IntegrationBlowupError, InvalidParameterError

STATE_FIELDS = ("n_e", "n_a", "n_b", "cap_n_a", "cap_n_b", "cap_n_f")


@dataclass(frozen=True)
class KineticsState:
    """Populations and cumulative counts at one instant."""

    t: float
    n_e: float
    n_a: float
    n_b: float
    cap_n_a: float
    cap_n_b: float
    cap_n_f: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.n_e, self.n_a, self.n_b,
                         self.cap_n_a, self.cap_n_b, self.cap_n_f])


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration plan; t_end is rounded to whole steps."""

    step: float
    t_end: float
    n_0: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.step) or self.step <= 0.0:
            raise InvalidParameterError(f"step must be positive and finite, got {self.step!r}")
        if not np.isfinite(self.t_end) or self.t_end <= 0.0:
            raise InvalidParameterError(f"t_end must be positive and finite, got {self.t_end!r}")
        if not np.isfinite(self.n_0) or self.n_0 <= 0.0:
            raise InvalidParameterError(f"n_0 must be positive and finite, got {self.n_0!r}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.step)))


def initial_state(n_0: float = 1.0) -> KineticsState:
    """All pairs excited, nothing emitted."""
    return KineticsState(t=0.0, n_e=float(n_0), n_a=0.0, n_b=0.0,
                         cap_n_a=0.0, cap_n_b=0.0, cap_n_f=0.0)


def _rhs(y: np.ndarray, rates: RatePair, scale: float) -> np.ndarray:
    g_a, g_b = rates.gamma_a, rates.gamma_b
    c_a, c_b = scale * g_a, scale * g_b
    g_f = c_a + c_b
    n_e, n_a, n_b = y[0], y[1], y[2]
    return np.array([
        -g_f * n_e,
        c_b * n_e - g_a * n_a,
        c_a * n_e - g_b * n_b,
        c_a * n_e + g_a * n_a,
        c_b * n_e + g_b * n_b,
        g_f * n_e,
    ])


def derivative(state: KineticsState, rates: RatePair,
               first_emission_scale: float = 1.0) -> tuple[float, ...]:
    """Instantaneous time derivatives of the six state fields."""
    _check_scale(first_emission_scale)
    dy = _rhs(state.as_vector(), rates, first_emission_scale)
    return tuple(float(v) for v in dy)


def integrate(initial: KineticsState, rates: RatePair, config: IntegratorConfig,
              first_emission_scale: float = 1.0) -> list[KineticsState]:
    """Integrate with classical fourth-order Runge-Kutta at fixed step.

    Returns the trajectory including the initial state; raises
    IntegrationBlowupError as soon as any component stops being finite
    (the scheme is conditionally stable, so absurd steps diverge).
    """
    _check_scale(first_emission_scale)
    h = config.step
    y = initial.as_vector()
    t0 = initial.t
    states = [initial]
    for k in range(config.n_steps):
        k1 = _rhs(y, rates, first_emission_scale)
        k2 = _rhs(y + 0.5 * h * k1, rates, first_emission_scale)
        k3 = _rhs(y + 0.5 * h * k2, rates, first_emission_scale)
        k4 = _rhs(y + h * k3, rates, first_emission_scale)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationBlowupError(
                f"state became non-finite at t={t0 + (k + 1) * h:.6g} "
                f"(step={h}); reduce the step size")
        t = t0 + (k + 1) * h
        states.append(KineticsState(t, *(float(v) for v in y)))
    return states


def conservation_defects(state: KineticsState, n_0: float) -> tuple[float, float]:
    """Residuals of the two exact conservation identities at one state."""
    excitation = (2.0 * state.n_e + state.n_a + state.n_b
                  + state.cap_n_a + state.cap_n_b - 2.0 * n_0)
    first = state.cap_n_f + state.n_e - n_0
    return float(excitation), float(first)


def _check_scale(scale: float) -> None:
    if not np.isfinite(scale) or scale <= 0.0:
        raise InvalidParameterError(
            f"first_emission_scale must be positive and finite, got {scale!r}")
