"""Closed-form kinetics of first-photon emission from two-atom pairs.

Two atoms with single-atom emission rates gamma_a and gamma_b are
prepared either in the entangled single-excitation state or in the
product of two excited states.

Entangled pairs lose their excitation through a single first photon, so
the waiting time is exponential with the combined rate

    gamma_f = gamma_a + gamma_b.

Requiring that the time-ordered description (first emission at gamma_f,
then relaxation of the remaining atom at its own rate) reproduces the
direct per-channel laws fixes the channel rates uniquely; the numerical
solver ``solve_compatibility`` recovers that identification without
assuming it.

Product pairs emit two photons.  Detection hardware that cannot resolve
two photons inside a coincidence window of width tau post-selects the
pairs whose two photons land in different windows.  For one atom the
probability that its photon lands in the window centred at t is

    taylor:  tau * g * exp(-g * t)                       (narrow window)
    exact:   exp(-g * max(0, t - tau/2)) - exp(-g * (t + tau/2))

and the per-window probability of seeing exactly one of the two photons
is p_a + p_b - 2 p_a p_b.  Normalizing that curve over all windows gives
the post-selected first-photon law with

    1 / alpha = 2 - 2 * tau * gamma_a * gamma_b / (gamma_a + gamma_b),

which exists only while tau * gamma_a * gamma_b < gamma_a + gamma_b.
"""
from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _spi
from scipy.optimize import least_squares

from .errors import InvalidParameterError, WindowTooWideError

CHANNEL_A = "A"
CHANNEL_B = "B"
CHANNELS = (CHANNEL_A, CHANNEL_B)

MODE_GRID_BIN = "grid-bin"
MODE_PAIRWISE = "pairwise"
WINDOW_MODES = (MODE_GRID_BIN, MODE_PAIRWISE)

VARIANT_TAYLOR = "taylor"
VARIANT_EXACT = "exact"
WINDOW_VARIANTS = (VARIANT_TAYLOR, VARIANT_EXACT)


class ApproximationBreakdownWarning(UserWarning):
    """A narrow-window probability left [0, 1]; the linearized window
    law is not trustworthy at these parameters."""


def _require_positive_rate(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(f"{name} must be a positive finite rate, got {value!r}")
    return value


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise InvalidParameterError("times must be finite")
    if np.any(t < 0.0):
        raise InvalidParameterError("times must be non-negative")
    return t


@dataclass(frozen=True)
class RatePair:
    """Single-atom emission rates of the two channels (inverse time)."""

    gamma_a: float
    gamma_b: float

    def __post_init__(self):
        object.__setattr__(self, "gamma_a", _require_positive_rate("gamma_a", self.gamma_a))
        object.__setattr__(self, "gamma_b", _require_positive_rate("gamma_b", self.gamma_b))

    @property
    def gamma_f(self) -> float:
        """Combined rate of the pair's first emission."""
        return self.gamma_a + self.gamma_b

    def channel_rate(self, channel: str) -> float:
        if channel == CHANNEL_A:
            return self.gamma_a
        if channel == CHANNEL_B:
            return self.gamma_b
        raise InvalidParameterError(f"channel must be one of {CHANNELS}, got {channel!r}")

    def other_rate(self, channel: str) -> float:
        return self.channel_rate(_other(channel))

    def swapped(self) -> "RatePair":
        return RatePair(self.gamma_b, self.gamma_a)


def _other(channel: str) -> str:
    if channel == CHANNEL_A:
        return CHANNEL_B
    if channel == CHANNEL_B:
        return CHANNEL_A
    raise InvalidParameterError(f"channel must be one of {CHANNELS}, got {channel!r}")


@dataclass(frozen=True)
class WindowConfig:
    """Coincidence-window width and the post-selection rule applied to it.

    ``grid-bin`` discards a pair when both photon times fall into the
    same bin of a fixed grid of width tau; ``pairwise`` discards when
    the two times differ by less than tau.  ``pairwise-difference`` is
    accepted as an alias for the latter.
    """

    tau: float
    mode: str = MODE_GRID_BIN

    def __post_init__(self):
        tau = float(self.tau)
        if not np.isfinite(tau) or tau <= 0.0:
            raise InvalidParameterError(f"tau must be a positive finite width, got {tau!r}")
        object.__setattr__(self, "tau", tau)
        mode = "pairwise" if self.mode == "pairwise-difference" else self.mode
        if mode not in WINDOW_MODES:
            raise InvalidParameterError(f"mode must be one of {WINDOW_MODES}, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)


@dataclass(frozen=True)
class NormalizedWindowModel:
    """A valid post-selected window law: rates, window, and alpha."""

    rates: RatePair
    window: WindowConfig
    alpha: float


def first_emission_rate(rates: RatePair) -> float:
    """Total rate at which an excited pair emits its first photon."""
    return rates.gamma_f


def solve_compatibility(rates: RatePair, *, tol: float = 1e-12) -> tuple[float, float, float]:
    """Solve for the channel rates and combined first-emission rate.

    Unknowns u = (c_a, c_b, g_f) satisfy the four consistency relations
    obtained by matching the time-ordered emission bookkeeping against
    the direct per-channel laws:

        c_b = g_f - gamma_a          c_a = gamma_a * c_b / (g_f - gamma_a)
        c_a = g_f - gamma_b          c_b = gamma_b * c_a / (g_f - gamma_b)

    The unique positive solution is (gamma_a, gamma_b, gamma_a+gamma_b);
    it is found numerically here so the identification is a result, not
    an input.  Returns (channel_a_rate, channel_b_rate, combined_rate).
    """
    big_a, big_b = rates.gamma_a, rates.gamma_b

    def residuals(u):
        c_a, c_b, g_f = u
        return np.array([
            c_b - (g_f - big_a),
            c_a - (g_f - big_b),
            c_a - big_a * c_b / (g_f - big_a),
            c_b - big_b * c_a / (g_f - big_b),
        ])

    scale = big_a + big_b
    start = np.array([0.75 * scale, 0.75 * scale, 1.5 * scale])
    # g_f must exceed both single rates or the denominators change sign
    lower = np.array([1e-12 * scale, 1e-12 * scale, max(big_a, big_b) * (1.0 + 1e-12)])
    result = least_squares(residuals, start, bounds=(lower, np.inf),
                           xtol=3e-16, ftol=3e-16, gtol=3e-16)
    if not result.success or np.max(np.abs(result.fun)) > tol * scale:
        raise RuntimeError(
            f"compatibility solve did not converge for rates {rates}: "
            f"status={result.status}, residual={np.max(np.abs(result.fun)):.3e}"
        )
    c_a, c_b, g_f = result.x
    return float(c_a), float(c_b), float(g_f)


def entangled_survival(t, rates: RatePair):
    """Fraction of entangled pairs still excited at time t."""
    t = _check_times(t)
    return np.exp(-rates.gamma_f * t)


def first_emission_cdf_entangled(t, rates: RatePair):
    """Cumulative first-photon fraction for entangled pairs."""
    t = _check_times(t)
    return -np.expm1(-rates.gamma_f * t)


def single_type_cdf(t, gamma_i: float):
    """Cumulative emission fraction of an isolated atom with rate gamma_i."""
    gamma_i = _require_positive_rate("gamma_i", gamma_i)
    t = _check_times(t)
    return -np.expm1(-gamma_i * t)


def intermediate_population(t, rates: RatePair, channel: str):
    """Fraction of pairs that emitted first in the *other* channel and
    whose remaining atom (the named channel) has not yet relaxed.

    n_i(t) = c_j / (g_i - g_f) * (exp(-g_f t) - exp(-g_i t)) with the
    compatible channel rates; the denominator never vanishes because
    g_f = g_i + g_j > g_i for positive rates.
    """
    t = _check_times(t)
    g_i = rates.channel_rate(channel)
    c_j = rates.channel_rate(_other(channel))
    g_f = rates.gamma_f
    return c_j / (g_i - g_f) * (np.exp(-g_f * t) - np.exp(-g_i * t))


def emission_derivative_ordered(t, rates: RatePair, channel: str):
    """dN_i/dt from the time-ordered bookkeeping.

    First emissions feed the channel at c_i * exp(-g_f t); pairs parked
    in the intermediate one-excited state drain into it at g_i * n_i.
    """
    t = _check_times(t)
    g_i = rates.channel_rate(channel)
    c_i = g_i
    g_f = rates.gamma_f
    return c_i * np.exp(-g_f * t) + g_i * intermediate_population(t, rates, channel)


def emission_derivative_direct(t, gamma_i: float):
    """dN_i/dt if the channel simply decayed at its single-atom rate."""
    gamma_i = _require_positive_rate("gamma_i", gamma_i)
    t = _check_times(t)
    return gamma_i * np.exp(-gamma_i * t)


def second_emission_cdf(t, rates: RatePair):
    """Cumulative fraction of pairs that have emitted both photons.

    N_s(t)/n_0 = 1 - exp(-g_f t) - n_a(t) - n_b(t): everything that has
    started emitting minus the pairs still holding one excitation.
    """
    t = _check_times(t)
    done = first_emission_cdf_entangled(t, rates)
    return (done
            - intermediate_population(t, rates, CHANNEL_A)
            - intermediate_population(t, rates, CHANNEL_B))


def window_prob_taylor(t, tau: float, gamma_i: float):
    """Narrow-window probability tau * g * exp(-g t) of catching the
    photon of one atom in the window centred at t.

    Emits ApproximationBreakdownWarning when the linearized value
    exceeds 1, which happens once tau * gamma_i > 1.
    """
    gamma_i = _require_positive_rate("gamma_i", gamma_i)
    tau = _check_window_width(tau)
    t = _check_times(t)
    p = tau * gamma_i * np.exp(-gamma_i * t)
    if np.any(p > 1.0):
        warnings.warn(
            f"window probability {float(np.max(p)):.4g} > 1 at tau={tau}, "
            f"gamma={gamma_i}; narrow-window form is breaking down",
            ApproximationBreakdownWarning, stacklevel=2)
    return p


def window_prob_exact(t, tau: float, gamma_i: float):
    """Exact probability that the atom's photon lands inside the window
    [t - tau/2, t + tau/2], clipped to non-negative times."""
    gamma_i = _require_positive_rate("gamma_i", gamma_i)
    tau = _check_window_width(tau)
    t = _check_times(t)
    lo = np.maximum(0.0, t - 0.5 * tau)
    hi = t + 0.5 * tau
    return np.exp(-gamma_i * lo) - np.exp(-gamma_i * hi)


def _check_window_width(tau: float) -> float:
    tau = float(tau)
    if not np.isfinite(tau) or tau < 0.0:
        raise InvalidParameterError(f"tau must be a non-negative finite width, got {tau!r}")
    return tau


def product_one_emission_unnormalized(t, rates: RatePair, window: WindowConfig,
                                      variant: str = VARIANT_TAYLOR):
    """Unnormalized probability of exactly one photon in the window at t.

    p_a + p_b - 2 p_a p_b: either photon alone minus the double-count
    correction; windows holding both photons are the post-selection
    discards.  Probabilities of the two distinguishable channels add;
    there is no amplitude-level interference between them.
    """
    prob = _window_prob_fn(variant)
    p_a = prob(t, window.tau, rates.gamma_a)
    p_b = prob(t, window.tau, rates.gamma_b)
    return p_a + p_b - 2.0 * p_a * p_b


def _window_prob_fn(variant: str):
    if variant == VARIANT_TAYLOR:
        return window_prob_taylor
    if variant == VARIANT_EXACT:
        return window_prob_exact
    raise InvalidParameterError(f"variant must be one of {WINDOW_VARIANTS}, got {variant!r}")


def validity_load(rates: RatePair, window: WindowConfig) -> float:
    """tau * gamma_a * gamma_b / (gamma_a + gamma_b); must stay below 1."""
    return window.tau * rates.gamma_a * rates.gamma_b / rates.gamma_f


def normalization_alpha(rates: RatePair, window: WindowConfig) -> NormalizedWindowModel:
    """Build the normalized post-selected window law.

    1/alpha = 2 - 2 * tau * gamma_a * gamma_b / gamma_f.  Raises
    WindowTooWideError once the window is wide enough that the inverse
    normalization is not positive.
    """
    load = validity_load(rates, window)
    if load >= 1.0:
        raise WindowTooWideError(
            "window too wide: tau * gamma_a * gamma_b must stay below "
            f"gamma_a + gamma_b (tau={window.tau}, rates=({rates.gamma_a}, "
            f"{rates.gamma_b}), ratio={load:.6g})")
    alpha = 1.0 / (2.0 - 2.0 * load)
    return NormalizedWindowModel(rates=rates, window=window, alpha=float(alpha))


def product_first_pdf(t, model: NormalizedWindowModel, variant: str = VARIANT_TAYLOR):
    """Density of post-selected single-photon window times, product pairs.

    taylor: alpha * (g_a e^{-g_a t} + g_b e^{-g_b t}
                     - 2 tau g_a g_b e^{-(g_a+g_b) t})
    exact:  the exact window curve divided by its own numerically
            computed normalization (used to validate simulations at
            window widths where the narrow-window form drifts).
    """
    t = _check_times(t)
    rates, window = model.rates, model.window
    if variant == VARIANT_TAYLOR:
        g_a, g_b, tau = rates.gamma_a, rates.gamma_b, window.tau
        return model.alpha * (g_a * np.exp(-g_a * t)
                              + g_b * np.exp(-g_b * t)
                              - 2.0 * tau * g_a * g_b * np.exp(-rates.gamma_f * t))
    if variant == VARIANT_EXACT:
        norm = _exact_normalization(rates.gamma_a, rates.gamma_b, window.tau)
        return product_one_emission_unnormalized(t, rates, window, VARIANT_EXACT) / (window.tau * norm)
    raise InvalidParameterError(f"variant must be one of {WINDOW_VARIANTS}, got {variant!r}")


def product_first_cdf(t, model: NormalizedWindowModel, variant: str = VARIANT_TAYLOR):
    """Cumulative form of ``product_first_pdf``."""
    t = _check_times(t)
    rates, window = model.rates, model.window
    if variant == VARIANT_TAYLOR:
        g_a, g_b, tau = rates.gamma_a, rates.gamma_b, window.tau
        g_f = rates.gamma_f
        return model.alpha * (-np.expm1(-g_a * t) - np.expm1(-g_b * t)
                              + 2.0 * tau * g_a * g_b / g_f * np.expm1(-g_f * t))
    if variant == VARIANT_EXACT:
        grid, cum = _exact_cdf_table(rates.gamma_a, rates.gamma_b, window.tau)
        return np.interp(t, grid, cum, left=0.0, right=1.0)
    raise InvalidParameterError(f"variant must be one of {WINDOW_VARIANTS}, got {variant!r}")


@functools.lru_cache(maxsize=64)
def _exact_normalization(g_a: float, g_b: float, tau: float) -> float:
    rates = RatePair(g_a, g_b)
    window = WindowConfig(tau=tau)

    def integrand(t):
        return product_one_emission_unnormalized(t, rates, window, VARIANT_EXACT) / tau

    # the exact window probability has a kink at t = tau/2
    upper = 60.0 / min(g_a, g_b)
    value, _ = _spi.quad(integrand, 0.0, upper, points=[0.5 * tau], limit=200)
    return float(value)


@functools.lru_cache(maxsize=64)
def _exact_cdf_table(g_a: float, g_b: float, tau: float):
    rates = RatePair(g_a, g_b)
    window = WindowConfig(tau=tau)
    upper = 40.0 / min(g_a, g_b)
    grid = np.linspace(0.0, upper, 40001)
    # resolve the kink at tau/2 exactly
    if tau / 2.0 < upper:
        grid = np.unique(np.concatenate([grid, [tau / 2.0]]))
    density = product_one_emission_unnormalized(grid, rates, window, VARIANT_EXACT) / tau
    cum = _spi.cumulative_trapezoid(density, grid, initial=0.0)
    cum /= _exact_normalization(g_a, g_b, tau)
    return grid, np.minimum(cum, 1.0)


def coincidence_probability(rates: RatePair, window: WindowConfig) -> float:
    """Probability that an independent pair is discarded by post-selection.

    grid-bin:  both photons in one bin of a fixed grid of width tau,
               (1-e^{-g_a tau})(1-e^{-g_b tau}) / (1-e^{-(g_a+g_b) tau})
    pairwise:  photon times closer than tau,
               1 - (g_b e^{-g_a tau} + g_a e^{-g_b tau}) / (g_a + g_b)
    """
    g_a, g_b, tau = rates.gamma_a, rates.gamma_b, window.tau
    if window.mode == MODE_GRID_BIN:
        num = np.expm1(-g_a * tau) * np.expm1(-g_b * tau)
        den = -np.expm1(-(g_a + g_b) * tau)
        return float(num / den)
    return float(1.0 - (g_b * np.exp(-g_a * tau) + g_a * np.exp(-g_b * tau)) / (g_a + g_b))
