"""Inference on first-photon time samples.

Exponential maximum likelihood, Kolmogorov-Smirnov distances against an
arbitrary model CDF, and likelihood-based discrimination between the
entangled law (single exponential at the combined rate) and the
post-selected product law (three-exponential window density).  The
discrimination uses known parameters on both sides; nothing is fitted
before comparing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic
from .analytic import NormalizedWindowModel, RatePair, WindowConfig
from .errors import InvalidDataError, ModelInapplicableError

PREFER_ENTANGLED = "entangled"
PREFER_PRODUCT = "product"


@dataclass(frozen=True)
class FitResult:
    rate_estimate: float
    std_error: float
    log_likelihood: float
    n_samples: int


@dataclass(frozen=True)
class ModelComparison:
    ll_entangled: float
    ll_product: float
    log_likelihood_ratio: float
    preferred: str


def _clean_times(times, *, require_positive: bool = True) -> np.ndarray:
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0:
        raise InvalidDataError("no samples provided")
    if not np.all(np.isfinite(t)):
        raise InvalidDataError("samples must be finite")
    if require_positive and np.any(t <= 0.0):
        raise InvalidDataError("samples must be strictly positive waiting times")
    return t


def mle_exponential(times) -> FitResult:
    """Exponential maximum likelihood: rate = 1 / mean.

    The asymptotic standard error is rate / sqrt(n) and the attained
    log-likelihood reduces to n * (log(rate) - 1).
    """
    t = _clean_times(times)
    n = t.size
    rate = 1.0 / float(np.mean(t))
    log_likelihood = n * math.log(rate) - rate * float(np.sum(t))
    return FitResult(rate_estimate=rate,
                     std_error=rate / math.sqrt(n),
                     log_likelihood=log_likelihood,
                     n_samples=int(n))


def ks_distance(times, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov statistic against a model CDF.

    ``cdf`` must be a vectorized callable mapping times to [0, 1].
    """
    t = np.sort(_clean_times(times, require_positive=False))
    f = np.asarray(cdf(t), dtype=float)
    if f.shape != t.shape:
        raise InvalidDataError("model cdf must return one value per sample")
    n = t.size
    steps = np.arange(1, n + 1) / n
    return float(np.max(np.maximum(steps - f, f - (steps - 1.0 / n))))


def ks_critical_value(n_samples: int, significance: float = 0.01) -> float:
    """Asymptotic two-sided KS acceptance threshold at the given level."""
    if n_samples < 1:
        raise InvalidDataError("need at least one sample")
    if not 0.0 < significance < 1.0:
        raise InvalidDataError(f"significance must lie in (0, 1), got {significance!r}")
    return math.sqrt(-0.5 * math.log(significance / 2.0)) / math.sqrt(n_samples)


def log_likelihood_entangled(times, rates: RatePair) -> float:
    """Log-likelihood of the single-exponential first-photon law."""
    t = _clean_times(times, require_positive=False)
    g_f = rates.gamma_f
    return float(t.size * math.log(g_f) - g_f * np.sum(t))


def log_likelihood_product(times, model: NormalizedWindowModel) -> float:
    """Log-likelihood under the post-selected product-pair window law.

    Raises ModelInapplicableError when the density is not positive at
    some sample, which happens outside the narrow-window regime.
    """
    t = _clean_times(times, require_positive=False)
    pdf = analytic.product_first_pdf(t, model)
    if np.any(pdf <= 0.0):
        bad = float(t[np.argmin(pdf)])
        raise ModelInapplicableError(
            f"window density is not positive at t={bad:.6g} for tau="
            f"{model.window.tau}, rates=({model.rates.gamma_a}, "
            f"{model.rates.gamma_b}); likelihood undefined")
    return float(np.sum(np.log(pdf)))


def discriminate(times, rates: RatePair, window: WindowConfig) -> ModelComparison:
    """Decide which known-parameter emission law explains the samples.

    Positive log_likelihood_ratio means the entangled single-exponential
    law wins; ties go to the entangled law.
    """
    t = _clean_times(times)
    model = analytic.normalization_alpha(rates, window)
    ll_e = log_likelihood_entangled(t, rates)
    ll_p = log_likelihood_product(t, model)
    ratio = ll_e - ll_p
    preferred = PREFER_ENTANGLED if ratio >= 0.0 else PREFER_PRODUCT
    return ModelComparison(ll_entangled=ll_e, ll_product=ll_p,
                           log_likelihood_ratio=float(ratio), preferred=preferred)
