"""Monte Carlo sampling of two-photon emission times with post-selection.

Sampling is counter-based: every pair owns one 256-bit Philox counter
block (four 64-bit words), addressed by its pair index.  Uniform draws
come from the top 53 bits of each word, shifted into the open interval
(0, 1) so that log() never sees zero:

    u = ((word >> 11) + 0.5) * 2**-53

Work is split into chunks of a fixed size laid out on the pair-index
grid, and chunk results are concatenated in index order, so the output
is byte-identical for any worker count.  The scalar samplers consume
whole counter blocks through the same bit path, so sampling pair p with
a Generator advanced to block p reproduces row p of a bulk run.

Post-selection emulates coincidence hardware: ``grid-bin`` discards a
pair when both photons fall into the same bin of a fixed grid of width
tau, ``pairwise`` discards when the two arrival times are closer than
tau.  Kept pairs contribute both of their photons to the post-selected
single-photon time ensemble (each lands in its own window and is a
legitimate lone detection there).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import (CHANNEL_A, CHANNEL_B, MODE_GRID_BIN, RatePair,
                       WindowConfig)
from .errors import InvalidDataError, InvalidParameterError
from .series import BinnedSeries, read_columns

KIND_ENTANGLED = "entangled"
KIND_PRODUCT = "product"
PAIR_KINDS = (KIND_ENTANGLED, KIND_PRODUCT)

DRAWS_PER_PAIR = 4          # one Philox counter block per pair
CHUNK_PAIRS = 1 << 16       # fixed so results do not depend on worker count

RECORD_DTYPE = np.dtype([
    ("pair_id", np.int64),
    ("t_first", np.float64),
    ("channel_first", "U1"),
    ("t_second", np.float64),
    ("channel_second", "U1"),
])

RECORD_COLUMNS = [name for name in RECORD_DTYPE.names]


@dataclass(frozen=True)
class EmissionRecord:
    """Both photon times of one pair, ordered, with channel labels."""

    pair_id: int
    t_first: float
    channel_first: str
    t_second: float
    channel_second: str

    def __post_init__(self):
        if not (0.0 <= self.t_first <= self.t_second):
            raise InvalidDataError(
                f"need 0 <= t_first <= t_second, got ({self.t_first}, {self.t_second})")
        channels = {self.channel_first, self.channel_second}
        if channels != {CHANNEL_A, CHANNEL_B}:
            raise InvalidDataError(
                f"the two photons must use distinct channels A and B, got "
                f"({self.channel_first!r}, {self.channel_second!r})")


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one simulation run."""

    n_pairs: int
    rates: RatePair
    kind: str
    window: WindowConfig
    seed: int

    def __post_init__(self):
        if not isinstance(self.n_pairs, (int, np.integer)) or self.n_pairs < 1:
            raise InvalidParameterError(f"n_pairs must be a positive integer, got {self.n_pairs!r}")
        if self.kind not in PAIR_KINDS:
            raise InvalidParameterError(f"kind must be one of {PAIR_KINDS}, got {self.kind!r}")
        if not isinstance(self.seed, (int, np.integer)):
            raise InvalidParameterError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class PostSelectionSummary:
    kept: int
    discarded: int
    empirical_coincidence_rate: float


def _open_uniforms(words: np.ndarray) -> np.ndarray:
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def _block_words(seed: int, start_pair: int, count: int) -> np.ndarray:
    bitgen = np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    if start_pair:
        bitgen.advance(start_pair)     # one advance unit == one 4-word block
    raw = bitgen.random_raw(count * DRAWS_PER_PAIR)
    return raw.reshape(count, DRAWS_PER_PAIR)


def pair_generator(seed: int, pair_index: int = 0) -> np.random.Generator:
    """Generator positioned on the counter block of the given pair."""
    bitgen = np.random.Philox(key=np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    if pair_index:
        bitgen.advance(pair_index)
    return np.random.Generator(bitgen)


def _generator_uniforms(rng: np.random.Generator, n_words: int) -> np.ndarray:
    words = rng.integers(0, 2 ** 64, size=n_words, dtype=np.uint64)
    return _open_uniforms(words)


def _entangled_times(rates: RatePair, u: np.ndarray):
    g_f = rates.gamma_f
    t_first = -np.log(u[:, 0]) / g_f
    first_is_a = u[:, 1] < rates.gamma_a / g_f
    rate_left = np.where(first_is_a, rates.gamma_b, rates.gamma_a)
    t_second = t_first - np.log(u[:, 2]) / rate_left
    return t_first, first_is_a, t_second


def _product_times(rates: RatePair, u: np.ndarray):
    t_a = -np.log(u[:, 0]) / rates.gamma_a
    t_b = -np.log(u[:, 1]) / rates.gamma_b
    first_is_a = t_a <= t_b
    t_first = np.where(first_is_a, t_a, t_b)
    t_second = np.where(first_is_a, t_b, t_a)
    return t_first, first_is_a, t_second


_KERNELS = {KIND_ENTANGLED: _entangled_times, KIND_PRODUCT: _product_times}


def _assemble(start_pair: int, t_first, first_is_a, t_second) -> np.ndarray:
    n = t_first.shape[0]
    out = np.empty(n, dtype=RECORD_DTYPE)
    out["pair_id"] = np.arange(start_pair, start_pair + n, dtype=np.int64)
    out["t_first"] = t_first
    out["channel_first"] = np.where(first_is_a, CHANNEL_A, CHANNEL_B)
    out["t_second"] = t_second
    out["channel_second"] = np.where(first_is_a, CHANNEL_B, CHANNEL_A)
    return out


def simulate(config: SimConfig, n_workers: int = 1) -> np.ndarray:
    """Sample every pair's two photons; returns a structured array.

    The result depends only on (n_pairs, rates, kind, seed): the chunk
    grid is fixed, so any n_workers >= 1 yields identical bytes.
    """
    if not isinstance(n_workers, (int, np.integer)) or n_workers < 1:
        raise InvalidParameterError(f"n_workers must be a positive integer, got {n_workers!r}")
    kernel = _KERNELS[config.kind]

    def run_chunk(start: int) -> np.ndarray:
        count = min(CHUNK_PAIRS, config.n_pairs - start)
        u = _open_uniforms(_block_words(config.seed, start, count))
        return _assemble(start, *kernel(config.rates, u))

    starts = range(0, config.n_pairs, CHUNK_PAIRS)
    if n_workers == 1:
        chunks = [run_chunk(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=int(n_workers)) as pool:
            chunks = list(pool.map(run_chunk, starts))
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def _scalar_record(kind: str, rates: RatePair, rng: np.random.Generator,
                   pair_id: int) -> EmissionRecord:
    u = _generator_uniforms(rng, DRAWS_PER_PAIR).reshape(1, DRAWS_PER_PAIR)
    t_first, first_is_a, t_second = _KERNELS[kind](rates, u)
    first_a = bool(first_is_a[0])
    return EmissionRecord(
        pair_id=int(pair_id),
        t_first=float(t_first[0]),
        channel_first=CHANNEL_A if first_a else CHANNEL_B,
        t_second=float(t_second[0]),
        channel_second=CHANNEL_B if first_a else CHANNEL_A,
    )


def sample_entangled_pair(rates: RatePair, rng: np.random.Generator,
                          pair_id: int = 0) -> EmissionRecord:
    """One entangled pair: exponential first photon at the combined rate,
    channel chosen with probability gamma_i / gamma_f, then the leftover
    atom relaxes at its own rate."""
    return _scalar_record(KIND_ENTANGLED, rates, rng, pair_id)


def sample_product_pair(rates: RatePair, rng: np.random.Generator,
                        pair_id: int = 0) -> EmissionRecord:
    """One product-state pair: the atoms emit independently and the two
    times are sorted into (t_first, t_second)."""
    return _scalar_record(KIND_PRODUCT, rates, rng, pair_id)


def postselect(records: np.ndarray, window: WindowConfig):
    """Drop pairs whose photons the window hardware cannot separate.

    Returns (kept_records, PostSelectionSummary).  Boundary convention
    of ``grid-bin`` follows from the bin index floor(t / tau): a photon
    exactly on a bin edge belongs to the later bin.  ``pairwise`` keeps
    a pair when t_second - t_first >= tau.
    """
    t_first = np.asarray(records["t_first"], dtype=float)
    t_second = np.asarray(records["t_second"], dtype=float)
    if window.mode == MODE_GRID_BIN:
        keep = np.floor(t_first / window.tau) != np.floor(t_second / window.tau)
    else:
        keep = (t_second - t_first) >= window.tau
    kept = records[keep]
    n = int(records.shape[0])
    discarded = n - int(kept.shape[0])
    rate = discarded / n if n else 0.0
    return kept, PostSelectionSummary(kept=int(kept.shape[0]),
                                      discarded=discarded,
                                      empirical_coincidence_rate=float(rate))


def one_photon_window_times(records: np.ndarray) -> np.ndarray:
    """Single-photon detection times contributed by the given pairs.

    Each pair that survives post-selection is seen by the hardware as
    two isolated one-photon windows, so both arrival times enter the
    post-selected time ensemble.
    """
    return np.concatenate([np.asarray(records["t_first"], dtype=float),
                           np.asarray(records["t_second"], dtype=float)])


def empirical_cdf(times: np.ndarray, grid: np.ndarray) -> BinnedSeries:
    """Fraction of samples at or below each grid point."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise InvalidDataError("cannot build an empirical CDF from zero samples")
    grid = np.asarray(grid, dtype=float)
    ranks = np.searchsorted(np.sort(times), grid, side="right")
    return BinnedSeries(times=grid, values=ranks / times.size, label="ecdf")


def empirical_first_cdf(records: np.ndarray, grid: np.ndarray) -> BinnedSeries:
    """Empirical CDF of the first-photon times t_first."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return BinnedSeries(times=grid, values=np.empty(0), label="ecdf")
    return empirical_cdf(np.asarray(records["t_first"], dtype=float), grid)


def channel_fractions(records: np.ndarray) -> dict[str, float]:
    """Fraction of first photons observed in each channel."""
    n = int(records.shape[0])
    if n == 0:
        return {CHANNEL_A: 0.0, CHANNEL_B: 0.0}
    frac_a = float(np.mean(records["channel_first"] == CHANNEL_A))
    return {CHANNEL_A: frac_a, CHANNEL_B: 1.0 - frac_a}


def read_records_csv(path) -> np.ndarray:
    """Load emission records; only the two time columns are mandatory."""
    cols = read_columns(path, ["t_first", "t_second"])
    n = cols["t_first"].size
    out = np.zeros(n, dtype=RECORD_DTYPE)
    out["pair_id"] = np.arange(n, dtype=np.int64)
    out["t_first"] = cols["t_first"]
    out["t_second"] = cols["t_second"]
    if np.any(out["t_first"] < 0.0) or np.any(out["t_second"] < out["t_first"]):
        raise InvalidDataError(f"{path}: records must satisfy 0 <= t_first <= t_second")
    return out
