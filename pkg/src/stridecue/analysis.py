"""
Spectral and fractal checks for stride series.

Conventions
-----------
periodogram
    Mean-removed series, orthonormal DFT ``X``, one-sided power
    ``c_k |X_k|**2 / n`` for bins ``k = 1 .. n//2`` (``c_k = 2`` except at
    the Nyquist bin of an even-length series). With this normalization the
    powers sum to the population variance of the series.
psd_slope
    Least-squares slope of ``log10(power)`` against ``log10(freq)``, skipping
    the 4 lowest non-DC bins and everything above 0.25 cycles/sample.
dfa_alpha
    First-order detrended fluctuation analysis over non-overlapping windows.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import AnalysisError, UndefinedSpectrumError
from .noise import StrideSeries

__all__ = [
    "Spectrum",
    "SeriesStats",
    "periodogram",
    "psd_slope",
    "dfa_alpha",
    "dfa_fluctuations",
    "default_scales",
    "summary_stats",
    "write_spectrum_csv",
]

MIN_PERIODOGRAM = 8
MIN_SLOPE = 64
MIN_DFA = 128
MIN_SCALES = 6
SLOPE_SKIP_LOW_BINS = 4
SLOPE_MAX_FREQ = 0.25


def _values(series):
    if isinstance(series, StrideSeries):
        return series.durations
    return np.asarray(series, dtype=np.float64).ravel()


def _is_constant(x):
    return x.size == 0 or bool(np.all(x == x[0]))


@dataclass(frozen=True, eq=False)
class Spectrum:
    freqs: np.ndarray
    powers: np.ndarray

    def __len__(self):
        return self.freqs.size

    @property
    def total_power(self):
        return float(self.powers.sum())


@dataclass(frozen=True)
class SeriesStats:
    mean: float
    sd: float
    min: float
    max: float
    n: int


def periodogram(series):
    """One-sided periodogram of the mean-removed series, DC excluded.

    Frequencies are in cycles per sample, ``k/n`` for ``k = 1 .. n//2``.
    """
    x = _values(series)
    n = x.size
    if n < MIN_PERIODOGRAM:
        raise AnalysisError(f"periodogram needs at least {MIN_PERIODOGRAM} samples, got {n}")
    k = np.arange(1, n // 2 + 1)
    freqs = k / n
    if _is_constant(x):
        return Spectrum(freqs, np.zeros(k.size))
    X = np.fft.rfft(x - x.mean(), norm="ortho")[1:]
    powers = 2.0 * (X.real ** 2 + X.imag ** 2) / n
    if n % 2 == 0:
        powers[-1] /= 2.0
    return Spectrum(freqs, powers)


def psd_slope(series):
    """Spectral exponent: slope of log power vs. log frequency.

    Close to -1 for 1/f noise and 0 for white noise.

    Raises
    ------
    UndefinedSpectrumError
        For a zero-variance series.
    AnalysisError
        For fewer than 64 samples.
    """
    x = _values(series)
    if _is_constant(x):
        raise UndefinedSpectrumError("series has zero variance; spectral slope is undefined")
    if x.size < MIN_SLOPE:
        raise AnalysisError(f"psd_slope needs at least {MIN_SLOPE} samples, got {x.size}")
    spec = periodogram(x)
    band = slice(SLOPE_SKIP_LOW_BINS, None)
    f, p = spec.freqs[band], spec.powers[band]
    keep = (f <= SLOPE_MAX_FREQ) & (p > 0)
    if keep.sum() < 2:
        raise AnalysisError("too few usable bins in the fit band")
    slope, _ = np.polyfit(np.log10(f[keep]), np.log10(p[keep]), 1)
    return float(slope)


def default_scales(n, count=12, smallest=8):
    """Log-spaced integer window sizes in ``[smallest, n // 4]``."""
    largest = n // 4
    if largest < smallest:
        raise AnalysisError(f"series of length {n} is too short for DFA")
    grid = np.logspace(np.log10(smallest), np.log10(largest), count)
    return np.unique(np.round(grid).astype(int))


def dfa_fluctuations(series, scales):
    """RMS linearly detrended fluctuation ``F(s)`` of the profile for each scale."""
    x = _values(series)
    profile = np.cumsum(x - x.mean())
    out = np.empty(len(scales))
    for i, s in enumerate(scales):
        w = profile.size // s
        seg = profile[: w * s].reshape(w, s)
        t = np.arange(s) - (s - 1) / 2.0
        slope = seg @ t / (t @ t)
        resid = seg - seg.mean(axis=1, keepdims=True) - slope[:, None] * t
        out[i] = np.sqrt(np.mean(resid ** 2))
    return out


def dfa_alpha(series, scales=None):
    """DFA-1 scaling exponent.

    About 0.5 for uncorrelated noise, 1.0 for 1/f noise and 1.5 for Brownian
    motion.

    Parameters
    ----------
    series : StrideSeries or array_like
        At least 128 samples.
    scales : sequence of int, optional
        Window sizes, at least 6 distinct values in ``[4, n // 4]``. Defaults to
        `default_scales`.
    """
    x = _values(series)
    n = x.size
    if n < MIN_DFA:
        raise AnalysisError(f"dfa_alpha needs at least {MIN_DFA} samples, got {n}")
    if _is_constant(x):
        raise AnalysisError("series has zero variance; DFA is undefined")
    if scales is None:
        scales = default_scales(n)
    scales = np.unique(np.asarray(scales, dtype=int))
    if scales.size < MIN_SCALES:
        raise AnalysisError(f"DFA needs at least {MIN_SCALES} distinct scales, got {scales.size}")
    if scales[0] < 4 or scales[-1] > n // 4:
        raise AnalysisError(f"scales must lie in [4, {n // 4}], got [{scales[0]}, {scales[-1]}]")
    fluct = dfa_fluctuations(x, scales)
    alpha, _ = np.polyfit(np.log(scales), np.log(fluct), 1)
    return float(alpha)


def summary_stats(series):
    """Sample statistics; ``sd`` uses the n-1 denominator and is 0 for one sample."""
    x = _values(series)
    if x.size == 0:
        raise AnalysisError("cannot summarize an empty series")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return SeriesStats(mean=lo, sd=0.0, min=lo, max=hi, n=int(x.size))
    mean = min(max(float(x.mean()), lo), hi)
    sd = float(x.std(ddof=1)) if x.size > 1 else 0.0
    return SeriesStats(mean=mean, sd=sd, min=lo, max=hi, n=int(x.size))


def write_spectrum_csv(spectrum, path):
    with open(path, "w") as fh:
        fh.write("freq,power\n")
        for f, p in zip(spectrum.freqs.tolist(), spectrum.powers.tolist()):
            fh.write(f"{f!r},{p!r}\n")
