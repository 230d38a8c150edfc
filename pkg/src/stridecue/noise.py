"""
Personalized stride-time series with pink, white or isochronous structure.

A participant's self-paced walking trial gives the mean and standard deviation
of their stride times; those two numbers (and optionally the observed range)
parameterize every generated cue series::

    trial = CalibrationTrial([1.12, 1.18, 1.15, 1.11, 1.17])
    cal = calibrate(trial)
    series = generate(cal.to_params(NoiseKind.PINK, n=5000, seed=7))

White noise uses the trigonometric Box-Muller transform on a seeded uniform
source. Pink noise is synthesized in the frequency domain (amplitude
``f**-0.5``, uniform random phases) and standardized exactly to the requested
mean and SD. Every generator is a pure function of its parameters, seed
included.
"""
import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import CalibrationError, DataError, DomainError, GenerationError, ParameterError

__all__ = [
    "RNG_ALGORITHM",
    "NoiseKind",
    "NoiseParams",
    "StrideSeries",
    "CalibrationTrial",
    "Calibration",
    "ScratchPool",
    "make_rng",
    "box_muller_pair",
    "standard_normals",
    "generate",
    "generate_white",
    "generate_pink",
    "generate_iso",
    "calibrate",
    "read_series_csv",
    "write_series_csv",
]

#: Identifier of the uniform source, stored with every generated series.
RNG_ALGORITHM = "numpy.PCG64"

MIN_PINK_SAMPLES = 8
_SEED_LIMIT = 2 ** 64

PathLike = Union[str, Path]


class NoiseKind(str, enum.Enum):
    PINK = "pink"
    WHITE = "white"
    ISO = "iso"

    @classmethod
    def parse(cls, value):
        """Accept a NoiseKind or any case-insensitive spelling of its name/value."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"isochronous": "iso"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ParameterError(f"unknown noise kind {value!r}; expected pink, white or iso") from None


@dataclass(frozen=True)
class NoiseParams:
    """Parameters of one generated series.

    Parameters
    ----------
    kind : NoiseKind
    n : int
        Number of strides, at least 1.
    mu : float
        Mean stride time in seconds.
    sigma : float
        Standard deviation in seconds. Ignored for ``NoiseKind.ISO``.
    seed : int
        Unsigned 64-bit seed of the uniform source.
    clamp : (float, float), optional
        Inclusive range every duration is clipped to, with
        ``0 < min <= mu <= max``.
    """

    kind: NoiseKind
    n: int
    mu: float
    sigma: float = 0.0
    seed: int = 0
    clamp: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind.parse(self.kind))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        mu, sigma = float(self.mu), float(self.sigma)
        if not (math.isfinite(mu) and mu > 0):
            raise ParameterError(f"mu must be positive, got {self.mu!r}")
        if not (math.isfinite(sigma) and sigma >= 0):
            raise ParameterError(f"sigma must be non-negative, got {self.sigma!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < _SEED_LIMIT:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.clamp is not None:
            lo, hi = (float(v) for v in self.clamp)
            if not (0 < lo <= mu <= hi):
                raise ParameterError(f"clamp must satisfy 0 < min <= mu <= max, got ({lo}, {hi}) with mu={mu}")
            object.__setattr__(self, "clamp", (lo, hi))

    def to_dict(self):
        d = {
            "kind": self.kind.value,
            "n": self.n,
            "mu_s": self.mu,
            "sigma_s": self.sigma,
            "seed": self.seed,
        }
        if self.clamp is not None:
            d["clamp_min_s"], d["clamp_max_s"] = self.clamp
        return d

    @classmethod
    def from_dict(cls, d):
        clamp = None
        has_lo, has_hi = "clamp_min_s" in d, "clamp_max_s" in d
        if has_lo != has_hi:
            raise ParameterError("clamp_min_s and clamp_max_s must be given together")
        if has_lo:
            clamp = (d["clamp_min_s"], d["clamp_max_s"])
        try:
            return cls(
                kind=d["kind"],
                n=d["n"],
                mu=d["mu_s"],
                sigma=d.get("sigma_s", 0.0),
                seed=d.get("seed", 0),
                clamp=clamp,
            )
        except KeyError as exc:
            raise ParameterError(f"missing key {exc.args[0]!r} in noise parameters") from None

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class StrideSeries:
    """A finite sequence of positive stride durations (seconds).

    ``durations`` is stored as a read-only float64 array. ``params`` is the
    provenance of generated series and ``None`` for series read from disk or
    derived by simulation; ``source`` names where the series came from.
    """

    durations: np.ndarray
    params: Optional[NoiseParams] = None
    rng_algorithm: Optional[str] = None
    source: str = ""

    def __post_init__(self):
        d = np.array(self.durations, dtype=np.float64, copy=True)
        if d.ndim != 1:
            raise DataError(f"durations must be one-dimensional, got shape {d.shape}")
        bad = np.flatnonzero(~np.isfinite(d) | (d <= 0))
        if bad.size:
            i = int(bad[0])
            raise GenerationError(f"duration at index {i} is not positive ({d[i]!r})", index=i)
        p = self.params
        if p is not None:
            if d.size != p.n:
                raise DataError(f"series has {d.size} durations but params.n = {p.n}")
            if p.clamp is not None and d.size and (d.min() < p.clamp[0] or d.max() > p.clamp[1]):
                raise DataError("durations fall outside the clamp range")
        d.setflags(write=False)
        object.__setattr__(self, "durations", d)
        if not self.source and p is not None:
            object.__setattr__(self, "source", p.kind.value)

    def __len__(self):
        return self.durations.size

    def __iter__(self):
        return iter(self.durations.tolist())

    def __getitem__(self, i):
        return self.durations[i]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.durations
        return self.durations.astype(dtype)

    def __repr__(self):
        return f"StrideSeries(n={len(self)}, source={self.source!r})"

    def to_csv(self, path=None):
        """Write ``index,duration_s`` rows; returns the text when ``path`` is None."""
        return write_series_csv(self, path)


def _as_durations(series):
    if isinstance(series, StrideSeries):
        return series.durations
    return np.asarray(series, dtype=np.float64)


class ScratchPool:
    """Reusable work buffers keyed by (name, shape, dtype).

    Generating several series with the same sample count reuses the same
    intermediate arrays. ``allocations`` counts buffers actually created and is
    the allocation proxy reported by the benchmark harness. A pool is owned by
    one thread; give each worker its own.
    """

    def __init__(self):
        self._buffers = {}
        self.allocations = 0

    def get(self, name, shape, dtype=np.float64):
        key = (name, shape, np.dtype(dtype).str)
        buf = self._buffers.get(key)
        if buf is None:
            buf = np.empty(shape, dtype=dtype)
            self._buffers[key] = buf
            self.allocations += 1
        return buf

    def cached(self, name, shape, factory):
        """Return a read-only array built once by ``factory()``."""
        key = (name, shape, "cached")
        buf = self._buffers.get(key)
        if buf is None:
            buf = np.asarray(factory())
            buf.setflags(write=False)
            self._buffers[key] = buf
            self.allocations += 1
        return buf

    def clear(self):
        self._buffers.clear()


def make_rng(seed):
    """Seeded generator whose algorithm is named by `RNG_ALGORITHM`."""
    return np.random.Generator(np.random.PCG64(seed))


def box_muller_pair(u1, u2):
    """Map two uniform deviates to two independent standard normal deviates.

    ``z1 = sqrt(-2 ln u1) cos(2 pi u2)`` and ``z2 = sqrt(-2 ln u1) sin(2 pi u2)``
    with natural logarithm. Works elementwise on arrays.

    Parameters
    ----------
    u1 : float or array_like
        Uniform deviate(s) in (0, 1].
    u2 : float or array_like
        Uniform deviate(s) in [0, 1).

    Returns
    -------
    z1, z2 : float or ndarray

    Raises
    ------
    DomainError
        If any ``u1`` is 0 (log singularity) or either input is out of range.
    """
    a1 = np.asarray(u1, dtype=np.float64)
    a2 = np.asarray(u2, dtype=np.float64)
    if np.any(a1 == 0.0):
        raise DomainError("u1 = 0: logarithm is singular")
    if np.any(~(a1 > 0.0) | ~(a1 <= 1.0)):
        raise DomainError("u1 must lie in (0, 1]")
    if np.any(~(a2 >= 0.0) | ~(a2 < 1.0)):
        raise DomainError("u2 must lie in [0, 1)")
    radius = np.sqrt(-2.0 * np.log(a1))
    angle = 2.0 * np.pi * a2
    z1 = radius * np.cos(angle)
    z2 = radius * np.sin(angle)
    if z1.ndim == 0:
        return float(z1), float(z2)
    return z1, z2


def standard_normals(rng, n, pool=None):
    """``n`` standard normal deviates from ``rng`` via `box_muller_pair`.

    Both outputs of each pair are used, interleaved as z1, z2, z1, z2, ...
    """
    m = (n + 1) // 2
    if pool is None:
        u1 = rng.random(m)
        u2 = rng.random(m)
        z = np.empty(2 * m)
    else:
        u1 = pool.get("u1", (m,))
        u2 = pool.get("u2", (m,))
        z = pool.get("z", (2 * m,))
        rng.random(out=u1)
        rng.random(out=u2)
    # Generator.random draws from [0, 1); reflect u1 onto (0, 1].
    np.subtract(1.0, u1, out=u1)
    z1, z2 = box_muller_pair(u1, u2)
    z[0::2] = z1
    z[1::2] = z2
    return z[:n]


def _finish(durations, params):
    if params.clamp is not None:
        np.clip(durations, params.clamp[0], params.clamp[1], out=durations)
    bad = np.flatnonzero(~(durations > 0))
    if bad.size:
        i = int(bad[0])
        raise GenerationError(
            f"{params.kind.value} generation produced non-positive duration {durations[i]!r} at index {i}",
            index=i,
        )
    return StrideSeries(durations, params=params, rng_algorithm=RNG_ALGORITHM)


def _require_kind(params, kind):
    if params.kind is not kind:
        raise ParameterError(f"expected {kind.value} parameters, got {params.kind.value}")


def generate_white(params, pool=None):
    """White stride series ``mu + sigma * z`` with Box-Muller deviates ``z``.

    Raises `GenerationError` naming the first index whose duration is not
    positive after clamping (possible only without a clamp and with large
    ``sigma``).
    """
    _require_kind(params, NoiseKind.WHITE)
    z = standard_normals(make_rng(params.seed), params.n, pool=pool)
    return _finish(params.mu + params.sigma * z, params)


def _pink_amplitudes(n):
    k = np.arange(n // 2 + 1, dtype=np.float64)
    amp = np.zeros_like(k)
    amp[1:] = (k[1:] / n) ** -0.5
    return amp


def generate_pink(params, pool=None):
    """Pink (1/f) stride series by spectral synthesis.

    The one-sided spectrum has amplitude ``f**-0.5`` at every non-DC bin and an
    independent uniform phase per bin; its inverse real FFT is standardized to
    sample mean ``mu`` and sample SD ``sigma`` (n-1 denominator) before the
    optional clamp.
    """
    _require_kind(params, NoiseKind.PINK)
    n = params.n
    if n < MIN_PINK_SAMPLES:
        raise ParameterError(f"pink noise needs at least {MIN_PINK_SAMPLES} samples, got {n}")
    rng = make_rng(params.seed)
    nf = n // 2 + 1
    if pool is None:
        amp = _pink_amplitudes(n)
        phase = rng.random(nf)
        spectrum = np.empty(nf, dtype=np.complex128)
    else:
        amp = pool.cached("pink_amp", (nf, n), lambda: _pink_amplitudes(n))
        phase = pool.get("phase", (nf,))
        spectrum = pool.get("spectrum", (nf,), np.complex128)
        rng.random(out=phase)
    phase *= 2.0 * np.pi
    np.exp(1j * phase, out=spectrum)
    spectrum *= amp
    y = np.fft.irfft(spectrum, n=n)
    y -= y.mean()
    y /= y.std(ddof=1)
    return _finish(params.mu + params.sigma * y, params)


def generate_iso(n, value):
    """Constant series of ``n`` strides of ``value`` seconds."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if not (math.isfinite(value) and value > 0):
        raise ParameterError(f"value must be positive, got {value!r}")
    params = NoiseParams(NoiseKind.ISO, int(n), float(value))
    return StrideSeries(np.full(int(n), float(value)), params=params)


def generate(params, pool=None):
    """Dispatch on ``params.kind``.

    Isochronous series take ``mu`` as their constant value; ``sigma`` and
    ``seed`` are ignored for them.
    """
    if params.kind is NoiseKind.PINK:
        return generate_pink(params, pool=pool)
    if params.kind is NoiseKind.WHITE:
        return generate_white(params, pool=pool)
    return StrideSeries(np.full(params.n, params.mu), params=params)


@dataclass(frozen=True)
class CalibrationTrial:
    """Stride times (seconds) from a participant's self-paced walk."""

    stride_times: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        t = np.array(self.stride_times, dtype=np.float64).ravel()
        if t.size < 2:
            raise CalibrationError(f"calibration needs at least 2 stride times, got {t.size}")
        bad = np.flatnonzero(~np.isfinite(t) | (t <= 0))
        if bad.size:
            i = int(bad[0])
            raise DataError(f"stride time at index {i} is not positive ({t[i]!r})")
        t.setflags(write=False)
        object.__setattr__(self, "stride_times", t)

    @property
    def range(self):
        return float(self.stride_times.min()), float(self.stride_times.max())

    @property
    def mu(self):
        lo, hi = self.range
        # rounding in the mean must not escape the observed range
        return min(max(float(np.mean(self.stride_times)), lo), hi)

    @property
    def sigma(self):
        return float(np.std(self.stride_times, ddof=1))


class Calibration(NamedTuple):
    mu: float
    sigma: float
    clamp: Tuple[float, float]

    def to_params(self, kind, n, seed=0, clamp=True):
        """NoiseParams for a personalized series; ``clamp=False`` drops the range."""
        return NoiseParams(kind, n, self.mu, self.sigma, seed, self.clamp if clamp else None)


def calibrate(trial):
    """Mean, sample SD (n-1) and observed range of a self-paced trial.

    ``trial`` may be a `CalibrationTrial` or a plain sequence of stride times.

    >>> calibrate([1.15, 1.15, 1.15])
    Calibration(mu=1.15, sigma=0.0, clamp=(1.15, 1.15))
    """
    if not isinstance(trial, CalibrationTrial):
        trial = CalibrationTrial(trial)
    return Calibration(trial.mu, trial.sigma, trial.range)


def write_series_csv(series, path=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "duration_s"])
    for i, d in enumerate(_as_durations(series).tolist()):
        writer.writerow([i, f"{d:.9g}"])
    text = buf.getvalue()
    if path is None:
        return text
    Path(path).write_text(text)
    return None


def read_series_csv(path, column="duration_s"):
    """Read stride durations from CSV.

    Files with an ``index,duration_s`` header, any header containing
    ``column``, or a single headerless column of numbers are accepted.
    Malformed rows raise `DataError` carrying the 1-based line number.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read series: {exc.strerror}", path=path) from exc
    rows = [(i, row) for i, row in enumerate(csv.reader(io.StringIO(text)), start=1) if row and any(c.strip() for c in row)]
    if not rows:
        raise DataError("file contains no data", path=path)
    col = 0
    first_line, header = rows[0]
    try:
        float(header[-1])
        col = len(header) - 1
    except ValueError:
        names = [h.strip() for h in header]
        if column in names:
            col = names.index(column)
        elif len(names) == 1:
            col = 0
        else:
            raise DataError(f"no {column!r} column in header {names}", line=first_line, path=path) from None
        rows = rows[1:]
        if not rows:
            raise DataError("file contains a header but no data", path=path)
    values = []
    for line, row in rows:
        try:
            values.append(float(row[col]))
        except (ValueError, IndexError):
            raise DataError(f"cannot parse duration from {row!r}", line=line, path=path) from None
    return values
