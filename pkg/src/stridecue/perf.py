"""
Timing, trace export and benchmark aggregation.

Two CSV layouts are handled here:

trace CSV
    ``label,wall_ms,counters`` with counters serialized as
    ``name=value;name=value``. One row per `MetricsRecord`.
benchmark CSV
    ``noise_type,cpu_pct_avg,gpu_pct_avg,memory_mb_avg`` plus any extra
    numeric columns. The GPU column is carried through on import but never
    measured here.

`aggregate` averages raw benchmark rows per noise type with exact rational
arithmetic, so the result is the correctly rounded mean of the inputs.
"""
import concurrent.futures
import csv
import io
import os
import sys
import threading
import time
import tracemalloc
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Mapping

from .exceptions import DataError, ParameterError
from .noise import NoiseKind, NoiseParams, ScratchPool, generate

__all__ = [
    "MetricsRecord",
    "MetricsSink",
    "BenchmarkRow",
    "time_block",
    "export_trace_csv",
    "import_trace_csv",
    "read_benchmark_csv",
    "write_benchmark_csv",
    "aggregate",
    "run_benchmark",
    "drive_clock",
    "generate_in_background",
    "BENCHMARK_COLUMNS",
]

BENCHMARK_COLUMNS = ["noise_type", "cpu_pct_avg", "gpu_pct_avg", "memory_mb_avg"]
_GPU = "gpu_pct_avg"
# GIL hand-off interval while driving the clock
SWITCH_INTERVAL_S = 5e-4


@dataclass(frozen=True)
class MetricsRecord:
    """One timed phase.

    ``t_start`` is a `time.perf_counter` reading and ``stream`` the name of
    the thread that produced the record; neither is written to trace CSVs.
    """

    label: str
    wall_ms: float
    counters: Mapping[str, int] = field(default_factory=dict)
    t_start: float = 0.0
    stream: str = ""

    def __post_init__(self):
        if not self.label:
            raise ParameterError("label must be non-empty")
        if not self.wall_ms >= 0:
            raise ParameterError(f"wall_ms must be non-negative, got {self.wall_ms!r}")
        for k, v in self.counters.items():
            if not isinstance(v, int) or v < 0:
                raise ParameterError(f"counter {k!r} must be a non-negative integer, got {v!r}")
        object.__setattr__(self, "counters", dict(self.counters))


class MetricsSink:
    """Thread-safe collector of `MetricsRecord` objects.

    `records` returns them ordered by start time; records from one thread
    keep their emission order.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._records = []

    def emit(self, record):
        with self._lock:
            self._records.append(record)

    def records(self):
        with self._lock:
            recs = list(self._records)
        return sorted(recs, key=lambda r: r.t_start)

    def __len__(self):
        with self._lock:
            return len(self._records)


def time_block(label, work, *args, sink=None, counters=None, **kwargs):
    """Run ``work(*args, **kwargs)`` and time it with a monotonic clock.

    Returns ``(result, record)``. If the result has a length it is recorded as
    ``counters["samples"]``. If ``work`` raises, a record with
    ``counters["errors"] = 1`` is emitted to ``sink`` and attached to the
    exception as ``metrics_record`` before it propagates.
    """
    if not label:
        raise ParameterError("label must be non-empty")
    extra = dict(counters or {})
    t0 = time.perf_counter()
    try:
        result = work(*args, **kwargs)
    except BaseException as exc:
        wall = (time.perf_counter() - t0) * 1e3
        rec = MetricsRecord(label, wall, {**extra, "errors": 1}, t0, threading.current_thread().name)
        if sink is not None:
            sink.emit(rec)
        exc.metrics_record = rec
        raise
    wall = (time.perf_counter() - t0) * 1e3
    try:
        extra.setdefault("samples", len(result))
    except TypeError:
        pass
    rec = MetricsRecord(label, wall, extra, t0, threading.current_thread().name)
    if sink is not None:
        sink.emit(rec)
    return result, rec


def _format_counters(counters):
    for k in counters:
        if any(ch in k for ch in "=;,\n"):
            raise ParameterError(f"counter name {k!r} contains a reserved character")
    return ";".join(f"{k}={v}" for k, v in counters.items())


def _parse_counters(text, line, path):
    out = {}
    if not text:
        return out
    for item in text.split(";"):
        name, sep, value = item.partition("=")
        if not sep:
            raise DataError(f"malformed counter {item!r}", line=line, path=path)
        try:
            out[name] = int(value)
        except ValueError:
            raise DataError(f"counter {name!r} is not an integer: {value!r}", line=line, path=path) from None
    return out


def export_trace_csv(records, path):
    """Write ``label,wall_ms,counters`` rows in the order given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "wall_ms", "counters"])
    for r in records:
        w.writerow([r.label, repr(float(r.wall_ms)), _format_counters(r.counters)])
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write trace CSV {path}: {exc.strerror}") from exc


def import_trace_csv(path):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read trace CSV {path}: {exc.strerror}") from exc
    records = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["label", "wall_ms", "counters"]:
            raise DataError(f"unexpected trace header {header!r}", line=1, path=path)
        for line, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise DataError(f"expected 3 fields, got {len(row)}", line=line, path=path)
            try:
                wall = float(row[1])
            except ValueError:
                raise DataError(f"bad wall_ms {row[1]!r}", line=line, path=path) from None
            records.append(MetricsRecord(row[0], wall, _parse_counters(row[2], line, path)))
    return records


@dataclass(frozen=True)
class BenchmarkRow:
    """Per-noise-type resource averages; ``extra`` holds pass-through columns."""

    noise_type: NoiseKind
    cpu_pct_avg: float
    mem_avg: float
    extra: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "noise_type", NoiseKind.parse(self.noise_type))
        if not 0.0 <= self.cpu_pct_avg <= 100.0:
            raise ParameterError(f"cpu_pct_avg must lie in [0, 100], got {self.cpu_pct_avg!r}")
        gpu = self.extra.get(_GPU)
        if gpu is not None and not 0.0 <= gpu <= 100.0:
            raise ParameterError(f"{_GPU} must lie in [0, 100], got {gpu!r}")
        object.__setattr__(self, "extra", dict(self.extra))


def read_benchmark_csv(path):
    """Raw `BenchmarkRow` objects, one per CSV row, in file order."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for need in ("noise_type", "cpu_pct_avg", "memory_mb_avg"):
            if need not in fields:
                raise DataError(f"benchmark CSV lacks column {need!r}", line=1, path=path)
        extra_cols = [c for c in fields if c not in ("noise_type", "cpu_pct_avg", "memory_mb_avg")]
        for line, rec in enumerate(reader, start=2):
            try:
                extra = {c: float(rec[c]) for c in extra_cols if rec[c] not in (None, "")}
                rows.append(
                    BenchmarkRow(
                        rec["noise_type"],
                        float(rec["cpu_pct_avg"]),
                        float(rec["memory_mb_avg"]),
                        extra,
                    )
                )
            except (TypeError, ValueError) as exc:
                raise DataError(str(exc), line=line, path=path) from None
    return rows


def write_benchmark_csv(rows, path=None):
    """Write rows with the standard benchmark columns first, then any extra columns."""
    rows = list(rows)
    extra_cols = []
    for r in rows:
        for k in r.extra:
            if k != _GPU and k not in extra_cols:
                extra_cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCHMARK_COLUMNS + extra_cols)
    for r in rows:
        gpu = r.extra.get(_GPU)
        w.writerow(
            [r.noise_type.value, repr(r.cpu_pct_avg), "" if gpu is None else repr(gpu), repr(r.mem_avg)]
            + [repr(r.extra[k]) if k in r.extra else "" for k in extra_cols]
        )
    if path is None:
        return buf.getvalue()
    Path(path).write_text(buf.getvalue())


def _exact_mean(values):
    return float(sum(map(Fraction, values), Fraction(0)) / len(values))


def aggregate(rows, kinds=None):
    """Arithmetic mean of every column per noise type.

    Parameters
    ----------
    rows : iterable of BenchmarkRow
    kinds : iterable of NoiseKind or str, optional
        Types to report; defaults to every type present, in first-seen order.
        A requested type without rows raises `DataError`.

    Extra columns are averaged over the rows of a group that carry them.
    """
    groups = {}
    for r in rows:
        groups.setdefault(r.noise_type, []).append(r)
    wanted = list(groups) if kinds is None else [NoiseKind.parse(k) for k in kinds]
    out = {}
    for kind in wanted:
        group = groups.get(kind)
        if not group:
            raise DataError(f"no benchmark rows for noise type {kind.value!r}")
        keys = []
        for r in group:
            keys.extend(k for k in r.extra if k not in keys)
        extra = {k: _exact_mean([r.extra[k] for r in group if k in r.extra]) for k in keys}
        out[kind] = BenchmarkRow(
            kind,
            _exact_mean([r.cpu_pct_avg for r in group]),
            _exact_mean([r.mem_avg for r in group]),
            extra,
        )
    return out


def _measure(params, pool):
    cpu0 = time.process_time()
    t0 = time.perf_counter()
    allocs0 = pool.allocations
    series = generate(params, pool=pool)
    wall = time.perf_counter() - t0
    cpu = time.process_time() - cpu0
    allocs = pool.allocations - allocs0
    tracemalloc.start()
    try:
        generate(params)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    cpu_pct = min(100.0, 100.0 * cpu / wall) if wall > 0 else 0.0
    return series, t0, wall * 1e3, cpu_pct, peak / 2 ** 20, allocs


def _bench_kind(kind, n, repeats, mu, sigma, seed):
    params = NoiseParams(kind, n, mu, sigma, seed)
    pool = ScratchPool()
    out = []
    for rep in range(repeats):
        series, t0, wall_ms, cpu_pct, mem_mb, allocs = _measure(params, pool)
        rec = MetricsRecord(
            f"generate.{kind.value}",
            wall_ms,
            {"samples": len(series), "allocations": allocs, "repeat": rep},
            t0,
            threading.current_thread().name,
        )
        row = BenchmarkRow(kind, cpu_pct, mem_mb, {"wall_ms_avg": wall_ms})
        out.append((rep, row, rec))
    return out


def run_benchmark(kinds, n=5000, repeats=1, mu=1.15, sigma=0.02, seed=0, sink=None, workers=1):
    """Time ``repeats`` generations per noise type.

    Each type reuses one `ScratchPool` across its repeats, so the
    ``allocations`` counter is zero after the first repeat. With
    ``workers > 1`` the types run in parallel threads; results are merged in
    (type, repeat) order regardless.

    Returns
    -------
    raw : list of BenchmarkRow
        One row per measurement, ``extra["wall_ms_avg"]`` holding its wall
        time.
    records : list of MetricsRecord
    """
    kinds = [NoiseKind.parse(k) for k in kinds]
    if not kinds:
        raise ParameterError("no noise kinds requested")
    if repeats < 1:
        raise ParameterError(f"repeats must be at least 1, got {repeats!r}")
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_bench_kind, k, n, repeats, mu, sigma, seed) for k in kinds]
            results = [f.result() for f in futs]
    else:
        results = [_bench_kind(k, n, repeats, mu, sigma, seed) for k in kinds]
    raw, records = [], []
    for per_kind in results:
        for _, row, rec in per_kind:
            raw.append(row)
            records.append(rec)
            if sink is not None:
                sink.emit(rec)
    return raw, records


_default_executor = None
_executor_lock = threading.Lock()


def generate_in_background(params, executor=None, sink=None):
    """Submit a generation to a worker thread; returns a `concurrent.futures.Future`.

    Each call gets a fresh `ScratchPool` so concurrent jobs never share
    buffers. The Future resolves to the `StrideSeries`.
    """
    global _default_executor
    if executor is None:
        with _executor_lock:
            if _default_executor is None:
                _default_executor = concurrent.futures.ThreadPoolExecutor(
                    max_workers=max(1, min(4, os.cpu_count() or 1)), thread_name_prefix="stridecue-gen"
                )
            executor = _default_executor

    def job():
        series, _ = time_block(f"generate.{params.kind.value}", generate, params, sink=sink, pool=ScratchPool())
        return series

    return executor.submit(job)


def drive_clock(clock, rate_hz=60.0, duration_s=1.0, until=None):
    """Step ``clock`` at a fixed rate in real time.

    Steps are scheduled at ``k / rate_hz`` after the start; the thread sleeps
    between them and spins for the last half millisecond. Stops after
    ``duration_s`` or as soon as ``until()`` returns true (checked after each
    step) or the clock is exhausted. The interpreter's thread switch interval
    is shortened while driving so a busy worker thread holding the GIL cannot
    delay a step by the default 5 ms.

    Returns
    -------
    list of float
        Lateness of every step in milliseconds: how long after its scheduled
        instant the step actually finished.
    """
    if not rate_hz > 0:
        raise ParameterError(f"rate_hz must be positive, got {rate_hz!r}")
    period = 1.0 / rate_hz
    lateness = []
    old_switch = sys.getswitchinterval()
    sys.setswitchinterval(min(old_switch, SWITCH_INTERVAL_S))
    try:
        start = time.perf_counter()
        k = 1
        while k * period <= duration_s + 1e-12:
            due = start + k * period
            while True:
                left = due - time.perf_counter()
                if left <= 0:
                    break
                if left > 5e-4:
                    time.sleep(left - 5e-4)
            clock.step(period)
            lateness.append((time.perf_counter() - due) * 1e3)
            if clock.exhausted or (until is not None and until()):
                break
            k += 1
    finally:
        sys.setswitchinterval(old_switch)
    return lateness
