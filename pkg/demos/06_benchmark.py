"""
Benchmarking noise generation
=============================

Time each generator, aggregate per noise type into the
``noise_type,cpu_pct_avg,gpu_pct_avg,memory_mb_avg`` layout, and show that
generation never stalls a 60 Hz animation clock.
"""

# %%
from stridecue.noise import NoiseParams, generate
from stridecue.perf import MetricsSink, aggregate, drive_clock, generate_in_background, run_benchmark, write_benchmark_csv
from stridecue.retime import AnimationClock, build_schedule

sink = MetricsSink()
raw, records = run_benchmark(["pink", "white", "iso"], n=5000, repeats=5, sink=sink)
print(write_benchmark_csv(aggregate(raw).values()))
for r in records[:6]:
    print(r.label, f"{r.wall_ms:.3f} ms", r.counters)

# %%
params = NoiseParams("pink", 5000, 1.15, 0.02, seed=1)
clock = AnimationClock(build_schedule(1.18, generate(params)))
futures = [generate_in_background(params) for _ in range(20)]
lateness = drive_clock(clock, 60.0, 1.0)
print(f"{sum(f.done() for f in futures)} background generations, worst clock lateness {max(lateness):.3f} ms")
