"""
Checking the 1/f signature
==========================

The periodogram slope and the DFA exponent tell pink from white: pink sits
near -1 and 1.0, white near 0 and 0.5.
"""

# %%
import numpy as np

from stridecue.analysis import dfa_alpha, periodogram, psd_slope
from stridecue.noise import NoiseParams, generate

seeds = range(10)
for kind in ("pink", "white"):
    batch = [generate(NoiseParams(kind, 5000, 1.15, 0.02, seed)) for seed in seeds]
    slope = np.mean([psd_slope(s) for s in batch])
    alpha = np.mean([dfa_alpha(s) for s in batch])
    print(f"{kind:>5}: psd_slope={slope:+.3f}  dfa_alpha={alpha:.3f}")

# %%
# Integrating white noise gives Brownian motion, DFA alpha about 1.5.
w = generate(NoiseParams("white", 5000, 1.15, 0.02, 0)).durations
print("brown dfa_alpha:", round(dfa_alpha(np.cumsum(w - w.mean())), 3))

# %%
# Powers sum to the series variance.
spec = periodogram(w)
print("total power", spec.total_power, "variance", w.var())

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    for kind in ("pink", "white"):
        sp = periodogram(generate(NoiseParams(kind, 5000, 1.15, 0.02, 1)))
        ax.loglog(sp.freqs, sp.powers, lw=0.5, label=kind)
    ax.set_xlabel("cycles / stride")
    ax.set_ylabel("power (s$^2$)")
    ax.legend()
    fig.savefig("spectra.png", dpi=120)
