"""Ensemble statistics for random three-qubit gW states.

Each sampled state has its own random stream, so the same (seed, index) always
gives the same state and results do not depend on how the work is split.
The sizes here are small for speed; raise ``N`` for tighter numbers.
"""
import numpy as np

from monoq import experiments as ex
from monoq.correlations import CONSTRAINED

N, SEED = 1000, 7

print("fraction of states with positive / zero / negative delta_N")
for channel in ("global", "ad", "pd", "dp"):
    rows = ex.fraction_scan("gw", channel, "negativity", [0.0, 0.5, 0.9], N, SEED)
    print(f"  {channel:>6}: " + "  ".join(f"p={r.p:.1f} {r.pct_pos:5.1f}/{r.pct_zero:5.1f}/{r.pct_neg:5.1f}" for r in rows))

print("mean dynamics terminal (negativity, discord)")
for channel in ("global", "ad", "pd", "dp"):
    tn = ex.terminal_average("gw", channel, "negativity", N, SEED)
    td = ex.terminal_average("gw", channel, "discord", N, SEED, opts=CONSTRAINED)
    print(f"  {channel:>6}: {tn.mean:.3f}  {td.mean:.3f}")

census = ex.profile_census("gw", "ad", "negativity", N, SEED)
print("dynamics types under amplitude damping:", {k: round(v, 1) for k, v in census.items()})

# histogram of terminals: where do the scores die?
st = ex.terminal_average("gw", "dp", "negativity", N, SEED)
peak = np.argmax(st.density)
print(f"depolarizing terminals peak in [{st.bin_edges[peak]:.2f}, {st.bin_edges[peak + 1]:.2f})")
