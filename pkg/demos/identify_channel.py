"""Identify an unknown local noise with two uses of the channel.

Step 1 sends a W state and checks the sign of its discord monogamy score:
global and depolarizing noise leave it nonnegative, damping channels make it
negative.  Step 2 sends a GHZ state and reads either its negativity score
(zero only for depolarizing noise) or its discord score, which falls in a
different range for amplitude and phase damping.
"""
import numpy as np

from monoq import ChannelOracle, discriminate
from monoq.channels import NoiseSpec, kraus_for

for channel in ("global", "ad", "pd", "dp"):
    for p in (0.4, 0.5, 0.6):
        out = discriminate(ChannelOracle(NoiseSpec(channel, p)))
        print(f"hidden {channel}@{p}: step1 {out.step1_sign:>6} ({out.step1_value:+.4f}), "
              f"step2 {out.step2_measure} = {out.step2_value:.4f} -> {out.verdict}")

# the oracle also accepts an arbitrary Kraus set; this is amplitude damping in disguise
ops = kraus_for(NoiseSpec("ad", 0.5))
print("Kraus-set oracle:", discriminate(ChannelOracle(kraus=ops)).verdict)

# bands for step 2 can be supplied; these bracket the GHZ-probe discord over p in [0.4, 0.6]
bands = {"ad": (0.12, 0.36), "pd": (0.002, 0.035)}
hits = [discriminate(ChannelOracle(NoiseSpec(c, p)), bands=bands).verdict == c
        for c in ("ad", "pd") for p in np.linspace(0.4, 0.6, 5)]
print(f"with the wider bands: {sum(hits)}/{len(hits)} damping cases identified")
