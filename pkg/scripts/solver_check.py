"""Cross-check the diamond-norm SDP against closed forms and the sampling lower bound."""
import time

import numpy as np

from honest_noise import diamond, zoo
from honest_noise.channels import identity_channel
from honest_noise.twirl import pauli_twirl

rng = np.random.default_rng(0)
print("# theta, sdp, 2|sin(theta/2)|, gap, ms")
for theta in np.sort(rng.uniform(0, np.pi, 10)):
    t = time.perf_counter()
    res = diamond.diamond_distance_full(zoo.make_rotation(theta, [0, 0, 1]), identity_channel())
    ms = 1e3 * (time.perf_counter() - t)
    print(f"{theta:.6f}, {res.value:.10f}, {2 * abs(np.sin(theta / 2)):.10f}, {res.gap:.1e}, {ms:.1f}")

print("# channel, sdp(ch, twirl), lower bound")
for key, ch in zoo.reference_channels().items():
    tw = pauli_twirl(ch)
    print(f"{key}, {diamond.diamond_distance(ch, tw):.10f}, {diamond.diamond_lower_bound(ch, tw):.10f}")
