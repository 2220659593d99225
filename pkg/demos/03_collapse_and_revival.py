"""
Collapse and revival
====================

The qubit starts in |+> with the oscillator in vacuum.  A coherent
sigma_z X coupling entangles and then disentangles them every period.
"""

# %%
import numpy as np

from gravlocc import ProtocolConfig, unboosted_revival

base = dict(alpha_t=0.3, beta_t=0.3, n_cut=25, samples=8)
runs = {m: unboosted_revival(ProtocolConfig(model=m, **base))
        for m in ("gravity", "locc", "stochastic-force")}

# %%
print("t      " + "  ".join(f"{m:>16}" for m in runs))
for i, t in enumerate(runs["gravity"].t):
    print(f"{t:5.2f}  " + "  ".join(f"{runs[m].visibility[i]:16.6f}" for m in runs))

# %%
# Gravity returns to full visibility and is maximally entangled mid-period.
# The separable models never entangle and never fully recover.
for m, s in runs.items():
    print(f"{m:>16}: v(T)={s.visibility[-1]:.6f}  peak negativity={s.negativity.max():.2e}")
print("stochastic-force visibility non-increasing:",
      bool(np.all(np.diff(runs["stochastic-force"].visibility) <= 1e-9)))
