"""
How well can LOCC imitate the revival?
======================================

At a fixed coherent coupling lambda = 2 alpha beta, the LOCC model trades
oscillator noise (alpha) against qubit noise (beta = lambda / 2 alpha).
"""

# %%
import numpy as np

from gravlocc import FockParams, mimicry_report

lam = 0.08
for a in (0.1, 0.2, 0.4):
    b = lam / (2 * a)
    r = mimicry_report(a, b, 1.0, FockParams(20), samples=10)
    T = r.t[-1]
    print(f"alpha={a:.1f} beta={b:.2f}: v_locc(T)={r.visibility_locc[-1]:.4f} "
          f"exp(-4 beta^2 T)={np.exp(-4 * b * b * T):.4f} deficit={r.deficit:.4f}")

# %%
# The qubit dephasing term commutes with everything else, so it caps the
# LOCC visibility.  Small alpha forces large beta, and the deficit grows as
# alpha shrinks.  Weak coupling on both sides makes the two models agree.
r = mimicry_report(0.02, 0.02, 1.0, FockParams(20), samples=10)
print(f"weak coupling deficit: {r.deficit:.2e}")
