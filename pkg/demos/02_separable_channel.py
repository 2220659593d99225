"""
A separable channel and its master equation
===========================================

Two measure-and-feedback steps give a channel whose Kraus operators are
all products.  For small time steps it generates a Lindblad equation whose
Hamiltonian looks entangling.
"""

# %%
import numpy as np

from gravlocc import (FockParams, check_c_prime, choi, is_product_operator, locc_channel,
                      locc_lindblad, mix_kraus)
from gravlocc.channel import convergence_study
from gravlocc.core import random_unitary

fock = FockParams(12)
step = locc_channel(0.3, 0.2, 1e-3, fock)
print("Kraus operators:", len(step))
print("all products:", all(is_product_operator(k).is_product for k in step.kraus))

# %%
# The finite-difference generator (L_dt - id)/dt approaches the Lindbladian
# with first-order error in dt.
res, slope = convergence_study(lambda dt: locc_channel(0.3, 0.2, dt, fock),
                               locc_lindblad(0.3, 0.2, fock), [1e-3, 1e-4, 1e-5, 1e-6])
for dt, r in zip([1e-3, 1e-4, 1e-5, 1e-6], res):
    print(f"dt={dt:.0e}  max residual={r:.2e}")
print(f"fitted slope {slope:.3f}")

# %%
# The limiting generator fails the local test only through H = -2 alpha beta sigma_z X.
rep = check_c_prime(locc_lindblad(0.3, 0.2, fock))
print(rep)

# %%
# Kraus operators are not unique.  Mixing them with a unitary leaves the
# channel (its Choi matrix) unchanged but hides the product structure.
rng = np.random.default_rng(0)
mixed = mix_kraus(step, random_unitary(len(step), rng))
print("Choi change:", np.max(np.abs(choi(mixed) - choi(step))))
print("mixed ranks:", [is_product_operator(k).schmidt_rank for k in mixed.kraus])
