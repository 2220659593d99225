"""
From laboratory numbers to simulation couplings
===============================================

A milligram oscillator and one atom, a millimetre apart.  How large is the
noise that any measure-and-feedback imitation of gravity must carry?
"""

# %%
from gravlocc import PhysicalParams, derive_couplings

lab = PhysicalParams(M_osc=1e-6, omega=1e-3, d=1e-3)
c = derive_couplings(lab)
print(f"zero-point length x0      = {c.x0:.3e} m")
print(f"oscillator coupling alpha = {c.alpha:.3e} 1/(m sqrt s)")
print(f"atom coupling beta        = {c.beta:.3e} 1/sqrt s")
print(f"heating rate gamma        = {c.gamma:.3e} 1/s")

# %%
# Per unit oscillator period the coupling is alpha_tilde; gamma is
# alpha_tilde^2 times omega.
print(f"alpha_tilde = {c.alpha_tilde:.4f}, alpha_tilde^2 * omega = {c.alpha_tilde**2 * lab.omega:.3e}")

# %%
# The rate adds up over atoms.  A hundred million atoms against a faster
# oscillator brings it to order one per second.
many = derive_couplings(PhysicalParams(M_osc=1e-6, omega=1.0, d=1e-3, n_atoms=10**8))
print(f"N * gamma = {many.n_gamma:.3f} 1/s")
