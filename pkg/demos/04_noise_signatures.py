"""
Heating and boosted dephasing
=============================

The LOCC imitation carries noise terms.  Two protocols expose them: the
oscillator heats at a fixed rate, and a cat state dephases faster the
larger its displacement.
"""

# %%
from gravlocc import ProtocolConfig, boosted_protocol, heating_series
from gravlocc.experiments import analytic_boosted_rate

for a in (0.1, 0.3):
    r = heating_series(ProtocolConfig(model="locc", alpha_t=a, n_cut=25, t_max=1.0, samples=20))
    print(f"alpha={a}: d<n>/dt fitted {r.fitted_dn_dt:.6f}, expected {2 * a * a:.6f}")

# %%
# Cat (|delta,0> + |-delta,1>)/sqrt 2, read out after recombining the branches.
for a in (0.1, 0.3):
    for delta in (1.0, 2.0):
        r = boosted_protocol(ProtocolConfig(model="locc", alpha_t=a, beta_t=0.3, delta=delta,
                                            n_cut=30, t_max=0.5, samples=20))
        print(f"alpha={a} delta={delta}: fitted {r.fitted_decay:.5f}  "
              f"generator {r.oracle_rate:.5f}  closed form {analytic_boosted_rate(a, 0.3, delta):.5f}")

# %%
# The reported effective rate scales with the number of atoms.
r = boosted_protocol(ProtocolConfig(model="locc", alpha_t=0.1, n_cut=25, t_max=0.2,
                                    samples=10, n_atoms=1000))
print(f"1000 atoms: {r.effective_rate:.2f} per unit time")
