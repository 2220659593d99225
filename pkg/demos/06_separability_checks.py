"""
Checking the separability hypothesis
====================================

A generator passes when H is a sum of one-sided terms, every jump is a
product operator and the decay operator sum is local.
"""

# %%
from gravlocc import (FockParams, ProtocolConfig, atom_noise_model, check_c_prime,
                      entanglement_series, locc_lindblad, stochastic_force_model)

fock = FockParams(15)
for name, gen in [("stochastic force", stochastic_force_model(0.2, 1.0, fock)),
                  ("atom noise", atom_noise_model(0.3, fock)),
                  ("atom noise, operator phase", atom_noise_model(0.3, fock, phase="operator")),
                  ("LOCC limit", locc_lindblad(0.3, 0.2, fock))]:
    rep = check_c_prime(gen)
    print(f"{name:>28}: verdict={rep.verdict}  witnesses={rep.witnesses[:3]}")

# %%
# Models that pass never create entanglement from a product start.
for model in ("stochastic-force", "atom-noise"):
    s = entanglement_series(ProtocolConfig(model=model, n_cut=20, t_max=1.0, samples=10))
    print(f"{model}: max negativity {s.negativity.max():.1e}, final visibility {s.visibility[-1]:.4f}")
