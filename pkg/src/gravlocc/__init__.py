"""Qubit-oscillator open dynamics: separable channels, LOCC mimicry of
gravitational collapse-and-revival, and the noise that gives it away."""

from .channel import (KrausChannel, apply, choi, compose, convergence_order, extract_generator,
                      is_product_operator, mix_kraus, validate)
from .core import (FockParams, coherent_state, expm_hermitian_generator, fock_operators, kron,
                   negativity, partial_trace, partial_transpose)
from .experiments import (ProtocolConfig, TimeSeries, boosted_protocol, entanglement_series,
                          heating_series, mimicry_report, unboosted_revival, visibility)
from .lindblad import (LindbladGenerator, SeparabilityReport, check_c_prime, evolve,
                       expectation_series, rhs, superoperator)
from .models import (DerivedCouplings, PhysicalParams, atom_noise_model, derive_couplings,
                     gravity_hamiltonian, locc_channel, locc_lindblad, stochastic_force_model)

__version__ = "0.1.0"

__all__ = [
    "KrausChannel", "apply", "choi", "compose", "convergence_order", "extract_generator",
    "is_product_operator", "mix_kraus", "validate", "FockParams", "coherent_state",
    "expm_hermitian_generator", "fock_operators", "kron", "negativity", "partial_trace",
    "partial_transpose", "ProtocolConfig", "TimeSeries", "boosted_protocol",
    "entanglement_series", "heating_series", "mimicry_report", "unboosted_revival",
    "visibility", "LindbladGenerator", "SeparabilityReport", "check_c_prime", "evolve",
    "expectation_series", "rhs", "superoperator", "DerivedCouplings", "PhysicalParams",
    "atom_noise_model", "derive_couplings", "gravity_hamiltonian", "locc_channel",
    "locc_lindblad", "stochastic_force_model",
]
