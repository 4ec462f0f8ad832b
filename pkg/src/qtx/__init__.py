"""Noise and displacement sensitivity of vacuum-tunnelling electromechanical transducers."""
from .config import Scenario, load_config, load_scenario
from .decoherence import DecoherenceConfig, composite_transmission, gamma_from_tau, tau_from_gamma, total_transmission
from .errors import (ConfigError, DegenerateEnergyError, DomainError, NumericalError, OverDampedError,
                     QtxError, QuadratureError, StructureError)
from .fermi import SupplyParams, biased_integrals, optimal_sensitivity_biased, supply_density
from .model import (DeviceGeometry, DriveParams, MaterialParams, NumericsConfig, OscillatorParams,
                    PotentialProfile, build_profile)
from .noise import momentum_kick, noise_figures, position_uncertainty
from .scattering import (barrier_smatrix, escape_time, find_resonances, solve, transmission,
                         transmission_derivative, wavevector)
from .sensitivity import (effective_displacement_sq, energy_increase, incident_count, optimal_sensitivity,
                          quantum_limit_parameter)

__version__ = "0.1.0"
