"""Quantum-noise budgeting for squeezed-light laser interferometers.

The package models a below-threshold squeezed-light source, composes
optical loss budgets, and projects quantum-noise spectra for zero-area
Sagnac (speed-meter) and Michelson interferometer topologies with
squeezed-light injection and balanced homodyne readout.
"""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"

from .errors import ConfigError, NonIdentifiableError, PhysicsError, SagnacsimError
from .quadrature import (
    CovarianceMatrix2,
    EfficiencyChain,
    FrequencyGrid,
    LossElement,
    apply_loss,
    compose_efficiency,
    db_to_variance,
    rotate_covariance,
    squeeze_parameter_from_db,
    squeezed_covariance,
    variance_to_db,
)
from .opo import (
    FixedCavity,
    OpoFitResult,
    OpoParams,
    SqueezingObservation,
    cavity_decay_rate,
    fit_opo_params,
    opo_variances,
    sideband_ratio,
    synthesize_observations,
)
from .ifo import (
    IfoParams,
    InjectionParams,
    NoiseSpectrum,
    angle_sweep,
    coupling_constant,
    h_sql,
    noise_vector,
    normalized_intensity,
    optimal_readout_angle,
    quantum_noise_spectrum,
    sql_beating_band,
)
from .config import RunConfig, load_config, parse_config


def example_config_path(name: str) -> Path:
    """Filesystem path of a config shipped with the package."""
    return Path(resources.files("sagnacsim").joinpath("configs", name))


def example_config_names() -> list[str]:
    """Names of all shipped example configs."""
    root = resources.files("sagnacsim").joinpath("configs")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))
