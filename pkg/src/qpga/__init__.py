"""qpga: geodesic PCA on the hypersphere for qubit-efficient amplitude
encoding, with a dense quantum simulator, downstream classifiers, and
embedding-quality metrics.
"""

from .bounds import NoiseBudget, QubitBudget, feasible_qubit_range, max_qubits, min_qubits, system_error
from .errors import QpgaError
from .kernelmap import FeatureMapper, KernelSpec, apply_feature_map, fit_feature_map
from .manifold import FrechetConfig, exp_map, frechet_mean, geodesic_distance, log_map
from .pga import QpgaModel, components_for_variance, fit, inverse_transform, load_model, save_model, transform

__version__ = "0.1.0"

__all__ = [
    "FeatureMapper",
    "FrechetConfig",
    "KernelSpec",
    "NoiseBudget",
    "QpgaError",
    "QpgaModel",
    "QubitBudget",
    "apply_feature_map",
    "components_for_variance",
    "exp_map",
    "feasible_qubit_range",
    "fit",
    "fit_feature_map",
    "frechet_mean",
    "geodesic_distance",
    "inverse_transform",
    "load_model",
    "log_map",
    "max_qubits",
    "min_qubits",
    "save_model",
    "system_error",
    "transform",
    "__version__",
]
