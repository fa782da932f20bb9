"""Spectra, expectations and concentration bounds of random feature matrices."""

from .errors import ConfigurationError, ConvergenceError, NotHermitianError
from .features import (
    FeatureMatrix,
    HermitianMatrix,
    build_feature_matrix,
    gram_over_data,
    gram_over_weights,
    normalize_columns,
)
from .kernels import (
    expected_gram_over_data,
    full_expectation_entry,
    full_expectation_matrix,
    gaussian_kernel_over_weights,
)
from .sampling import DistributionSpec, PointCloud, sample_cloud, separation_report
from .spectra import (
    SpectrumResult,
    deviation_from_identity,
    hermitian_eigenvalues,
    singular_values,
    spectral_norm_hermitian,
)

__version__ = "0.1.0"
