# modules/fpca/__init__.py

from .kernel import CovarianceKernel, estimate_covariance_kernel
from .basis import BasisSet, eigen_decompose, variance_report
from .channel_cov import ChannelCovarianceSet, estimate_sigma_k, project_differences
from .model import DEFAULT_D, FittedModel, fit_model, load_model, save_model

__all__ = [
    "CovarianceKernel",
    "estimate_covariance_kernel",
    "BasisSet",
    "eigen_decompose",
    "variance_report",
    "ChannelCovarianceSet",
    "estimate_sigma_k",
    "project_differences",
    "DEFAULT_D",
    "FittedModel",
    "fit_model",
    "load_model",
    "save_model",
]
