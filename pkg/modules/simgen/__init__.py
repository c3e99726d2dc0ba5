# modules/simgen/__init__.py

from .bspline import (
    DEFAULT_KNOT_SEGMENTS,
    DEFAULT_N_BASIS,
    build_bspline_basis,
    gram_schmidt,
    uneven_knots,
)
from .scenarios import CASE_INDICES, ScenarioSpec, case_delta, oc_shift, scenario_shift
from .generative import GenerativeModel, fit_generative_model, generate_dataset
from .reference import ReferenceModelConfig, load_reference_config, reference_model

__all__ = [
    "DEFAULT_KNOT_SEGMENTS",
    "DEFAULT_N_BASIS",
    "build_bspline_basis",
    "gram_schmidt",
    "uneven_knots",
    "CASE_INDICES",
    "ScenarioSpec",
    "case_delta",
    "oc_shift",
    "scenario_shift",
    "GenerativeModel",
    "fit_generative_model",
    "generate_dataset",
    "ReferenceModelConfig",
    "load_reference_config",
    "reference_model",
]
