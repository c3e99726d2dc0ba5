# modules/profiles/__init__.py

from .grid import DEFAULT_GRID_POINTS, SampleGrid, trapezoid_weights
from .profile_set import ProfileFunction, ProfileSet, inner_product
from .loaders import guess_format, load_profiles, save_profiles

__all__ = [
    "DEFAULT_GRID_POINTS",
    "SampleGrid",
    "trapezoid_weights",
    "ProfileFunction",
    "ProfileSet",
    "inner_product",
    "guess_format",
    "load_profiles",
    "save_profiles",
]
