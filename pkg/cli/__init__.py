# cli/__init__.py

from .main import build_parser, dispatch

__all__ = ["build_parser", "dispatch"]
