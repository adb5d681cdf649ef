"""
Functions package for verification runs.
Contains the shipping identity registry and the suite checks used by the verify command.
"""

from .identity_registry import load_registry, registry_to_json, shipping_registry
from .verification_checks import run_named_suite

__all__ = [
    "load_registry",
    "registry_to_json",
    "run_named_suite",
    "shipping_registry"
]
