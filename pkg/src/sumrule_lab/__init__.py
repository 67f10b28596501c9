"""Scattering phase shifts, Born terms, bound states and finite-energy
sum rules for 1D symmetric and 3D central potentials (hbar = 2m = 1)."""

__version__ = "0.1.0"

from .channels import ANTISYM, SYM, Channel, partial_wave
from .potentials import (
    PotentialSpec,
    closed_form_reference,
    delta_function,
    evaluate,
    exponential_well,
    gaussian_well,
    moments,
    sech2,
    sech2_from_ell,
    square_well,
    tabulated,
)

__all__ = [
    "ANTISYM",
    "SYM",
    "Channel",
    "PotentialSpec",
    "closed_form_reference",
    "delta_function",
    "evaluate",
    "exponential_well",
    "gaussian_well",
    "moments",
    "partial_wave",
    "sech2",
    "sech2_from_ell",
    "square_well",
    "tabulated",
    "__version__",
]
