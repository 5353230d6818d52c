"""Numerical toolkit for the nonlinear Klein-Gordon equation in modulation spaces."""
from .errors import *  # noqa: F401,F403
from .grid import Field, GridSpec, SpectralField, forward_transform, inverse_transform
from .norms import Order, SpaceParams, TimeSpaceParams, besov_norm, modulation_norm, sobolev_norm, timespace_norm
from .solver import CauchyData, Hartree, Power, SolverConfig, duhamel_picard, reference_integrator
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GridSpec",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "Order",
    "SpaceParams",
    "TimeSpaceParams",
    "besov_norm",
    "modulation_norm",
    "sobolev_norm",
    "timespace_norm",
    "CauchyData",
    "Hartree",
    "Power",
    "SolverConfig",
    "duhamel_picard",
    "reference_integrator",
    "Trajectory",
]
