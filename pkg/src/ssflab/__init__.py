"""Numerical laboratory for trace formulas of suspension operators.

Dense matrix models of a self-adjoint operator crossing between two
asymptotes: the principal trace formula, Krein spectral shift functions,
the Abel-transform relation between endpoint and suspension shift functions,
Witten index regularisations and a Dirac-operator example, each verified
against independent closed-form oracles.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    ContractError,
    DomainError,
    EigensolverError,
    ParameterError,
    SingularityError,
    SsflabError,
)
from .linalg import HermitianOperator, SchattenReport, diagonal, identity
from .models import CutoffProjection, PerturbationPath, ProfileFunction, make_profile
from .ssf import StepFunction
from .suspension import SuspensionPair, TimeGrid, assemble

__all__ = [
    "ConfigurationError",
    "ContractError",
    "CutoffProjection",
    "DomainError",
    "EigensolverError",
    "HermitianOperator",
    "ParameterError",
    "PerturbationPath",
    "ProfileFunction",
    "SchattenReport",
    "SingularityError",
    "SsflabError",
    "StepFunction",
    "SuspensionPair",
    "TimeGrid",
    "assemble",
    "diagonal",
    "identity",
    "make_profile",
    "__version__",
]
