"""Elliptic divisibility sequences, integer linear recurrences, finite-group
densities, and machine-checkable witness-prime certificates."""

from .elliptic import CurveQ, PointQ
from .eds import EdsSequence, WardSeed, generate_geometric, generate_ward
from .lrs import LrsSpec, fit_minimal_recurrence
from .refuter import WitnessCertificate, find_witness, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "CurveQ",
    "PointQ",
    "EdsSequence",
    "WardSeed",
    "generate_geometric",
    "generate_ward",
    "LrsSpec",
    "fit_minimal_recurrence",
    "WitnessCertificate",
    "find_witness",
    "verify_certificate",
    "__version__",
]
