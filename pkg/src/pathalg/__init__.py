"""Exact computations with the path algebroid of R^n, its enveloping algebra of
noncommutative differential operators, connection jets and Chen series."""
from .coeff import MatPoly, MPoly, VectorField
from .errors import PathAlgError
from .freelie import HallElem, hall_basis, lyndon_words, witt_dim
from .ncdiff import AnchorFrame, NCOp, nc_mul, nc_normalize
from .palg import PElem, p_bracket
from .connection import Connection, GaugeTransform, JetData, jets, reconstruct
from .chen import ChenSeries, PLPath, chen_series, transport

__all__ = [
    "AnchorFrame",
    "ChenSeries",
    "Connection",
    "GaugeTransform",
    "HallElem",
    "JetData",
    "MPoly",
    "MatPoly",
    "NCOp",
    "PElem",
    "PLPath",
    "PathAlgError",
    "VectorField",
    "chen_series",
    "hall_basis",
    "jets",
    "lyndon_words",
    "nc_mul",
    "nc_normalize",
    "p_bracket",
    "reconstruct",
    "transport",
    "witt_dim",
]

__version__ = "0.1.0"
