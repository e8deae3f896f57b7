"""Exact Novikov-ring algebra, barcodes, interleaving distances and 1-D sheaf models."""

from .novikov import GF, INF, QQ, NovikovFieldScalar, NovikovScalar, parse_scalar
from .modcat import NormalForm, PresentationModule, normal_form, rank_function
from .barcode import Bar, EqBarcode, ModuleMap, PlainBarcode
from .metrics import DistanceReport, Interleaving, interleaving_distance

__all__ = [
    "GF", "INF", "QQ", "NovikovFieldScalar", "NovikovScalar", "parse_scalar",
    "NormalForm", "PresentationModule", "normal_form", "rank_function",
    "Bar", "EqBarcode", "ModuleMap", "PlainBarcode",
    "DistanceReport", "Interleaving", "interleaving_distance",
]

__version__ = "0.1.0"
