"""F-Cross-Barcodes and the scalar function topology divergence (SFTD).

Compares two functions on a common graph or n-dimensional lattice by the
persistence of sublevel sets of one against the pointwise minimum of both.
"""

from .core import (
    Bar,
    Barcode,
    FieldError,
    FiltrationMatrix,
    GraphField,
    ScalarField,
    SparseGradient,
    load_field,
    load_graph_field,
    save_field,
)
from .cross_barcode import cross_barcode, f_cross_barcode, localize, sublevel_barcode
from .cubical import cubical_persistence
from .divergence import Divergence, SftdConfig, sftd, sftd_gradient
from .flag import flag_persistence
from .metrics import bottleneck_distance, wasserstein_distance

__all__ = [
    "Bar", "Barcode", "Divergence", "FieldError", "FiltrationMatrix", "GraphField",
    "ScalarField", "SftdConfig", "SparseGradient", "bottleneck_distance", "cross_barcode",
    "cubical_persistence", "f_cross_barcode", "flag_persistence", "load_field",
    "load_graph_field", "localize", "save_field", "sftd", "sftd_gradient",
    "sublevel_barcode", "wasserstein_distance",
]
