"""Exact positivity tests, log Chern numbers and edge-metric numerics for surface pairs."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    BoundaryComponent,
    CurveRecord,
    DivisorClass,
    Lattice,
    SurfacePair,
    arithmetic_genus,
    enumerate_classes,
    enumerate_negative_classes,
    pair,
    validate,
)
from .positivity import AlphaFamily, Tri, is_ample, is_big, is_nef, nef_threshold, positivity  # noqa: E402
from .classifier import beta_decompose, check_fano_edge, classify, reider_search  # noqa: E402
from .topology import bmy_check, bmy_limit_check, edge_invariants, log_chern  # noqa: E402
