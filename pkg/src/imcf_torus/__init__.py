"""Inverse mean curvature flow of rotationally symmetric tori.

The torus is represented by its profile curve in the upper half-plane; the
flow, its monitored invariants and the blow-up analysis near the inner ring
all act on that curve.
"""

from .diagnostics import DiagnosticsRecord, ReferenceData, band_gauss_integral, build_band
from .flow import FlowState, Stop, StepControl, run, step
from .geometry import (
    CurveError,
    GeneratingCurve,
    GraphStructureError,
    PinchError,
    curvature_field,
    decompose_graphs,
    is_embedded,
)
from .rescale import catenary_deviation, contradiction_integral, rescale_band
from .scenarios import make_catenary_band, make_perturbed_torus, make_round_torus

__version__ = "0.1.0"

__all__ = [
    "CurveError",
    "DiagnosticsRecord",
    "FlowState",
    "GeneratingCurve",
    "GraphStructureError",
    "PinchError",
    "ReferenceData",
    "StepControl",
    "Stop",
    "band_gauss_integral",
    "build_band",
    "catenary_deviation",
    "contradiction_integral",
    "curvature_field",
    "decompose_graphs",
    "is_embedded",
    "make_catenary_band",
    "make_perturbed_torus",
    "make_round_torus",
    "rescale_band",
    "run",
    "step",
]
