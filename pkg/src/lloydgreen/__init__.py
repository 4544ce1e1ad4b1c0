"""Green's functions and wave functions of the Lloyd-mirror interferometer,
with and without gravity."""

from ._backend import BACKEND
from .corner_green import CornerGeometry, FreeBeam, green_corner, psi_asymptotic, psi_exact, scan_screen_free
from .gravity_green import (
    GravityContext,
    ScreenPoint3D,
    TransverseMode,
    green_gravity_corner,
    green_gravity_halfspace,
    psi_gravity,
    psi_gravity_scan,
    reduced_green,
)
from .oracles import CheckReport, run_validation_suite
from .quadrature import QuadratureSpec
from .specfun import SpecFunAccuracy, airy, airy_corner_bracket, hankel1, hyp0f1, hyp1f2

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CheckReport",
    "CornerGeometry",
    "FreeBeam",
    "GravityContext",
    "QuadratureSpec",
    "ScreenPoint3D",
    "SpecFunAccuracy",
    "TransverseMode",
    "airy",
    "airy_corner_bracket",
    "green_corner",
    "green_gravity_corner",
    "green_gravity_halfspace",
    "hankel1",
    "hyp0f1",
    "hyp1f2",
    "psi_asymptotic",
    "psi_exact",
    "psi_gravity",
    "psi_gravity_scan",
    "reduced_green",
    "run_validation_suite",
    "scan_screen_free",
]
