"""Horofunction boundaries of Z^d and Lip seminorms on noncommutative tori."""
from __future__ import annotations

from .convexgeom import Face, dual_norm, enumerate_faces, facets, gauge_norm, subgroup_data
from .errors import *  # noqa: F401,F403
from .horoboundary import (HorofunctionWindow, RaySample, boundary_census, busemann_from_face,
                           classify_ray, nonconstancy_check, orbit, translate_window)
from .lattice import (CoefficientFunction, GeneratingSet, LengthOracle, NormSpec, length, phi,
                      word_length_ball)
from .report import Report, RunConfig

__version__ = "0.1.0"
