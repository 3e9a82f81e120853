"""Numerical laboratory for the damped Klein-Gordon equation with rapidly
oscillating periodic damping.

The package has three legs:

* time-domain simulation of the damped Klein-Gordon system on the periodic
  unit cell (:mod:`kgdamp.fields`, :mod:`kgdamp.evolve`, :mod:`kgdamp.decayfit`),
* Bloch-fiber resolvent computations for the quadratic damping pencil
  (:mod:`kgdamp.damping`, :mod:`kgdamp.bloch`),
* finite-dimensional checks of the quantitative semigroup decay machinery
  (:mod:`kgdamp.semigroup_lab`).
"""

from kgdamp.damping import DampingProfile, RayAverageReport
from kgdamp.fields import TorusGrid, FieldState
from kgdamp.evolve import DecayRecord
from kgdamp.bloch import FiberPencil, ResolventSample
from kgdamp.semigroup_lab import SemigroupCase
from kgdamp.decayfit import FitResult

__all__ = [
    "DampingProfile",
    "RayAverageReport",
    "TorusGrid",
    "FieldState",
    "DecayRecord",
    "FiberPencil",
    "ResolventSample",
    "SemigroupCase",
    "FitResult",
]

__version__ = "0.1.0"
