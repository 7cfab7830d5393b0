"""Lévy processes run on additive (time-inhomogeneous) clocks.

Subpackages are organised bottom-up:

* :mod:`timechange.levy` -- base Lévy processes from their characteristic triplet
* :mod:`timechange.subordinator` -- additive subordinators, increment laws and paths
* :mod:`timechange.subordination` -- the time-changed process, its local triplet and curve
* :mod:`timechange.generator` -- numerical generator checks
* :mod:`timechange.selfdec` -- the self-decomposable example and its closed forms
* :mod:`timechange.validation` -- seeded statistical tests
* :mod:`timechange.pricing` -- European options by cosine expansion
"""
from .errors import (ConfigError, ConvergenceError, DomainError, InadmissibleModelError,
                     QuadratureError, SingularOriginError, TimeChangeError,
                     UnsupportedModelError)
from .levy import JumpMeasure, LevyModel, NormalJumps, brownian, merton, point_jumps, pure_drift, \
    zero_process
from .selfdec import SelfDecParams, build_timechanged
from .subordination import LocalTriplet, TimeChangedModel
from .subordinator import IncrementLaw, SubordinatorSpec, drift_clock, exponential_kernel, \
    trivial_clock

__version__ = "0.1.0"
