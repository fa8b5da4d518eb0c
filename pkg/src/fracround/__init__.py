from .errors import (CapabilityError, FracRoundError, InputError, InvariantViolation,
                     ParameterError, PromiseViolation, RegimeError, StatisticalFailure,
                     StructuralError)
from .fixedpoint import L_MAX, ONE, to_fraction, to_weight, weight
from .graph import DynGraph, FracVector, Matching
from .core import (ValidationReport, max_matching_oracle, truncate, validate_fractional,
                   vertex_distance)
from .degree_split import degree_split
from .rounder import DynamicRounder, dyn_init, static_round

__version__ = "0.1.0"
