"""Residual measures of degenerating rational maps over Q(i)(t)."""

from .scalars import FieldScalar, GaussianRational, GPoly, parse_scalar, format_scalar
from .forms import Form, ResiduePoint, INFINITY, parse_point, wronskian
from .homogeneous import HomPair, InvalidPair, MobiusK, ReducedMap, compose, normalize_pair, reduce_pair, split_reduction
from .normalization import NormalizationResult, iterate, make_nonconstant
from .multiplicities import AtomicMeasure, Component, MultProfile, MultTable, mult_profile, mult_table, paired_pullback
from .gamma import GammaMeasure, VertexSet, check_fixed, pullback, pushforward_pi
from .residual import (
    ExceptionalAmbiguity,
    NonDegenerate,
    ResidualMeasure,
    detect_exceptional,
    iterate_profile,
    red_lower,
    red_star,
    residual_measure,
)
from .config import FamilySpec, RunConfig, VerifyConfig

__all__ = [
    "FieldScalar",
    "GaussianRational",
    "GPoly",
    "parse_scalar",
    "format_scalar",
    "Form",
    "ResiduePoint",
    "INFINITY",
    "parse_point",
    "wronskian",
    "HomPair",
    "InvalidPair",
    "MobiusK",
    "ReducedMap",
    "compose",
    "normalize_pair",
    "reduce_pair",
    "split_reduction",
    "NormalizationResult",
    "iterate",
    "make_nonconstant",
    "AtomicMeasure",
    "Component",
    "MultProfile",
    "MultTable",
    "mult_profile",
    "mult_table",
    "paired_pullback",
    "GammaMeasure",
    "VertexSet",
    "check_fixed",
    "pullback",
    "pushforward_pi",
    "ExceptionalAmbiguity",
    "NonDegenerate",
    "ResidualMeasure",
    "detect_exceptional",
    "iterate_profile",
    "red_lower",
    "red_star",
    "residual_measure",
    "FamilySpec",
    "RunConfig",
    "VerifyConfig",
]
