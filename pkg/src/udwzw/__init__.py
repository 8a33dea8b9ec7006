"""Exact and numerical toolkit for the u-deformed WZW model."""

from .bgroup import BElement, b_inv, b_mul, check_group_axioms
from .currentalg import CurrentPolynomial, GeneratorId, Session
from .liealg import LieAlgebraData, UOperator, build_algebra, check_cartan_weyl, coroot
from .reduction import GaugeSubalgebraSpec, first_class_check, make_constraints, sample_locus
from .report import CheckResult, VerificationReport
from .scalars import Coeff

__all__ = [
    "BElement", "CheckResult", "Coeff", "CurrentPolynomial", "GaugeSubalgebraSpec", "GeneratorId",
    "LieAlgebraData", "Session", "UOperator", "VerificationReport", "b_inv", "b_mul",
    "build_algebra", "check_cartan_weyl", "check_group_axioms", "coroot", "first_class_check",
    "make_constraints", "sample_locus",
]
__version__ = "0.1.0"
