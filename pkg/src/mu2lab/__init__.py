"""Integral models of μ_{p²} over a discrete valuation ring: Witt vectors,
Artin-Hasse series, Hopf presentations, classification tables, special
fibers and the φ-module cross-check."""

from .dvr import Dvr, DvrElement, DvrSpec
from .errors import Mu2Error
from .group_scheme import ModelDescriptor, build_model, verify_hopf
from .classify import canonicalize_model, enumerate_models, iso_test
from .special_fiber import classify_fiber
from .breuil_kisin import BKRing, BKTriple, bk_enumerate, cross_check_counts

__version__ = "1.0.0"
