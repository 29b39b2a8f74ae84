"""Workbench for Mal'tsev products of varieties of finite algebras."""

from .algebra import FiniteAlgebra, quotient_algebra, satisfies_identity
from .catalog import Catalog, parse_tag
from .congruence import all_congruences, congruence_generated, is_congruence, principal_congruence
from .fileio import bundled_algebra, read_algebra, read_variety
from .partition import Partition
from .polar import Polarization, classify_polarization, find_polar_terms
from .product import Membership, h_closure_probe, member, sigma_w
from .replica import class_structure, replica_congruence, rho0_bounded, rho0_profile
from .terms import GROUP, GROUPOID, MONOUNARY, App, Identity, Signature, Var, parse_identity, parse_term
from .theorem import build_chain_terms, check_theorem_hypotheses, search_fg, verify_chain
from .variety import (
    AssertedRewrite,
    Status,
    Verdict,
    VarietySpec,
    catalog_variety,
    decide_identity,
    is_term_idempotent,
    normal_form,
)

__all__ = [
    "App", "AssertedRewrite", "Catalog", "FiniteAlgebra", "GROUP", "GROUPOID", "Identity",
    "MONOUNARY", "Membership", "Partition", "Polarization", "Signature", "Status", "Var",
    "VarietySpec", "Verdict", "all_congruences", "build_chain_terms", "bundled_algebra",
    "catalog_variety", "check_theorem_hypotheses", "class_structure", "classify_polarization",
    "congruence_generated", "decide_identity", "find_polar_terms", "h_closure_probe",
    "is_congruence", "is_term_idempotent", "member", "normal_form", "parse_identity",
    "parse_tag", "parse_term", "principal_congruence", "quotient_algebra", "read_algebra",
    "read_variety", "replica_congruence", "rho0_bounded", "rho0_profile", "satisfies_identity",
    "search_fg", "sigma_w", "verify_chain",
]
