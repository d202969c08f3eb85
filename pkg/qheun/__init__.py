from importlib.metadata import PackageNotFoundError, version

from .certify import IDENTITIES, certify, identity_catalog
from .exceptions import (
    ConstraintViolated,
    DivisionByZero,
    DomainViolated,
    InexactPower,
    InvalidArgument,
    InvalidQ,
    LimitNotDetected,
    NonConvergent,
    OffLattice,
    PoleEncountered,
    QHeunError,
    UnknownIdentity,
)
from .jackson import (
    boundary_terms_a4,
    corollary_a4,
    finite_sum_identity,
    jackson_integral,
    lattice_eigenfunction,
    transform,
    transform_a2,
    transform_a3,
    transform_a4,
    transform_spec,
    verify_transform,
)
from .kernel import dual_a2, dual_a3, dual_a4, phi, verify_kernel
from .operators import A2Params, A3Params, A4Params, LatticeFunction, apply, exponents, make_params, residual
from .qseries import QBase, QProduct, qpoch_inf, qpoch_n, qpoch_ratio, theta_q
from .solutions import monomial_eigenpair, prefactor_eigenpair, ramanujan_1psi1, two_phi_one, worked_case
from .suites import run_suite, transform_table

try:
    __version__ = version("qheun")
except PackageNotFoundError:
    __version__ = "unknown"

__all__ = [
    "QBase",
    "QProduct",
    "qpoch_inf",
    "qpoch_n",
    "qpoch_ratio",
    "theta_q",
    "A4Params",
    "A3Params",
    "A2Params",
    "LatticeFunction",
    "make_params",
    "apply",
    "residual",
    "exponents",
    "dual_a4",
    "dual_a3",
    "dual_a2",
    "phi",
    "verify_kernel",
    "jackson_integral",
    "transform_spec",
    "transform",
    "transform_a4",
    "transform_a3",
    "transform_a2",
    "verify_transform",
    "boundary_terms_a4",
    "corollary_a4",
    "finite_sum_identity",
    "lattice_eigenfunction",
    "monomial_eigenpair",
    "prefactor_eigenpair",
    "ramanujan_1psi1",
    "two_phi_one",
    "worked_case",
    "IDENTITIES",
    "certify",
    "identity_catalog",
    "run_suite",
    "transform_table",
    "QHeunError",
    "InvalidQ",
    "InvalidArgument",
    "InexactPower",
    "OffLattice",
    "PoleEncountered",
    "DivisionByZero",
    "NonConvergent",
    "LimitNotDetected",
    "ConstraintViolated",
    "DomainViolated",
    "UnknownIdentity",
]
