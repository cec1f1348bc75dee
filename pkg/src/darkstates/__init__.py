"""Generalized dark states of atoms coupled to two quantized circular photon modes."""

from .angular import Chain, ChainKind, ExactCG, HalfInt, clebsch_gordan, decompose_chains, parse_transition
from .errors import (
    CapacityError,
    ConstraintViolation,
    DarkStateError,
    InvalidAngularMomentum,
    InvalidTransition,
    OutOfSectorError,
    SectorMismatchError,
    ZeroStateError,
)
from .filtersim import FilterConfig, run_ensemble, run_trajectory
from .fockspace import (
    Basis,
    ModeId,
    ModeSet,
    OperatorPolynomial,
    SectorSpec,
    SparseOperator,
    StateVector,
    Statistics,
    enumerate_basis,
    materialize,
)
from .gds import (
    CoherentFockPhi,
    FockPhi,
    build_lambda_gds,
    build_n_gds,
    build_polariton,
    build_v_gds,
    psi_nc,
    psi_nc_coefficients,
    vanishing_check,
    verify_fund_relation,
)
from .model import ModelConfig, build_H, build_V, build_V_chain, build_V_lambda, project_chain
from .oracle import analytic_count, chain_sector, contains, dark_subspace, is_dark

__all__ = [
    "analytic_count",
    "Basis",
    "build_H",
    "build_lambda_gds",
    "build_n_gds",
    "build_polariton",
    "build_V",
    "build_V_chain",
    "build_v_gds",
    "build_V_lambda",
    "CapacityError",
    "Chain",
    "chain_sector",
    "ChainKind",
    "clebsch_gordan",
    "CoherentFockPhi",
    "ConstraintViolation",
    "contains",
    "dark_subspace",
    "DarkStateError",
    "decompose_chains",
    "enumerate_basis",
    "ExactCG",
    "FilterConfig",
    "FockPhi",
    "HalfInt",
    "InvalidAngularMomentum",
    "InvalidTransition",
    "is_dark",
    "materialize",
    "ModeId",
    "ModelConfig",
    "ModeSet",
    "OperatorPolynomial",
    "OutOfSectorError",
    "parse_transition",
    "project_chain",
    "psi_nc",
    "psi_nc_coefficients",
    "run_ensemble",
    "run_trajectory",
    "SectorMismatchError",
    "SectorSpec",
    "SparseOperator",
    "StateVector",
    "Statistics",
    "vanishing_check",
    "verify_fund_relation",
    "ZeroStateError",
]

__version__ = "0.1.0"
