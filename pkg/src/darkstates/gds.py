"""Analytic construction of generalized dark states.

The central object is the chain operator

    Psi = sum_j A_{2j+1} b^dagger_{2j+1},
    A_{2j+1} = (-1)^j a+^j a-^(L-j) prod_{q<=j} G^{2q}_{2q-1} prod_{q>j} G^{2q}_{2q+1},

which maps dark states onto dark states.  Powers of ``Psi`` acting on a
photon functional ``Phi(a^dagger)|0>`` give the Lambda, N and V families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla
from scipy.special import gammainc

from .angular import Chain, ChainKind, ExactCG
from .errors import ConstraintViolation, ZeroStateError
from .fockspace import (
    MINUS,
    PLUS,
    ModeId,
    ModeKind,
    OperatorPolynomial,
    SectorSpec,
    StateVector,
    Statistics,
    apply_to_dict,
    enumerate_basis,
    materialize,
)
from .model import ModelConfig, build_V_lambda

ZERO_TOL = 1e-12
TAIL_TOL = 1e-10


# ----------------------------------------------------------------------------
# photon functionals


def _photon(s: int) -> ModeId:
    return PLUS if s > 0 else MINUS


def coherent_polynomial(s: int, Z: complex, truncation: int) -> OperatorPolynomial:
    """sum_{k<=T} Z^k/k! (a_s^dagger)^k, the truncated exp(Z a_s^dagger)."""
    mode = _photon(s)
    return OperatorPolynomial({
        ((mode, True),) * k: Z ** k / math.factorial(k) for k in range(truncation + 1)
    })


def coherent_tail_mass(Z: complex, truncation: int) -> float:
    """Probability a coherent state of amplitude Z has more than T photons."""
    lam = abs(Z) ** 2
    if lam == 0:
        return 0.0
    return float(gammainc(truncation + 1, lam))


@dataclass(frozen=True)
class FockPhi:
    """(a+^dagger)^m_plus (a-^dagger)^m_minus."""

    m_plus: int = 0
    m_minus: int = 0

    def polynomial(self) -> OperatorPolynomial:
        if self.m_plus < 0 or self.m_minus < 0:
            raise ValueError("photon numbers must be non-negative")
        return OperatorPolynomial.monomial(1.0, *([(PLUS, True)] * self.m_plus + [(MINUS, True)] * self.m_minus))

    def metadata(self) -> dict:
        return {"variant": "fock", "m_plus": self.m_plus, "m_minus": self.m_minus}


@dataclass(frozen=True)
class CoherentFockPhi:
    """(a_weak^dagger)^m exp(Z a_strong^dagger), truncated at ``truncation`` photons."""

    Z: complex
    m: int = 0
    weak_polarization: int = -1
    truncation: int = 12

    def polynomial(self) -> OperatorPolynomial:
        weak = OperatorPolynomial.monomial(1.0, *([(_photon(self.weak_polarization), True)] * self.m))
        return weak * coherent_polynomial(-self.weak_polarization, self.Z, self.truncation)

    @property
    def tail_amplitude(self) -> float:
        T = self.truncation
        return abs(self.Z) ** (T + 1) / math.sqrt(math.factorial(T + 1))

    @property
    def tail_mass(self) -> float:
        return coherent_tail_mass(self.Z, self.truncation)

    def metadata(self) -> dict:
        return {
            "variant": "coherent_fock",
            "Z": [float(np.real(self.Z)), float(np.imag(self.Z))],
            "m": self.m,
            "weak_polarization": self.weak_polarization,
            "truncation": self.truncation,
            "tail_amplitude": self.tail_amplitude,
            "tail_mass": self.tail_mass,
        }


def _phi_poly(phi) -> OperatorPolynomial:
    if phi is None:
        return OperatorPolynomial.identity()
    poly = phi if isinstance(phi, OperatorPolynomial) else phi.polynomial()
    for k in poly.terms:
        for m, cr in k:
            if m.kind is not ModeKind.PHOTON or not cr:
                raise ValueError("Phi must be a polynomial in photon creation operators only")
    return poly


def _phi_meta(phi) -> dict:
    if phi is None:
        return {"variant": "identity"}
    if isinstance(phi, OperatorPolynomial):
        return {"variant": "polynomial", "terms": len(phi)}
    return phi.metadata()


# ----------------------------------------------------------------------------
# the chain operator


def psi_nc_coefficients(chain: Chain) -> list[ExactCG]:
    """Exact scalar parts of A_1, A_3, ..., A_{2L+1} (sign (-1)^j included)."""
    if chain.kind is ChainKind.ISOLATED_EXCITED:
        raise ValueError("an isolated excited substate carries no ground-state operator")
    L = chain.L
    out = []
    for j in range(L + 1):
        c = ExactCG.one() if j % 2 == 0 else -ExactCG.one()
        for q in range(1, j + 1):
            c = c * chain.G(2 * q, 2 * q - 1)
        for q in range(j + 1, L + 1):
            c = c * chain.G(2 * q, 2 * q + 1)
        out.append(c)
    return out


def psi_nc(chain: Chain, momentum_class: int = 0) -> OperatorPolynomial:
    """The operator Psi for ``chain``, acting on ground modes of one momentum class."""
    L = chain.L
    terms = {}
    for j, c in enumerate(psi_nc_coefficients(chain)):
        b = ModeId(ModeKind.GROUND, chain.mu(2 * j + 1).twice, momentum_class)
        key = ((PLUS, False),) * j + ((MINUS, False),) * (L - j) + ((b, True),)
        terms[key] = float(c)
    return OperatorPolynomial(terms)


def fund_relation_sign(cfg: ModelConfig) -> int:
    """eps in V_Lambda Psi = eps Psi V_Lambda (+ residual that the recurrence cancels).

    Bosons commute; fermions anticommute when ground and excited species
    commute with each other, and commute under the global convention.
    """
    if cfg.statistics is Statistics.FERMI and cfg.convention == "species":
        return -1
    return 1


def verify_fund_relation(
    cfg: ModelConfig,
    chain: Chain,
    n_atoms: int = 1,
    caps: tuple[int, int] = (3, 3),
    psi: OperatorPolynomial | None = None,
) -> float:
    """Norm of V_Lambda Psi - eps Psi V_Lambda on the ``n_atoms`` sector.

    The Frobenius norm (an upper bound on the operator norm) of the
    difference, a map from the n-atom sector into the (n+1)-atom sector
    over the chain's modes.
    """
    cfg1 = ModelConfig(cfg.F_g, cfg.F_e, cfg.omega0, cfg.omega, cfg.Omega, cfg.statistics, 1, cfg.convention)
    modes = cfg1.mode_set(chain)
    psi = psi_nc(chain) if psi is None else psi
    V = build_V_lambda(cfg1, chain)
    D = enumerate_basis(SectorSpec(n_atoms, *caps), modes)
    D1 = enumerate_basis(SectorSpec(n_atoms + 1, *caps), modes)
    lhs = materialize(V, D1, D1).matrix @ materialize(psi, D, D1).matrix
    rhs = materialize(psi, D, D1).matrix @ materialize(V, D, D).matrix
    diff = (lhs - fund_relation_sign(cfg) * rhs).tocsr()
    return float(spla.norm(diff)) if diff.nnz else 0.0


# ----------------------------------------------------------------------------
# state construction


@dataclass(frozen=True)
class GdsRecipe:
    """Everything needed to rebuild one analytic dark state."""

    chain: Chain
    n_per_class: tuple[int, ...] = (1,)
    phi: object = None
    m: int = 0
    mprime: int = 0

    def to_json(self) -> dict:
        return {
            "transition": [str(self.chain.F_g), str(self.chain.F_e)],
            "chain": self.chain.describe(),
            "kind": self.chain.kind.value,
            "L": self.chain.L,
            "n_per_class": list(self.n_per_class),
            "phi": _phi_meta(self.phi),
            "m": self.m,
            "mprime": self.mprime,
        }


def _n_list(n, cfg: ModelConfig) -> tuple[int, ...]:
    ns = (n,) if isinstance(n, int) else tuple(n)
    if any(x < 0 for x in ns):
        raise ValueError("atom numbers must be non-negative")
    if len(ns) > cfg.momentum_classes:
        raise ValueError(
            f"{len(ns)} momentum classes requested but the model has {cfg.momentum_classes}"
        )
    if cfg.statistics is Statistics.FERMI and any(x > 1 for x in ns):
        raise ConstraintViolation(
            "Fermi statistics allow n = 0 or 1 per momentum class since (Psi_NC)^2 = 0"
        )
    return ns


def raw_state(cfg: ModelConfig, chain: Chain, n_per_class, phi_poly: OperatorPolynomial):
    """Unnormalized prod_p Psi(p)^{n_p} Phi |0> and a bound on its amplitudes.

    Returns ``(dict_state, bound)`` where ``bound`` is the norm obtained when
    every coefficient is replaced by its modulus (no cancellations).
    """
    modes = cfg.mode_set()
    ns = _n_list(n_per_class, cfg)
    vac = {modes.vacuum(): 1.0}
    state = apply_to_dict(phi_poly, vac, modes)
    absolute = apply_to_dict(_abs_poly(phi_poly), vac, modes)
    for p in reversed(range(len(ns))):
        psi = psi_nc(chain, p)
        apsi = _abs_poly(psi)
        for _ in range(ns[p]):
            state = apply_to_dict(psi, state, modes)
            absolute = apply_to_dict(apsi, absolute, modes)
    bound = math.sqrt(sum(abs(v) ** 2 for v in absolute.values()))
    cutoff = 1e-14 * max((abs(v) for v in absolute.values()), default=0.0)
    state = {k: v for k, v in state.items() if abs(v) > cutoff}
    return state, bound


def _abs_poly(P: OperatorPolynomial) -> OperatorPolynomial:
    return OperatorPolynomial({k: abs(c) for k, c in P.terms.items()})


def _finish(cfg: ModelConfig, state: dict, bound: float, recipe: GdsRecipe, extra_meta=None, zero_msg=None):
    modes = cfg.mode_set()
    norm = math.sqrt(sum(abs(v) ** 2 for v in state.values()))
    if norm <= ZERO_TOL * max(bound, 1.0) or not state:
        raise ZeroStateError(zero_msg or "construction produced the zero state")
    meta = {"recipe": recipe.to_json(), "raw_norm": norm}
    meta.update(extra_meta or {})
    sv = StateVector.from_dict(modes, state, meta=meta)
    return sv.normalized()


def build_lambda_gds(cfg: ModelConfig, chain: Chain, n=1, phi=None) -> StateVector:
    """prod_p Psi(p)^{n_p} Phi |0> for a Lambda chain, normalized."""
    if chain.kind not in (ChainKind.LAMBDA, ChainKind.ISOLATED_GROUND):
        raise ValueError(f"expected a Lambda chain, got {chain.kind.value}")
    ns = _n_list(n, cfg)
    state, bound = raw_state(cfg, chain, ns, _phi_poly(phi))
    recipe = GdsRecipe(chain, ns, phi)
    return _finish(cfg, state, bound, recipe, _tail_meta(phi))


def _tail_meta(phi) -> dict:
    if isinstance(phi, CoherentFockPhi):
        return {"truncation_tail": phi.tail_amplitude, "truncation_tail_mass": phi.tail_mass}
    return {}


def build_n_gds(cfg: ModelConfig, chain: Chain, n=1, m: int = 0, strong=0) -> StateVector:
    """prod_p Psi(p)^{n_p} (a_c^dagger)^m Phi(a_{-c}^dagger) |0>, with m <= L.

    ``c`` is +1 for an N+ chain and -1 for N-.  ``strong`` is a photon
    number for the unconstrained mode or a photon functional in that mode.
    """
    if chain.kind not in (ChainKind.NPLUS, ChainKind.NMINUS):
        raise ValueError(f"expected an N chain, got {chain.kind.value}")
    c = 1 if chain.kind is ChainKind.NPLUS else -1
    if m > chain.L:
        raise ConstraintViolation(
            f"no dark state: {m} photons in the {'+' if c > 0 else '-'} mode exceed the chain "
            f"length L={chain.L}; the condition is (m ≤ L)"
        )
    if isinstance(strong, int):
        strong = FockPhi(0, strong) if c > 0 else FockPhi(strong, 0)
    strong_poly = _phi_poly(strong)
    if any(mode != _photon(-c) for mode in strong_poly.modes()):
        raise ValueError("the free functional may only contain the unconstrained photon mode")
    weak = OperatorPolynomial.monomial(1.0, *([(_photon(c), True)] * m))
    ns = _n_list(n, cfg)
    state, bound = raw_state(cfg, chain, ns, weak * strong_poly)
    recipe = GdsRecipe(chain, ns, strong, m=m)
    return _finish(cfg, state, bound, recipe, _tail_meta(strong))


def build_v_gds(cfg: ModelConfig, chain: Chain, m: int, mprime: int) -> StateVector:
    """Psi (a+^dagger)^m (a-^dagger)^m' |0>, one atom, m, m' <= L and m + m' > L."""
    if chain.kind is not ChainKind.V:
        raise ValueError(f"expected a V chain, got {chain.kind.value}")
    L = chain.L
    if L == 0:
        raise ConstraintViolation(
            "no admissible photon numbers on a V chain with L=0: (m,m′ ≤ L) and (m+m′) > L "
            "cannot both hold"
        )
    if m > L or mprime > L:
        raise ConstraintViolation(f"m={m}, m′={mprime} violate (m,m′ ≤ L) with L={L}")
    phi = FockPhi(m, mprime)
    state, bound = raw_state(cfg, chain, (1,), phi.polynomial())
    nontrivial = m + mprime > L
    msg = (
        f"m+m′={m + mprime} ≤ L={L}: the state is zero or photon-free; a non-trivial V-chain "
        "dark state needs (m+m′) > L"
    )
    if not nontrivial:
        raise ZeroStateError(msg)
    recipe = GdsRecipe(chain, (1,), phi, m, mprime)
    return _finish(cfg, state, bound, recipe, zero_msg=msg)


def vanishing_check(cfg: ModelConfig, chain: Chain, n: int, m: int, mprime: int) -> bool:
    """True iff Psi^n (a+^dagger)^m (a-^dagger)^m' |0> is the zero vector."""
    if m > chain.L or mprime > chain.L:
        raise ConstraintViolation(f"(m,m′ ≤ L) required, got m={m}, m′={mprime}, L={chain.L}")
    state, bound = raw_state(cfg, chain, (n,), FockPhi(m, mprime).polynomial())
    norm = math.sqrt(sum(abs(v) ** 2 for v in state.values()))
    return norm <= ZERO_TOL * max(bound, 1.0)


def build_polariton(
    cfg: ModelConfig,
    chain: Chain,
    m: int,
    Z: complex = 1.0,
    truncation: int = 12,
    n: int | None = None,
    force_equal_G: bool = False,
) -> StateVector:
    """Psi^n N0 (a-^dagger)^m exp(Z a+^dagger)|0> on an L=1 Lambda chain.

    With ``n == m`` (the default) this is the m-fold excited polariton.
    """
    if chain.kind is not ChainKind.LAMBDA or chain.L != 1:
        raise ValueError("the polariton construction needs a Lambda chain with L=1")
    phi = CoherentFockPhi(Z, m, -1, truncation)
    if phi.tail_mass > TAIL_TOL:
        raise ValueError(
            f"truncation {truncation} too small for |Z|={abs(Z):.3g}: "
            f"neglected coherent mass {phi.tail_mass:.2e} > {TAIL_TOL:g}"
        )
    if force_equal_G:
        chain = chain.with_equal_couplings()
    n = m if n is None else n
    state, bound = raw_state(cfg, chain, (n,), phi.polynomial())
    recipe = GdsRecipe(chain, (n,), phi, m=m)
    extra = _tail_meta(phi)
    extra["force_equal_G"] = force_equal_G
    return _finish(cfg, state, bound, recipe, extra)


def build_gds(cfg: ModelConfig, recipe: GdsRecipe) -> StateVector:
    """Dispatch on the chain kind of ``recipe``."""
    kind = recipe.chain.kind
    if kind in (ChainKind.LAMBDA, ChainKind.ISOLATED_GROUND):
        return build_lambda_gds(cfg, recipe.chain, recipe.n_per_class, recipe.phi)
    if kind in (ChainKind.NPLUS, ChainKind.NMINUS):
        return build_n_gds(cfg, recipe.chain, recipe.n_per_class, recipe.m, recipe.phi or 0)
    if kind is ChainKind.V:
        return build_v_gds(cfg, recipe.chain, recipe.m, recipe.mprime)
    raise ValueError(f"no dark-state recipe for {kind.value} chains")
