"""Atom-field operators for an F_g -> F_e transition in two circular modes.

Units: hbar = 1.  The coupling ``V`` annihilates a ground atom and a
photon and creates an excited atom; ``H_int = V + V^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .angular import Chain, ChainKind, HalfInt, Role, clebsch_gordan, decompose_chains
from .errors import SectorMismatchError
from .fockspace import (
    MINUS,
    PLUS,
    ModeId,
    ModeKind,
    ModeSet,
    OperatorPolynomial,
    Statistics,
)


@dataclass(frozen=True)
class ModelConfig:
    F_g: HalfInt
    F_e: HalfInt
    omega0: float = 1.0
    omega: float = 1.0
    Omega: float = 1.0
    statistics: Statistics | None = None
    momentum_classes: int = 1
    convention: str = "species"

    def __post_init__(self):
        object.__setattr__(self, "F_g", HalfInt.of(self.F_g))
        object.__setattr__(self, "F_e", HalfInt.of(self.F_e))
        if self.statistics is None:
            object.__setattr__(self, "statistics", Statistics.default_for(self.F_g))
        else:
            object.__setattr__(self, "statistics", Statistics(self.statistics))
        if self.Omega == 0:
            raise ValueError("Omega must be non-zero")
        if self.momentum_classes < 1:
            raise ValueError("momentum_classes must be >= 1")

    @property
    def chains(self) -> list[Chain]:
        return decompose_chains(self.F_g, self.F_e)

    def mode_set(self, chain: Chain | None = None) -> ModeSet:
        return ModeSet.for_transition(
            self.F_g, self.F_e, self.statistics, self.momentum_classes, self.convention, chain
        )


def _mus(F: HalfInt):
    return range(-F.twice, F.twice + 1, 2)


def build_Ha(cfg: ModelConfig) -> OperatorPolynomial:
    """omega0 * sum over excited modes of c^dagger c."""
    return OperatorPolynomial({
        ((ModeId(ModeKind.EXCITED, mu), True), (ModeId(ModeKind.EXCITED, mu), False)): cfg.omega0
        for mu in _mus(cfg.F_e)
    })


def build_Hph(cfg: ModelConfig) -> OperatorPolynomial:
    return OperatorPolynomial({((a, True), (a, False)): cfg.omega for a in (PLUS, MINUS)})


def build_N_excited(cfg: ModelConfig) -> OperatorPolynomial:
    m = ModeId
    return OperatorPolynomial({
        ((m(ModeKind.EXCITED, mu), True), (m(ModeKind.EXCITED, mu), False)): 1.0 for mu in _mus(cfg.F_e)
    })


def build_V(cfg: ModelConfig) -> OperatorPolynomial:
    """Sum of Omega * CG * c^dagger_{mu_e} b_{mu_g} alpha_s over sigma+/- links."""
    terms = {}
    for tmu in _mus(cfg.F_g):
        mu_g = HalfInt(tmu)
        for s in (1, -1):
            mu_e = mu_g + s
            if abs(mu_e.twice) > cfg.F_e.twice or cfg.F_g.twice + cfg.F_e.twice < 2:
                continue
            G = clebsch_gordan(cfg.F_g, mu_g, 1, s, cfg.F_e, mu_e)
            if not G:
                continue
            for p in range(cfg.momentum_classes):
                key = (
                    (ModeId(ModeKind.EXCITED, mu_e.twice), True),
                    (ModeId(ModeKind.GROUND, mu_g.twice, p), False),
                    (ModeId.photon(s), False),
                )
                terms[key] = cfg.Omega * float(G)
    return OperatorPolynomial(terms)


def _in_chain(mode: ModeId, chain: Chain) -> bool:
    if mode.kind is ModeKind.PHOTON:
        return True
    role = Role.GROUND if mode.kind is ModeKind.GROUND else Role.EXCITED
    return chain.contains(role, HalfInt(mode.mu))


def project_chain(V: OperatorPolynomial, chain: Chain, cfg: ModelConfig | None = None) -> OperatorPolynomial:
    """Monomials of ``V`` whose atomic modes all belong to ``chain``."""
    if cfg is not None and (cfg.F_g, cfg.F_e) != (chain.F_g, chain.F_e):
        raise SectorMismatchError(f"chain belongs to {chain.F_g}->{chain.F_e}, not {cfg.F_g}->{cfg.F_e}")
    for k in V.terms:
        for m, _ in k:
            if m.kind is ModeKind.GROUND and abs(m.mu) > chain.F_g.twice:
                raise SectorMismatchError("operator uses modes outside the chain's transition")
            if m.kind is ModeKind.EXCITED and abs(m.mu) > chain.F_e.twice:
                raise SectorMismatchError("operator uses modes outside the chain's transition")
    return V.filter(lambda k: all(_in_chain(m, chain) for m, _ in k))


def build_V_lambda(cfg: ModelConfig, chain: Chain) -> OperatorPolynomial:
    """Part of the chain coupling joining ground labels 1..2L+1 (the maximal Lambda sub-chain)."""
    if chain.kind is ChainKind.ISOLATED_EXCITED:
        return OperatorPolynomial()
    lam = {(Role.GROUND, chain.mu(l)) for l in range(1, 2 * chain.L + 2, 2)}
    lam |= {(Role.EXCITED, chain.mu(l)) for l in range(2, 2 * chain.L + 1, 2)}

    def keep(k):
        for m, _ in k:
            if m.kind is ModeKind.PHOTON:
                continue
            role = Role.GROUND if m.kind is ModeKind.GROUND else Role.EXCITED
            if (role, HalfInt(m.mu)) not in lam:
                return False
        return True

    return project_chain(build_V(cfg), chain, cfg).filter(keep)


def build_H(cfg: ModelConfig) -> OperatorPolynomial:
    V = build_V(cfg)
    return build_Ha(cfg) + build_Hph(cfg) + V + V.dagger()


def build_V_chain(cfg: ModelConfig, chain: Chain) -> OperatorPolynomial:
    """Coupling assembled from ``chain``'s own coefficients.

    Equals ``project_chain(build_V(cfg), chain)`` for an unmodified chain;
    for a chain with overridden couplings it is the matching coupling.
    """
    if (cfg.F_g, cfg.F_e) != (chain.F_g, chain.F_e):
        raise SectorMismatchError(f"chain belongs to {chain.F_g}->{chain.F_e}, not {cfg.F_g}->{cfg.F_e}")
    terms = {}
    for c in chain.couplings:
        e = ModeId(ModeKind.EXCITED, chain.mu(c.excited).twice)
        for p in range(cfg.momentum_classes):
            g = ModeId(ModeKind.GROUND, chain.mu(c.ground).twice, p)
            terms[((e, True), (g, False), (ModeId.photon(c.s), False))] = cfg.Omega * float(c.G)
    return OperatorPolynomial(terms)
