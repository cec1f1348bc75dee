"""Brute-force dark-state verification by null spaces of the coupling matrix.

The coupling V raises the number of excited atoms by exactly one, so the
dark space of a sector is the null space of the rectangular map from its
excited-free states into the one-excited states.  V also conserves the
excitation number, the helicity and the atom number of every momentum
class, so the map is block diagonal in those labels and each block is
decomposed separately.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .angular import Chain, ChainKind
from .errors import SectorMismatchError
from .fockspace import (
    SCHEMA_VERSION,
    Basis,
    OperatorPolynomial,
    SectorSpec,
    StateVector,
    enumerate_basis,
    materialize,
)
from .model import ModelConfig, build_V, project_chain

SVD_RTOL = 1e-10
SVD_ATOL = 1e-12


@dataclass
class DarkSubspaceReport:
    sector: SectorSpec
    basis: Basis
    vectors: np.ndarray  # (basis.dim, dimension), orthonormal columns
    residual: float
    tolerance: float
    label: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def states(self) -> list[StateVector]:
        return [StateVector(self.basis, self.vectors[:, k].copy()) for k in range(self.dimension)]

    def project(self, amplitudes: np.ndarray) -> np.ndarray:
        Q = self.vectors
        return Q @ (Q.conj().T @ amplitudes)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "sector": self.sector.to_json(),
            "label": self.label,
            "dimension": self.dimension,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "basis": [state.to_json()["amplitudes"] for state in self.states()],
            "modes": self.basis.modes.to_json(),
        }

    def csv_row(self) -> dict:
        return {
            **{k: self.label.get(k, "") for k in ("transition", "chain")},
            "sector": _sector_text(self.sector),
            "dimension": self.dimension,
            "max_residual": f"{self.residual:.3e}",
        }


def _sector_text(spec: SectorSpec) -> str:
    parts = [f"atoms={spec.n_atoms}", f"caps=({spec.photon_cap_plus},{spec.photon_cap_minus})"]
    if spec.n_exc is not None:
        parts.append(f"n_exc={spec.n_exc}")
    if spec.helicity is not None:
        parts.append(f"helicity2={spec.helicity}")
    if spec.fixed_plus is not None:
        parts.append(f"n+={spec.fixed_plus}")
    if spec.fixed_minus is not None:
        parts.append(f"n-={spec.fixed_minus}")
    if spec.min_photons:
        parts.append(f"min_photons={spec.min_photons}")
    return " ".join(parts)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["transition", "chain", "sector", "dimension", "max_residual"])
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _coupling(cfg: ModelConfig, chain: Chain | None) -> OperatorPolynomial:
    V = build_V(cfg)
    return V if chain is None else project_chain(V, chain, cfg)


def _block_key(modes, occ) -> tuple:
    per_class = [0] * modes.momentum_classes
    for i in modes.ground:
        per_class[modes.modes[i].p] += occ[i]
    return (modes.n_excitations(occ), modes.helicity(occ), tuple(per_class))


def null_space(M: np.ndarray, rtol: float = SVD_RTOL, atol: float = SVD_ATOL) -> np.ndarray:
    """Orthonormal basis of ker M, singular values below rtol*s_max counted as zero."""
    n = M.shape[1]
    if M.shape[0] == 0 or n == 0 or not np.any(M):
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    thresh = rtol * smax if smax > 0 else atol
    rank = int(np.sum(s > thresh))
    return vh[rank:].conj().T


def dark_subspace(
    cfg: ModelConfig,
    sector: SectorSpec,
    chain: Chain | None = None,
    rtol: float = SVD_RTOL,
) -> DarkSubspaceReport:
    """Full dark space of the excited-free part of ``sector``.

    With ``chain`` the mode set and coupling are restricted to that chain.
    """
    sector = replace(sector, restrict_excited_to_zero=True, n_excited=None)
    modes = cfg.mode_set(chain)
    domain = enumerate_basis(sector, modes)
    V = _coupling(cfg, chain)
    full = materialize(V, domain)
    dense_cols = full.matrix.tocsc()

    blocks: dict = {}
    for j, occ in enumerate(domain.states):
        blocks.setdefault(_block_key(modes, occ), []).append(j)

    pieces = []
    for key in sorted(blocks):
        cols = blocks[key]
        sub = dense_cols[:, cols]
        rows = np.unique(sub.indices)
        M = sub[rows, :].toarray() if rows.size else np.zeros((0, len(cols)), dtype=complex)
        ns = null_space(M, rtol)
        if ns.shape[1]:
            Q = np.zeros((domain.dim, ns.shape[1]), dtype=complex)
            Q[cols, :] = ns
            pieces.append(Q)
    vectors = np.hstack(pieces) if pieces else np.zeros((domain.dim, 0), dtype=complex)
    residual = 0.0
    if vectors.shape[1]:
        residual = float(np.max(np.linalg.norm(full.matrix @ vectors, axis=0)))
    label = {"transition": f"{cfg.F_g}->{cfg.F_e}", "chain": chain.describe() if chain else "all"}
    return DarkSubspaceReport(sector, domain, vectors, residual, rtol, label)


@dataclass(frozen=True)
class DarknessCheck:
    dark: bool
    residual: float
    excited_occupancy: float

    def __iter__(self):
        return iter((self.dark, self.residual, self.excited_occupancy))


def is_dark(state: StateVector, cfg: ModelConfig, tol: float = 1e-10, V: OperatorPolynomial | None = None) -> DarknessCheck:
    """Relative residual ||V psi|| / ||psi|| and excited occupancy of ``state``."""
    norm = state.norm()
    if norm == 0:
        raise ValueError("zero vector has no darkness")
    V = build_V(cfg) if V is None else V
    present = state.modes
    V = V.filter(lambda k: all(m in present for m, _ in k))
    image = materialize(V, state.basis).matrix @ state.amplitudes
    residual = float(np.linalg.norm(image)) / norm
    exc = state.excited_occupancy()
    return DarknessCheck(residual <= tol and exc <= tol, residual, exc)


def contains(state: StateVector, report: DarkSubspaceReport, tol: float = 1e-10) -> bool:
    """True iff ``state`` lies in the reported dark space within ``tol``."""
    if state.modes != report.basis.modes:
        raise SectorMismatchError("state and report use different mode sets")
    d = state.as_dict()
    outside = sum(abs(a) ** 2 for s, a in d.items() if s not in report.basis.index)
    v = np.zeros(report.basis.dim, dtype=complex)
    for s, a in d.items():
        j = report.basis.index.get(s)
        if j is not None:
            v[j] = a
    defect = np.sqrt(np.linalg.norm(v - report.project(v)) ** 2 + outside)
    return bool(defect <= tol * state.norm())


def projection_defect(state: StateVector, report: DarkSubspaceReport) -> float:
    """||psi - P psi|| / ||psi|| for the projector onto the reported space."""
    d = state.as_dict()
    v = np.zeros(report.basis.dim, dtype=complex)
    outside = 0.0
    for s, a in d.items():
        j = report.basis.index.get(s)
        if j is None:
            outside += abs(a) ** 2
        else:
            v[j] = a
    return float(np.sqrt(np.linalg.norm(v - report.project(v)) ** 2 + outside) / state.norm())


def chain_sector(chain: Chain, m_plus: int, m_minus: int, n_atoms: int = 1, min_photons: int = 0) -> SectorSpec:
    """Conserved-quantity sector reached by Psi (a+^dagger)^m+ (a-^dagger)^m- |0>.

    One Psi removes L photons, so the sector has n_exc = m+ + m- - L and
    helicity 2*(mu_1 + m+ - m- + L).  Every state of the sector has at
    most m+ (m-) photons, so these caps truncate nothing.
    """
    if chain.kind is ChainKind.ISOLATED_EXCITED:
        raise ValueError("no ground substates in this chain")
    L = chain.L
    if n_atoms != 1:
        raise NotImplementedError("chain sectors are defined for a single atom")
    mu1 = chain.mu(1).twice
    return SectorSpec(
        n_atoms=1,
        photon_cap_plus=m_plus,
        photon_cap_minus=m_minus,
        restrict_excited_to_zero=True,
        helicity=mu1 + 2 * (m_plus - m_minus + L),
        n_exc=m_plus + m_minus - L,
        min_photons=min_photons,
    )


def analytic_count(chain: Chain, m_plus: int, m_minus: int) -> int:
    """Number of independent photon-carrying analytic dark states in :func:`chain_sector`."""
    L = chain.L
    if m_plus + m_minus <= L:
        return 0  # zero or photon-free
    if chain.kind is ChainKind.NPLUS and m_plus > L:
        return 0
    if chain.kind is ChainKind.NMINUS and m_minus > L:
        return 0
    if chain.kind is ChainKind.V and (m_plus > L or m_minus > L):
        return 0
    return 1
