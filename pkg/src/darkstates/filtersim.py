"""Quantum-jump toy model of light filtering by an N-chain medium.

A single atom (or a few) exchanges photons with the two circular modes.
Spontaneous emission into all other modes is a jump that removes one
excitation from the system; the weak-mode photon number shrinks until the
atom-field state becomes dark and scattering stops.

Dynamics are written in the frame rotating at the field frequency: the
no-jump generator is

    H_eff = (omega0 - omega) N_excited + V + V^dagger - (i/2) Gamma N_excited,

which differs from H_a + H_ph + V + V^dagger - (i/2) Gamma N_excited by
omega * N_exc, a constant between jumps.  Jump operators are
sqrt(Gamma) * CG(F_g mu_g, 1 q | F_e mu_e) b^dagger_{mu_g} c_{mu_e}.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .angular import HalfInt, clebsch_gordan, parse_transition
from .fockspace import (
    SCHEMA_VERSION,
    ModeId,
    OperatorPolynomial,
    SectorSpec,
    StateVector,
    enumerate_basis,
    materialize,
)
from .model import ModelConfig, build_N_excited, build_V

STABILITY = 0.05


@dataclass(frozen=True)
class FilterConfig:
    transition: str = "3/2:3/2"
    atom_mu: str = "-3/2"
    atoms: int = 1
    n_plus: int = 3
    n_minus: int = 5
    weak_polarization: int = 1
    gamma: float = 1.0
    Omega: float = 1.0
    detuning: float = 0.0
    t_max: float = 50.0
    dt: float | None = None
    trajectories: int = 200
    seed: int = 12345
    sample_dt: float = 0.5
    converge_tol: float = 1e-8
    max_states: int = 20_000

    def __post_init__(self):
        parse_transition(self.transition)
        HalfInt.of(self.atom_mu)
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")
        if self.gamma <= 0 or self.t_max <= 0:
            raise ValueError("gamma and t_max must be positive")
        if self.weak_polarization not in (1, -1):
            raise ValueError("weak_polarization must be +1 or -1")
        if min(self.n_plus, self.n_minus, self.atoms) < 0:
            raise ValueError("photon numbers and atom count must be non-negative")

    @classmethod
    def from_text(cls, text: str) -> "FilterConfig":
        """Parse flat ``key = value`` lines (``#`` starts a comment)."""
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        parser.optionxform = str
        parser.read_string("[filter]\n" + text)
        raw = dict(parser["filter"])
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in raw.items():
            if key not in types:
                raise ValueError(f"unknown filter config key {key!r}")
            kwargs[key] = _coerce(key, value, types[key])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "FilterConfig":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = []
        for k, v in asdict(self).items():
            lines.append(f"{k} = {'auto' if v is None else v}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data) -> "FilterConfig":
        return cls(**data)


def _coerce(key, value: str, typ):
    value = value.strip()
    typ = str(typ)
    if key == "dt":
        return None if value.lower() in ("auto", "none", "") else float(value)
    if typ.startswith("int"):
        return int(value)
    if typ.startswith("float"):
        return float(value)
    return value


@dataclass
class TrajectoryRecord:
    index: int
    jumps: list = field(default_factory=list)  # (t, mu_e2, mu_g2, q)
    n_exc: list = field(default_factory=list)  # N_exc before the first jump and after each jump
    helicity: list = field(default_factory=list)
    times: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    weak_mean: list = field(default_factory=list)
    final_state: StateVector | None = None
    weak_distribution: dict = field(default_factory=dict)
    converged: bool = False
    final_residual: float = math.inf
    immediately_dark: bool = False

    @property
    def jump_count(self) -> int:
        return len(self.jumps)

    def weak_support(self, threshold: float = 1e-12) -> int:
        return max((m for m, p in self.weak_distribution.items() if p > threshold), default=0)

    def timeseries_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "darkness_residual", "mean_weak_photons"])
        for row in zip(self.times, self.residuals, self.weak_mean):
            w.writerow([f"{row[0]:.6g}", f"{row[1]:.6e}", f"{row[2]:.10g}"])
        return buf.getvalue()


class FilterSystem:
    """Basis and matrices shared by all trajectories of one configuration.

    H_eff conserves the excitation number and the helicity, so the state is
    propagated inside one such block at a time; a jump moves it to the
    block with one excitation less and helicity shifted by -q.
    """

    def __init__(self, cfg: FilterConfig):
        self.cfg = cfg
        Fg, Fe = parse_transition(cfg.transition)
        self.model = ModelConfig(Fg, Fe, Omega=cfg.Omega, statistics="bose")
        modes = self.model.mode_set()
        self.modes = modes
        n0 = cfg.n_plus + cfg.n_minus
        spec = SectorSpec(cfg.atoms, n0, n0)
        basis = enumerate_basis(spec, modes, limit=cfg.max_states)
        # states carrying more excitations than the initial state are unreachable
        basis = type(basis)(modes, [s for s in basis.states if modes.n_excitations(s) <= n0], spec)
        self.basis = basis
        V = build_V(self.model)
        self.V = materialize(V, basis, basis).matrix.tocsc()
        Ne = materialize(build_N_excited(self.model), basis, basis).matrix
        Hc = materialize(V + V.dagger(), basis, basis).matrix
        H_eff = (cfg.detuning * Ne + Hc - 0.5j * cfg.gamma * Ne).tocsc()
        self.h_norm = float(max(np.linalg.norm(H_eff[:, i][i, :].toarray(), 2) for i in self._block_lists()))
        if cfg.dt is None:
            steps = math.ceil(cfg.t_max * max(self.h_norm, 1e-12) / STABILITY)
            self.dt = cfg.t_max / steps
        else:
            self.dt = cfg.dt
            if self.dt * self.h_norm > STABILITY:
                raise ValueError(
                    f"dt={self.dt} violates dt*||H_eff|| <= {STABILITY} (||H_eff|| = {self.h_norm:.3g})"
                )
        self.steps = int(round(cfg.t_max / self.dt))

        self.blocks = {}
        for key, idx in self._blocks.items():
            idx = np.array(idx)
            U = sla.expm(-1j * H_eff[:, idx][idx, :].toarray() * self.dt)
            self.blocks[key] = (idx, U, self.V[:, idx])
        self.channels = []
        self.jump_ops = []
        for tme in range(-Fe.twice, Fe.twice + 1, 2):
            for q in (-1, 0, 1):
                tmg = tme - 2 * q
                if abs(tmg) > Fg.twice:
                    continue
                G = clebsch_gordan(Fg, HalfInt(tmg), 1, q, Fe, HalfInt(tme))
                if not G:
                    continue
                op = OperatorPolynomial.monomial(
                    math.sqrt(cfg.gamma) * float(G),
                    (ModeId.ground(HalfInt(tmg)), True),
                    (ModeId.excited(HalfInt(tme)), False),
                )
                self.channels.append((tme, tmg, q))
                self.jump_ops.append(materialize(op, basis, basis).matrix.tocsc())
        self.weak_index = modes.iplus if cfg.weak_polarization > 0 else modes.iminus
        states = np.array(basis.states)
        self.weak_n = states[:, self.weak_index].astype(float)
        self.excited_n = states[:, list(modes.excited)].sum(axis=1).astype(float)

    def _block_lists(self):
        blocks: dict = {}
        for j, occ in enumerate(self.basis.states):
            blocks.setdefault(self.key(occ), []).append(j)
        self._blocks = blocks
        return [np.array(v) for v in blocks.values()]

    def key(self, occ) -> tuple[int, int]:
        return self.modes.n_excitations(occ), self.modes.helicity(occ)

    def initial_state(self, state: StateVector | None = None) -> tuple[tuple, np.ndarray]:
        """Block key and local amplitudes of the configured Fock state, or of ``state``."""
        if state is None:
            occ = [0] * len(self.modes)
            if self.cfg.atoms:
                occ[self.modes.index[ModeId.ground(HalfInt.of(self.cfg.atom_mu))]] = self.cfg.atoms
            occ[self.modes.iplus] = self.cfg.n_plus
            occ[self.modes.iminus] = self.cfg.n_minus
            amps = {tuple(occ): 1.0}
        else:
            amps = state.remap(self.modes).as_dict()
        keys = {self.key(o) for o in amps}
        if len(keys) != 1:
            raise ValueError("initial state must have definite excitation number and helicity")
        (key,) = keys
        idx = self.blocks[key][0]
        psi = np.zeros(len(idx), dtype=complex)
        for o, a in amps.items():
            j = self.basis.index.get(o)
            if j is None:
                raise ValueError(f"initial component {self.modes.signature(o)} lies outside the simulated space")
            psi[int(np.flatnonzero(idx == j)[0])] = a
        return key, psi / np.linalg.norm(psi)

    def full(self, key, psi) -> np.ndarray:
        out = np.zeros(self.basis.dim, dtype=complex)
        out[self.blocks[key][0]] = psi
        return out

    def darkness(self, key, psi: np.ndarray) -> float:
        """max(||V psi||, <N_excited>) for normalized psi."""
        idx, _, Vb = self.blocks[key]
        p = np.abs(psi) ** 2
        return max(float(np.linalg.norm(Vb @ psi)), float(p @ self.excited_n[idx]))

    def weak_mean(self, key, psi) -> float:
        return float(np.abs(psi) ** 2 @ self.weak_n[self.blocks[key][0]])


def run_trajectory(
    cfg: FilterConfig,
    seed,
    system: FilterSystem | None = None,
    index: int = 0,
    initial: StateVector | None = None,
) -> TrajectoryRecord:
    """One quantum-jump trajectory; ``seed`` is an int or a numpy SeedSequence.

    ``initial`` replaces the configured Fock state by a prepared state.

    Each step draws one uniform from a dedicated stream and channel choices
    come from a second stream, so runs with a longer ``t_max`` extend
    shorter ones with identical histories.
    """
    system = system or FilterSystem(cfg)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    step_ss, chan_ss = ss.spawn(2)
    step_rng, chan_rng = np.random.default_rng(step_ss), np.random.default_rng(chan_ss)
    key, psi = system.initial_state(initial)
    rec = TrajectoryRecord(index)
    rec.n_exc.append(key[0])
    rec.helicity.append(key[1])
    sample_every = max(1, int(round(cfg.sample_dt / system.dt)))
    stop_tol = cfg.converge_tol * 1e-4
    rec.immediately_dark = system.darkness(key, psi) <= cfg.converge_tol

    def sample(t):
        rec.times.append(t)
        rec.residuals.append(system.darkness(key, psi))
        rec.weak_mean.append(system.weak_mean(key, psi))

    sample(0.0)
    t = 0.0
    chunk = np.empty(0)
    for step in range(1, system.steps + 1):
        if (step - 1) % 4096 == 0:
            chunk = step_rng.random(4096)
        r = chunk[(step - 1) % 4096]
        idx, U, _ = system.blocks[key]
        new = U @ psi
        p_stay = float(np.vdot(new, new).real)
        if r < 1.0 - p_stay:
            images = [D[:, idx] @ psi for D in system.jump_ops]
            weights = np.array([np.vdot(v, v).real for v in images])
            k = int(chan_rng.choice(len(weights), p=weights / weights.sum()))
            target = images[k]
            j0 = int(np.argmax(np.abs(target)))
            key = system.key(system.basis.states[j0])
            psi = target[system.blocks[key][0]]
            psi = psi / np.linalg.norm(psi)
            rec.jumps.append((step * system.dt, *system.channels[k]))
            rec.n_exc.append(key[0])
            rec.helicity.append(key[1])
        else:
            psi = new / math.sqrt(p_stay)
        t = step * system.dt
        if step % sample_every == 0:
            sample(t)
            if rec.residuals[-1] <= stop_tol:
                break
    if rec.times[-1] != t:
        sample(t)
    rec.final_residual = system.darkness(key, psi)
    rec.converged = rec.final_residual <= cfg.converge_tol
    rec.final_state = StateVector(system.basis, system.full(key, psi))
    rec.weak_distribution = rec.final_state.photon_distribution(cfg.weak_polarization)
    return rec


@dataclass
class EnsembleSummary:
    config: FilterConfig
    records: list
    support_threshold: float = 1e-12

    @property
    def converged(self) -> list:
        return [r for r in self.records if r.converged]

    @property
    def convergence_fraction(self) -> float:
        return len(self.converged) / len(self.records)

    @property
    def mean_jumps(self) -> float:
        return float(np.mean([r.jump_count for r in self.records]))

    def weak_histogram(self, converged_only: bool = True) -> dict[int, float]:
        """Mean final weak-mode photon distribution over converged (or all) trajectories."""
        recs = self.converged if converged_only else self.records
        hist: dict[int, float] = {}
        for r in recs:
            for m, p in r.weak_distribution.items():
                hist[m] = hist.get(m, 0.0) + p / len(recs)
        return dict(sorted(hist.items()))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_json(),
            "trajectories": len(self.records),
            "convergence_fraction": self.convergence_fraction,
            "mean_jumps": self.mean_jumps,
            "weak_histogram": {str(m): round(p, 12) for m, p in self.weak_histogram().items()},
            "weak_histogram_all": {str(m): round(p, 12) for m, p in self.weak_histogram(False).items()},
            "max_weak_support": max((r.weak_support(self.support_threshold) for r in self.converged), default=None),
            "jump_counts": [r.jump_count for r in self.records],
            "final_residuals": [float(f"{r.final_residual:.6e}") for r in self.records],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def run_ensemble(cfg: FilterConfig) -> EnsembleSummary:
    """Independent trajectories with seeds spawned from ``cfg.seed``."""
    system = FilterSystem(cfg)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trajectories)
    records = [run_trajectory(cfg, s, system, i) for i, s in enumerate(seeds)]
    return EnsembleSummary(cfg, records)
