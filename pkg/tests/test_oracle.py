import json

import numpy as np
import pytest

from darkstates.angular import ChainKind, HalfInt
from darkstates.errors import SectorMismatchError
from darkstates.fockspace import ModeId, SectorSpec, StateVector, enumerate_basis
from darkstates.gds import FockPhi, build_lambda_gds, build_n_gds, build_v_gds
from darkstates.model import ModelConfig
from darkstates.oracle import (
    analytic_count,
    chain_sector,
    contains,
    dark_subspace,
    is_dark,
    null_space,
    projection_defect,
    reports_to_csv,
)


def chain_of(cfg, kind, L=None):
    return next(c for c in cfg.chains if c.kind is kind and (L is None or c.L == L))


def test_no_atoms_everything_dark():
    rep = dark_subspace(ModelConfig(2, 1), SectorSpec(0, 2, 2))
    assert rep.dimension == 9
    assert rep.residual == 0


def test_null_space_thresholds():
    M = np.array([[1.0, 0.0, 0.0], [0.0, 1e-12, 0.0]])
    assert null_space(M).shape[1] == 2
    assert null_space(np.zeros((2, 3))).shape[1] == 3


def test_v_chain_example_contains_explicit_state():
    cfg = ModelConfig(1, 2)
    ch = chain_of(cfg, ChainKind.V, 1)
    rep = dark_subspace(cfg, chain_sector(ch, 1, 1), ch)
    assert rep.dimension == 1
    s = build_v_gds(cfg, ch, 1, 1).remap(cfg.mode_set(ch))
    assert contains(s, rep)
    assert projection_defect(s, rep) <= 1e-10


def test_n_chain_weak_mode_overflow_has_no_dark_states():
    cfg = ModelConfig("3/2", "3/2")
    ch = chain_of(cfg, ChainKind.NPLUS)
    rep = dark_subspace(cfg, SectorSpec(1, 2, 3, fixed_plus=2), ch)
    assert rep.basis.dim > 0 and rep.dimension == 0
    for mm in range(4):
        assert dark_subspace(cfg, chain_sector(ch, ch.L + 1, mm, min_photons=1), ch).dimension == 0
    # and the allowed case is populated
    assert dark_subspace(cfg, chain_sector(ch, 1, 3), ch).dimension == 1


def test_negative_controls_v_chain():
    for tr in [(1, 2), (2, 3)]:
        cfg = ModelConfig(*tr)
        for ch in cfg.chains:
            if ch.kind is not ChainKind.V:
                continue
            for m in range(ch.L + 1):
                for mp in range(ch.L + 1 - m):
                    rep = dark_subspace(cfg, chain_sector(ch, m, mp, min_photons=1), ch)
                    assert rep.dimension == 0


def test_is_dark_examples():
    cfg = ModelConfig(2, 1)
    modes = cfg.mode_set()
    check = is_dark(StateVector.vacuum(modes), cfg)
    assert check.dark and check.residual == 0
    occ = [0] * len(modes)
    occ[modes.index[ModeId.ground(HalfInt(-2))]] = 1
    occ[modes.iplus] = 1
    bright = StateVector.from_dict(modes, {tuple(occ): 1.0})
    assert not is_dark(bright, cfg).dark
    ch = chain_of(cfg, ChainKind.LAMBDA, 2)
    assert is_dark(build_lambda_gds(cfg, ch, 1, FockPhi(2, 1)), cfg).dark
    with pytest.raises(ValueError):
        is_dark(StateVector(bright.basis, [0.0]), cfg)


def test_contains_examples():
    cfg = ModelConfig(2, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 2)
    rep = dark_subspace(cfg, chain_sector(ch, 2, 1), ch)
    for v in rep.states():
        assert contains(v, rep)
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.normal(size=rep.basis.dim) + 1j * rng.normal(size=rep.basis.dim)
        r = StateVector(rep.basis, x)
        assert not contains(r, rep)
        assert projection_defect(r, rep) > 10 * 1e-10
    s = build_lambda_gds(cfg, ch, 1, FockPhi(2, 1)).remap(cfg.mode_set(ch))
    assert contains(s, rep)
    with pytest.raises(SectorMismatchError):
        contains(build_lambda_gds(cfg, ch, 1, FockPhi(2, 1)), rep)


def test_report_invariants_and_serialization():
    cfg = ModelConfig(2, 2)
    rep = dark_subspace(cfg, SectorSpec(1, 2, 2))
    assert rep.residual <= rep.tolerance
    for v in rep.states():
        assert v.excited_occupancy() == 0
    Q = rep.vectors
    assert np.abs(Q.conj().T @ Q - np.eye(rep.dimension)).max() <= 1e-12
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["dimension"] == rep.dimension and doc["schema_version"] == 1
    again = dark_subspace(cfg, SectorSpec(1, 2, 2))
    assert np.array_equal(again.vectors, rep.vectors)
    assert reports_to_csv([rep]).splitlines()[0] == "transition,chain,sector,dimension,max_residual"


def _constructions(cfg, ch, mp, mm):
    """Every analytic single-atom construction landing in chain_sector(ch, mp, mm)."""
    if ch.kind in (ChainKind.LAMBDA, ChainKind.ISOLATED_GROUND) and mp + mm >= ch.L:
        yield build_lambda_gds(cfg, ch, 1, FockPhi(mp, mm))
    elif ch.kind is ChainKind.NPLUS and mp <= ch.L and mp + mm > ch.L:
        yield build_n_gds(cfg, ch, 1, mp, mm)
    elif ch.kind is ChainKind.NMINUS and mm <= ch.L and mp + mm > ch.L:
        yield build_n_gds(cfg, ch, 1, mm, mp)
    elif ch.kind is ChainKind.V and mp <= ch.L and mm <= ch.L and mp + mm > ch.L:
        yield build_v_gds(cfg, ch, mp, mm)


@pytest.mark.parametrize("tr", [(tg, te) for tg in range(0, 6) for te in (tg - 2, tg, tg + 2) if 0 <= te <= 5 and (tg, te) != (0, 0)])
def test_constructions_agree_with_oracle(tr):
    cfg = ModelConfig(HalfInt(tr[0]), HalfInt(tr[1]), statistics="bose")
    for ch in cfg.chains:
        if ch.kind is ChainKind.ISOLATED_EXCITED:
            continue
        modes = cfg.mode_set(ch)
        for mp in range(4):
            for mm in range(4):
                rep = dark_subspace(cfg, chain_sector(ch, mp, mm, min_photons=1), ch)
                assert rep.dimension == analytic_count(ch, mp, mm)
                for s in _constructions(cfg, ch, mp, mm):
                    if s.photon_number() == 0:
                        continue
                    assert contains(s.remap(modes), rep)


def test_chain_sector_rejects_unsupported():
    cfg = ModelConfig(0, 1)
    iso = chain_of(cfg, ChainKind.ISOLATED_EXCITED)
    with pytest.raises(ValueError):
        chain_sector(iso, 0, 0)
    with pytest.raises(NotImplementedError):
        chain_sector(cfg.chains[0], 1, 1, n_atoms=2)


def test_basis_of_chain_sector_has_no_excited_atoms():
    cfg = ModelConfig(1, 2)
    ch = chain_of(cfg, ChainKind.V, 1)
    b = enumerate_basis(chain_sector(ch, 1, 1), cfg.mode_set(ch))
    assert all(not any(o[i] for i in b.modes.excited) for o in b.states)
