import math

import numpy as np
import pytest
import sympy

from darkstates import gds as G
from darkstates.angular import ChainKind, HalfInt
from darkstates.errors import ConstraintViolation, ZeroStateError
from darkstates.fockspace import MINUS, PLUS, Basis, ModeId, OperatorPolynomial, StateVector, Statistics, apply_to_dict
from darkstates.gds import (
    CoherentFockPhi,
    FockPhi,
    build_gds,
    build_lambda_gds,
    build_n_gds,
    build_polariton,
    build_v_gds,
    psi_nc,
    psi_nc_coefficients,
    vanishing_check,
    verify_fund_relation,
)
from darkstates.model import ModelConfig, build_V_chain, build_V_lambda
from darkstates.oracle import is_dark

TRANSITIONS = [(tg, te) for tg in range(0, 8) for te in (tg - 2, tg, tg + 2) if te >= 0 and (tg, te) != (0, 0)]


def amplitudes(state):
    """{signature: amplitude} of a state."""
    return {state.modes.signature(s): a for s, a in state.as_dict().items()}


def chain_of(cfg, kind, L=None):
    return next(c for c in cfg.chains if c.kind is kind and (L is None or c.L == L))


def exact(c):
    return c.sign * sympy.sqrt(sympy.Rational(c.square.numerator, c.square.denominator))


# ----------------------------------------------------------------------------
# chain operator


def test_psi_l1_form():
    cfg = ModelConfig(2, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 1)
    b1, b3 = (ModeId.ground(ch.mu(k)) for k in (1, 3))
    expect = OperatorPolynomial({
        ((MINUS, False), (b1, True)): float(ch.G(2, 3)),
        ((PLUS, False), (b3, True)): -float(ch.G(2, 1)),
    })
    assert psi_nc(ch).equals(expect)


def test_psi_l0_is_single_creator():
    cfg = ModelConfig(1, 2)
    ch = chain_of(cfg, ChainKind.V, 0)
    assert [str(c) for c in psi_nc_coefficients(ch)] == ["1"]
    (key,) = psi_nc(ch).terms
    assert key == ((ModeId.ground(HalfInt(0)), True),)


@pytest.mark.parametrize("tg,te", TRANSITIONS)
def test_psi_coefficients_solve_recurrence(tg, te):
    """Independent solver: G^{2j}_{2j-1} c_{j-1} + G^{2j}_{2j+1} c_j = 0, c_0 = prod_q G^{2q}_{2q+1}."""
    for ch in ModelConfig(HalfInt(tg), HalfInt(te)).chains:
        if ch.kind is ChainKind.ISOLATED_EXCITED:
            continue
        L = ch.L
        c = [sympy.prod([exact(ch.G(2 * q, 2 * q + 1)) for q in range(1, L + 1)])]
        for j in range(1, L + 1):
            c.append(sympy.nsimplify(-exact(ch.G(2 * j, 2 * j - 1)) * c[-1] / exact(ch.G(2 * j, 2 * j + 1))))
        ours = [exact(x) for x in psi_nc_coefficients(ch)]
        assert all(sympy.simplify(a - b) == 0 for a, b in zip(c, ours)), (tg, te, ch.describe())


LAMBDA_CHAINS = [(2, 1), (1, 1), (2, 2)]


@pytest.mark.parametrize("tr", LAMBDA_CHAINS)
@pytest.mark.parametrize("stat", ["bose", "fermi"])
def test_fund_relation(tr, stat):
    cfg = ModelConfig(*tr, statistics=stat)
    for ch in cfg.chains:
        if ch.kind is ChainKind.LAMBDA:
            assert verify_fund_relation(cfg, ch, 1, (3, 3)) <= 1e-12


def test_fund_relation_global_convention_is_a_commutator():
    cfg = ModelConfig(2, 1, statistics="fermi", convention="global")
    assert G.fund_relation_sign(cfg) == 1
    assert G.fund_relation_sign(ModelConfig(2, 1, statistics="fermi")) == -1
    for ch in cfg.chains:
        assert verify_fund_relation(cfg, ch, 1, (3, 3)) <= 1e-12


def test_fund_relation_detects_corruption():
    cfg = ModelConfig(2, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 2)
    good = psi_nc(ch)
    key = next(iter(good.terms))
    bad = OperatorPolynomial({**good.terms, key: good.terms[key] * 1.1})
    assert verify_fund_relation(cfg, ch, 1, (3, 3), psi=bad) > 1e-3


# ----------------------------------------------------------------------------
# Lambda family


def test_lambda_n0_is_photon_state():
    cfg = ModelConfig(2, 1)
    s = build_lambda_gds(cfg, cfg.chains[0], 0, FockPhi(2, 1))
    assert amplitudes(s) == {"a+=2 a-=1": pytest.approx(1.0)}
    assert is_dark(s, cfg).residual == 0


def test_lambda_l1_example():
    cfg = ModelConfig(2, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 1)
    s = build_lambda_gds(cfg, ch, 1, FockPhi(1, 1))
    amp = amplitudes(s)
    g1, g3 = ModeId.ground(ch.mu(1)).label, ModeId.ground(ch.mu(3)).label
    a, b = float(ch.G(2, 3)), -float(ch.G(2, 1))
    norm = math.hypot(a, b)
    assert amp == {f"{g1}=1 a+=1": pytest.approx(a / norm), f"{g3}=1 a-=1": pytest.approx(b / norm)}
    assert s.meta["raw_norm"] == pytest.approx(norm)
    assert s.meta["recipe"]["kind"] == "Lambda"


def test_lambda_fermi_two_momentum_classes():
    cfg = ModelConfig(2, 1, statistics="fermi", momentum_classes=2)
    ch = chain_of(cfg, ChainKind.LAMBDA, 1)
    s = build_lambda_gds(cfg, ch, (1, 1), FockPhi(2, 2))
    atoms = {sum(o[i] for i in s.modes.atomic) for o in s.as_dict()}
    assert atoms == {2}
    assert is_dark(s, cfg).dark
    with pytest.raises(ConstraintViolation):
        build_lambda_gds(cfg, ch, (2, 0), FockPhi(2, 2))


@pytest.mark.parametrize("tr", [(2, 1), (1, 1), (2, 2), (3, 2)])
def test_lambda_mechanism_vlambda_annihilates_powers(tr):
    cfg = ModelConfig(*tr, statistics="bose")
    modes = cfg.mode_set()
    for ch in cfg.chains:
        if ch.kind is not ChainKind.LAMBDA:
            continue
        VL = build_V_lambda(cfg, ch)
        for n in range(4):
            state, _ = G.raw_state(cfg, ch, (n,), FockPhi(ch.L * n, ch.L * n + 1).polynomial())
            out = apply_to_dict(VL, state, modes)
            scale = math.sqrt(sum(abs(v) ** 2 for v in state.values()))
            assert math.sqrt(sum(abs(v) ** 2 for v in out.values())) <= 1e-12 * scale


@pytest.mark.parametrize("tr", [(1, 1), (2, 1), ("3/2", "3/2"), ("5/2", "3/2"), (1, 2), ("1/2", "1/2")])
def test_fermi_psi_squares_to_zero(tr):
    cfg = ModelConfig(*tr, statistics="fermi")
    for ch in cfg.chains:
        if ch.kind is ChainKind.ISOLATED_EXCITED:
            continue
        assert psi_nc(ch).power(2, Statistics.FERMI).is_zero(1e-15)


def test_classical_limit_matches_coefficient_pattern():
    """Psi on a two-mode coherent state: the atom carries A_j with alpha_s -> Z_s."""
    cfg = ModelConfig(2, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 2)
    zp, zm, T = 1.5, -0.8 + 0.6j, 30
    phi = G.coherent_polynomial(1, zp, T) * G.coherent_polynomial(-1, zm, T)
    s = build_lambda_gds(cfg, ch, 1, phi)
    modes = s.modes
    probs = np.zeros(ch.L + 1)
    for occ, a in s.as_dict().items():
        for j in range(ch.L + 1):
            if occ[modes.index[ModeId.ground(ch.mu(2 * j + 1))]]:
                probs[j] += abs(a) ** 2
    L = ch.L
    pattern = np.array([abs(float(c) * zp ** j * zm ** (L - j)) ** 2 for j, c in enumerate(psi_nc_coefficients(ch))])
    assert np.abs(probs - pattern / pattern.sum()).max() <= 1e-9


# ----------------------------------------------------------------------------
# N family


def test_n_chain_states():
    cfg = ModelConfig("3/2", "3/2")
    ch = chain_of(cfg, ChainKind.NPLUS)
    s = build_n_gds(cfg, ch, 1, 1, 3)
    check = is_dark(s, cfg, 1e-12)
    assert check.dark and check.excited_occupancy == 0
    with pytest.raises(ConstraintViolation, match=r"\(m ≤ L\)"):
        build_n_gds(cfg, ch, 1, 2, 0)
    photons_only = build_n_gds(cfg, ch, 0, 1, 2)
    assert amplitudes(photons_only) == {"a+=1 a-=2": pytest.approx(1.0)}
    nminus = chain_of(cfg, ChainKind.NMINUS)
    assert is_dark(build_n_gds(cfg, nminus, 1, 1, FockPhi(4, 0)), cfg).dark
    coherent = CoherentFockPhi(0.7, 0, weak_polarization=1, truncation=14)
    assert is_dark(build_n_gds(cfg, ch, 1, 1, coherent), cfg).dark


def test_n_chain_rejects_weak_photons_in_free_functional():
    cfg = ModelConfig("3/2", "3/2")
    ch = chain_of(cfg, ChainKind.NPLUS)
    with pytest.raises(ValueError):
        build_n_gds(cfg, ch, 1, 1, FockPhi(1, 1))


# ----------------------------------------------------------------------------
# V family


def test_v_chain_explicit_state():
    cfg = ModelConfig(1, 2)
    ch = chain_of(cfg, ChainKind.V, 1)
    s = build_v_gds(cfg, ch, 1, 1)
    g1, g3 = ModeId.ground(ch.mu(1)).label, ModeId.ground(ch.mu(3)).label
    a, b = float(ch.G(2, 3)), -float(ch.G(2, 1))
    n = math.hypot(a, b)
    assert amplitudes(s) == {f"{g1}=1 a+=1": pytest.approx(a / n), f"{g3}=1 a-=1": pytest.approx(b / n)}
    assert is_dark(s, cfg).residual <= 1e-12


def test_v_chain_constraints():
    cfg = ModelConfig(1, 2)
    ch = chain_of(cfg, ChainKind.V, 1)
    with pytest.raises(ZeroStateError, match=r"\(m\+m′\) > L"):
        build_v_gds(cfg, ch, 1, 0)
    with pytest.raises(ConstraintViolation, match=r"\(m,m′ ≤ L\)"):
        build_v_gds(cfg, ch, 2, 1)
    with pytest.raises(ConstraintViolation):
        build_v_gds(cfg, chain_of(cfg, ChainKind.V, 0), 0, 1)


def test_vanishing_examples():
    cfg = ModelConfig(1, 2)
    ch = chain_of(cfg, ChainKind.V, 1)
    assert vanishing_check(cfg, ch, 3, 1, 1)
    assert not vanishing_check(cfg, ch, 1, 1, 1)
    state, _ = G.raw_state(cfg, ch, (2,), FockPhi(1, 1).polynomial())
    modes = cfg.mode_set()
    assert all(o[modes.iplus] == 0 and o[modes.iminus] == 0 for o in state)
    with pytest.raises(ConstraintViolation):
        vanishing_check(cfg, ch, 3, 2, 0)


# ----------------------------------------------------------------------------
# polariton


def test_polariton_states():
    cfg = ModelConfig(2, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 1)
    vac_like = build_polariton(cfg, ch, 0, 1.0, 12, n=0)
    assert all(o[vac_like.modes.iminus] == 0 and not any(o[i] for i in vac_like.modes.atomic) for o in vac_like.as_dict())
    assert is_dark(vac_like, cfg).residual == 0
    assert vac_like.meta["truncation_tail_mass"] < 1e-10

    cfg = ModelConfig(1, 1)
    ch = chain_of(cfg, ChainKind.LAMBDA, 1)
    V_eq = build_V_chain(cfg, ch.with_equal_couplings())
    states = [build_polariton(cfg, ch, m, 1.0, 12, force_equal_G=True) for m in range(3)]
    for s in states:
        assert is_dark(s, cfg, 1e-10, V=V_eq).dark
    gram = np.array([[a.inner(b) for b in states] for a in states])
    assert np.abs(gram - np.eye(3)).max() <= 1e-10


def test_polariton_guards():
    cfg = ModelConfig(2, 1)
    with pytest.raises(ValueError, match="truncation"):
        build_polariton(cfg, chain_of(cfg, ChainKind.LAMBDA, 1), 1, 3.0, 5)
    with pytest.raises(ValueError):
        build_polariton(cfg, chain_of(cfg, ChainKind.LAMBDA, 2), 1)


def test_build_gds_dispatch_and_superposition():
    cfg = ModelConfig(2, 2)
    lam = chain_of(cfg, ChainKind.LAMBDA)
    a = build_gds(cfg, G.GdsRecipe(lam, (1,), FockPhi(3, 1)))
    b = build_gds(cfg, G.GdsRecipe(lam, (1,), FockPhi(2, 2)))
    union = Basis.from_states(a.modes, set(a.basis.states) | set(b.basis.states))
    rng = np.random.default_rng(3)
    for _ in range(20):
        c1, c2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        mix = StateVector(union, c1 * a.embed(union).amplitudes + c2 * b.embed(union).amplitudes)
        assert is_dark(mix, cfg).dark
    v = chain_of(cfg, ChainKind.V)
    assert build_gds(cfg, G.GdsRecipe(v, (1,), None, 1, 1)).meta["recipe"]["kind"] == "V"
