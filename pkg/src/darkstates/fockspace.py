"""Occupation-number bases, ladder-operator polynomials and sparse matrices.

Mode order
----------
Every mode has a fixed global position: ground modes ascending by
(momentum class, mu), then excited modes ascending by mu, then the photon
modes s=+1 and s=-1.  Occupation tuples follow this order and fermionic
signs are counted relative to it.

Fermionic conventions
---------------------
Photons are always bosons.  With Fermi statistics two conventions are
supported for the atomic modes:

``"species"`` (default)
    ground operators anticommute among themselves, excited operators among
    themselves, and ground and excited operators commute.  This is the
    convention under which ``V Psi = -Psi V`` holds for the dark-state
    construction operator.
``"global"``
    all atomic operators mutually anticommute (one Jordan-Wigner string
    over the global order).

Dark states are the same in both conventions up to signs of amplitudes.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .angular import Chain, HalfInt, Role
from .errors import (
    CapacityError,
    CapOverflowError,
    OutOfSectorError,
    SectorMismatchError,
)

SCHEMA_VERSION = 1
DEFAULT_BASIS_LIMIT = 200_000
ZERO_DROP = 1e-15

CONVENTIONS = ("species", "global")


class Statistics(str, Enum):
    BOSE = "bose"
    FERMI = "fermi"

    @classmethod
    def default_for(cls, F_g) -> "Statistics":
        """Fermi for half-integer ground angular momentum, Bose otherwise."""
        return cls.FERMI if HalfInt.of(F_g).twice % 2 else cls.BOSE


class ModeKind(str, Enum):
    GROUND = "ground"
    EXCITED = "excited"
    PHOTON = "photon"


_KIND_RANK = {ModeKind.GROUND: 0, ModeKind.EXCITED: 1, ModeKind.PHOTON: 2}


@dataclass(frozen=True)
class ModeId:
    """A single bosonic or fermionic mode.

    ``mu`` is stored doubled (``mu=-1`` means -1/2).  ``p`` labels the
    momentum class of ground modes; ``s`` the photon helicity.
    """

    kind: ModeKind
    mu: int = 0
    p: int = 0
    s: int = 0

    @classmethod
    def ground(cls, mu, p: int = 0) -> "ModeId":
        return cls(ModeKind.GROUND, HalfInt.of(mu).twice, p, 0)

    @classmethod
    def excited(cls, mu) -> "ModeId":
        return cls(ModeKind.EXCITED, HalfInt.of(mu).twice, 0, 0)

    @classmethod
    def photon(cls, s: int) -> "ModeId":
        if s not in (1, -1):
            raise ValueError("photon helicity must be +1 or -1")
        return cls(ModeKind.PHOTON, 0, 0, s)

    @property
    def sort_key(self) -> tuple:
        return (_KIND_RANK[self.kind], self.p, self.mu, -self.s)

    @property
    def is_atomic(self) -> bool:
        return self.kind is not ModeKind.PHOTON

    def __lt__(self, other: "ModeId") -> bool:
        return self.sort_key < other.sort_key

    @property
    def label(self) -> str:
        if self.kind is ModeKind.PHOTON:
            return "a+" if self.s > 0 else "a-"
        mu = HalfInt(self.mu).signed()
        if self.kind is ModeKind.GROUND:
            return f"g{self.p}:{mu}"
        return f"e:{mu}"

    @classmethod
    def parse(cls, label: str) -> "ModeId":
        label = label.strip()
        if label in ("a+", "a-"):
            return cls.photon(1 if label == "a+" else -1)
        head, mu = label.split(":")
        if head == "e":
            return cls.excited(mu)
        if head.startswith("g"):
            return cls.ground(mu, int(head[1:]))
        raise ValueError(f"unknown mode label {label!r}")

    def __str__(self) -> str:
        return self.label


PLUS = ModeId.photon(1)
MINUS = ModeId.photon(-1)


def _group(mode: ModeId, statistics: Statistics, convention: str):
    """Anticommuting group of ``mode`` or None for bosonic modes."""
    if statistics is not Statistics.FERMI or not mode.is_atomic:
        return None
    return "atoms" if convention == "global" else mode.kind.value


def exchange_sign(a: ModeId, b: ModeId, statistics: Statistics, convention: str = "species") -> int:
    ga = _group(a, statistics, convention)
    return -1 if ga is not None and ga == _group(b, statistics, convention) else 1


class ModeSet:
    """Ordered set of modes plus the particle statistics of the atoms."""

    def __init__(
        self,
        modes: Iterable[ModeId],
        statistics: Statistics = Statistics.BOSE,
        convention: str = "species",
    ):
        if convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}")
        self.modes: tuple[ModeId, ...] = tuple(sorted(set(modes), key=lambda m: m.sort_key))
        self.statistics = Statistics(statistics)
        self.convention = convention
        self.index = {m: i for i, m in enumerate(self.modes)}
        self.fermionic = tuple(
            _group(m, self.statistics, convention) is not None for m in self.modes
        )
        groups = [_group(m, self.statistics, convention) for m in self.modes]
        self._before = tuple(
            tuple(j for j in range(i) if groups[i] is not None and groups[j] == groups[i])
            for i in range(len(self.modes))
        )
        self.atomic = tuple(i for i, m in enumerate(self.modes) if m.is_atomic)
        self.excited = tuple(i for i, m in enumerate(self.modes) if m.kind is ModeKind.EXCITED)
        self.ground = tuple(i for i, m in enumerate(self.modes) if m.kind is ModeKind.GROUND)
        self.iplus = self.index.get(PLUS)
        self.iminus = self.index.get(MINUS)
        self.momentum_classes = 1 + max((m.p for m in self.modes if m.kind is ModeKind.GROUND), default=0)

    @classmethod
    def for_transition(
        cls,
        F_g,
        F_e,
        statistics=None,
        momentum_classes: int = 1,
        convention: str = "species",
        chain: Chain | None = None,
    ) -> "ModeSet":
        """All modes of F_g -> F_e (or only those of ``chain``) plus both photons."""
        Fg, Fe = HalfInt.of(F_g), HalfInt.of(F_e)
        if statistics is None:
            statistics = Statistics.default_for(Fg)
        modes = [PLUS, MINUS]
        for mu in range(-Fg.twice, Fg.twice + 1, 2):
            if chain is None or chain.contains(Role.GROUND, HalfInt(mu)):
                modes += [ModeId(ModeKind.GROUND, mu, p) for p in range(momentum_classes)]
        for mu in range(-Fe.twice, Fe.twice + 1, 2):
            if chain is None or chain.contains(Role.EXCITED, HalfInt(mu)):
                modes.append(ModeId(ModeKind.EXCITED, mu))
        return cls(modes, statistics, convention)

    def __len__(self) -> int:
        return len(self.modes)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModeSet)
            and self.modes == other.modes
            and self.statistics == other.statistics
            and self.convention == other.convention
        )

    def __hash__(self) -> int:
        return hash((self.modes, self.statistics, self.convention))

    def __repr__(self) -> str:
        return f"ModeSet({[m.label for m in self.modes]}, {self.statistics.value}, {self.convention})"

    def __contains__(self, mode: ModeId) -> bool:
        return mode in self.index

    def vacuum(self) -> tuple[int, ...]:
        return (0,) * len(self.modes)

    def signature(self, occ: Sequence[int]) -> str:
        """Readable, parseable occupation string such as ``g0:-1/2=1 a+=2``."""
        parts = [f"{m.label}={n}" for m, n in zip(self.modes, occ) if n]
        return " ".join(parts) if parts else "vac"

    def parse_signature(self, text: str) -> tuple[int, ...]:
        occ = [0] * len(self.modes)
        if text.strip() != "vac":
            for tok in text.split():
                label, n = tok.rsplit("=", 1)
                occ[self.index[ModeId.parse(label)]] = int(n)
        return tuple(occ)

    def helicity(self, occ: Sequence[int]) -> int:
        """2*(sum of atomic mu) + 2*(n+ - n-), in doubled units."""
        h = sum(self.modes[i].mu * occ[i] for i in self.atomic)
        if self.iplus is not None:
            h += 2 * occ[self.iplus]
        if self.iminus is not None:
            h -= 2 * occ[self.iminus]
        return h

    def n_excitations(self, occ: Sequence[int]) -> int:
        """Excited atoms plus photons (conserved by the coupling)."""
        n = sum(occ[i] for i in self.excited)
        if self.iplus is not None:
            n += occ[self.iplus]
        if self.iminus is not None:
            n += occ[self.iminus]
        return n

    def to_json(self) -> dict:
        return {
            "modes": [m.label for m in self.modes],
            "statistics": self.statistics.value,
            "convention": self.convention,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ModeSet":
        return cls([ModeId.parse(x) for x in data["modes"]], Statistics(data["statistics"]), data["convention"])


# ----------------------------------------------------------------------------
# operator polynomials

Factor = tuple  # (ModeId, create: bool)


def _factor_key(f: Factor) -> tuple:
    return (0 if f[1] else 1, f[0].sort_key)


class OperatorPolynomial:
    """Linear combination of products of ladder operators.

    Terms map a tuple of ``(ModeId, create)`` factors, read left to right
    as written, to a complex coefficient.  Arithmetic never reorders
    factors; :meth:`normal_ordered` produces the canonical form (creators
    left of annihilators, each group sorted by the global mode order).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, complex] | None = None):
        self.terms: dict[tuple, complex] = {}
        for k, c in (terms or {}).items():
            if c != 0:
                self.terms[tuple(k)] = self.terms.get(tuple(k), 0) + c

    @classmethod
    def identity(cls, coef: complex = 1.0) -> "OperatorPolynomial":
        return cls({(): coef})

    @classmethod
    def monomial(cls, coef: complex, *factors: Factor) -> "OperatorPolynomial":
        return cls({tuple(factors): coef})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def modes(self) -> set[ModeId]:
        return {f[0] for k in self.terms for f in k}

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return OperatorPolynomial({k: c for k, c in out.items() if c != 0})

    def __neg__(self) -> "OperatorPolynomial":
        return OperatorPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, OperatorPolynomial):
            out: dict = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    k = k1 + k2
                    out[k] = out.get(k, 0) + c1 * c2
            return OperatorPolynomial(out)
        return OperatorPolynomial({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return OperatorPolynomial({k: other * c for k, c in self.terms.items()})

    def dagger(self) -> "OperatorPolynomial":
        return OperatorPolynomial(
            {tuple((m, not cr) for m, cr in reversed(k)): np.conj(c) for k, c in self.terms.items()}
        )

    def normal_ordered(self, statistics=Statistics.BOSE, convention: str = "species", tol: float = 0.0):
        """Canonical normal-ordered form; idempotent."""
        statistics = Statistics(statistics)
        out: dict = {}
        for k, c in self.terms.items():
            for kk, cc in _normal_order_term(k, c, statistics, convention):
                out[kk] = out.get(kk, 0) + cc
        return OperatorPolynomial({k: c for k, c in out.items() if abs(c) > tol})

    def power(self, n: int, statistics=Statistics.BOSE, convention: str = "species"):
        result = OperatorPolynomial.identity()
        for _ in range(n):
            result = (result * self).normal_ordered(statistics, convention)
        return result

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def equals(self, other, statistics=Statistics.BOSE, convention="species", tol: float = 1e-12) -> bool:
        return (self - other).normal_ordered(statistics, convention).is_zero(tol)

    def filter(self, keep) -> "OperatorPolynomial":
        return OperatorPolynomial({k: c for k, c in self.terms.items() if keep(k)})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.terms.items():
            ops = " ".join(f"{m.label}{'^' if cr else ''}" for m, cr in k) or "1"
            parts.append(f"({c:.6g}) {ops}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "terms": [
                [[[m.label, bool(cr)] for m, cr in k], float(np.real(c)), float(np.imag(c))]
                for k, c in self.terms.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "OperatorPolynomial":
        terms = {}
        for factors, re, im in data["terms"]:
            k = tuple((ModeId.parse(lbl), bool(cr)) for lbl, cr in factors)
            terms[k] = complex(re, im)
        return cls(terms)


def create(mode: ModeId) -> OperatorPolynomial:
    return OperatorPolynomial.monomial(1.0, (mode, True))


def annihilate(mode: ModeId) -> OperatorPolynomial:
    return OperatorPolynomial.monomial(1.0, (mode, False))


def number(mode: ModeId) -> OperatorPolynomial:
    return OperatorPolynomial.monomial(1.0, (mode, True), (mode, False))


def _normal_order_term(factors, coef, statistics, convention) -> Iterator[tuple]:
    stack = [(list(factors), coef)]
    while stack:
        f, c = stack.pop()
        for i in range(len(f) - 1):
            a, b = f[i], f[i + 1]
            ka, kb = _factor_key(a), _factor_key(b)
            if ka == kb and exchange_sign(a[0], b[0], statistics, convention) < 0:
                break  # repeated fermionic operator vanishes
            if ka > kb:
                s = exchange_sign(a[0], b[0], statistics, convention)
                if a[0] == b[0] and not a[1] and b[1]:
                    stack.append((f[:i] + f[i + 2:], c))
                stack.append((f[:i] + [b, a] + f[i + 2:], c * s))
                break
        else:
            yield tuple(f), c


# ----------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class SectorSpec:
    """Constraints selecting a block of the truncated Fock space.

    ``helicity`` is 2*(sum of atomic mu) + 2*(n+ - n-) in doubled units and
    ``n_exc`` the number of excited atoms plus photons.  ``fixed_plus`` /
    ``fixed_minus`` pin a photon number; ``min_photons`` drops states with
    fewer photons in total.
    """

    n_atoms: int
    photon_cap_plus: int
    photon_cap_minus: int
    restrict_excited_to_zero: bool = False
    helicity: int | None = None
    momentum_classes: int = 1
    n_exc: int | None = None
    n_excited: int | None = None
    fixed_plus: int | None = None
    fixed_minus: int | None = None
    min_photons: int = 0

    def __post_init__(self):
        if min(self.n_atoms, self.photon_cap_plus, self.photon_cap_minus) < 0:
            raise ValueError("atom numbers and photon caps must be non-negative")
        if self.momentum_classes < 1:
            raise ValueError("momentum_classes must be >= 1")

    @property
    def excited_count(self) -> int | None:
        return 0 if self.restrict_excited_to_zero else self.n_excited

    def to_json(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_json(cls, data: Mapping) -> "SectorSpec":
        return cls(**data)


class Basis:
    """Ordered list of occupation tuples over a :class:`ModeSet`."""

    def __init__(self, modes: ModeSet, states: Iterable[Sequence[int]], spec: SectorSpec | None = None):
        self.modes = modes
        self.states: tuple[tuple[int, ...], ...] = tuple(tuple(s) for s in states)
        self.spec = spec
        self.index = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate states in basis")

    @classmethod
    def from_states(cls, modes: ModeSet, states: Iterable[Sequence[int]]) -> "Basis":
        return cls(modes, sorted(set(tuple(s) for s in states)))

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other) -> bool:
        return isinstance(other, Basis) and self.modes == other.modes and self.states == other.states

    def __repr__(self) -> str:
        return f"Basis(dim={self.dim}, {self.modes!r})"

    def photon_caps(self) -> tuple[int, int]:
        cp = max((s[self.modes.iplus] for s in self.states), default=0) if self.modes.iplus is not None else 0
        cm = max((s[self.modes.iminus] for s in self.states), default=0) if self.modes.iminus is not None else 0
        return cp, cm

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "modes": self.modes.to_json(),
            "spec": None if self.spec is None else self.spec.to_json(),
            "states": [list(s) for s in self.states],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Basis":
        spec = None if data.get("spec") is None else SectorSpec.from_json(data["spec"])
        return cls(ModeSet.from_json(data["modes"]), data["states"], spec)


def _atomic_configs(n: int, k: int, fermi: bool) -> Iterator[tuple[int, ...]]:
    if fermi:
        for chosen in itertools.combinations(range(k), n):
            occ = [0] * k
            for i in chosen:
                occ[i] = 1
            yield tuple(occ)
    else:
        # stars and bars
        for bars in itertools.combinations(range(n + k - 1), k - 1):
            prev, occ = -1, []
            for b in bars:
                occ.append(b - prev - 1)
                prev = b
            occ.append(n + k - 1 - prev - 1)
            yield tuple(occ)


def enumerate_basis(spec: SectorSpec, modes: ModeSet, limit: int = DEFAULT_BASIS_LIMIT) -> Basis:
    """All states of ``modes`` satisfying ``spec``, in lexicographic order."""
    if spec.momentum_classes != modes.momentum_classes:
        raise SectorMismatchError(
            f"sector has {spec.momentum_classes} momentum classes, mode set {modes.momentum_classes}"
        )
    fermi = modes.statistics is Statistics.FERMI
    atomic = modes.atomic
    if fermi and spec.n_atoms > len(atomic):
        raise CapacityError("more fermions than atomic modes")
    if spec.n_atoms and not atomic:
        return Basis(modes, [], spec)
    excited_pos = [atomic.index(i) for i in modes.excited]
    photon_ranges = []
    for idx, cap, fixed in (
        (modes.iplus, spec.photon_cap_plus, spec.fixed_plus),
        (modes.iminus, spec.photon_cap_minus, spec.fixed_minus),
    ):
        if idx is None:
            photon_ranges.append((None, [0]))
        elif fixed is not None:
            photon_ranges.append((idx, [fixed] if 0 <= fixed <= cap else []))
        else:
            photon_ranges.append((idx, range(cap + 1)))

    want_exc = spec.excited_count
    out = []
    atom_iter = _atomic_configs(spec.n_atoms, len(atomic), fermi) if atomic else iter([()])
    for acfg in atom_iter:
        n_e = sum(acfg[j] for j in excited_pos)
        if want_exc is not None and n_e != want_exc:
            continue
        for npl in photon_ranges[0][1]:
            for nmi in photon_ranges[1][1]:
                if npl + nmi < spec.min_photons:
                    continue
                occ = [0] * len(modes)
                for j, i in enumerate(atomic):
                    occ[i] = acfg[j]
                if photon_ranges[0][0] is not None:
                    occ[photon_ranges[0][0]] = npl
                if photon_ranges[1][0] is not None:
                    occ[photon_ranges[1][0]] = nmi
                if spec.n_exc is not None and n_e + npl + nmi != spec.n_exc:
                    continue
                if spec.helicity is not None and modes.helicity(occ) != spec.helicity:
                    continue
                out.append(tuple(occ))
                if len(out) > limit:
                    raise CapacityError(f"basis exceeds the limit of {limit} states")
    out.sort()
    return Basis(modes, out, spec)


# ----------------------------------------------------------------------------
# application of polynomials


def _apply_factors(factors, occ: tuple, modes: ModeSet):
    """Apply a product (rightmost factor first); returns (amplitude, occ) or None."""
    o = list(occ)
    amp = 1.0
    index, fermionic, before = modes.index, modes.fermionic, modes._before
    for mode, cr in reversed(factors):
        i = index.get(mode)
        if i is None:
            if cr:
                raise OutOfSectorError(f"mode {mode} is not part of the mode set")
            return None  # annihilating an absent (empty) mode
        n = o[i]
        if fermionic[i]:
            if cr == (n == 1):
                return None
            if sum(o[j] for j in before[i]) % 2:
                amp = -amp
            o[i] = 1 if cr else 0
        elif cr:
            o[i] = n + 1
            amp *= math.sqrt(n + 1)
        else:
            if n == 0:
                return None
            o[i] = n - 1
            amp *= math.sqrt(n)
    return amp, tuple(o)


def apply_to_dict(P: OperatorPolynomial, state: Mapping[tuple, complex], modes: ModeSet) -> dict:
    """Apply ``P`` to a sparse dict state ``{occupation: amplitude}``."""
    out: dict = {}
    for occ, a in state.items():
        if a == 0:
            continue
        for factors, c in P.terms.items():
            r = _apply_factors(factors, occ, modes)
            if r is None:
                continue
            amp, new = r
            out[new] = out.get(new, 0) + c * amp * a
    return out


@dataclass
class StateVector:
    """Dense amplitudes over a :class:`Basis`, plus free-form metadata."""

    basis: Basis
    amplitudes: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError("amplitude vector does not match basis dimension")

    @classmethod
    def from_dict(cls, modes: ModeSet, state: Mapping[tuple, complex], basis: Basis | None = None,
                  drop: float = 0.0, meta: dict | None = None) -> "StateVector":
        items = {k: v for k, v in state.items() if abs(v) > drop}
        if basis is None:
            basis = Basis.from_states(modes, items)
        amps = np.zeros(basis.dim, dtype=complex)
        for k, v in items.items():
            j = basis.index.get(k)
            if j is None:
                raise OutOfSectorError(f"state {modes.signature(k)} not in basis")
            amps[j] = v
        return cls(basis, amps, dict(meta or {}))

    @classmethod
    def vacuum(cls, modes: ModeSet) -> "StateVector":
        return cls.from_dict(modes, {modes.vacuum(): 1.0})

    def as_dict(self) -> dict:
        return {s: a for s, a in zip(self.basis.states, self.amplitudes) if a != 0}

    @property
    def modes(self) -> ModeSet:
        return self.basis.modes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes / self.norm(), dict(self.meta))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>, matching states by occupation."""
        if self.modes != other.modes:
            raise SectorMismatchError("states live on different mode sets")
        d = other.as_dict()
        return complex(sum(np.conj(a) * d.get(s, 0) for s, a in zip(self.basis.states, self.amplitudes)))

    def embed(self, basis: Basis) -> "StateVector":
        if basis.modes != self.modes:
            raise SectorMismatchError("cannot embed into a basis over different modes")
        return StateVector.from_dict(self.modes, self.as_dict(), basis=basis, meta=self.meta)

    def remap(self, modes: ModeSet) -> "StateVector":
        """The same state written over another mode set (e.g. one chain's modes).

        Modes missing from ``modes`` must be empty in every component.
        """
        if modes.statistics != self.modes.statistics or modes.convention != self.modes.convention:
            raise SectorMismatchError("statistics or ordering convention differ")
        out = {}
        for occ, a in self.as_dict().items():
            new = [0] * len(modes)
            for m, n in zip(self.modes.modes, occ):
                if not n:
                    continue
                if m not in modes:
                    raise SectorMismatchError(f"state occupies {m.label}, absent from the target modes")
                new[modes.index[m]] = n
            out[tuple(new)] = a
        # fermionic signs are unchanged: relative order of the occupied modes is preserved
        return StateVector.from_dict(modes, out, meta=self.meta)

    def _probs(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        tot = p.sum()
        return p / tot if tot > 0 else p

    def expectation_occupation(self, indices: Iterable[int]) -> float:
        idx = list(indices)
        if not idx or not self.basis.dim:
            return 0.0
        occ = np.array(self.basis.states, dtype=float)[:, idx].sum(axis=1)
        return float(self._probs() @ occ)

    def excited_occupancy(self) -> float:
        return self.expectation_occupation(self.modes.excited)

    def photon_number(self) -> float:
        return self.expectation_occupation(i for i in (self.modes.iplus, self.modes.iminus) if i is not None)

    def photon_distribution(self, s: int) -> dict[int, float]:
        i = self.modes.iplus if s > 0 else self.modes.iminus
        dist: dict[int, float] = {}
        for st, p in zip(self.basis.states, self._probs()):
            n = 0 if i is None else st[i]
            dist[n] = dist.get(n, 0.0) + float(p)
        return dict(sorted(dist.items()))

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "modes": self.modes.to_json(),
            "amplitudes": [
                [self.modes.signature(s), float(a.real), float(a.imag)]
                for s, a in zip(self.basis.states, self.amplitudes)
            ],
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "StateVector":
        modes = ModeSet.from_json(data["modes"])
        states, amps = [], []
        for sig, re, im in data["amplitudes"]:
            states.append(modes.parse_signature(sig))
            amps.append(complex(re, im))
        return cls(Basis(modes, states), np.array(amps, dtype=complex), dict(data.get("meta", {})))


def _check_modes(P: OperatorPolynomial, modes: ModeSet) -> None:
    for f in {f for k in P.terms for f in k}:
        if f[1] and f[0] not in modes:
            raise OutOfSectorError(f"operator creates in mode {f[0]} outside the mode set")


def _locate(new: tuple, codomain: Basis):
    j = codomain.index.get(new)
    if j is None:
        modes = codomain.modes
        caps = codomain.spec and (codomain.spec.photon_cap_plus, codomain.spec.photon_cap_minus)
        if caps:
            for idx, cap in zip((modes.iplus, modes.iminus), caps):
                if idx is not None and new[idx] > cap:
                    raise CapOverflowError(f"{modes.signature(new)} exceeds photon cap {cap}")
        raise OutOfSectorError(f"{modes.signature(new)} is outside the codomain")
    return j


def apply_polynomial(P: OperatorPolynomial, v: StateVector, codomain: Basis | None = None) -> StateVector:
    """``P|v>``; over ``codomain`` if given, else over the support of the result."""
    _check_modes(P, v.modes)
    out = apply_to_dict(P, v.as_dict(), v.modes)
    if codomain is None:
        return StateVector.from_dict(v.modes, out)
    if codomain.modes != v.modes:
        raise SectorMismatchError("codomain basis uses a different mode set")
    amps = np.zeros(codomain.dim, dtype=complex)
    for k, a in out.items():
        if a != 0:
            amps[_locate(k, codomain)] += a
    return StateVector(codomain, amps)


@dataclass
class SparseOperator:
    """Sparse complex matrix between two bases (rows: codomain)."""

    matrix: sp.csr_matrix
    domain: Basis | None = None
    codomain: Basis | None = None

    @property
    def dim_row(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim_col(self) -> int:
        return self.matrix.shape[1]

    def entries(self) -> list[tuple[int, int, complex]]:
        coo = self.matrix.tocoo()
        return sorted((int(r), int(c), complex(v)) for r, c, v in zip(coo.row, coo.col, coo.data))

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator((self.matrix @ other.matrix).tocsr(), other.domain, self.codomain)
        if isinstance(other, StateVector):
            return StateVector(self.codomain, self.matrix @ other.amplitudes)
        return self.matrix @ other

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "shape": [self.dim_row, self.dim_col],
            "entries": [[r, c, v.real, v.imag] for r, c, v in self.entries()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SparseOperator":
        rows, cols, vals = [], [], []
        for r, c, re, im in data["entries"]:
            rows.append(r)
            cols.append(c)
            vals.append(complex(re, im))
        m = sp.coo_matrix((vals, (rows, cols)), shape=tuple(data["shape"]), dtype=complex)
        return cls(m.tocsr())


def image_basis(P: OperatorPolynomial, domain: Basis) -> Basis:
    """Smallest basis containing ``P`` applied to every domain state."""
    _check_modes(P, domain.modes)
    states = set()
    for occ in domain.states:
        for factors in P.terms:
            r = _apply_factors(factors, occ, domain.modes)
            if r is not None:
                states.add(r[1])
    return Basis.from_states(domain.modes, states)


def materialize(P: OperatorPolynomial, domain: Basis, codomain: Basis | None = None) -> SparseOperator:
    """Matrix of ``P`` from ``domain`` into ``codomain``; column j is ``P e_j``."""
    if codomain is None:
        codomain = image_basis(P, domain)
    if codomain.modes != domain.modes:
        raise SectorMismatchError("domain and codomain use different mode sets")
    _check_modes(P, domain.modes)
    rows, cols, vals = [], [], []
    terms = list(P.terms.items())
    for j, occ in enumerate(domain.states):
        for factors, c in terms:
            r = _apply_factors(factors, occ, domain.modes)
            if r is None:
                continue
            amp, new = r
            rows.append(_locate(new, codomain))
            cols.append(j)
            vals.append(c * amp)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(codomain.dim, domain.dim), dtype=complex).tocsr()
    m.sum_duplicates()
    m.data[np.abs(m.data) < ZERO_DROP] = 0
    m.eliminate_zeros()
    return SparseOperator(m, domain, codomain)


def dumps(obj) -> str:
    """JSON text for any object with a ``to_json`` method."""
    return json.dumps(obj.to_json(), indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, (Fraction, HalfInt)):
        return str(o)
    if isinstance(o, Enum):
        return o.value
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o)}")
