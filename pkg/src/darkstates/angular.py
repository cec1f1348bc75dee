"""Exact angular-momentum algebra and the sigma+/- chain decomposition.

Half-integers are stored doubled (``HalfInt(3)`` is 3/2) so that no float
ever appears as a key.  Clebsch-Gordan coefficients are evaluated with the
Racah sum in rational arithmetic and kept as signed square roots of
rationals; floats are produced only when operators are assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable

from .errors import InvalidAngularMomentum, InvalidTransition

__all__ = [
    "HalfInt",
    "ExactCG",
    "clebsch_gordan",
    "ChainKind",
    "Role",
    "Site",
    "Coupling",
    "Chain",
    "decompose_chains",
    "parse_transition",
]


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An integer or half-integer stored as twice its value."""

    twice: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce ints, Fractions, floats, strings like ``"3/2"``."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        frac = Fraction(value)
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise InvalidAngularMomentum(f"{value!r} is not a multiple of 1/2")
        return cls(int(doubled))

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __lt__(self, other) -> bool:
        return self.twice < HalfInt.of(other).twice

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def signed(self) -> str:
        """String with explicit sign, e.g. ``+1/2``, ``-2``, ``0``."""
        if self.twice == 0:
            return "0"
        return ("+" if self.twice > 0 else "") + str(self)


@dataclass(frozen=True)
class ExactCG:
    """Real number of the form ``sign * sqrt(square)`` with rational square.

    Used for Clebsch-Gordan coefficients and for products of them (the
    coefficients of the dark-state operator are such products).
    """

    sign: int
    square: Fraction

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.square < 0:
            raise ValueError("square must be non-negative")
        if (self.square == 0) != (self.sign == 0):
            raise ValueError("square == 0 iff sign == 0")

    @classmethod
    def zero(cls) -> "ExactCG":
        return cls(0, Fraction(0))

    @classmethod
    def one(cls) -> "ExactCG":
        return cls(1, Fraction(1))

    @classmethod
    def from_rational(cls, value) -> "ExactCG":
        value = Fraction(value)
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, value * value)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.sqrt(self.square.numerator / self.square.denominator)

    def __bool__(self) -> bool:
        return self.sign != 0

    def __mul__(self, other) -> "ExactCG":
        if isinstance(other, int):
            other = ExactCG.from_rational(other)
        if not isinstance(other, ExactCG):
            return NotImplemented
        return ExactCG(self.sign * other.sign, self.square * other.square)

    __rmul__ = __mul__

    def __neg__(self) -> "ExactCG":
        return ExactCG(-self.sign, self.square)

    def surd(self) -> str:
        """Exact textual form such as ``-sqrt(3/10)`` or ``1``."""
        if self.sign == 0:
            return "0"
        sign = "-" if self.sign < 0 else ""
        num, den = self.square.numerator, self.square.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return sign + (str(rn) if rd == 1 else f"{rn}/{rd}")
        return f"{sign}sqrt({self.square})"

    def __str__(self) -> str:
        return self.surd()


def _check_jm(tj: int, tm: int, name: str) -> None:
    if tj < 0:
        raise InvalidAngularMomentum(f"{name}: negative angular momentum")
    if (tj - tm) % 2:
        raise InvalidAngularMomentum(f"{name}: parity mismatch between j and m")
    if abs(tm) > tj:
        raise InvalidAngularMomentum(f"{name}: |m| > j")


@lru_cache(maxsize=None)
def _racah(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> ExactCG:
    if tm1 + tm2 != tM:
        return ExactCG.zero()
    f = math.factorial
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tj2 + tJ) // 2
    c = (-tj1 + tj2 + tJ) // 2
    d = (tj1 + tj2 + tJ) // 2 + 1
    pref = Fraction((tJ + 1) * f(a) * f(b) * f(c), f(d))
    pref *= (
        f((tJ + tM) // 2) * f((tJ - tM) // 2)
        * f((tj1 - tm1) // 2) * f((tj1 + tm1) // 2)
        * f((tj2 - tm2) // 2) * f((tj2 + tm2) // 2)
    )
    # sum over k with all factorial arguments non-negative
    e1 = (tj1 - tm1) // 2
    e2 = (tj2 + tm2) // 2
    e3 = (tJ - tj2 + tm1) // 2
    e4 = (tJ - tj1 - tm2) // 2
    kmin = max(0, -e3, -e4)
    kmax = min(a, e1, e2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = f(k) * f(a - k) * f(e1 - k) * f(e2 - k) * f(e3 + k) * f(e4 + k)
        total += Fraction((-1) ** k, den)
    if total == 0:
        return ExactCG.zero()
    return ExactCG(1 if total > 0 else -1, total * total * pref)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> ExactCG:
    """Condon-Shortley coefficient <j1 m1; j2 m2 | J M>, exactly.

    Arguments may be anything :meth:`HalfInt.of` accepts.
    """
    tj1, tm1, tj2, tm2, tJ, tM = (HalfInt.of(x).twice for x in (j1, m1, j2, m2, J, M))
    _check_jm(tj1, tm1, "j1,m1")
    _check_jm(tj2, tm2, "j2,m2")
    _check_jm(tJ, tM, "J,M")
    if (tj1 + tj2 + tJ) % 2 or not abs(tj1 - tj2) <= tJ <= tj1 + tj2:
        raise InvalidAngularMomentum(
            f"triangle rule violated for ({HalfInt(tj1)}, {HalfInt(tj2)}, {HalfInt(tJ)})"
        )
    return _racah(tj1, tm1, tj2, tm2, tJ, tM)


class ChainKind(str, Enum):
    LAMBDA = "Lambda"
    NPLUS = "NPlus"
    NMINUS = "NMinus"
    V = "V"
    ISOLATED_GROUND = "IsolatedGround"
    ISOLATED_EXCITED = "IsolatedExcited"


class Role(str, Enum):
    GROUND = "ground"
    EXCITED = "excited"


@dataclass(frozen=True)
class Site:
    role: Role
    mu: HalfInt
    label: int

    def __str__(self) -> str:
        return f"{self.role.value[0]}{self.mu.signed()}"


@dataclass(frozen=True)
class Coupling:
    """Dipole link: ground ``label`` to excited ``label`` absorbing photon ``s``."""

    ground: int
    excited: int
    s: int
    G: ExactCG


@dataclass(frozen=True)
class Chain:
    """Dipole-connected Zeeman substates, labelled as in the Lambda scheme.

    Sites are ordered by ascending mu.  Ground labels are odd (1..2L+1),
    excited labels even; N+ carries the extra excited label 2L+2, N- the
    label 0, V both.
    """

    kind: ChainKind
    F_g: HalfInt
    F_e: HalfInt
    sites: tuple[Site, ...]
    L: int
    couplings: tuple[Coupling, ...]
    _by_label: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_label", {s.label: s for s in self.sites})

    def site(self, label: int) -> Site:
        return self._by_label[label]

    def mu(self, label: int) -> HalfInt:
        return self._by_label[label].mu

    @property
    def ground_sites(self) -> tuple[Site, ...]:
        return tuple(s for s in self.sites if s.role is Role.GROUND)

    @property
    def excited_sites(self) -> tuple[Site, ...]:
        return tuple(s for s in self.sites if s.role is Role.EXCITED)

    def G(self, excited: int, ground: int) -> ExactCG:
        """Coupling coefficient G^excited_ground (zero if not linked)."""
        for c in self.couplings:
            if c.excited == excited and c.ground == ground:
                return c.G
        return ExactCG.zero()

    def contains(self, role: Role, mu: HalfInt) -> bool:
        return any(s.role is role and s.mu == mu for s in self.sites)

    def with_equal_couplings(self) -> "Chain":
        """Copy with every coupling replaced by their common RMS magnitude."""
        if not self.couplings:
            return self
        sq = sum((c.G.square for c in self.couplings), Fraction(0)) / len(self.couplings)
        common = ExactCG(1, sq)
        return replace(self, couplings=tuple(replace(c, G=common) for c in self.couplings))

    def describe(self) -> str:
        return f"{self.kind.value}(L={self.L}): " + " ".join(str(s) for s in self.sites)


def parse_transition(text: str) -> tuple[HalfInt, HalfInt]:
    """Parse ``"3/2:3/2"`` or ``"2->1"`` into a validated (F_g, F_e) pair."""
    for sep in ("->", ":", ","):
        if sep in text:
            a, b = text.split(sep, 1)
            break
    else:
        raise InvalidTransition(f"cannot parse transition {text!r}; expected 'Fg:Fe'")
    try:
        Fg, Fe = HalfInt.of(a), HalfInt.of(b)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidTransition(f"cannot parse transition {text!r}: {exc}") from None
    _check_transition(Fg, Fe)
    return Fg, Fe


def _check_transition(Fg: HalfInt, Fe: HalfInt) -> None:
    if Fg.twice < 0 or Fe.twice < 0:
        raise InvalidTransition("angular momenta must be non-negative")
    if (Fg.twice - Fe.twice) % 2:
        raise InvalidTransition(f"{Fg}->{Fe}: F_g and F_e must differ by an integer")
    if abs(Fg.twice - Fe.twice) > 2:
        raise InvalidTransition(f"{Fg}->{Fe}: dipole transitions need |F_g - F_e| <= 1")


def _mus(F: HalfInt) -> Iterable[HalfInt]:
    return (HalfInt(t) for t in range(-F.twice, F.twice + 1, 2))


@lru_cache(maxsize=None)
def _decompose(tFg: int, tFe: int) -> tuple[Chain, ...]:
    Fg, Fe = HalfInt(tFg), HalfInt(tFe)
    nodes = [(Role.GROUND, mu) for mu in _mus(Fg)] + [(Role.EXCITED, mu) for mu in _mus(Fe)]
    adj: dict = {n: [] for n in nodes}
    edges = {}
    dipole_ok = tFg + tFe >= 2
    for mu_g in _mus(Fg):
        for s in (1, -1):
            mu_e = mu_g + s
            if not dipole_ok or abs(mu_e.twice) > tFe:
                continue
            G = clebsch_gordan(Fg, mu_g, 1, s, Fe, mu_e)
            if not G:
                continue  # split at vanishing links
            g, e = (Role.GROUND, mu_g), (Role.EXCITED, mu_e)
            adj[g].append(e)
            adj[e].append(g)
            edges[(g, e)] = (s, G)

    seen = set()
    chains = []
    for start in nodes:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            node = stack.pop()
            comp.append(node)
            for nb in adj[node]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comp.sort(key=lambda n: n[1].twice)
        chains.append(_make_chain(Fg, Fe, comp, edges))
    chains.sort(key=lambda c: (c.sites[0].mu.twice, c.sites[0].role is Role.EXCITED))
    return tuple(chains)


def _make_chain(Fg, Fe, comp, edges) -> Chain:
    for a, b in zip(comp, comp[1:]):
        if a[0] is b[0] or b[1].twice - a[1].twice != 2:
            raise AssertionError(f"non-path component in {Fg}->{Fe}: {comp}")
    first, last = comp[0][0], comp[-1][0]
    n_ground = sum(1 for r, _ in comp if r is Role.GROUND)
    if len(comp) == 1:
        kind = ChainKind.ISOLATED_GROUND if first is Role.GROUND else ChainKind.ISOLATED_EXCITED
    elif first is Role.GROUND and last is Role.GROUND:
        kind = ChainKind.LAMBDA
    elif first is Role.EXCITED and last is Role.EXCITED:
        kind = ChainKind.V
    elif first is Role.GROUND:
        kind = ChainKind.NPLUS
    else:
        kind = ChainKind.NMINUS
    start = 1 if first is Role.GROUND else 0
    sites = tuple(Site(role, mu, start + i) for i, (role, mu) in enumerate(comp))
    label = {(s.role, s.mu): s.label for s in sites}
    couplings = []
    for (g, e), (s, G) in sorted(edges.items(), key=lambda kv: (label.get(kv[0][0], -1), kv[1][0])):
        if g in label:
            couplings.append(Coupling(label[g], label[e], s, G))
    L = max(n_ground - 1, 0)
    return Chain(kind, Fg, Fe, sites, L, tuple(couplings))


def decompose_chains(F_g, F_e) -> list[Chain]:
    """Split the sigma+/- coupling scheme of F_g -> F_e into chains.

    Every Zeeman substate appears in exactly one chain.  Substates that no
    circular photon reaches come back as isolated chains.
    """
    Fg, Fe = HalfInt.of(F_g), HalfInt.of(F_e)
    _check_transition(Fg, Fe)
    return list(_decompose(Fg.twice, Fe.twice))
