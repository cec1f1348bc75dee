"""Reference implementations shared by the tests, independent of the package."""

import math
from fractions import Fraction
from itertools import product


def threej_oracle(tj1, tm1, tj2, tm2, tJ, tM):
    """(sign, square) of <j1 m1 j2 m2|J M> through the Wigner 3j Racah formula.

    All arguments doubled.  Deliberately written from the 3j symbol rather
    than the direct Clebsch-Gordan sum.
    """
    if tM != tm1 + tm2 or not abs(tj1 - tj2) <= tJ <= tj1 + tj2:
        return 0, Fraction(0)
    f = lambda t: math.factorial(t // 2)  # noqa: E731
    tm3 = -tM
    delta = Fraction(f(tj1 + tj2 - tJ) * f(tj1 - tj2 + tJ) * f(-tj1 + tj2 + tJ), f(tj1 + tj2 + tJ + 2))
    pref = f(tj1 + tm1) * f(tj1 - tm1) * f(tj2 + tm2) * f(tj2 - tm2) * f(tJ + tm3) * f(tJ - tm3)
    s = Fraction(0)
    for k in range(0, tj1 + tj2 + 2, 2):
        args = [k, tJ - tj2 + k + tm1, tJ - tj1 + k - tm2, tj1 + tj2 - tJ - k, tj1 - k - tm1, tj2 - k + tm2]
        if min(args) < 0:
            continue
        s += Fraction((-1) ** (k // 2), math.prod(f(a) for a in args))
    # 3j phase (-1)^(j1-j2-m3) times the CG phase (-1)^(j1-j2+M) is +1
    square = (tJ + 1) * delta * pref * s * s
    return (0 if s == 0 else (1 if s > 0 else -1)), square


def all_coefficients(max_twice=8):
    for tj1, tj2 in product(range(max_twice + 1), repeat=2):
        for tJ in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
            if tJ > max_twice:
                continue
            for tm1 in range(-tj1, tj1 + 1, 2):
                for tm2 in range(-tj2, tj2 + 1, 2):
                    tM = tm1 + tm2
                    if abs(tM) <= tJ:
                        yield tj1, tm1, tj2, tm2, tJ, tM
