"""Chain decomposition of a few transitions, with exact Clebsch-Gordan couplings."""

from darkstates import HalfInt, ModelConfig, clebsch_gordan

for tr in [(2, 1), ("3/2", "3/2"), (1, 2), ("5/2", "3/2")]:
    cfg = ModelConfig(*tr)
    print(f"F_g={tr[0]} -> F_e={tr[1]}")
    for ch in cfg.chains:
        print(f"  {ch.describe()}")
        for c in ch.couplings:
            print(f"    site {c.ground} - site {c.excited}  photon {'+' if c.s > 0 else '-'}  G = {c.G.surd()}")

c = clebsch_gordan(HalfInt.of(1), HalfInt.of(1), HalfInt.of(1), HalfInt.of(-1), HalfInt.of(0), HalfInt.of(0))
print(f"<1 1 1 -1|0 0> = {c.surd()} = {float(c):.12f}")
