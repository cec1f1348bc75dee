"""V chains: the dark state exists only for m, m' <= L with m + m' > L and is entangled."""

import numpy as np

from _show import show
from darkstates import ChainKind, ModelConfig, build_v_gds, chain_sector, contains, dark_subspace, is_dark

cfg = ModelConfig(1, 2)
chain = next(c for c in cfg.chains if c.kind is ChainKind.V and c.L == 1)
print(f"chain {chain.describe()}")
print("oracle dimension by (m, m'):")
for m in range(3):
    print("   ", [dark_subspace(cfg, chain_sector(chain, m, mp, min_photons=1), chain).dimension for mp in range(3)])

s = build_v_gds(cfg, chain, 1, 1)
print(f"|NC>_V residual {is_dark(s, cfg).residual:.1e}")
show(s)
rep = dark_subspace(cfg, chain_sector(chain, 1, 1), chain)
print(f"inside the oracle's {rep.dimension}-dim space: {contains(s.remap(cfg.mode_set(chain)), rep)}")

# Schmidt coefficients between atom and light
amps = s.as_dict()
atoms = sorted({tuple(o[i] for i in s.modes.atomic) for o in amps})
light = sorted({(o[s.modes.iplus], o[s.modes.iminus]) for o in amps})
M = np.zeros((len(atoms), len(light)), complex)
for o, a in amps.items():
    M[atoms.index(tuple(o[i] for i in s.modes.atomic)), light.index((o[s.modes.iplus], o[s.modes.iminus]))] = a
print("Schmidt coefficients:", np.round(np.linalg.svd(M, compute_uv=False), 6))
