"""Dark polaritons on an L=1 chain: orthonormal family in the number of dark quanta."""

import numpy as np

from darkstates import ChainKind, ModelConfig, build_V_chain, build_polariton, is_dark

cfg = ModelConfig(1, 1)
chain = next(c for c in cfg.chains if c.kind is ChainKind.LAMBDA and c.L == 1)
V_eq = build_V_chain(cfg, chain.with_equal_couplings())
states = [build_polariton(cfg, chain, m, 1.0, 12, force_equal_G=True) for m in range(4)]
for m, s in enumerate(states):
    print(f"|D,{m}>: residual {is_dark(s, cfg, 1e-8, V=V_eq).residual:.1e}, "
          f"components {s.basis.dim}, truncation tail {s.meta['truncation_tail_mass']:.1e}")
gram = np.array([[a.inner(b) for b in states] for a in states])
print(f"Gram deviation from identity {np.abs(gram - np.eye(len(states))).max():.1e}")
print(f"residual under the unequalized coupling {is_dark(states[1], cfg).residual:.2e}")
