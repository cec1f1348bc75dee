"""N chains: the weak mode may hold at most L photons in a dark state."""

from darkstates import ChainKind, ConstraintViolation, ModelConfig, build_n_gds, chain_sector, dark_subspace, is_dark

cfg = ModelConfig("3/2", "3/2", statistics="bose")
chain = next(c for c in cfg.chains if c.kind is ChainKind.NPLUS)
L = chain.L
print(f"chain {chain.describe()}, L={L}")
for m in range(L + 3):
    dims = [dark_subspace(cfg, chain_sector(chain, m, s, min_photons=1), chain).dimension for s in range(4)]
    print(f"  weak photons m={m}: oracle dark dimensions for strong photons 0..3 -> {dims}")

s = build_n_gds(cfg, chain, 1, 1, 3)
print(f"constructed state m=1, strong=3: residual {is_dark(s, cfg).residual:.1e}")
try:
    build_n_gds(cfg, chain, 1, L + 1, 3)
except ConstraintViolation as e:
    print(f"m=L+1 refused: {e}")
