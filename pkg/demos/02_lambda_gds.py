"""Lambda-chain dark states: one atom, two atoms, and the fermionic two-class case."""

from _show import show
from darkstates import ChainKind, FockPhi, ModelConfig, build_lambda_gds, is_dark, verify_fund_relation

cfg = ModelConfig(2, 1)
chain = next(c for c in cfg.chains if c.kind is ChainKind.LAMBDA and c.L == 2)
print(f"chain {chain.describe()}")
print(f"  ||V_L Psi - Psi V_L|| on 1 and 2 atoms: "
      f"{verify_fund_relation(cfg, chain, 1, (4, 4)):.1e}, {verify_fund_relation(cfg, chain, 2, (4, 4)):.1e}")

for n, phi in [(1, FockPhi(2, 1)), (2, FockPhi(3, 2))]:
    s = build_lambda_gds(cfg, chain, n, phi)
    print(f"n={n}, a+^{phi.m_plus} a-^{phi.m_minus}: residual {is_dark(s, cfg).residual:.1e}, dim {s.basis.dim}")
    show(s, 5)

fermi = ModelConfig(2, 1, statistics="fermi", momentum_classes=2)
chain = next(c for c in fermi.chains if c.kind is ChainKind.LAMBDA and c.L == 1)
s = build_lambda_gds(fermi, chain, (1, 1), FockPhi(1, 1))
print(f"fermions in two momentum classes: residual {is_dark(s, fermi).residual:.1e}")
show(s, 5)
