"""Quantum filter: spontaneous emission drives 3/2 -> 3/2 into a dark state with at most one weak photon.

Usage: python 06_quantum_filter.py [t_max ...]
"""

import sys
from pathlib import Path

from darkstates import FilterConfig, run_ensemble

base = FilterConfig.from_file(Path(__file__).with_name("filter_3half.cfg"))
for t_max in [float(a) for a in sys.argv[1:]] or [10.0, 50.0, 100.0]:
    cfg = FilterConfig(**{**base.to_json(), "t_max": t_max})
    s = run_ensemble(cfg)
    tail = sum(p for m, p in s.weak_histogram(False).items() if m > 1)
    hist = {m: round(p, 3) for m, p in s.weak_histogram(False).items() if p > 1e-4}
    print(f"t_max={t_max:6.1f}  converged {s.convergence_fraction:6.1%}  mean jumps {s.mean_jumps:.2f}  "
          f"weak mass on m>1 {tail:.1e}  weak histogram {hist}")
