"""Finite-dimensional semigroup laboratory for the abstract decay theorems.

Draws random dissipative generators with commuting bounded extensions and
checks, at machine precision, the operator identities behind the decay
theorems: the triangular block extension formulas for resolvent and
exponential, the resolvent chain expansion, and the M/eps resolvent bound.
Then it measures the two decay characterizations numerically: resolvent
boundedness on vertical lines versus exponential envelopes (Gearhart-Pruss
style), and the polynomial statistic <t>^{1/kappa} ||e^{tG}(1+nu G)^{-kappa}||
(Borichev-Tomilov style).

Run: python3 demos/05_semigroup_lab.py
"""

import numpy as np

from kgdamp import semigroup_lab as sgl

case = sgl.random_dissipative(20, seed=7, spectral_gap=0.2)
print(f"case: n={case.n}, ||G||={np.linalg.norm(case.g, 2):.3f}, "
      f"M_hat={case.m_hat:.3f}, beta_hat={case.beta_hat:.3f}")

r1, r2 = sgl.block_extension_checks(case, z=0.5 + 3j, t=2.0)
print(f"block extension residuals: resolvent {r1:.2e}, exponential {r2:.2e}")

for kappa in (1, 2, 3):
    res = sgl.resolvent_chain_residual(case, nu=0.5, kappa=kappa, tau=3.0)
    print(f"resolvent chain (kappa={kappa}, nu=0.5, tau=3): residual {res:.2e}")

worst = max(sgl.m_over_eps_check(case, eps, tau)
            for eps in (0.5, 0.1, 0.02) for tau in (-5.0, 0.0, 5.0))
print(f"M/eps bound: worst eps*||R||/M_hat = {worst:.4f} (must stay <= 1)")

g = sgl.gearhart_experiment(case)
print(f"\nGearhart experiment: sup-line constant C1={g['C1']:.3f}, "
      f"fitted rate gamma={g['gamma']:.4f}, envelope C={g['C']:.3f}, "
      f"envelope_ok={g['envelope_ok']}")

b = sgl.borichev_tomilov_experiment(case, kappa=2, nu=0.5)
print(f"Borichev-Tomilov experiment (kappa=2): c1={b['c1']:.4f}, "
      f"sup <t>^(1/2)||e^(tG)(1+nu G)^-2|| = {b['sup_stat']:.4f}")
