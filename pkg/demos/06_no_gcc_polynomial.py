"""Trapped-ray regime: losing the uniform rate but keeping a polynomial bound.

A strip-shaped damping region in d=2 leaves horizontal rays undamped, so the
geometric control condition fails and exponential decay cannot be uniform.
The surrogate statement: the energy still satisfies
    E(t) <= c^2 (||u0||_H1 + ||u1||)^2 ... with an eta^-2-weighted H^2 term
in the constant, and the verified constant c_hat stays stable across the
oscillation frequency eta.

Run: python3 demos/06_no_gcc_polynomial.py  (takes ~1 minute)
"""

from kgdamp.damping import DampingProfile, gcc_infimum
from kgdamp.fields import TorusGrid, make_state
from kgdamp.evolve import simulate
from kgdamp.decayfit import verify_power_bound

strip = DampingProfile.smoothed_strip(half_width=0.15, ramp=0.05, dim=2)
rep = gcc_infimum(strip, horizon=4.0, n_x=16, n_xi=8)
print(f"strip profile: alpha_hat = {rep.alpha_hat:.3e} (GCC fails)")

grid = TorusGrid(2, 64)
sigma = (0.0, 1.5)  # quasimomentum twist: momentum along the undamped strip
for eta in (1, 2, 4):
    state = make_state(grid, sigma, 1.0, "gaussian",
                       center=[0.5, 0.5], width=0.45)
    rec = simulate(state, strip, eta=eta, t_end=100.0, dt=2e-2,
                   sample_stride=20)
    fit = verify_power_bound(rec)
    print(f"eta={eta}: E(100)/E(0) = {rec.energies[-1] / rec.energies[0]:.4f}, "
          f"verified polynomial constant c_hat = {fit.rate:.4f}")
