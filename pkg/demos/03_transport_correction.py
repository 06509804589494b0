"""Remove the transverse Hessian term along the flat circle.

On exp_flat_perturbed the defining function is multiplied by exp(eps Re w).
That leaves Hess(L, N) = -eps conj(z) / 2 on the flat circle.  Solving the
transport equation L u = h along the circle and multiplying rho by
exp(chi u), with chi a cutoff to a tube around the circle, brings that term
to round-off level.
"""
import numpy as np

from df_forge import catalog
from df_forge.transport import (corrected_defining, hess_LN_on_curve, obstruction_values, seam_check,
                                solve_on_curve, transport_residuals)

pert = catalog.get("exp_flat_perturbed")
cv = pert.curves["gamma"](128)

h = obstruction_values(pert.rho, cv.z, cv.w)
print(f"obstruction on the circle: |h| in [{np.abs(h).min():.4f}, {np.abs(h).max():.4f}]")

sol = solve_on_curve(cv, pert.rho, lambda z, w: obstruction_values(pert.rho, z, w))
res = transport_residuals(sol, pert.rho)
print(f"transport residual {res['max_abs_residual']:.2e}, |u| on the curve {res['max_abs_u_on_curve']:.2e}")
print(f"seam jump {seam_check(sol, pert.rho)['jump']:.2e}")

cd, info = corrected_defining(pert.rho, cv)
before = hess_LN_on_curve(pert.rho, cv).max()
after = hess_LN_on_curve(cd, cv).max()
print(f"tube radii r_in {info['r_in']:.3f}, r_out {info['r_out']:.3f}")
print(f"max |Hess(L, N)| on the circle: before {before:.3e}, after {after:.3e}")
