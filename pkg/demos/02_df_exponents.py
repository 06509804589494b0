"""Estimate Diederich-Fornaess exponents on a collar inside the boundary.

For each depth the estimator finds the largest eta with -(-rho)^eta
plurisubharmonic at sampled points, then takes the minimum over the collar.
"""
from df_forge import catalog
from df_forge.df_estimator import CollarSpec, estimate_exponent, estimate_index, parse_family

spec = CollarSpec(n_boundary=400, depths=(1e-2, 1e-3, 1e-4))


def show(label, est):
    d = est if isinstance(est, dict) else est.to_dict()
    trend = ", ".join(f"{p['depth_fraction']:g}: {p['eta_min']:.4f}" for p in d["per_depth"])
    print(f"{label:34s} eta_hat {d['eta_hat']:.4f}   [{trend}]")


show("ball", estimate_exponent(catalog.get("ball").rho, spec))
# multiplying by (1 + eps |w|^2) keeps the domain but drives the collar exponent to 0
show("exp_flat_tilted (eps = 0.7)", estimate_exponent(catalog.get("exp_flat_tilted").rho, spec))
show("worm, beta = 3pi/2", estimate_exponent(catalog.get("worm:beta=3pi/2").rho, spec))

# a family of modified defining functions: raw plus the weighted grid
flat = catalog.get("exp_flat")
fam = estimate_index(flat.rho, parse_family("raw;grid:C=0.5|1,delta=0.01|0.1"), spec)
for m in fam["members"]:
    show(m["recipe"], m)
print(f"index over the family: {fam['index_estimate']:.4f} ({fam['argmax_recipe']})")
