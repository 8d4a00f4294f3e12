"""
Fat, thin and bumpy tori
========================

A small grid over the core radius R and a few Fourier bumps on the profile.
R = 2r is the borderline: the round torus there has H = 0 on the inner ring
and is rejected, but an elongating mode-2 bump makes it mean-convex again.
Set IMCF_THREADS to cap the number of worker processes.
"""

from imcf_torus import experiment as ex
from imcf_torus import io

cfg = ex.parse_config(
    io.parse_keyvalue(
        """
        scenario.n = 96
        run.sample_every = 0.05
        sweep.R = 2, 3, 6
        sweep.r = 1
        sweep.coeffs = none | 2:0.05 | 3:0.02:0.5
        """
    )
)

rows = ex.sweep(cfg)
print(f"{'R':>4} {'coeffs':>12} {'status':>9}  {'T_max':>8} {'u_min ratio':>12} {'eps_hat':>8}")
for r in rows:
    if r["status"] != "ok":
        print(f"{r['R']:4g} {r['coeffs']:>12} {r['status']:>9}  ({r['message'].split(',')[0]})")
        continue
    print(
        f"{r['R']:4g} {r['coeffs']:>12} {r['status']:>9}  {r['t_max_hi']:8.4f}"
        f" {r['u_min_ratio']:12.4f} {r['eps_hat_min']:8.4f}"
    )

# Thinner tori (larger R) live longer, and every accepted run stops because
# H_min collapsed, with the hole still open.
