"""Rescaling identities and the lower-bound evaluators.

Shrinking a compactly supported scalar by a factor a multiplies its mix-norm
by a^(d/2+1) and rescales velocity-gradient norms by a^(d/p-1). The first
part verifies both identities numerically on a smooth bump pair and shows the
mismatch vanishing with resolution.

The second part evaluates the exponential lower-bound family
prefactor * exp(-coeff * cost(t)) along a recorded stirring-cost integral,
and the algebraic floor C (N/cost)^(-pN/d) that a support-independent decay
rate would force for no-slip mixing.
"""

import numpy as np

import torusmix as tm
from torusmix.analysis import (
    BoundParams,
    algebraic_floor,
    lower_bound_curve,
    scaling_check,
    scaling_fixture,
    smooth_r1_choice,
)
from torusmix.norms import CostAccumulator

# --- scaling identities -----------------------------------------------------
print("scaling identities, a = 1/2 (smooth bump pair):")
for n in (128, 256, 512):
    grid = tm.GridSpec(n)
    theta, u = scaling_fixture(grid, 0.5)
    rep = scaling_check(theta, u, 0.5, p=2.0)
    print(
        f"  n={n:<5} mix-norm mismatch {rep.mix_norm_mismatch:.3e}   "
        f"grad-norm mismatch {rep.grad_norm_mismatch:.3e}"
    )

# --- exponential lower bound along a cost integral ---------------------------
grid = tm.GridSpec(256)
theta0 = tm.initial_data(0.75, grid)
mask = tm.super_level_set(theta0, 0.5)
params = BoundParams(
    eps0=0.05,
    c=1.0,
    r0=0.1,
    p=2.0,
    measure_a=mask.measure,
    linf_norm=float(np.abs(theta0.values).max()),
    r1=smooth_r1_choice(theta0),
    n_balls=1,
)
acc = CostAccumulator(p=2.0)
for t in np.linspace(0.0, 5.0, 26):
    acc.add(t, 1.0)  # unit enstrophy: cost integral equals elapsed time
curve = lower_bound_curve(params, acc)
print("\nexponential lower bound (unit-enstrophy stirring):")
for t, bound, bound_prime in curve[:: max(1, len(curve) // 5)]:
    print(f"  t={t:<5g} bound={bound:.4e}   one-ball variant={bound_prime:.4e}")

# --- algebraic floor ----------------------------------------------------------
print("\nalgebraic floor C (N/cost)^(-pN/d) at d=2, p=2, gamma=0 (N=2):")
for cost in (1.0, 2.0, 4.0, 8.0):
    print(f"  cost={cost:<4g} floor={algebraic_floor(cost, p=2.0, dim=2):.4f}")
