"""
Comparison bounds against measured trajectories
===============================================

The slope equation admits closed-form comparison functions: one family
predicts where a steep trajectory must blow up, another traps a shallow
trajectory below a growing angle until the singular level.  This script
measures both against integrated runs, then checks the endpoint derivative
law the same way.
"""

import math

from isosoliton import (
    IntegratorConfig,
    PhasePoint,
    blowup_bound,
    bound_h1,
    bound_h2,
    endpoint_vprime_extrapolated,
    endpoint_vprime_limit,
    eta,
    integrate_from,
    make_params,
    mirror_params,
    psi_at,
)

p = make_params(2, 3, 1, 1)
cfg = IntegratorConfig()
print(f"parameters: k={p.k} n={p.n} multiplicities=({p.m1},{p.m2}) R={p.R}")
print()

# 1. Blow-up location.  For a rightward run started above the axis the
# reciprocal squared slope stays below a closed-form h1, so the root of h1
# is a hard ceiling on how far the run can travel.
r0, psi0 = 0.4, 1.5
predicted = blowup_bound(p, r0, psi0, +1)
half = integrate_from(p, PhasePoint(r0, psi0), +1, cfg)
measured = half.event.location
print("rightward blow-up from (%.2f, %.2f):" % (r0, psi0))
print(f"  a priori bound   r <= {predicted:.10f}")
print(f"  measured event   {half.event.kind} at r = {measured:.10f}")
print(f"  slack            {predicted - measured:.3e}  (must be >= 0)")
assert measured <= predicted + 1e-6

# pointwise form of the same inequality along the stored samples
worst = math.inf
for r, psi in zip(half.r.tolist(), half.psi.tolist()):
    if r <= r0:
        continue
    h = bound_h1(p, r0, psi0, r)
    if h <= 0.0:
        break
    worst = min(worst, psi - 1.0 / math.sqrt(h))
print(f"  pointwise margin psi - 1/sqrt(h1) >= {worst:.3e} over the run")
print()

# 2. Trapped runs.  Below the guide curve on the left of R the slope angle
# grows slower than a half-rate arcsine drift, so psi arrives at the
# singular level finite.
from isosoliton import bound_h2hat

r0 = -0.6
psi0 = 0.5 * eta(p, r0)
half = integrate_from(p, PhasePoint(r0, psi0), +1, cfg)
at_R = psi_at(half, p.R)
angle_cap = bound_h2hat(p, r0, psi0, p.R)
print(f"trapped run from ({r0:.2f}, {psi0:.4f}), eta there is {eta(p, r0):.4f}:")
print(f"  angle bound at the singular level: arctan(psi) < {angle_cap:.6f}")
print(f"  measured arctan(psi(R)) = {math.atan(at_R):.6f}, psi(R) = {at_R:.6f}")
assert math.atan(at_R) < angle_cap
print()

# 3. Reflection.  Negating r and psi maps solutions onto solutions for the
# parameter set with swapped multiplicities, so every one-sided bound has a
# mirror twin.  With equal multiplicities the mirror is the same set.
q = mirror_params(p)
left = blowup_bound(p, -0.4, -1.5, -1)
print(f"mirrored bound: leftward from (-0.4, -1.5) gives r >= {left:.10f}")
print(f"  equals the reflected rightward bound: {-blowup_bound(q, 0.4, 1.5, +1):.10f}")
print()

# 4. Endpoint derivative law.  At the focal levels the profile derivative
# has an exact rational limit; seeding at shrinking offsets and
# extrapolating to offset zero recovers it to ~1e-7.
for which in (-1, +1):
    law = endpoint_vprime_limit(p, which)
    est = endpoint_vprime_extrapolated(p, which)
    print(f"endpoint r = {which:+d}: law V' = {law:+.12f}, "
          f"extrapolated {est:+.12f}, error {abs(est - law):.3e}")

# k=1 on the circle-foliated 2-sphere has the classical arcsine bound at
# full rate; show the two rates side by side at the same geometry point.
p1 = make_params(1, 2, 1, 1)
r0, psi0 = -0.6, 0.3
full = bound_h2(p1, r0, psi0, 0.0)
half_rate = 0.5 * (math.asin(0.0) - math.asin(r0)) + math.atan(psi0)
print()
print(f"k=1 full-rate angle bound at (r0={r0}, psi0={psi0}): {full:.6f}")
print(f"the k>=2 bound uses half the arcsine drift:          {half_rate:.6f}")
