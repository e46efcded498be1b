"""
Tour of the seven solution shapes
=================================

Walks the slope-field classification for the simplest foliation (k=1 on the
2-sphere): one representative seed per type, then a coarse grid sweep to show
how the types tile the phase plane, and finally the induced domain statements
for the two endpoint-regular types.
"""

from isosoliton import (
    IntegratorConfig,
    PhasePoint,
    classify,
    domain_report,
    endpoint_seed,
    eta,
    grid_seeds,
    make_params,
    maximal_trace,
    sweep,
    type_correspondence,
)

p = make_params(1, 2, 1, 1)
cfg = IntegratorConfig()

print(f"parameters: k={p.k} n={p.n} multiplicities=({p.m1},{p.m2}) R={p.R}")
print(f"guide curve eta at r=0.5: {eta(p, 0.5):+.6f}")
print()

# One seed per type.  The interior five come from the grid quadrants, the
# two endpoint-regular ones from seeds placed just inside r = -1 and r = +1.
representatives = [
    ("I", PhasePoint(0.0, 0.0)),
    ("II", PhasePoint(-0.63, 0.5)),
    ("III", PhasePoint(0.63, -0.5)),
    ("IV", PhasePoint(-0.5, 3.0)),
    ("V", PhasePoint(0.5, -3.0)),
    ("VI", endpoint_seed(p, -1, 1e-6)),
    ("VII", endpoint_seed(p, +1, 1e-6)),
]

print("representative seeds, classified at all three levels:")
for expect, seed in representatives:
    shape = classify(maximal_trace(p, seed, cfg))
    left = shape.evidence.left_event
    right = shape.evidence.right_event
    cross = "none" if shape.zero_crossing is None else f"{shape.zero_crossing:+.4f}"
    print(f"  seed ({seed.r:+.4f}, {seed.psi:+.4f}) -> "
          f"slope-eq type {shape.psi_type:>4}  profile type {shape.v_type:>3}  "
          f"zero crossing {cross:>8}  "
          f"ends: {left.kind}@{left.location:+.4f} / {right.kind}@{right.location:+.4f}")
    assert shape.v_type == expect

print()
print("naming is consistent across the three levels of the problem:")
for roman in ("I", "IV", "VII"):
    vp, v = type_correspondence(roman + "''")
    print(f"  slope equation {roman}'' corresponds to derivative {vp} and profile {v}")

# Coarse sweep.  Types II/III and IV/V come in mirror pairs here because the
# multiplicities are equal, so the histogram is symmetric.
print()
seeds = grid_seeds(nr=11, npsi=11) + [endpoint_seed(p, -1, 1e-6), endpoint_seed(p, +1, 1e-6)]
result = sweep(p, seeds, cfg=cfg)
print(f"sweep of {result.n_seeds} seeds:")
for name in ("I", "II", "III", "IV", "V", "VI", "VII"):
    print(f"  type {name:>4}: {result.histogram.get(name, 0):3d}")
print(f"  unlisted: {len(result.unlisted)}, failed: {len(result.errors)}")

# The endpoint-regular types extend over a focal point; the others do not.
print()
print("induced domains on the sphere (k=1: poles are the focal points):")
for expect, seed in representatives[-2:]:
    shape = classify(maximal_trace(p, seed, cfg))
    rep = domain_report(p, shape)
    sides = []
    if rep.contains_focal_minus:
        sides.append("the south pole (r = -1)")
    if rep.contains_focal_plus:
        sides.append("the north pole (r = +1)")
    print(f"  type {shape.v_type}: graph domain reaches {' and '.join(sides) or 'no focal point'}")
