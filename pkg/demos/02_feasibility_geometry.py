"""Which aggregate characteristics can a set of outputs produce?

With outputs ``q`` and unit product directions, the reachable aggregates
``A q`` fill an annulus: the outer radius is the total output and the inner
radius is how far the biggest firm overshoots everyone else.
"""

# %%
import numpy as np

from hedonic_eq import classify_profile, construct_profile, donut_radii, is_feasible

for q in ([2.0, np.sqrt(3.0)], [1.0, 1.0], [5.0, 1.0, 1.0]):
    r = donut_radii(q)
    print(f"q={np.round(q, 3)}: inner {r.inner:+.3f}, outer {r.outer:.3f}")

print(is_feasible([5.0, 1.0, 1.0], [2.0, 0.0]), is_feasible([5.0, 1.0, 1.0], [0.0, 3.0]))

# %% The constructor places firms one at a time, keeping what remains
# reachable by the firms still to come.  Any point of the annulus works.
rng = np.random.default_rng(0)
q = rng.uniform(0.2, 2.0, size=6)
r = donut_radii(q)
worst = 0.0
for radius in np.linspace(max(r.inner, 0.0), r.outer, 9):
    u = rng.normal(size=3)
    x = radius * u / np.linalg.norm(u)
    A = construct_profile(q, x).matrix
    worst = max(worst, np.linalg.norm(A @ q - x))
    print(f"|x|={radius:6.3f}  pattern={classify_profile(A).tag.value}")
print(f"largest residual |Aq - x| = {worst:.2e}")

# %% On the rim every product points the same way; on the inner edge the
# biggest firm faces the rest.
q = np.array([4.0, 1.0, 0.5])
u = np.array([0.0, 1.0])
inner = construct_profile(q, donut_radii(q).inner * u)
pat = classify_profile(inner)
print(pat.tag.value, pat.sigma)
