"""Monopoly or oligopoly for a fixed linear demand system.

For inverse demand ``psi - Sigma q`` the Cournot-minus-monopoly welfare gap
splits over the eigenvectors of ``Sigma``: directions with eigenvalues above
the diagonal favour competition, the rest favour monopoly.
"""

# %%
import numpy as np

from hedonic_eq import (MarketInstance, SpectralInstance, concentration_specialization,
                        ranking_condition)

rng = np.random.default_rng(2)
A = rng.normal(size=(2, 5))
A /= np.linalg.norm(A, axis=0)
si = SpectralInstance(rng.uniform(0.5, 1.5, 5), np.eye(5) + 0.8 * A.T @ A)
rep = ranking_condition(si)
print("eigenvalues", rep.eigenvalues.round(4), "mean diagonal", round(si.lam_bar, 4))
print(f"major {rep.major:.5f} vs minor {rep.minor:.5f} -> {rep.verdict}")
print(f"direct gap {rep.direct_gap:.8f}, eigen expansion {rep.identity_gap:.8f}")

# %% Pointing psi along the dominant eigenvector always favours competition.
si = SpectralInstance(np.full(4, 0.5), 0.7 * np.ones((4, 4)) + np.eye(4))
print(ranking_condition(si).verdict)

# %% When every firm sits on beta the ranking has a closed form in n, alpha
# and the variance of the brand values.
inst = MarketInstance(0.5, [1.0, 0.0], [0.4, 0.1, 0.2])
spec = concentration_specialization(inst.n, inst.alpha, inst.gamma)
generic = ranking_condition(SpectralInstance.from_market(inst, np.outer(inst.beta, np.ones(inst.n))))
print(f"closed form {spec.left:.5f} vs {spec.right:.5f}: {spec.verdict}; generic: {generic.verdict}")
