"""A two-firm market from instance to equilibria.

Two firms choose where to place their products in a two-dimensional space of
common characteristics.  Consumers value the aggregate along ``beta`` with
weight ``alpha``; each firm also sells a private "brand" characteristic worth
``gamma_i`` net of cost.  Run with ``python demos/01_duopoly_walkthrough.py``.
"""

# %%
import numpy as np

from hedonic_eq import (MarketInstance, enumerate_equilibria, monopoly_optimum, planner_optimum,
                        total_surplus, verify_equilibrium)

inst = MarketInstance(alpha=1.0, beta=[0.0, 1.0], gamma=[2.0, np.sqrt(3.0)])
print(inst.to_json())

# %% The planner picks outputs equal to the brand values and places the two
# products so their weighted sum lands exactly on beta.
plan = planner_optimum(inst)
A = plan.allocation.A
angles = np.degrees(np.arctan2(A[1], A[0]))
print(f"planner regime: {plan.regime.value}")
print(f"outputs {plan.q.round(4)}, product angles {angles.round(2)} deg, welfare {plan.welfare:.4f}")
print(f"cosine between the two products: {A[:, 0] @ A[:, 1]:.4f}")

# %% A monopolist owning both firms keeps the same positions and halves output.
mono = monopoly_optimum(inst)
print(f"monopoly outputs {mono.q.round(4)}, welfare ratio {mono.welfare / plan.welfare:.6f}")

# %% Cournot competition.  Every equilibrium is either differentiated
# (products span a plane) or lies on the beta axis with a sign per firm.
for rec in enumerate_equilibria(inst):
    rep = verify_equilibrium(inst, rec.allocation)
    cos = rec.A[:, 0] @ rec.A[:, 1]
    print(f"{rec.label():18s} q={rec.q.round(4)} cosine={cos:+.4f} "
          f"welfare={total_surplus(inst, rec.allocation):.4f} verified={rep.accepted}")

# %% Competition moves the products closer together than the planner would:
# the equilibrium cosine is positive while the planner's is negative.
