"""Social planner and monopoly benchmarks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import construct_profile, donut_radii
from .model import Allocation, CharProfile, MarketInstance, total_surplus


class Regime(str, Enum):
    DIFFERENTIATION = "differentiation"
    CONCENTRATION = "concentration"
    DOMINANT_FIRM_POLARIZATION = "dominant_firm_polarization"


@dataclass(frozen=True, eq=False)
class BenchmarkResult:
    regime: Regime
    q: np.ndarray
    rho: float
    allocation: Allocation
    welfare: float

    @property
    def x(self) -> np.ndarray:
        return self.allocation.x

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "q": self.q.tolist(),
            "rho": self.rho,
            "welfare": self.welfare,
            "profile": self.allocation.profile.to_list(),
        }


def conditional_rho(q, which: str = "planner") -> float:
    """Optimal length of the aggregate ``x`` for fixed outputs ``q``.

    The target radius is 1 for the planner and 1/2 for the monopolist, clamped
    into the donut ``[r(q), R(q)]``.
    """
    target = {"planner": 1.0, "monopolist": 0.5, "monopoly": 0.5}.get(which)
    if target is None:
        raise ValueError(f"which must be 'planner' or 'monopolist', got {which!r}")
    radii = donut_radii(q)
    return max(radii.inner, min(radii.outer, target))


def _reject_network(inst: MarketInstance):
    if inst.network is not None:
        raise ValueError("instance has network effects; use hedonic_eq.extensions.network_outputs")


def planner_optimum(inst: MarketInstance, *, mirror: bool = False) -> BenchmarkResult:
    _reject_network(inst)
    n, alpha, beta, gamma = inst.n, inst.alpha, inst.beta, inst.gamma
    radii = donut_radii(gamma)

    if radii.outer < 1.0:
        q = gamma + alpha * (1.0 - radii.outer) / (1.0 + n * alpha)
        A = np.repeat(beta[:, None], n, axis=1)
        regime = Regime.CONCENTRATION
    elif radii.inner > 1.0:
        top = int(np.argmax(gamma))
        # a unique top firm is implied by r(gamma) > 1 > 0
        assert np.sum(gamma == gamma[top]) == 1
        shift = alpha * (radii.inner - 1.0) / (1.0 + n * alpha)
        sigma = -np.ones(n)
        sigma[top] = 1.0
        q = gamma - shift * sigma
        A = np.outer(beta, sigma)
        regime = Regime.DOMINANT_FIRM_POLARIZATION
    else:
        if inst.m < 2:
            # on a line x is a signed sum of outputs, so |x| = 1 is generally out of reach
            raise ValueError("interior planner solution needs m >= 2 when r(gamma) <= 1 <= R(gamma)")
        q = gamma.copy()
        A = construct_profile(q, beta, mirror=mirror).matrix
        regime = Regime.DIFFERENTIATION

    alloc = Allocation(CharProfile(A), q)
    return BenchmarkResult(regime=regime, q=alloc.q, rho=conditional_rho(alloc.q, "planner"),
                           allocation=alloc, welfare=total_surplus(inst, alloc))


def monopoly_optimum(inst: MarketInstance, *, mirror: bool = False) -> BenchmarkResult:
    """Same characteristics as the planner, half the output."""
    planner = planner_optimum(inst, mirror=mirror)
    alloc = Allocation(planner.allocation.profile, planner.q / 2.0)
    return BenchmarkResult(regime=planner.regime, q=alloc.q, rho=conditional_rho(alloc.q, "monopolist"),
                           allocation=alloc, welfare=total_surplus(inst, alloc))
