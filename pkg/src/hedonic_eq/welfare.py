"""Welfare rankings across market structures and equilibria."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .benchmarks import monopoly_optimum, planner_optimum
from .cournot import differentiation_equilibrium, sign_vector_equilibrium
from .geometry import construct_profile, donut_radii
from .model import CharProfile, MarketInstance, surplus, total_surplus
from .spectral import concentration_specialization

SIGN_TOL = 1e-9


class ConditionError(ValueError):
    """A comparison was requested outside the region where it is defined."""


def _sign(v: float, tol: float = SIGN_TOL) -> int:
    return 0 if abs(v) <= tol else (1 if v > 0 else -1)


@dataclass(frozen=True)
class WelfareComparison:
    """``predicted``/``observed`` are signs of ``left_value - right_value``.

    ``predicted`` is None where the ranking result makes no claim.
    """

    left_label: str
    left_value: float
    right_label: str
    right_value: float
    predicted: Optional[int]
    observed: int
    advisory: dict = field(default_factory=dict)

    @property
    def agrees(self) -> bool:
        return self.predicted is None or self.predicted == self.observed

    def to_dict(self) -> dict:
        return {
            "left": {"label": self.left_label, "welfare": self.left_value},
            "right": {"label": self.right_label, "welfare": self.right_value},
            "predicted_sign": self.predicted,
            "observed_sign": self.observed,
            "agrees": self.agrees,
            "advisory": self.advisory,
        }


def gamma_variance(gamma) -> float:
    gamma = np.asarray(gamma, dtype=float)
    return float(np.mean((gamma - gamma.mean()) ** 2))


def weighted_cosine(gamma, A) -> float:
    """gamma-weighted mean of pairwise cosines ``a_i^T a_j`` over ``i < j``.

    ``gamma`` may be a :class:`MarketInstance`.
    """
    if isinstance(gamma, MarketInstance):
        gamma = gamma.gamma
    gamma = np.asarray(gamma, dtype=float)
    A = A.matrix if isinstance(A, CharProfile) else np.asarray(A, dtype=float)
    n = gamma.size
    if n < 2:
        raise ValueError("weighted cosine needs at least two firms")
    G = (A.T @ A) * np.outer(gamma, gamma)
    return float(np.sum(np.triu(G, 1)) / comb(n, 2))


def closed_form_cosine(c: float, d: float, gamma, n: Optional[int] = None) -> float:
    """Weighted cosine of any profile with ``A q = c beta`` and ``q = d gamma``."""
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.size if n is None else n
    if n < 2:
        raise ValueError("weighted cosine needs at least two firms")
    if c <= 0 or d <= 0:
        raise ValueError("c and d must be positive")
    return float((c * c / (d * d) - gamma @ gamma) / (n * (n - 1)))


def mono_vs_diff_threshold(alpha: float) -> float:
    return (2.0 + alpha) / np.sqrt(4.0 + 3.0 * alpha)


def compare_mono_vs_diff(inst: MarketInstance) -> WelfareComparison:
    """Monopoly against the differentiation equilibrium when both use ``x`` along ``beta``."""
    a = inst.alpha
    radii = donut_radii(inst.gamma)
    if not (radii.inner <= 1.0 and 2.0 + a <= radii.outer):
        raise ConditionError("requires r(gamma) <= 1 and 2 + alpha <= R(gamma)")
    g2 = float(inst.gamma @ inst.gamma)
    mono = monopoly_optimum(inst)
    diff = differentiation_equilibrium(inst)
    omega_m = mono.welfare
    omega_d = total_surplus(inst, diff.allocation)
    closed_m = 3.0 * a / 8.0 + 3.0 * g2 / 8.0
    closed_d = a / 2.0 + (3.0 + 2.0 * a) * g2 / (2.0 * (2.0 + a) ** 2)
    thr = mono_vs_diff_threshold(a)
    gap = np.sqrt(g2) - thr
    predicted = 0 if abs(gap) <= 1e-12 * max(1.0, thr) else (1 if gap > 0 else -1)
    return WelfareComparison("monopoly", omega_m, "differentiation", omega_d, predicted,
                             _sign(omega_m - omega_d),
                             advisory={"threshold": thr, "gamma_norm": float(np.sqrt(g2)),
                                       "closed_form_monopoly": closed_m,
                                       "closed_form_differentiation": closed_d})


def diff_vs_sigma_lower(n: int, alpha: float) -> float:
    return n * alpha * (2.0 + alpha) / (2.0 * (1.0 + alpha) * (2.0 + (n + 1) * alpha) + n * alpha)


def compare_diff_vs_sigma(inst: MarketInstance, sigma) -> WelfareComparison:
    """Differentiation equilibrium against a sign-vector equilibrium."""
    sigma = np.asarray(sigma, dtype=float)
    diff = differentiation_equilibrium(inst)
    sv = sign_vector_equilibrium(inst, sigma)
    if diff is None or sv is None:
        raise ConditionError("both equilibria must exist")
    a, n = inst.alpha, inst.n
    s = float(sigma @ inst.gamma)
    low = diff_vs_sigma_lower(n, a)
    if np.all(sigma > 0) and abs(s - (2.0 + a)) <= 1e-12 * max(1.0, s):
        predicted: Optional[int] = 0
    elif s > 2.0 + a or s < low:
        predicted = 1
    else:
        predicted = None
    omega_d = total_surplus(inst, diff.allocation)
    omega_s = total_surplus(inst, sv.allocation)
    return WelfareComparison("differentiation", omega_d, sv.label(), omega_s, predicted,
                             _sign(omega_d - omega_s),
                             advisory={"sigma_gamma": s, "upper": 2.0 + a, "lower": low})


def compare_mono_vs_conc(inst: MarketInstance, tol: float = 1e-12) -> WelfareComparison:
    """Concentration equilibrium against monopoly when ``R(gamma) <= 1``.

    The prediction is the exact eigen-decomposition inequality; the
    large-``n``/large-``alpha``/low-variance sufficient conditions are advisory.
    """
    radii = donut_radii(inst.gamma)
    if radii.outer > 1.0:
        raise ConditionError("requires R(gamma) <= 1")
    conc = sign_vector_equilibrium(inst, np.ones(inst.n))
    mono = monopoly_optimum(inst)
    omega_c = total_surplus(inst, conc.allocation)
    spec = concentration_specialization(inst.n, inst.alpha, inst.gamma)
    predicted = _sign(spec.left - spec.right, 0.0)
    return WelfareComparison("concentration", omega_c, "monopoly", mono.welfare, predicted,
                             _sign(omega_c - mono.welfare, tol),
                             advisory={"lhs": spec.left, "rhs": spec.right,
                                       "variance": gamma_variance(inst.gamma),
                                       "polynomial_sufficient": spec.polynomial_sufficient})


# ----- symmetric case --------------------------------------------------------

@dataclass(frozen=True)
class SymmetricRow:
    """Closed-form welfare and outputs at ``gamma = g 1``; None marks NA."""

    n: int
    alpha: float
    gamma: float
    planner: float
    monopoly: float
    differentiation: Optional[float]
    concentration: Optional[float]
    polarization: Optional[float]
    q_monopoly: float
    q_differentiation: Optional[float]
    q_concentration: Optional[float]
    q_polarization_plus: Optional[float]
    q_polarization_minus: Optional[float]
    planner_regime: str
    direct: dict = field(default_factory=dict)

    def cells(self) -> dict:
        return {"planner": self.planner, "monopoly": self.monopoly,
                "differentiation": self.differentiation, "concentration": self.concentration,
                "polarization": self.polarization}


def symmetric_cutoffs(n: int, alpha: float) -> dict:
    return {
        "planner": 1.0 / n,
        "differentiation": (2.0 + alpha) / n,
        "concentration": 2.0 * (1.0 + alpha) / (n - 1),
        "polarization": 2.0 * (1.0 + alpha) * (2.0 + alpha) / (2.0 + (n + 1) * alpha),
    }


def symmetric_welfare_table(n: int, alpha: float, gamma: float, *, direct: bool = True) -> SymmetricRow:
    """One row of the symmetric welfare table.

    Polarization means the balanced split (``sigma^T gamma = 0``), so it is NA
    for odd ``n``.  With ``direct=True`` each cell is recomputed from an explicit
    allocation and stored in ``row.direct``.
    """
    if n < 2 or alpha <= 0 or gamma < 0:
        raise ValueError("need n >= 2, alpha > 0, gamma >= 0")
    a, g = float(alpha), float(gamma)
    cut = symmetric_cutoffs(n, a)
    D = 2.0 + (n + 1) * a

    if n * g <= 1.0:
        planner = n * (a + g) ** 2 / (2.0 * (1.0 + n * a))
        q_plan = g + a * (1.0 - n * g) / (1.0 + n * a)
        regime = "concentration" if n * g < 1.0 else "differentiation"
    else:
        planner = (a + n * g * g) / 2.0
        q_plan = g
        regime = "differentiation"
    monopoly = 0.75 * planner

    diff_ok = g >= cut["differentiation"]
    omega_d = a / 2.0 + n * g * g * (3.0 + 2.0 * a) / (2.0 * (2.0 + a) ** 2) if diff_ok else None
    q_d = g / (2.0 + a) if diff_ok else None

    conc_ok = g <= cut["concentration"]
    q_c = (g + a) / D if conc_ok else None
    omega_c = n * (a + g) ** 2 * (3.0 + (n + 2) * a) / (2.0 * D * D) if conc_ok else None

    pol_ok = n % 2 == 0 and g >= cut["polarization"]
    if pol_ok:
        q_pp, q_pm = g / (2.0 + a) + a / D, g / (2.0 + a) - a / D
        omega_p = (n * g * g * (3.0 + 2.0 * a) / (2.0 * (2.0 + a) ** 2)
                   + n * a * a * (3.0 + (n + 2) * a) / (2.0 * D * D))
    else:
        q_pp = q_pm = omega_p = None

    row = SymmetricRow(n=n, alpha=a, gamma=g, planner=planner, monopoly=monopoly,
                       differentiation=omega_d, concentration=omega_c, polarization=omega_p,
                       q_monopoly=q_plan / 2.0, q_differentiation=q_d, q_concentration=q_c,
                       q_polarization_plus=q_pp, q_polarization_minus=q_pm,
                       planner_regime=regime)
    if direct:
        row.direct.update(_symmetric_direct(row, q_plan))
    return row


def _symmetric_direct(row: SymmetricRow, q_plan: float) -> dict:
    n, a, g = row.n, row.alpha, row.gamma
    beta = np.array([1.0, 0.0])
    gam = np.full(n, g)
    ones = np.ones(n)
    conc = np.outer(beta, ones)
    out = {}

    qp = np.full(n, q_plan)
    A_plan = conc if row.planner_regime == "concentration" else construct_profile(qp, beta).matrix
    out["planner"] = surplus(a, beta, gam, A_plan, qp)
    out["monopoly"] = surplus(a, beta, gam, A_plan, qp / 2.0)
    if row.q_differentiation is not None:
        qd = np.full(n, row.q_differentiation)
        out["differentiation"] = surplus(a, beta, gam, construct_profile(qd, beta).matrix, qd)
    if row.q_concentration is not None:
        out["concentration"] = surplus(a, beta, gam, conc, np.full(n, row.q_concentration))
    if row.q_polarization_plus is not None:
        sigma = np.where(np.arange(n) < n // 2, 1.0, -1.0)
        qpol = np.where(sigma > 0, row.q_polarization_plus, row.q_polarization_minus)
        out["polarization"] = surplus(a, beta, gam, np.outer(beta, sigma), qpol)
    return out


def planner_dominates(inst: MarketInstance, records) -> bool:
    omega = planner_optimum(inst).welfare
    others = [monopoly_optimum(inst).welfare] + [total_surplus(inst, r.allocation) for r in records]
    return all(omega >= w - SIGN_TOL for w in others)
