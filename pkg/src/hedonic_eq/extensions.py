"""Network effects between idiosyncratic characteristics, and common ownership."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .benchmarks import planner_optimum
from .cournot import BestResponse
from .geometry import construct_profile, donut_radii
from .model import Allocation, CharProfile, MarketInstance, total_surplus
from .welfare import ConditionError, closed_form_cosine

# ----- network effects -------------------------------------------------------


def spectral_radius(W) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    W = np.asarray(W, dtype=float)
    return float(np.max(np.abs(np.linalg.eigvalsh(W)))) if W.size else 0.0


def _network(inst: MarketInstance) -> np.ndarray:
    if inst.network is None:
        raise ValueError("instance has no network matrix")
    return inst.network


def bonacich(inst: MarketInstance, delta: float, z) -> np.ndarray:
    """Weighted Bonacich centralities ``(I - delta W)^-1 z``."""
    W = _network(inst)
    z = np.asarray(z, dtype=float)
    if z.shape != (inst.n,):
        raise ValueError(f"seed vector must have length {inst.n}")
    if abs(delta) * spectral_radius(W) >= 1.0:
        raise ValueError("need |delta| * rho(W) < 1")
    return np.linalg.solve(np.eye(inst.n) - delta * W, z)


def neumann_bonacich(W, delta: float, z, terms: int = 60) -> tuple[np.ndarray, float]:
    """Truncated series ``sum_{t<=T} (delta W)^t z`` and its geometric tail bound."""
    W = np.asarray(W, dtype=float)
    z = np.asarray(z, dtype=float)
    rho = abs(delta) * spectral_radius(W)
    if rho >= 1.0:
        raise ValueError("series diverges: |delta| * rho(W) >= 1")
    total = z.copy()
    term = z.copy()
    for _ in range(terms):
        term = delta * (W @ term)
        total += term
    tail = rho ** (terms + 1) / (1.0 - rho) * float(np.linalg.norm(z))
    return total, tail


@dataclass(frozen=True, eq=False)
class NetworkOutputs:
    q_planner: np.ndarray
    q_monopoly: np.ndarray
    q_equilibrium: np.ndarray
    planner_exists: bool
    monopoly_exists: bool
    equilibrium_exists: bool
    planner: Optional[Allocation] = None
    monopoly: Optional[Allocation] = None
    equilibrium: Optional[Allocation] = None

    def to_dict(self) -> dict:
        def alloc(a):
            return None if a is None else a.profile.to_list()

        return {
            "q_planner": self.q_planner.tolist(),
            "q_monopoly": self.q_monopoly.tolist(),
            "q_equilibrium": self.q_equilibrium.tolist(),
            "exists": {"planner": self.planner_exists, "monopoly": self.monopoly_exists,
                       "equilibrium": self.equilibrium_exists},
            "profiles": {"planner": alloc(self.planner), "monopoly": alloc(self.monopoly),
                         "equilibrium": alloc(self.equilibrium)},
        }


def _reaches(q: np.ndarray, radius: float) -> bool:
    if np.any(q < 0):
        return False
    radii = donut_radii(q)
    pad = 1e-12 * max(1.0, radii.outer)
    return radii.inner - pad <= radius <= radii.outer + pad


def network_outputs(inst: MarketInstance, *, mirror: bool = False) -> NetworkOutputs:
    """Planner, monopoly and differentiation-equilibrium outputs under network effects.

    Only the regime where the aggregate characteristic is ``beta`` (halved for
    the monopolist) is characterized; other cases are flagged as non-existent.
    """
    _network(inst)
    a, g = inst.alpha, inst.gamma
    q_plan = bonacich(inst, 1.0, g)
    q_mono = q_plan / 2.0
    q_eq = bonacich(inst, 1.0 / (2.0 + a), g / (2.0 + a))
    ok_plan = _reaches(q_plan, 1.0)
    ok_mono = _reaches(q_mono, 0.5)
    ok_eq = _reaches(q_eq, 1.0)
    plan = Allocation(construct_profile(q_plan, inst.beta, mirror=mirror), q_plan) if ok_plan else None
    mono = Allocation(plan.profile, q_mono) if ok_plan and ok_mono else None
    eq = Allocation(construct_profile(q_eq, inst.beta, mirror=mirror), q_eq) if ok_eq else None
    return NetworkOutputs(q_plan, q_mono, q_eq, ok_plan, ok_mono, ok_eq, plan, mono, eq)


def network_surplus(inst: MarketInstance, alloc: Allocation) -> float:
    W = _network(inst)
    x, y = alloc.x, alloc.q
    return float(inst.alpha * (inst.beta @ x - 0.5 * x @ x) + inst.gamma @ y - 0.5 * y @ (y - W @ y))


def network_best_response(inst: MarketInstance, i: int, A, q, fallback=None) -> BestResponse:
    W = _network(inst)
    A = A.matrix if isinstance(A, CharProfile) else np.asarray(A, dtype=float)
    q = np.asarray(q, dtype=float)
    v = inst.beta - (A @ q - q[i] * A[:, i])
    delta = float(np.linalg.norm(v))
    qi = (inst.alpha * delta + inst.gamma[i] + W[i] @ q) / (2.0 * (1.0 + inst.alpha))
    if delta > 1e-14:
        return BestResponse(delta, v / delta, qi)
    a = inst.beta.copy() if fallback is None else np.asarray(fallback, dtype=float)
    return BestResponse(0.0, a, qi, arbitrary=True)


def network_fixed_point_residual(inst: MarketInstance, alloc: Allocation) -> float:
    """Largest change any firm makes by best-responding to the others."""
    worst = 0.0
    for i in range(inst.n):
        br = network_best_response(inst, i, alloc.A, alloc.q, fallback=alloc.A[:, i])
        worst = max(worst, abs(br.q - alloc.q[i]), float(np.linalg.norm(br.a - alloc.A[:, i])))
    return worst


# ----- common ownership ------------------------------------------------------


def ownership_matrix(n: int, kappa: float) -> np.ndarray:
    K = np.full((n, n), float(kappa))
    np.fill_diagonal(K, 1.0)
    return K


def _scalar_kappa(inst: MarketInstance, kappa: Optional[float]) -> float:
    if kappa is None:
        if inst.ownership is None:
            raise ValueError("no ownership matrix and no kappa given")
        K = inst.ownership
        off = K[~np.eye(inst.n, dtype=bool)]
        if off.size and np.ptp(off) > 1e-12:
            raise ValueError("ownership weights differ across pairs; only a common kappa is supported")
        kappa = float(off[0]) if off.size else 0.0
    kappa = float(kappa)
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa > 1:
        warnings.warn(f"kappa={kappa} lies outside [0, 1]", stacklevel=3)
    if 2.0 + inst.alpha * (1.0 - kappa) <= 0:
        raise ValueError("kappa too large: 2 + alpha (1 - kappa) must be positive")
    return kappa


def ownership_threshold(alpha: float, kappa: float) -> float:
    return (2.0 + alpha * (1.0 - kappa)) / (1.0 + kappa)


def ownership_exists(inst: MarketInstance, kappa: float) -> bool:
    radii = donut_radii(inst.gamma)
    t = ownership_threshold(inst.alpha, kappa)
    pad = 1e-12 * max(1.0, radii.outer)
    return radii.inner - pad <= t <= radii.outer + pad


def ownership_welfare_closed(alpha: float, gamma, kappa: float) -> float:
    g2 = float(np.asarray(gamma) @ np.asarray(gamma))
    d = 2.0 + alpha * (1.0 - kappa)
    return alpha * (1.0 + 2.0 * kappa) / (2.0 * (1.0 + kappa) ** 2) + g2 * (3.0 + 2.0 * alpha * (1.0 - kappa)) / (2.0 * d * d)


@dataclass(frozen=True, eq=False)
class OwnershipEquilibrium:
    kappa: float
    allocation: Allocation
    target: np.ndarray
    welfare: float          # closed form
    welfare_direct: float   # total surplus at the built allocation
    cosine: float           # closed-form weighted cosine
    exists: bool = True

    @property
    def q(self) -> np.ndarray:
        return self.allocation.q

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "exists": self.exists, "q": self.q.tolist(),
                "target": self.target.tolist(), "welfare": self.welfare,
                "welfare_direct": self.welfare_direct, "weighted_cosine": self.cosine,
                "profile": self.allocation.profile.to_list()}


def ownership_equilibrium(inst: MarketInstance, kappa: Optional[float] = None, *,
                          mirror: bool = False) -> Optional[OwnershipEquilibrium]:
    """Differentiation equilibrium with a common ownership weight ``kappa``.

    ``kappa`` defaults to the (uniform) off-diagonal of ``inst.ownership``.
    """
    kappa = _scalar_kappa(inst, kappa)
    if not ownership_exists(inst, kappa):
        return None
    a = inst.alpha
    d = 2.0 + a * (1.0 - kappa)
    q = inst.gamma / d
    target = inst.beta / (1.0 + kappa)
    alloc = Allocation(construct_profile(q, target, mirror=mirror), q)
    cos = (closed_form_cosine(1.0 / (1.0 + kappa), 1.0 / d, inst.gamma)
           if inst.n >= 2 else float("nan"))
    return OwnershipEquilibrium(kappa=kappa, allocation=alloc, target=target,
                                welfare=ownership_welfare_closed(a, inst.gamma, kappa),
                                welfare_direct=total_surplus(inst, alloc), cosine=cos)


def ownership_best_response(inst: MarketInstance, K, i: int, A, q, fallback=None) -> BestResponse:
    K = np.asarray(K, dtype=float)
    A = A.matrix if isinstance(A, CharProfile) else np.asarray(A, dtype=float)
    q = np.asarray(q, dtype=float)
    w = (1.0 + K[i]) * q
    w[i] = 0.0
    v = inst.beta - A @ w
    delta = float(np.linalg.norm(v))
    qi = (inst.alpha * delta + inst.gamma[i]) / (2.0 * (1.0 + inst.alpha))
    if delta > 1e-14:
        return BestResponse(delta, v / delta, qi)
    a = inst.beta.copy() if fallback is None else np.asarray(fallback, dtype=float)
    return BestResponse(0.0, a, qi, arbitrary=True)


def ownership_fixed_point_residual(inst: MarketInstance, K, alloc: Allocation) -> float:
    worst = 0.0
    for i in range(inst.n):
        br = ownership_best_response(inst, K, i, alloc.A, alloc.q, fallback=alloc.A[:, i])
        worst = max(worst, abs(br.q - alloc.q[i]), float(np.linalg.norm(br.a - alloc.A[:, i])))
    return worst


def ownership_foc_residual(inst: MarketInstance, K, alloc: Allocation) -> np.ndarray:
    """Per-firm norm of ``(2 q_i - gamma_i) a_i - alpha (beta - sum_j (1 + k_ij) q_j a_j)``."""
    K = np.asarray(K, dtype=float)
    A, q = alloc.A, alloc.q
    pull = A @ ((1.0 + K) * q[None, :]).T  # column i: sum_j (1 + k_ij) q_j a_j
    res = A * (2.0 * q - inst.gamma) - inst.alpha * (inst.beta[:, None] - pull)
    return np.linalg.norm(res, axis=0)


def random_ownership(n: int, rng, skew: float = 0.2) -> np.ndarray:
    """Nonnegative ``K`` with unit diagonal and PSD symmetric part."""
    B = rng.uniform(0.0, 1.0, size=(n, max(1, int(rng.integers(1, n + 1)))))
    B[rng.uniform(size=B.shape) < 0.3] = 0.0
    B[:, 0] += 1e-3
    G = B @ B.T
    s = 1.0 / np.sqrt(np.diag(G))
    G = G * np.outer(s, s)
    U = rng.uniform(-1.0, 1.0, size=(n, n))
    S = skew * np.minimum(G, G.T) * (U - U.T) / 2.0
    np.fill_diagonal(S, 0.0)
    return G + S


@dataclass(frozen=True)
class FirstBestReport:
    trials: int
    min_residual: float
    lower_bound: Optional[float]
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def first_best_infeasibility_check(inst: MarketInstance, K=None, trials: int = 100,
                                   seed: int = 0, threshold: float = 1e-6) -> FirstBestReport:
    """Residual of the ownership first-order conditions at the planner's allocation.

    Checks the given ``K`` (matrix, scalar kappa or list of either) or, when
    None, ``trials`` random ownership structures.  A residual near zero would
    make the first best an equilibrium, so ``passed`` requires every residual
    to exceed ``threshold``.
    """
    alloc = planner_optimum(inst).allocation
    rng = np.random.default_rng(seed)
    if K is None:
        mats = [random_ownership(inst.n, rng) for _ in range(trials)]
    else:
        items = K if isinstance(K, (list, tuple)) else [K]
        mats = [ownership_matrix(inst.n, k) if np.isscalar(k) else np.asarray(k, dtype=float) for k in items]
    worst = min(float(ownership_foc_residual(inst, M, alloc).max()) for M in mats)
    g = inst.gamma
    radii = donut_radii(g)
    bound = float(g @ g / g.sum()) if radii.inner <= 1.0 <= radii.outer else None
    return FirstBestReport(trials=len(mats), min_residual=worst, lower_bound=bound,
                           passed=worst > threshold)


def f_alpha_kappa(alpha: float, kappa: float) -> float:
    a = alpha
    return float(np.sqrt(kappa * (2.0 + a * (1.0 - kappa)) / ((1.0 + kappa) * (1.0 + a * (1.0 - kappa)))))


@dataclass(frozen=True)
class SlopeReport:
    kappa: float
    condition: bool
    slope: float
    analytic_slope: float
    f: float

    @property
    def agrees(self) -> bool:
        return self.condition == (self.slope > 0)


def ownership_welfare_slope(inst: MarketInstance, kappa: float, step: float = 1e-5) -> SlopeReport:
    kappa = float(kappa)
    for k in (kappa - step, kappa + step):
        if not ownership_exists(inst, k):
            raise ConditionError(f"equilibrium absent at kappa={k:.6g}")
    a = inst.alpha
    f = f_alpha_kappa(a, kappa)
    norm = float(np.linalg.norm(inst.gamma))
    condition = norm > f * ownership_threshold(a, kappa)
    slope = (ownership_welfare_closed(a, inst.gamma, kappa + step)
             - ownership_welfare_closed(a, inst.gamma, kappa - step)) / (2.0 * step)
    d = 2.0 + a * (1.0 - kappa)
    analytic = a * ((1.0 + a * (1.0 - kappa)) / d ** 3 * norm ** 2 - kappa / (1.0 + kappa) ** 3)
    return SlopeReport(kappa=kappa, condition=bool(condition), slope=float(slope),
                       analytic_slope=float(analytic), f=f)


@dataclass(frozen=True, eq=False)
class OwnershipSweepRow:
    kappa: float
    exists: bool
    q: Optional[np.ndarray]
    cosine: Optional[float]
    welfare: Optional[float]
    ratio: Optional[float]
    condition: Optional[bool]


def ownership_sweep(inst: MarketInstance, kappas) -> list[OwnershipSweepRow]:
    """Equilibrium outputs, cosine and welfare along a grid of kappa values in [0, 1]."""
    omega_plan = planner_optimum(inst).welfare
    rows = []
    for k in np.clip(np.asarray(kappas, dtype=float), 0.0, 1.0):
        eq = ownership_equilibrium(inst, float(k))
        if eq is None:
            rows.append(OwnershipSweepRow(float(k), False, None, None, None, None, None))
            continue
        cond = np.linalg.norm(inst.gamma) > f_alpha_kappa(inst.alpha, k) * ownership_threshold(inst.alpha, k)
        rows.append(OwnershipSweepRow(float(k), True, eq.q, eq.cosine, eq.welfare,
                                      eq.welfare / omega_plan, bool(cond)))
    return rows


__all__ = [
    "bonacich", "neumann_bonacich", "network_outputs", "network_surplus", "network_best_response",
    "network_fixed_point_residual", "spectral_radius", "NetworkOutputs",
    "ownership_matrix", "ownership_equilibrium", "ownership_best_response", "ownership_foc_residual",
    "ownership_fixed_point_residual", "first_best_infeasibility_check", "ownership_welfare_slope",
    "ownership_welfare_closed", "ownership_sweep", "f_alpha_kappa", "random_ownership",
    "OwnershipEquilibrium", "FirstBestReport", "SlopeReport",
]
