"""Cournot-Nash equilibria with endogenous characteristics.

Every equilibrium is either a differentiation equilibrium (``q = gamma/(2+alpha)``
with ``A q = beta``) or a sign-vector equilibrium where each firm sits on
``+beta`` or ``-beta``.  Both families have closed forms, so enumeration is a
finite scan over sign vectors rather than a fixed-point search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .geometry import construct_profile, donut_radii
from .model import Allocation, CharProfile, MarketInstance, markups

MAX_FIRMS = 16
EXISTENCE_SLACK = 1e-12
ACCEPT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class BestResponse:
    delta: float
    a: np.ndarray
    q: float
    arbitrary: bool = False


@dataclass(frozen=True)
class EquilibriumDiagnostics:
    cond9: float   # max(gamma - 2(1+alpha) q, 0)
    cond10: float  # max_i |((2+alpha) q_i - gamma_i) a_i - alpha (beta - A q)|


@dataclass(frozen=True, eq=False)
class EquilibriumRecord:
    kind: str  # "differentiation" or "sign_vector"
    allocation: Allocation
    markups: np.ndarray
    profits: np.ndarray
    diagnostics: EquilibriumDiagnostics
    sigma: Optional[np.ndarray] = None
    phi: Optional[float] = None
    boundary: bool = False

    @property
    def q(self) -> np.ndarray:
        return self.allocation.q

    @property
    def A(self) -> np.ndarray:
        return self.allocation.A

    @property
    def pattern(self) -> str:
        if self.kind == "differentiation":
            return "differentiation"
        if np.all(self.sigma > 0):
            return "concentration"
        return "polarization"

    def is_dominant_polarization(self, gamma) -> bool:
        if self.kind != "sign_vector" or np.sum(self.sigma > 0) != 1:
            return False
        gamma = np.asarray(gamma)
        top = int(np.flatnonzero(self.sigma > 0)[0])
        return bool(gamma[top] == gamma.max())

    def label(self) -> str:
        if self.kind == "differentiation":
            return "differentiation"
        return "sigma=(" + ",".join("+" if s > 0 else "-" for s in self.sigma) + ")"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "pattern": self.pattern,
            "sigma": None if self.sigma is None else self.sigma.astype(int).tolist(),
            "q": self.q.tolist(),
            "phi": self.phi,
            "markups": self.markups.tolist(),
            "profits": self.profits.tolist(),
            "boundary": self.boundary,
            "diagnostics": {"cond9": self.diagnostics.cond9, "cond10": self.diagnostics.cond10},
            "profile": self.allocation.profile.to_list(),
        }


def _require_baseline(inst: MarketInstance):
    if inst.network is not None or inst.ownership is not None:
        raise ValueError("baseline equilibrium routines do not handle network or ownership terms; "
                         "see hedonic_eq.extensions")


def _matrix(A) -> np.ndarray:
    return A.matrix if isinstance(A, CharProfile) else np.asarray(A, dtype=float)


def best_response(inst: MarketInstance, i: int, A, q, fallback=None) -> BestResponse:
    """Firm ``i``'s best reply to the other columns of ``A`` and entries of ``q``.

    Column ``i`` and ``q[i]`` are ignored.  When the residual demand direction
    vanishes every unit vector is optimal; the result then uses ``fallback``
    (or ``beta``) and is flagged ``arbitrary``.
    """
    A = _matrix(A)
    q = np.asarray(q, dtype=float)
    if not 0 <= i < inst.n:
        raise IndexError(f"firm index {i} out of range for n={inst.n}")
    others = A @ q - q[i] * A[:, i]
    v = inst.beta - others
    delta = float(np.linalg.norm(v))
    qi = (inst.alpha * delta + inst.gamma[i]) / (2.0 * (1.0 + inst.alpha))
    if delta > 1e-14:
        return BestResponse(delta, v / delta, qi)
    a = inst.beta.copy() if fallback is None else np.asarray(fallback, dtype=float)
    return BestResponse(0.0, a, qi, arbitrary=True)


def equilibrium_residuals(inst: MarketInstance, alloc: Allocation) -> EquilibriumDiagnostics:
    a, g = inst.alpha, inst.gamma
    q, A = alloc.q, alloc.A
    cond9 = float(max(0.0, np.max(g - 2.0 * (1.0 + a) * q)))
    lhs = A * ((2.0 + a) * q - g)
    rhs = a * (inst.beta - alloc.x)
    cond10 = float(np.max(np.linalg.norm(lhs - rhs[:, None], axis=0)))
    return EquilibriumDiagnostics(cond9, cond10)


def _record(inst, alloc, kind, sigma=None, phi=None, boundary=False) -> EquilibriumRecord:
    mk = markups(inst, alloc)
    return EquilibriumRecord(kind=kind, allocation=alloc, markups=mk, profits=mk * alloc.q,
                             diagnostics=equilibrium_residuals(inst, alloc),
                             sigma=sigma, phi=phi, boundary=boundary)


def differentiation_exists(inst: MarketInstance) -> bool:
    """Existence test; on a line (``m = 1``) no rank-two profile exists at all."""
    if inst.m < 2:
        return False
    radii = donut_radii(inst.gamma)
    target = 2.0 + inst.alpha
    slack = EXISTENCE_SLACK * max(1.0, radii.outer)
    return radii.inner - slack <= target <= radii.outer + slack


def differentiation_equilibrium(inst: MarketInstance, *, mirror: bool = False) -> Optional[EquilibriumRecord]:
    _require_baseline(inst)
    if not differentiation_exists(inst):
        return None
    radii = donut_radii(inst.gamma)
    target = 2.0 + inst.alpha
    slack = EXISTENCE_SLACK * max(1.0, radii.outer)
    q = inst.gamma / target
    alloc = Allocation(construct_profile(q, inst.beta, mirror=mirror), q)
    boundary = abs(radii.outer - target) <= slack or abs(radii.inner - target) <= slack
    return _record(inst, alloc, "differentiation", boundary=boundary)


def sign_vector_bounds(alpha: float, gamma, sigma) -> tuple[float, float, float]:
    """Return ``(lower, sigma^T gamma, upper)`` of the existence condition.

    Minima over empty index sets are infinite, so the matching bound is open.
    """
    gamma = np.asarray(gamma, dtype=float)
    sigma = np.asarray(sigma)
    n = gamma.size
    k = (2.0 + (n + 1) * alpha) / (2.0 * (1.0 + alpha))
    neg, pos = gamma[sigma < 0], gamma[sigma > 0]
    lower = (2.0 + alpha) - k * neg.min() if neg.size else -np.inf
    upper = (2.0 + alpha) + k * pos.min() if pos.size else np.inf
    return float(lower), float(sigma @ gamma), float(upper)


def phi(alpha: float, gamma, sigma) -> float:
    n = len(gamma)
    s = float(np.asarray(sigma) @ np.asarray(gamma))
    return alpha * (s - (2.0 + alpha)) / ((2.0 + alpha) * (2.0 + (n + 1) * alpha))


def _sign_record(inst, sigma, boundary) -> EquilibriumRecord:
    f = phi(inst.alpha, inst.gamma, sigma)
    q = np.maximum(inst.gamma / (2.0 + inst.alpha) - f * sigma, 0.0)
    alloc = Allocation(CharProfile(np.outer(inst.beta, sigma)), q)
    return _record(inst, alloc, "sign_vector", sigma=sigma.astype(float), phi=f, boundary=boundary)


def sign_vector_equilibrium(inst: MarketInstance, sigma) -> Optional[EquilibriumRecord]:
    _require_baseline(inst)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (inst.n,) or not np.all(np.abs(sigma) == 1):
        raise ValueError("sigma must be a +-1 vector of length n")
    if np.all(sigma < 0):
        return None
    lower, s, upper = sign_vector_bounds(inst.alpha, inst.gamma, sigma)
    slack = EXISTENCE_SLACK * max(1.0, abs(s), 2.0 + inst.alpha)
    if not lower - slack <= s <= upper + slack:
        return None
    boundary = abs(s - lower) <= slack or abs(s - upper) <= slack
    return _sign_record(inst, sigma, boundary)


def sign_vectors(n: int) -> np.ndarray:
    """All sign vectors except all -1, in lexicographic order with +1 < -1."""
    rows = np.array(list(itertools.product((1, -1), repeat=n)), dtype=float)
    return rows[:-1]


def enumerate_equilibria(inst: MarketInstance, *, mirror: bool = False) -> list[EquilibriumRecord]:
    _require_baseline(inst)
    n, a, g = inst.n, inst.alpha, inst.gamma
    if n > MAX_FIRMS:
        raise ValueError(f"enumeration is capped at n <= {MAX_FIRMS}, got n={n}")
    records = []
    diff = differentiation_equilibrium(inst, mirror=mirror)
    if diff is not None:
        records.append(diff)

    S = sign_vectors(n)
    k = (2.0 + (n + 1) * a) / (2.0 * (1.0 + a))
    s = S @ g
    min_neg = np.where(S < 0, g, np.inf).min(axis=1)
    min_pos = np.where(S > 0, g, np.inf).min(axis=1)
    with np.errstate(invalid="ignore"):
        lower = (2.0 + a) - k * min_neg
        upper = (2.0 + a) + k * min_pos
    slack = EXISTENCE_SLACK * np.maximum(1.0, np.maximum(np.abs(s), 2.0 + a))
    ok = (lower - slack <= s) & (s <= upper + slack)
    for idx in np.flatnonzero(ok):
        boundary = bool(abs(s[idx] - lower[idx]) <= slack[idx] or abs(s[idx] - upper[idx]) <= slack[idx])
        records.append(_sign_record(inst, S[idx], boundary))
    return records


def has_canonical_equilibrium(records: Sequence[EquilibriumRecord], gamma) -> bool:
    """True if some record is differentiation, concentration or dominant-firm polarization."""
    return any(r.kind == "differentiation" or r.pattern == "concentration"
               or r.is_dominant_polarization(gamma) for r in records)


@dataclass(frozen=True)
class VerificationReport:
    cond9: float
    cond10: float
    best_response_gain: float
    sampled_gain: float
    worst_firm: int
    accepted: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _sample_directions(rng, m, beta, v, count):
    if m == 1:
        return rng.choice([-1.0, 1.0], size=(1, count))
    half = count // 2
    free = rng.normal(size=(m, count - half))
    free /= np.linalg.norm(free, axis=0)
    # plane through beta and the residual demand direction
    u = v - (v @ beta) * beta
    if np.linalg.norm(u) < 1e-12:
        u = rng.normal(size=m)
        u -= (u @ beta) * beta
    u /= np.linalg.norm(u)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=half)
    planar = np.outer(beta, np.cos(theta)) + np.outer(u, np.sin(theta))
    return np.hstack([planar, free])


def verify_equilibrium(inst: MarketInstance, alloc: Allocation, *, samples: int = 256,
                       seed: int = 0, tol: float = ACCEPT_TOL) -> VerificationReport:
    """Independent equilibrium check.

    Combines the first-order conditions with the exact best-response profit
    and a batch of random unilateral deviations per firm.
    """
    rng = np.random.default_rng(seed)
    a, g = inst.alpha, inst.gamma
    q, A = alloc.q, alloc.A
    diag = equilibrium_residuals(inst, alloc)
    current = markups(inst, alloc) * q

    br_gain = np.empty(inst.n)
    sampled = np.empty(inst.n)
    for i in range(inst.n):
        v = inst.beta - (alloc.x - q[i] * A[:, i])
        delta = np.linalg.norm(v)
        br_profit = (a * delta + g[i]) ** 2 / (4.0 * (1.0 + a))
        br_gain[i] = br_profit - current[i]
        dirs = _sample_directions(rng, inst.m, inst.beta, v, samples)
        q_hi = 2.0 * max(q[i], (a * delta + g[i]) / (2.0 * (1.0 + a))) + 0.1
        qs = rng.uniform(0.0, q_hi, size=samples)
        profits = qs * (a * (v @ dirs) - (1.0 + a) * qs + g[i])
        sampled[i] = profits.max() - current[i]

    worst = int(np.argmax(np.maximum(br_gain, sampled)))
    accepted = (diag.cond9 <= tol and diag.cond10 <= tol
                and br_gain.max() <= tol and sampled.max() <= tol)
    return VerificationReport(cond9=diag.cond9, cond10=diag.cond10,
                              best_response_gain=float(br_gain.max()),
                              sampled_gain=float(sampled.max()),
                              worst_firm=worst, accepted=bool(accepted))


def record_from_allocation(inst: MarketInstance, alloc: Allocation, tol: float = 1e-8) -> EquilibriumRecord:
    """Wrap an arbitrary allocation as a record, tagging it by geometry."""
    proj = alloc.A.T @ inst.beta
    if np.all(np.abs(np.abs(proj) - 1.0) <= tol):
        sigma = np.where(proj > 0, 1.0, -1.0)
        return _record(inst, alloc, "sign_vector", sigma=sigma, phi=phi(inst.alpha, inst.gamma, sigma))
    return _record(inst, alloc, "differentiation")


def find_matching_record(records: Sequence[EquilibriumRecord], alloc: Allocation,
                         tol: float = 1e-6) -> Optional[int]:
    """Index of the enumerated record with the same outputs and pattern.

    Differentiation profiles are not unique (any profile with ``A q = beta``
    works), so only outputs and the sign pattern along ``beta`` are compared.
    """
    for idx, rec in enumerate(records):
        if np.max(np.abs(rec.q - alloc.q)) > tol:
            continue
        if rec.kind == "differentiation":
            if np.linalg.norm(alloc.x - rec.allocation.x) <= tol:
                return idx
        elif np.max(np.abs(alloc.A - rec.A)) <= max(tol, 1e-4):
            return idx
    return None


@dataclass(eq=False)
class DynamicsResult:
    trajectory: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    record: Optional[EquilibriumRecord] = None
    verification: Optional[VerificationReport] = None


def best_response_dynamics(inst: MarketInstance, init: Union[Allocation, tuple], *,
                           max_iter: int = 1000, damping: float = 0.0,
                           tol: float = 1e-9) -> DynamicsResult:
    """Sequential best responses in index order.

    ``damping`` in ``[0, 1)`` keeps that share of the previous output; the
    direction always jumps to the best reply.  Non-convergence is reported
    through ``converged`` rather than raised.
    """
    _require_baseline(inst)
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0, 1)")
    if isinstance(init, Allocation):
        A, q = np.array(init.A), np.array(init.q)
    else:
        A, q = (np.array(v, dtype=float) for v in init)
    result = DynamicsResult(trajectory=[q.copy()])
    for it in range(1, max_iter + 1):
        change = 0.0
        for i in range(inst.n):
            br = best_response(inst, i, A, q, fallback=A[:, i])
            qi = (1.0 - damping) * br.q + damping * q[i]
            change = max(change, abs(qi - q[i]), float(np.linalg.norm(br.a - A[:, i])))
            A[:, i] = br.a
            q[i] = qi
        result.trajectory.append(q.copy())
        result.iterations = it
        if change < tol:
            result.converged = True
            break
    if result.converged:
        alloc = Allocation(CharProfile(A / np.linalg.norm(A, axis=0)), q)
        result.verification = verify_equilibrium(inst, alloc)
        if result.verification.accepted:
            result.record = record_from_allocation(inst, alloc)
    return result
