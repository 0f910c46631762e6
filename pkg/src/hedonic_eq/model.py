"""Model primitives for the hedonic-linear market with endogenous characteristics.

A market is described by the number of firms ``n``, the number of common
characteristics ``m``, the utility weight ``alpha`` on common characteristics,
the consumer's ideal vector ``beta`` (unit length) and the standalone values
``gamma`` (idiosyncratic value net of marginal cost).  Firm-level intercepts and
costs never appear separately; every formula goes through ``gamma``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

UNIT_TOL = 1e-10


class ValidationError(ValueError):
    """Raised when model primitives violate an invariant.

    The ``field`` attribute names the offending input so the CLI can report it.
    """

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _spectral_radius(w: np.ndarray) -> float:
    if w.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(w))))


@dataclass(frozen=True, eq=False)
class MarketInstance:
    alpha: float
    beta: np.ndarray
    gamma: np.ndarray
    network: Optional[np.ndarray] = None
    ownership: Optional[np.ndarray] = None

    def __post_init__(self):
        alpha = float(self.alpha)
        if not np.isfinite(alpha) or alpha <= 0:
            raise ValidationError("alpha", f"must be a positive real, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim != 1 or beta.size < 1:
            raise ValidationError("beta", "must be a nonempty vector")
        if not np.all(np.isfinite(beta)):
            raise ValidationError("beta", "entries must be finite")
        if abs(np.linalg.norm(beta) - 1.0) > UNIT_TOL:
            raise ValidationError("beta", f"must have unit l2 norm, got {np.linalg.norm(beta):.15g}")
        object.__setattr__(self, "beta", _frozen(beta))

        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 1 or gamma.size < 1:
            raise ValidationError("gamma", "must be a nonempty vector")
        if not np.all(np.isfinite(gamma)) or np.any(gamma <= 0):
            raise ValidationError("gamma", "standalone values must be strictly positive")
        object.__setattr__(self, "gamma", _frozen(gamma))
        n = gamma.size

        if self.network is not None:
            w = np.asarray(self.network, dtype=float)
            if w.shape != (n, n):
                raise ValidationError("network", f"must be {n}x{n}, got shape {w.shape}")
            if not np.allclose(w, w.T, rtol=0.0, atol=UNIT_TOL):
                raise ValidationError("network", "must be symmetric")
            if np.any(np.abs(np.diag(w)) > UNIT_TOL):
                raise ValidationError("network", "must have zero diagonal")
            if _spectral_radius(w) >= 1.0:
                raise ValidationError("network", "spectral radius must be strictly below 1")
            object.__setattr__(self, "network", _frozen(w))

        if self.ownership is not None:
            k = np.asarray(self.ownership, dtype=float)
            if k.shape != (n, n):
                raise ValidationError("ownership", f"must be {n}x{n}, got shape {k.shape}")
            if np.any(k < 0):
                raise ValidationError("ownership", "entries must be nonnegative")
            if np.any(np.abs(np.diag(k) - 1.0) > UNIT_TOL):
                raise ValidationError("ownership", "diagonal entries must equal 1")
            if np.linalg.eigvalsh((k + k.T) / 2).min() < -UNIT_TOL:
                raise ValidationError("ownership", "(K + K^T)/2 must be positive semidefinite")
            object.__setattr__(self, "ownership", _frozen(k))

    @property
    def n(self) -> int:
        return self.gamma.size

    @property
    def m(self) -> int:
        return self.beta.size

    def replace(self, **changes) -> "MarketInstance":
        kw = dict(alpha=self.alpha, beta=self.beta, gamma=self.gamma,
                  network=self.network, ownership=self.ownership)
        kw.update(changes)
        return MarketInstance(**kw)

    def __eq__(self, other):
        if not isinstance(other, MarketInstance):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return a.shape == b.shape and bool(np.array_equal(a, b))

        return (self.alpha == other.alpha and same(self.beta, other.beta)
                and same(self.gamma, other.gamma) and same(self.network, other.network)
                and same(self.ownership, other.ownership))

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "n": self.n,
            "m": self.m,
            "alpha": self.alpha,
            "beta": self.beta.tolist(),
            "gamma": self.gamma.tolist(),
        }
        if self.network is not None:
            d["network"] = self.network.tolist()
        if self.ownership is not None:
            d["ownership"] = self.ownership.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MarketInstance":
        if not isinstance(d, dict):
            raise ValidationError("instance", "must be a JSON object")
        for key in ("alpha", "beta", "gamma"):
            if key not in d:
                raise ValidationError(key, "missing")
        unknown = set(d) - {"n", "m", "alpha", "beta", "gamma", "network", "ownership"}
        if unknown:
            raise ValidationError(sorted(unknown)[0], "unknown key")
        try:
            inst = cls(alpha=d["alpha"], beta=d["beta"], gamma=d["gamma"],
                       network=d.get("network"), ownership=d.get("ownership"))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError("instance", str(exc)) from exc
        if "n" in d and d["n"] != inst.n:
            raise ValidationError("n", f"declared {d['n']} but gamma has {inst.n} entries")
        if "m" in d and d["m"] != inst.m:
            raise ValidationError("m", f"declared {d['m']} but beta has {inst.m} entries")
        return inst

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MarketInstance":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError("instance", f"malformed JSON: {exc}") from exc
        return cls.from_dict(d)


@dataclass(frozen=True, eq=False)
class CharProfile:
    """Characteristics profile: an m x n matrix whose columns are unit vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[1] < 1:
            raise ValidationError("profile", "must be an m x n matrix")
        norms = np.linalg.norm(a, axis=0)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
        if bad.size:
            raise ValidationError("profile", f"column {bad[0]} has norm {norms[bad[0]]:.15g}")
        object.__setattr__(self, "matrix", _frozen(a))

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.matrix[:, i]

    def cosines(self) -> np.ndarray:
        return self.matrix.T @ self.matrix

    def to_list(self) -> list:
        return self.matrix.tolist()

    def to_csv(self) -> str:
        """One column per firm, one row per common characteristic."""
        header = ",".join(f"firm{i + 1}" for i in range(self.n))
        rows = [",".join(f"{v:.12g}" for v in row) for row in self.matrix]
        return "\n".join([header, *rows]) + "\n"


@dataclass(frozen=True, eq=False)
class Allocation:
    profile: CharProfile
    output: np.ndarray
    x: np.ndarray = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.output, dtype=float)
        if q.shape != (self.profile.n,):
            raise ValidationError("output", f"expected length {self.profile.n}, got shape {q.shape}")
        if np.any(q < 0):
            raise ValidationError("output", "must be nonnegative")
        object.__setattr__(self, "output", _frozen(q))
        object.__setattr__(self, "x", _frozen(self.profile.matrix @ q))

    @property
    def q(self) -> np.ndarray:
        return self.output

    @property
    def y(self) -> np.ndarray:
        return self.output

    @property
    def A(self) -> np.ndarray:
        return self.profile.matrix

    @classmethod
    def from_arrays(cls, A, q) -> "Allocation":
        return cls(CharProfile(A), q)


@dataclass(frozen=True)
class PriceReport:
    """Net prices (p - c), profits and surplus for an allocation.

    Raw prices and labor are not reported: only gamma = b - c is a primitive.
    """

    markups: np.ndarray
    profits: np.ndarray
    total_surplus: float
    aggregate_profit: float

    @property
    def consumer_surplus(self) -> float:
        return self.total_surplus - self.aggregate_profit


def _check(inst: MarketInstance, alloc: Allocation):
    if alloc.profile.m != inst.m or alloc.profile.n != inst.n:
        raise ValidationError(
            "allocation",
            f"shape {alloc.profile.m}x{alloc.profile.n} does not match market {inst.m}x{inst.n}")


def _firm_index(inst: MarketInstance, i: int) -> int:
    if not isinstance(i, (int, np.integer)) or not 0 <= i < inst.n:
        raise IndexError(f"firm index {i} out of range for n={inst.n}")
    return int(i)


def markups(inst: MarketInstance, alloc: Allocation) -> np.ndarray:
    _check(inst, alloc)
    A, q = alloc.A, alloc.q
    # a_i^T (beta - sum_{j != i} q_j a_j) = a_i^T (beta - A q) + q_i
    common = A.T @ (inst.beta - alloc.x) + q
    return inst.alpha * common - (1.0 + inst.alpha) * q + inst.gamma


def markup(inst: MarketInstance, alloc: Allocation, i: int) -> float:
    """Net price p_i - c_i of firm ``i`` at the allocation."""
    i = _firm_index(inst, i)
    _check(inst, alloc)
    A, q = alloc.A, alloc.q
    others = alloc.x - q[i] * A[:, i]
    return float(inst.alpha * A[:, i] @ (inst.beta - others)
                 - (1.0 + inst.alpha) * q[i] + inst.gamma[i])


def firm_profit(inst: MarketInstance, alloc: Allocation, i: int) -> float:
    i = _firm_index(inst, i)
    return markup(inst, alloc, i) * float(alloc.q[i])


def surplus(alpha: float, beta, gamma, A, q) -> float:
    """Total surplus from raw arrays, without validating the primitives."""
    q = np.asarray(q, dtype=float)
    x = np.asarray(A, dtype=float) @ q
    return float(alpha * (x @ np.asarray(beta) - 0.5 * x @ x) + q @ np.asarray(gamma) - 0.5 * q @ q)


def total_surplus(inst: MarketInstance, alloc: Allocation) -> float:
    _check(inst, alloc)
    x, y = alloc.x, alloc.y
    return float(inst.alpha * (x @ inst.beta - 0.5 * x @ x) + y @ inst.gamma - 0.5 * y @ y)


def aggregate_profit(inst: MarketInstance, alloc: Allocation) -> float:
    _check(inst, alloc)
    x, y = alloc.x, alloc.y
    return float(inst.alpha * (x @ inst.beta - x @ x) + y @ inst.gamma - y @ y)


def demand_system(inst: MarketInstance, profile: CharProfile) -> tuple[np.ndarray, np.ndarray]:
    """Return the net demand intercept ``alpha A^T beta + gamma`` and ``Sigma_A``.

    ``Sigma_A = alpha A^T A + I`` is the inverse-demand slope matrix, so net
    prices are ``intercept - Sigma_A q``.
    """
    A = profile.matrix
    if A.shape != (inst.m, inst.n):
        raise ValidationError("profile", f"shape {A.shape} does not match market ({inst.m}, {inst.n})")
    intercept = inst.alpha * A.T @ inst.beta + inst.gamma
    sigma = inst.alpha * A.T @ A + np.eye(inst.n)
    return intercept, sigma


def price_report(inst: MarketInstance, alloc: Allocation) -> PriceReport:
    mk = markups(inst, alloc)
    return PriceReport(
        markups=mk,
        profits=mk * alloc.q,
        total_surplus=total_surplus(inst, alloc),
        aggregate_profit=aggregate_profit(inst, alloc),
    )
