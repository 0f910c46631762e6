"""Monopoly versus oligopoly for a fixed linear demand system ``(psi, Sigma)``.

With net inverse demand ``psi - Sigma q`` and ``Sigma`` having a constant
diagonal ``lam_bar``, the planner, monopoly and Cournot outputs are

    q_planner = Sigma^-1 psi,   q_monopoly = q_planner / 2,
    q_cournot = (Sigma + lam_bar I)^-1 psi.

In the eigenbasis of ``Sigma`` the welfare gap between Cournot and monopoly is
a weighted sum of squared projections of ``psi``; the weights are positive
exactly on eigenvalues above ``lam_bar``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import CharProfile, ValidationError, demand_system

SYM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralInstance:
    psi: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float)
        S = np.asarray(self.sigma, dtype=float)
        n = psi.size
        if psi.ndim != 1 or n < 1:
            raise ValidationError("psi", "must be a nonempty vector")
        if np.any(psi <= 0):
            raise ValidationError("psi", "entries must be strictly positive")
        if S.shape != (n, n):
            raise ValidationError("sigma", f"must be {n}x{n}, got shape {S.shape}")
        if not np.allclose(S, S.T, rtol=0.0, atol=SYM_TOL):
            raise ValidationError("sigma", "must be symmetric")
        d = np.diag(S)
        if np.ptp(d) > SYM_TOL:
            raise ValidationError("sigma", "diagonal entries must be equal")
        if d[0] <= 1.0:
            raise ValidationError("sigma", "common diagonal must exceed 1")
        if np.linalg.eigvalsh(S).min() <= 0:
            raise ValidationError("sigma", "must be positive definite")
        for name, arr in (("psi", psi), ("sigma", S)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.psi.size

    @property
    def lam_bar(self) -> float:
        return float(np.trace(self.sigma) / self.n)

    @classmethod
    def from_market(cls, inst, A) -> "SpectralInstance":
        """Demand system induced by a fixed characteristics profile."""
        profile = A if isinstance(A, CharProfile) else CharProfile(A)
        psi, S = demand_system(inst, profile)
        return cls(psi, S)

    def to_dict(self) -> dict:
        return {"psi": self.psi.tolist(), "sigma": self.sigma.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralInstance":
        if not isinstance(d, dict) or "psi" not in d or "sigma" not in d:
            raise ValidationError("spectral", "needs keys psi and sigma")
        return cls(d["psi"], d["sigma"])

    @classmethod
    def from_json(cls, text: str) -> "SpectralInstance":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError("spectral", f"malformed JSON: {exc}") from exc


def jacobi_eigh(S, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns eigenvalues in decreasing order and the matching orthonormal
    eigenvectors as columns.
    """
    a = np.array(S, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1e-300)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        # summed directly: subtracting the diagonal from the full norm cancels badly
        if np.linalg.norm(a[offdiag]) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                if abs(apq) <= max(1e-300, 1e-18 * abs(diff)):
                    a[p, q] = a[q, p] = 0.0  # negligible against the diagonal gap
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def spectral_outputs(si: SpectralInstance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    q_plan = np.linalg.solve(si.sigma, si.psi)
    q_cournot = np.linalg.solve(si.sigma + si.lam_bar * np.eye(si.n), si.psi)
    return q_plan, q_plan / 2.0, q_cournot


def spectral_welfare(si: SpectralInstance, q) -> float:
    q = np.asarray(q, dtype=float)
    return float(si.psi @ q - 0.5 * q @ si.sigma @ q)


def spectral_welfares(si: SpectralInstance) -> tuple[float, float, float]:
    return tuple(spectral_welfare(si, q) for q in spectral_outputs(si))


def spectral_weights(eigenvalues, lam_bar: float) -> np.ndarray:
    lam = np.asarray(eigenvalues, dtype=float)
    return (lam + 3.0 * lam_bar) * (lam - lam_bar) / (lam * (lam + lam_bar) ** 2)


@dataclass(frozen=True, eq=False)
class SpectralReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    k: int
    weights: np.ndarray
    projections: np.ndarray  # (psi^T u_i)^2
    q_planner: np.ndarray
    q_monopoly: np.ndarray
    q_cournot: np.ndarray
    welfare_planner: float
    welfare_monopoly: float
    welfare_cournot: float
    major: float
    minor: float
    verdict: str  # "oligopoly", "monopoly" or "tie"

    @property
    def identity_gap(self) -> float:
        """``Omega(q_cournot) - Omega(q_monopoly)`` from the eigen expansion."""
        return float(self.weights @ self.projections / 8.0)

    @property
    def direct_gap(self) -> float:
        return self.welfare_cournot - self.welfare_monopoly

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "k": self.k,
            "weights": self.weights.tolist(),
            "projections": self.projections.tolist(),
            "q_planner": self.q_planner.tolist(),
            "q_monopoly": self.q_monopoly.tolist(),
            "q_cournot": self.q_cournot.tolist(),
            "welfare": {"planner": self.welfare_planner, "monopoly": self.welfare_monopoly,
                        "cournot": self.welfare_cournot},
            "major": self.major,
            "minor": self.minor,
            "verdict": self.verdict,
        }


def ranking_condition(si: SpectralInstance, tol: float = 1e-12) -> SpectralReport:
    lam, U = jacobi_eigh(si.sigma)
    lam_bar = si.lam_bar
    k = int(np.sum(lam > lam_bar))
    w = spectral_weights(lam, lam_bar)
    proj = (U.T @ si.psi) ** 2
    major = float(np.abs(w[:k]) @ proj[:k])
    minor = float(np.abs(w[k:]) @ proj[k:])
    if abs(major - minor) <= tol * max(major + minor, 1e-300) or major == minor:
        verdict = "tie"
    else:
        verdict = "oligopoly" if major > minor else "monopoly"
    qp, qm, qc = spectral_outputs(si)
    return SpectralReport(
        eigenvalues=lam, eigenvectors=U, k=k, weights=w, projections=proj,
        q_planner=qp, q_monopoly=qm, q_cournot=qc,
        welfare_planner=spectral_welfare(si, qp), welfare_monopoly=spectral_welfare(si, qm),
        welfare_cournot=spectral_welfare(si, qc), major=major, minor=minor, verdict=verdict)


@dataclass(frozen=True)
class ConcentrationReport:
    left: float
    right: float
    verdict: str
    f: float
    g: float

    @property
    def polynomial_sufficient(self) -> bool:
        return self.f > self.g

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right, "verdict": self.verdict,
                "f": self.f, "g": self.g, "polynomial_sufficient": self.polynomial_sufficient}


def sufficiency_polynomials(n: int, alpha: float) -> tuple[float, float]:
    a = alpha
    f = a * a * n * n * (2.0 + a) ** 2 * (4.0 + (n + 3) * a)
    g = (1.0 + n * a) * (4.0 + 3.0 * a) * (2.0 + (n + 1) * a) ** 2
    return f, g


def concentration_specialization(n: int, alpha: float, gamma) -> ConcentrationReport:
    """Closed-form ranking when every firm sits on ``beta``.

    ``left > right`` means the concentration equilibrium beats monopoly.
    """
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (n,))
    a = float(alpha)
    R = float(gamma.sum())
    var = float(np.mean((gamma - R / n) ** 2))
    left = (n - 1) * (4.0 + (n + 3) * a) * (a + R / n) ** 2 / ((1.0 + n * a) * (2.0 + (n + 1) * a) ** 2)
    right = (4.0 + 3.0 * a) * var / (2.0 + a) ** 2
    verdict = "tie" if left == right else ("oligopoly" if left > right else "monopoly")
    f, g = sufficiency_polynomials(n, a)
    return ConcentrationReport(left=left, right=right, verdict=verdict, f=f, g=g)
