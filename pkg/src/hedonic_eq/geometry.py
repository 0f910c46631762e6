"""Feasible aggregate characteristics and explicit profile construction.

For outputs ``q >= 0`` the reachable aggregates ``x = A q`` (unit columns in A)
form an annulus ("donut") with inner radius ``2 max(q) - sum(q)`` and outer
radius ``sum(q)``.  :func:`construct_profile` builds one concrete profile for
any reachable target by closing a planar polygon with edge lengths
``q_1, ..., q_n, |x|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .model import CharProfile

FEASIBILITY_SLACK = 1e-12
RANK_TOL = 1e-8
MAX_SIGN_SEARCH = 20


class InfeasibleTargetError(ValueError):
    pass


@dataclass(frozen=True)
class DonutRadii:
    inner: float
    outer: float


class Pattern(str, Enum):
    CONCENTRATION = "concentration"
    POLARIZATION = "polarization"
    DIFFERENTIATION = "differentiation"


@dataclass(frozen=True, eq=False)
class ProfilePattern:
    tag: Pattern
    rank: int
    sigma: Optional[np.ndarray] = None  # only for polarization, relative to ``axis``
    axis: Optional[np.ndarray] = None


def _as_output(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.ndim != 1:
        raise ValueError("output vector must be one-dimensional")
    if np.any(q < 0):
        raise ValueError("output vector must be nonnegative")
    return q


def inner_radius(q) -> float:
    q = _as_output(q)
    if q.size == 0:
        return 0.0
    return float(2.0 * q.max() - q.sum())


def outer_radius(q) -> float:
    q = _as_output(q)
    return float(q.sum())


def donut_radii(q) -> DonutRadii:
    return DonutRadii(inner=inner_radius(q), outer=outer_radius(q))


def is_feasible(q, x, m: Optional[int] = None, slack: float = FEASIBILITY_SLACK) -> bool:
    """True iff some profile with unit columns maps ``q`` to ``x``.

    Comparisons are inclusive, padded by ``slack * max(1, sum(q))``.  On a
    line (``m = 1``) the reachable set is the finite set of signed sums, which
    is searched directly.
    """
    q = _as_output(q)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if m is not None and x.size != m:
        raise ValueError(f"target has dimension {x.size}, expected m={m}")
    radii = donut_radii(q)
    pad = slack * max(1.0, radii.outer)
    if x.size == 1:
        try:
            _scalar_profile(q, float(x[0]), pad)
        except InfeasibleTargetError:
            return False
        return True
    norm = float(np.linalg.norm(x))
    return radii.inner - pad <= norm <= radii.outer + pad


def _plane_basis(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = x.size
    norm = np.linalg.norm(x)
    if norm > 0:
        e1 = x / norm
    else:
        e1 = np.zeros(m)
        e1[0] = 1.0
    if m == 2:
        # clockwise quarter turn keeps the construction rotation-equivariant
        return e1, np.array([e1[1], -e1[0]])
    k = int(np.argmin(np.abs(e1)))
    e2 = np.zeros(m)
    e2[k] = 1.0
    e2 -= (e2 @ e1) * e1
    return e1, e2 / np.linalg.norm(e2)


def _scalar_profile(q: np.ndarray, x: float, tol: float) -> np.ndarray:
    n = q.size
    if n > MAX_SIGN_SEARCH:
        raise ValueError(f"m=1 sign search limited to n <= {MAX_SIGN_SEARCH}")
    for sigma in itertools.product((1.0, -1.0), repeat=n):
        s = np.array(sigma)
        if abs(s @ q - x) <= tol:
            return s.reshape(1, n)
    raise InfeasibleTargetError(f"no sign vector sigma with sigma^T q = {x!r}")


def _triangle_area(a: float, b: float, c: float) -> float:
    # Kahan's ordering keeps needle-shaped triangles accurate
    a, b, c = sorted((a, b, c), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(max(0.0, prod))


def construct_profile(q, x, m: Optional[int] = None, *, mirror: bool = False) -> CharProfile:
    """Deterministically build ``A`` with unit columns and ``A q = x``.

    Firms are placed one at a time inside the plane spanned by ``x`` and a fixed
    orthogonal direction.  Each firm leaves a residual whose norm is the
    midpoint of the range that both it and the remaining firms can reach, which
    by the donut characterization is never empty.  ``mirror=True`` reflects the
    result across the ``x`` axis (the other intersection point of the circles).
    """
    q = _as_output(q)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if m is None:
        m = x.size
    if x.size != m:
        raise ValueError(f"target has dimension {x.size}, expected m={m}")
    n = q.size
    if n == 0:
        raise ValueError("need at least one firm")
    if not is_feasible(q, x):
        radii = donut_radii(q)
        raise InfeasibleTargetError(
            f"|x| = {np.linalg.norm(x):.12g} outside donut [{radii.inner:.12g}, {radii.outer:.12g}]")

    scale = max(1.0, float(q.sum()))
    if m == 1:
        return CharProfile(_scalar_profile(q, float(x[0]), 1e-9 * scale))

    suffix_sum = np.concatenate([np.cumsum(q[::-1])[::-1][1:], [0.0]])
    suffix_max = np.concatenate([np.maximum.accumulate(q[::-1])[::-1][1:], [0.0]])
    suffix_inner = np.maximum(0.0, 2.0 * suffix_max - suffix_sum)

    e1, e2 = _plane_basis(x)
    t = np.array([np.linalg.norm(x), 0.0])
    coords = np.zeros((2, n))
    for i in range(n):
        qi = q[i]
        tn = float(np.hypot(t[0], t[1]))
        if qi == 0.0:
            coords[:, i] = (1.0, 0.0)
            continue
        if tn <= 1e-15 * scale:
            a = np.array([1.0, 0.0])
        elif qi <= 1e-15 * scale:
            a = t / tn  # negligible output: the triangle is degenerate, follow the target
        else:
            lo = max(abs(tn - qi), suffix_inner[i])
            hi = min(tn + qi, suffix_sum[i])
            if lo > hi + 1e-9 * scale:
                raise InfeasibleTargetError(f"construction broke down at firm {i}")
            d = 0.5 * (lo + hi)
            u = t / tn
            if suffix_sum[i] == 0.0:
                a = u
            else:
                c = np.clip((tn * tn + qi * qi - d * d) / (2.0 * qi * tn), -1.0, 1.0)
                # sine from the triangle area: sqrt(1 - c^2) is too lossy near c = +-1
                s = min(1.0, 2.0 * _triangle_area(tn, qi, d) / (qi * tn))
                perp = np.array([-u[1], u[0]])
                plus, minus = c * u + s * perp, c * u - s * perp
                a = plus if plus[1] >= minus[1] else minus
        a = a / np.hypot(a[0], a[1])
        coords[:, i] = a
        t = t - qi * a
    if mirror:
        coords[1] = -coords[1]
    A = np.outer(e1, coords[0]) + np.outer(e2, coords[1])
    A /= np.linalg.norm(A, axis=0)
    return CharProfile(A)


def classify_profile(profile: Union[CharProfile, np.ndarray], tol: float = RANK_TOL) -> ProfilePattern:
    """Label a profile as concentration, polarization or differentiation.

    Concentration: all pairwise cosines are 1.  Polarization: all are +-1 with
    at least one -1.  Otherwise the numerical rank is at least two.
    """
    A = profile.matrix if isinstance(profile, CharProfile) else np.asarray(profile, dtype=float)
    sv = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0])) if sv.size and sv[0] > 0 else 0
    cos = A.T @ A
    if np.all(cos >= 1.0 - tol):
        return ProfilePattern(Pattern.CONCENTRATION, rank=min(rank, 1))
    if np.all(np.abs(cos) >= 1.0 - tol):
        axis = A[:, 0].copy()
        sigma = np.where(cos[0] >= 0, 1, -1)
        return ProfilePattern(Pattern.POLARIZATION, rank=min(rank, 1), sigma=sigma, axis=axis)
    return ProfilePattern(Pattern.DIFFERENTIATION, rank=max(rank, 2))
