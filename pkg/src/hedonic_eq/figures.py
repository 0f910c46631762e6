"""Symmetric-case sweeps behind the welfare table and the output/welfare curves.

Each sweep returns ``(header, rows)``; ``None`` cells mean the object does not
exist at that grid point.  Grid points are evaluated on a thread pool whose
size is capped by ``HEDONIC_EQ_THREADS``; rows always come back in grid order.
"""

from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .extensions import ownership_sweep
from .model import MarketInstance
from .welfare import symmetric_cutoffs, symmetric_welfare_table


def parse_grid(spec: str) -> np.ndarray:
    """``"lo:hi:steps"`` to an increasing grid of ``steps`` points."""
    try:
        lo_s, hi_s, steps_s = spec.split(":")
        lo, hi, steps = float(lo_s), float(hi_s), int(steps_s)
    except ValueError as exc:
        raise ValueError(f"grid must look like lo:hi:steps, got {spec!r}") from exc
    if steps < 2 or not lo < hi:
        raise ValueError("grid needs lo < hi and at least 2 steps")
    return np.linspace(lo, hi, steps)


def worker_count() -> int:
    env = os.environ.get("HEDONIC_EQ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def ordered_map(fn: Callable, items: Iterable, workers: Optional[int] = None) -> list:
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if np.isnan(v) else f"{float(v):.12g}"
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(format_cell(v) for v in row) + "\n")
    return buf.getvalue()


def table_region(n: int, alpha: float, g: float) -> int:
    """Column (1-4) of the symmetric welfare table containing ``g``."""
    cut = symmetric_cutoffs(n, alpha)
    if g <= cut["planner"]:
        return 1
    if g <= cut["differentiation"]:
        return 2
    if g <= cut["concentration"]:
        return 3
    return 4


def _rows(n, alpha, grid):
    return ordered_map(lambda g: symmetric_welfare_table(n, alpha, float(g), direct=False), grid)


def fig4(n: int = 2, alpha: float = 1.0, grid=None):
    grid = np.linspace(0.0, 5.0, 200) if grid is None else grid
    header = ["gamma", "q_monopoly", "q_differentiation", "q_concentration",
              "q_polarization_plus", "q_polarization_minus"]
    rows = [[r.gamma, r.q_monopoly, r.q_differentiation, r.q_concentration,
             r.q_polarization_plus, r.q_polarization_minus] for r in _rows(n, alpha, grid)]
    return header, rows


def fig6(n: int = 2, alpha: float = 1.0, grid=None):
    grid = np.linspace(0.0, 5.0, 200) if grid is None else grid
    header = ["gamma", "monopoly_ratio", "differentiation_ratio", "concentration_ratio",
              "polarization_ratio"]

    def ratio(v, base):
        return None if v is None else v / base

    rows = [[r.gamma, ratio(r.monopoly, r.planner), ratio(r.differentiation, r.planner),
             ratio(r.concentration, r.planner), ratio(r.polarization, r.planner)]
            for r in _rows(n, alpha, grid)]
    return header, rows


def table1(n: int = 2, alpha: float = 1.0, grid=None):
    grid = np.linspace(0.0, 5.0, 200) if grid is None else grid
    header = ["gamma", "region", "planner_regime", "planner", "monopoly", "differentiation",
              "concentration", "polarization"]
    rows = [[r.gamma, table_region(n, alpha, r.gamma), r.planner_regime, r.planner, r.monopoly,
             r.differentiation, r.concentration, r.polarization] for r in _rows(n, alpha, grid)]
    return header, rows


def fig8(n: int = 2, alpha: float = 1.0, gammas: Sequence[float] = (2.0, 3.0, 4.0), grid=None):
    """Differentiation-equilibrium welfare over the planner's, as ``kappa`` varies."""
    kappas = np.linspace(0.0, 1.0, 51) if grid is None else np.asarray(grid, dtype=float)
    beta = np.zeros(2)
    beta[0] = 1.0
    columns = ordered_map(
        lambda g: ownership_sweep(MarketInstance(alpha, beta, np.full(n, float(g))), kappas), gammas)
    header = ["kappa"] + [f"ratio_gamma_{format_cell(float(g))}" for g in gammas]
    rows = [[float(k)] + [col[i].ratio for col in columns] for i, k in enumerate(kappas)]
    return header, rows


FIGURES = {"fig4": fig4, "fig6": fig6, "fig8": fig8, "table1": table1}
