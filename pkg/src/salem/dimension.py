"""Dyadic ball covers, covering sums and box-counting estimates.

A shell of base ``M`` collects the moduli with ``M/2 <= max_j |q_j| < M``; each
contributes ``|N(q)|`` balls of radius ``height(q)^-(1+tau)`` centred at the
points ``A_q^{-1} r mod 1``.  Covering sums ``sum r(B)^s`` over the shells
``M, 2M, 4M, ...`` shrink with the base when ``s`` exceeds ``2n/(1+tau)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import BudgetExceeded, DegenerateMask
from .numfield import FieldContext
from .qselect import box_points, budget
from .residues import residue_system


@dataclass
class ShellLevel:
    base: int
    coords: np.ndarray = field(repr=False)
    norms: np.ndarray = field(repr=False)    # |N(q)|
    heights: np.ndarray = field(repr=False)
    tau: float = 1.0

    @property
    def radii(self) -> np.ndarray:
        return self.heights.astype(float) ** (-(1.0 + self.tau))

    @property
    def ball_count(self) -> int:
        return int(self.norms.sum())

    def covering_sum(self, s: float) -> float:
        return float((self.norms * self.radii**s).sum())


@dataclass
class BallCover:
    ctx: FieldContext = field(repr=False)
    M: int
    tau: float
    levels: list[ShellLevel]

    @property
    def ball_count(self) -> int:
        return sum(lv.ball_count for lv in self.levels)

    @property
    def max_radius(self) -> float:
        return max(float(lv.radii.max()) for lv in self.levels if len(lv.coords))

    def centers(self, level: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Ball centers of one level with their radii; guarded by the operation budget."""
        lv = self.levels[level]
        if lv.ball_count * self.ctx.n > budget():
            raise BudgetExceeded(f"{lv.ball_count} balls at level {level} exceed the budget")
        pts, rad = [], []
        for q, h in zip(lv.coords, lv.heights):
            elem = self.ctx.element(q.tolist())
            a = self.ctx.mult_matrix_int(q)
            adj = np.asarray(linalg.int_adj_batch(a), dtype=np.int64)
            det = int(linalg.int_det_batch(a))
            reps = residue_system(elem).reps_array
            num = (reps @ adj.T) * (1 if det > 0 else -1)
            pts.append((num % abs(det)) / abs(det))
            rad.append(np.full(abs(det), float(h) ** (-(1.0 + self.tau))))
        return np.concatenate(pts), np.concatenate(rad)


def shell_moduli(ctx: FieldContext, M: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(coords, |N(q)|, height)`` for nonzero-norm ``q`` with ``M/2 <= max|q_j| < M``."""
    n = ctx.n
    if (M - 1) ** n * 2**n > budget():
        raise BudgetExceeded(f"shell of base {M} exceeds the budget")
    pts = box_points(-(M - 1), M - 1, n)
    h = np.abs(pts).max(axis=1)
    pts = pts[(h >= (M + 1) // 2) & (h < M)]
    norms = np.abs(np.asarray(linalg.int_det_batch(ctx.mult_matrices_int(pts)), dtype=np.int64))
    keep = norms != 0
    pts, norms = pts[keep], norms[keep]
    return pts, norms, np.abs(pts).max(axis=1)


def ball_cover(ctx: FieldContext, M: int, tau: float, levels: int = 1) -> BallCover:
    if M % 2 or M < 2:
        raise ValueError("M must be an even integer >= 2")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    out = []
    for j in range(levels):
        base = M * 2**j
        c, nq, h = shell_moduli(ctx, base)
        out.append(ShellLevel(base, c, nq, h, tau))
    return BallCover(ctx, M, tau, out)


def covering_sum(cover: BallCover, s: float) -> dict:
    per = [lv.covering_sum(s) for lv in cover.levels]
    return {"s": s, "levels": per, "total": float(sum(per))}


def points_covered(cover: BallCover, pts: np.ndarray, levels=None) -> np.ndarray:
    """For each point of the torus, whether it lies in some ball of the chosen levels."""
    from scipy.spatial import cKDTree

    pts = np.mod(np.asarray(pts, dtype=float), 1.0)
    hit = np.zeros(len(pts), dtype=bool)
    for k in levels if levels is not None else range(len(cover.levels)):
        centers, radii = cover.centers(k)
        for r in np.unique(radii):
            sel = radii == r
            tree = cKDTree(np.mod(centers[sel], 1.0), boxsize=1.0 + 1e-15)
            d, _ = tree.query(pts[~hit])
            idx = np.nonzero(~hit)[0]
            hit[idx[d <= r * (1 + 1e-12)]] = True
    return hit


def box_count_dimension(mask: np.ndarray, eps_list=None) -> dict:
    """Slope of ``log N(eps)`` against ``log(1/eps)`` for a boolean mask on a periodic grid."""
    mask = np.asarray(mask, dtype=bool)
    res = mask.shape[0]
    n = mask.ndim
    if not mask.any():
        raise DegenerateMask("mask is empty")
    if eps_list is None:
        eps_list = [2.0**-k for k in range(1, int(np.log2(res)) + 1)]
    counts = []
    for eps in eps_list:
        k = int(round(1.0 / eps))
        if k < 1 or res % k:
            raise DegenerateMask(f"box size {eps} does not divide the grid of {res}")
        b = res // k
        blocks = mask.reshape(*sum(((k, b) for _ in range(n)), ()))
        occupied = blocks.any(axis=tuple(range(1, 2 * n, 2)))
        counts.append(int(occupied.sum()))
    if len(eps_list) < 2:
        raise DegenerateMask("need at least two box sizes")
    x = np.log(1.0 / np.asarray(eps_list, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    coef, resid, *_ = np.polyfit(x, y, 1, full=True)
    return {
        "slope": float(coef[0]),
        "residual": float(resid[0]) if len(resid) else 0.0,
        "eps": [float(e) for e in eps_list],
        "counts": counts,
    }
