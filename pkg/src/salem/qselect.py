"""Modulus pools, divisor enumeration and embedding diagnostics.

The pool at scale ``M`` starts as every integral ``q`` with all coordinates in
``[M/2, M]``.  Pruning removes each ``q`` dividing a nonzero element
``C_B * sum_j a_j w'_j`` with ``|a_j| <= floor(M^{1/(2n)})``; the band step
keeps the dyadic norm band ``N/2 <= |N(q)| < N`` holding the most members.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import linalg
from .errors import BoxTooLarge, EmptyPool, RootFindingFailure, ScaleTooSmall, ZeroElement
from .numfield import (
    FieldContext,
    FieldElement,
    companion_table,
    divides_batch,
    integer_nth_root_floor,
)

DEFAULT_BUDGET = 10**8


def budget() -> int:
    raw = os.environ.get("SALEM_BUDGET")
    return int(float(raw)) if raw else DEFAULT_BUDGET


def box_points(lo: int, hi: int, n: int) -> np.ndarray:
    """All integer vectors with every coordinate in ``[lo, hi]``, lexicographic order."""
    axis = np.arange(lo, hi + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass(frozen=True, eq=False)
class ModulusPool:
    ctx: FieldContext = field(repr=False)
    M: int
    tau: float
    coords: np.ndarray = field(repr=False)
    norms: np.ndarray = field(repr=False)   # signed N(q)
    stage: str                             # "Box" | "Pruned" | "NormBand"
    band_N: int | None = None

    def __len__(self):
        return len(self.coords)

    @cached_property
    def members(self) -> list[FieldElement]:
        return [self.ctx.element(row.tolist()) for row in self.coords]

    @property
    def abs_norms(self) -> np.ndarray:
        return np.abs(self.norms)


def q_box(ctx: FieldContext, M: int, tau: float = 1.0) -> ModulusPool:
    if M < 2:
        raise ScaleTooSmall(f"M must be at least 2, got {M}")
    if M % 2:
        raise ValueError(f"M must be even so that M/2 is an integer, got {M}")
    size = (M // 2 + 1) ** ctx.n
    if size > budget():
        raise BoxTooLarge(f"(M/2+1)^n = {size} exceeds the enumeration budget {budget()}")
    coords = box_points(M // 2, M, ctx.n)
    norms = np.asarray(linalg.int_det_batch(ctx.mult_matrices_int(coords)))
    return ModulusPool(ctx, M, tau, coords, norms.astype(np.int64), "Box")


def pruning_radius(M: int, n: int) -> int:
    """``floor(M^{1/(2n)})`` computed exactly."""
    return integer_nth_root_floor(M, 2 * n)


def pruning_candidates(ctx: FieldContext, M: int) -> np.ndarray:
    """Integer coordinates of every nonzero ``C_B * sum a_j w'_j`` with ``|a_j| <= M^{1/(2n)}``."""
    rad = pruning_radius(M, ctx.n)
    a = box_points(-rad, rad, ctx.n)
    a = a[np.any(a != 0, axis=1)]
    return a @ ctx.cleared_dual_matrix.T


def prune_small_divisors(pool: ModulusPool) -> ModulusPool:
    if pool.stage != "Box":
        raise ValueError(f"pruning expects a Box pool, got stage {pool.stage}")
    cand = pruning_candidates(pool.ctx, pool.M)
    if len(cand) == 0 or len(pool) == 0:
        keep = np.ones(len(pool), dtype=bool)
    else:
        keep = ~divides_batch(pool.ctx, pool.coords, cand).any(axis=1)
    return replace(pool, coords=pool.coords[keep], norms=pool.norms[keep], stage="Pruned")


def dyadic_band(norm: int) -> int:
    """The power of two ``N`` with ``N/2 <= |norm| < N``."""
    return 1 << int(abs(int(norm))).bit_length()


def norm_band_select(pool: ModulusPool) -> ModulusPool:
    if pool.stage != "Pruned":
        raise ValueError(f"band selection expects a Pruned pool, got stage {pool.stage}")
    if len(pool) == 0:
        raise EmptyPool(f"no moduli survive pruning at M={pool.M}")
    bands = np.array([dyadic_band(v) for v in pool.norms], dtype=np.int64)
    values, counts = np.unique(bands, return_counts=True)
    # np.unique sorts ascending, argmax returns the first maximum: lowest N wins ties
    best = int(values[int(np.argmax(counts))])
    keep = bands == best
    return replace(pool, coords=pool.coords[keep], norms=pool.norms[keep], stage="NormBand",
                   band_N=best)


def select_moduli(ctx: FieldContext, M: int, tau: float = 1.0, prune: bool = True) -> dict:
    """Run all three stages and return them keyed by stage name."""
    box = q_box(ctx, M, tau)
    pruned = prune_small_divisors(box) if prune else replace(box, stage="Pruned")
    band = norm_band_select(pruned)
    return {"Box": box, "Pruned": pruned, "NormBand": band}


# ---------------------------------------------------------------------------
# Divisors
# ---------------------------------------------------------------------------

def divisors_in_box(q: FieldElement, H: int, max_box: int | None = None) -> list[FieldElement]:
    """Every nonzero ``b`` with ``max_j |b_j| <= H`` dividing ``q`` (brute force over the box)."""
    if q.is_zero:
        raise ZeroElement("zero has every element as a divisor")
    n = q.ctx.n
    limit = max_box if max_box is not None else budget()
    if (2 * H + 1) ** n > limit:
        raise BoxTooLarge(f"(2H+1)^n = {(2 * H + 1) ** n} exceeds budget {limit}")
    target = np.array([q.int_coords()], dtype=np.int64)
    found = []
    for chunk in _box_chunks(H, n):
        mats = q.ctx.mult_matrices_int(chunk)
        dets = np.asarray(linalg.int_det_batch(mats))
        ok = dets != 0
        chunk = chunk[ok]
        if len(chunk):
            mask = divides_batch(q.ctx, chunk, target)[:, 0]
            found.extend(chunk[mask].tolist())
    return [q.ctx.element(b) for b in found]


def _box_chunks(H: int, n: int, size: int = 200_000):
    axis = np.arange(-H, H + 1, dtype=np.int64)
    if n == 1:
        yield axis[:, None]
        return
    tail = box_points(-H, H, n - 1)
    per = max(1, size // len(tail))
    for start in range(0, len(axis), per):
        head = axis[start:start + per]
        block = np.concatenate(
            [np.column_stack([np.full(len(tail), h), tail]) for h in head]
        )
        yield block


def lattice_points_in_box(h, H: int) -> np.ndarray:
    """Points of the column lattice of upper triangular ``h`` lying in ``[-H, H]^n``."""
    n = len(h)
    return lattice_points_in_range(h, [-H] * n, [H] * n)


def lattice_points_in_range(h, lo, hi) -> np.ndarray:
    """Points ``x`` of the column lattice of upper triangular ``h`` with ``lo <= x <= hi`` coordinatewise."""
    n = len(h)
    lo_v = [int(v) for v in lo]
    hi_v = [int(v) for v in hi]
    partial = np.zeros((1, n), dtype=np.int64)
    # fix the multiplier of column k from the bottom row up; rows below k are already final
    for k in range(n - 1, -1, -1):
        d = h[k][k]
        c = partial[:, k]
        lo_t = -((c - lo_v[k]) // d)         # ceil((lo - c) / d)
        hi_t = (hi_v[k] - c) // d
        counts = np.maximum(hi_t - lo_t + 1, 0)
        if counts.sum() == 0:
            return np.zeros((0, n), dtype=np.int64)
        idx = np.repeat(np.arange(len(partial)), counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        t = lo_t[idx] + offs
        col = np.array([h[r][k] for r in range(n)], dtype=np.int64)
        partial = partial[idx] + t[:, None] * col[None, :]
    return partial


def divisor_count_grid(ctx: FieldContext, H: int) -> np.ndarray:
    """``counts[q] = #{b : |b|_inf <= H, b != 0, b | q}`` for every ``q`` in ``[-H, H]^n``.

    Each divisor ``b`` contributes to the multiples lying in the box, found by
    walking the lattice ``A_b Z^n`` from its Hermite form.
    """
    n = ctx.n
    side = 2 * H + 1
    if side**n > budget():
        raise BoxTooLarge(f"(2H+1)^n = {side ** n} exceeds budget {budget()}")
    counts = np.zeros(side**n, dtype=np.int64)
    strides = side ** np.arange(n - 1, -1, -1)
    pts = box_points(-H, H, n)
    mats = ctx.mult_matrices_int(pts)
    dets = np.asarray(linalg.int_det_batch(mats))
    # associates generate the same lattice, so enumerate each Hermite form once
    ideals: dict[tuple, int] = {}
    for mat, det in zip(mats, dets):
        if det == 0:
            continue
        key = tuple(map(tuple, linalg.hnf_upper(mat.tolist())))
        ideals[key] = ideals.get(key, 0) + 1
    for hmat, mult in ideals.items():
        pts = lattice_points_in_box(hmat, H)
        # points of one lattice are distinct, so plain fancy-index addition is safe
        counts[(pts + H) @ strides] += mult
    return counts.reshape((side,) * n)


def max_divisor_count(ctx: FieldContext, H: int) -> tuple[int, tuple]:
    """``D(H)``: the largest divisor count over nonzero ``q`` of height ``<= H``, and a witness."""
    grid = divisor_count_grid(ctx, H).copy()
    grid[(H,) * ctx.n] = 0  # q = 0
    flat = int(np.argmax(grid))
    idx = np.unravel_index(flat, grid.shape)
    return int(grid[idx]), tuple(int(i) - H for i in idx)


# ---------------------------------------------------------------------------
# Embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Embeddings:
    real: np.ndarray        # shape (r1, n): rho_i(w_k)
    complex: np.ndarray     # shape (r2, n): sigma_i(w_k), one from each conjugate pair

    @property
    def r1(self) -> int:
        return len(self.real)

    @property
    def r2(self) -> int:
        return len(self.complex)

    def images(self, coords):
        x = np.asarray([float(c) for c in coords])
        return self.real @ x, self.complex @ x


def embeddings(ctx: FieldContext, tol: float = 1e-12) -> Embeddings:
    if ctx.min_poly is None:
        raise RootFindingFailure("embeddings need a minimal polynomial")
    coeffs = np.array(ctx.min_poly[::-1], dtype=float)
    roots = np.roots(coeffs)
    n = ctx.n
    if len(roots) != n:
        raise RootFindingFailure(f"min_poly has degree {len(roots)}, field has degree {n}")
    scale = max(1.0, float(np.abs(roots).max()))
    resid = np.abs(np.polyval(coeffs, roots))
    if np.any(resid > 1e-9 * scale**n):
        raise RootFindingFailure(f"root residuals too large: {resid.max():.3e}")
    if np.array_equal(ctx.mult_table, companion_table(ctx.min_poly)):
        images = roots[:, None] ** np.arange(n)[None, :]
    else:
        images = _images_from_eigenvectors(ctx)
    is_real = np.abs(images.imag).max(axis=1) <= tol * scale**n
    real = images[is_real].real
    cplx = _one_per_pair(images[~is_real])
    if len(real) + 2 * len(cplx) != n:
        raise RootFindingFailure("could not pair the complex embeddings")
    order = np.argsort(real[:, 1]) if len(real) and n > 1 else np.arange(len(real))
    return Embeddings(real=real[order], complex=cplx)


def _one_per_pair(cplx: np.ndarray) -> np.ndarray:
    kept = []
    used = np.zeros(len(cplx), dtype=bool)
    for i in range(len(cplx)):
        if used[i]:
            continue
        d = np.abs(cplx - np.conj(cplx[i])).max(axis=1)
        d[i] = np.inf
        d[used] = np.inf
        j = int(np.argmin(d))
        used[i] = used[j] = True
        a, b = cplx[i], cplx[j]
        # keep the member whose first non-real image has positive imaginary part
        k = int(np.argmax(np.abs(a.imag) > 1e-14))
        kept.append(a if a[k].imag > 0 else b)
    return np.array(kept, dtype=complex).reshape(len(kept), cplx.shape[1] if len(cplx) else 0)


def _images_from_eigenvectors(ctx: FieldContext) -> np.ndarray:
    # an embedding is a linear functional l with l A_x = sigma(x) l and l_0 = 1
    g = np.arange(1, ctx.n + 1, dtype=float)
    a = np.einsum("i,ijk->kj", g, ctx.mult_table.astype(float))
    vals, vecs = np.linalg.eig(a.T)
    if len(set(np.round(vals, 9))) != ctx.n:
        raise RootFindingFailure("generic element has repeated eigenvalues")
    ell = vecs.T
    return ell / ell[:, [0]]


def log_embedding(x: FieldElement, emb: Embeddings | None = None) -> np.ndarray:
    """``(log|rho_1(x)|, .., 2 log|sigma_1(x)|, ..)``."""
    if x.is_zero:
        raise ZeroElement("log embedding of zero is undefined")
    emb = emb or x.ctx.embedding_data
    re, cx = emb.images(x.coords)
    return np.concatenate([np.log(np.abs(re)), 2.0 * np.log(np.abs(cx))])


def embedding_norm(x: FieldElement, emb: Embeddings | None = None) -> float:
    emb = emb or x.ctx.embedding_data
    re, cx = emb.images(x.coords)
    return float(np.prod(re) * np.prod(np.abs(cx) ** 2))


def random_elements(ctx: FieldContext, count: int, height: int, rng) -> list[FieldElement]:
    out = []
    while len(out) < count:
        v = rng.integers(-height, height + 1, size=ctx.n)
        if np.any(v):
            out.append(ctx.element(v.tolist()))
    return out


def enumerate_heights(n: int, H: int):
    return itertools.product(range(-H, H + 1), repeat=n)
