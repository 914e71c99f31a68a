"""Single-scale density ``F_M`` on the torus and its Fourier coefficients.

``F_M`` is a normalized sum of bumps of radius ``M^{-(1+tau)}`` centred at the
points ``A_q^{-1} r mod 1`` (``q`` in the selected pool, ``r`` a residue).  Its
coefficients are

    F_hat(s) = phi_hat(|s| / M^{1+tau}) * sum_{q : s in A_q^T Z^n} |N(q)| / sum_q |N(q)|

since the residue sum for ``q`` is ``|N(q)|`` exactly on the lattice
``A_q^T Z^n`` and zero elsewhere.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from . import linalg
from .bump import BumpProfile, bump_profile
from .errors import EmptyPool, ResolutionTooCoarse, TableTooSmall, TauOutOfRange
from .numfield import FieldContext, integer_nth_root_floor
from .qselect import ModulusPool, lattice_points_in_range, select_moduli
from .residues import residue_system


# ---------------------------------------------------------------------------
# Fourier tables
# ---------------------------------------------------------------------------

@dataclass
class FourierTable:
    """Coefficients on the box ``|s|_inf <= S``; ``values[s + S]`` holds the entry for ``s``."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def S(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def n(self) -> int:
        return self.values.ndim

    def at(self, s):
        idx = tuple(int(x) + self.S for x in s)
        if any(i < 0 or i >= self.values.shape[0] for i in idx):
            return 0.0
        return self.values[idx]

    def crop(self, S: int) -> "FourierTable":
        if S > self.S:
            raise TableTooSmall(f"cannot crop a table of radius {self.S} to {S}")
        off = self.S - S
        sl = tuple(slice(off, off + 2 * S + 1) for _ in range(self.n))
        return FourierTable(self.values[sl].copy(), dict(self.meta))

    def frequencies(self):
        """Integer grids ``s_0, .., s_{n-1}`` matching ``values``."""
        axis = np.arange(-self.S, self.S + 1)
        return np.meshgrid(*([axis] * self.n), indexing="ij", sparse=True)

    def norm_sq(self) -> np.ndarray:
        return sum(g.astype(np.int64) ** 2 for g in self.frequencies())

    def norm_inf(self) -> np.ndarray:
        grids = self.frequencies()
        out = np.abs(grids[0])
        for g in grids[1:]:
            out = np.maximum(out, np.abs(g))
        return out

    def hermitian_defect(self) -> float:
        flipped = self.values[(slice(None, None, -1),) * self.n]
        return float(np.abs(flipped - np.conj(self.values)).max())

    def to_csv(self, path, threshold: float = 0.0) -> Path:
        """Write ``s_0..s_{n-1}, re, im`` rows with 17 significant digits (entries above ``threshold``)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        vals = self.values
        idx = np.argwhere(np.abs(vals) > threshold) if threshold > 0 else np.argwhere(np.ones_like(vals, dtype=bool))
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"s{k}" for k in range(self.n)] + ["re", "im"])
            for row in idx:
                v = complex(vals[tuple(row)])
                w.writerow([int(x) - self.S for x in row] + [f"{v.real:.17g}", f"{v.imag:.17g}"])
        return path

    @classmethod
    def from_csv(cls, path, S: int, n: int) -> "FourierTable":
        vals = np.zeros((2 * S + 1,) * n, dtype=complex)
        with Path(path).open() as fh:
            rows = list(csv.reader(fh))[1:]
        for row in rows:
            s = [int(x) for x in row[:n]]
            vals[tuple(x + S for x in s)] = complex(float(row[n]), float(row[n + 1]))
        if not np.any(vals.imag):
            vals = vals.real
        return cls(vals, {})


def delta_table(S: int, n: int) -> FourierTable:
    vals = np.zeros((2 * S + 1,) * n)
    vals[(S,) * n] = 1.0
    return FourierTable(vals, {"provenance": "delta"})


# ---------------------------------------------------------------------------
# Scale function
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ScaleFunction:
    ctx: FieldContext = field(repr=False)
    M: int
    tau: float
    pool: ModulusPool = field(repr=False)
    bump: BumpProfile = field(repr=False)

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def scale(self) -> float:
        """``M^{1+tau}``; the bump radius is its reciprocal."""
        return float(self.M) ** (1.0 + self.tau)

    @property
    def radius(self) -> float:
        return 1.0 / self.scale

    @property
    def band_N(self) -> int:
        return self.pool.band_N

    @cached_property
    def total_norm(self) -> int:
        return int(self.pool.abs_norms.sum())

    @property
    def g_hat_zero(self) -> float:
        """Integral of ``G_M``: ``M^{-n(1+tau)} * sum |N(q)|``."""
        return self.total_norm * self.scale ** (-self.n)

    @property
    def g_hat_zero_exact(self) -> Fraction | None:
        e = 1.0 + self.tau
        if not float(e).is_integer():
            return None
        return Fraction(self.total_norm, self.M ** (self.n * int(e)))

    @cached_property
    def centers(self) -> np.ndarray:
        """``A_q^{-1} r mod 1`` for every member and residue, shape ``(sum |N|, n)``."""
        out = []
        for q in self.pool.members:
            a = self.ctx.mult_matrix_int(q.int_coords())
            adj = np.asarray(linalg.int_adj_batch(a), dtype=np.int64)
            det = int(linalg.int_det_batch(a))
            reps = residue_system(q).reps_array
            num = (reps @ adj.T) * (1 if det > 0 else -1)
            out.append((num % abs(det)) / abs(det))
        return np.concatenate(out)

    @cached_property
    def center_owner(self) -> np.ndarray:
        """Index into the pool of the modulus each center belongs to."""
        return np.repeat(np.arange(len(self.pool)), self.pool.abs_norms)

    @cached_property
    def dual_hnfs(self) -> list:
        """Hermite forms of ``A_q^T``: the frequencies where the residue sum of ``q`` survives."""
        return [linalg.hnf_upper(self.ctx.mult_matrix_int(c).T.tolist()) for c in self.pool.coords]

    def zero_band_radius(self) -> int:
        return integer_nth_root_floor(self.M, 2 * self.n)


def build_scale_function(ctx: FieldContext, M: int, tau: float, prune: bool = True,
                         pool: ModulusPool | None = None, bump: BumpProfile | None = None) -> ScaleFunction:
    if tau < 1:
        raise TauOutOfRange(f"tau must be >= 1, got {tau}")
    if pool is None:
        pool = select_moduli(ctx, M, tau, prune=prune)["NormBand"]
    if len(pool) == 0:
        raise EmptyPool(f"empty modulus pool at M={M}")
    return ScaleFunction(ctx, M, tau, pool, bump or bump_profile(ctx.n))


def single_modulus_scale_function(ctx: FieldContext, q, M: int, tau: float) -> ScaleFunction:
    """A scale function whose pool is the single modulus ``q`` (used in tests and diagnostics)."""
    from .qselect import ModulusPool

    coords = np.array([list(q)], dtype=np.int64)
    norms = np.asarray(linalg.int_det_batch(ctx.mult_matrices_int(coords)), dtype=np.int64)
    pool = ModulusPool(ctx, M, tau, coords, norms, "NormBand", band_N=None)
    return build_scale_function(ctx, M, tau, pool=pool)


# ---------------------------------------------------------------------------
# Analytic coefficients
# ---------------------------------------------------------------------------

def passing_weight(sf: ScaleFunction, s) -> int:
    """``sum |N(q)|`` over pool members whose residue sum at ``s`` does not vanish."""
    from .expsum import integrality_batch

    s = np.asarray(s, dtype=np.int64)
    total = 0
    for q, nq in zip(sf.pool.members, sf.pool.abs_norms):
        if integrality_batch(q, s[None, :])[0]:
            total += int(nq)
    return total


def fourier_coefficient(sf: ScaleFunction, s) -> float:
    s = np.asarray(s, dtype=np.int64)
    if not np.any(s):
        return 1.0
    w = passing_weight(sf, s)
    if w == 0:
        return 0.0
    return float(sf.bump.phi_hat(math.sqrt(int(s @ s)) / sf.scale)) * w / sf.total_norm


def passing_weight_range(sf: ScaleFunction, lo, hi) -> np.ndarray:
    """``sum |N(q)|`` over members with ``s in A_q^T Z^n``, for every ``s`` with ``lo <= s <= hi``."""
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    shape = tuple(int(x) for x in hi - lo + 1)
    weights = np.zeros(int(np.prod(shape)), dtype=np.int64)
    strides = np.array([int(np.prod(shape[k + 1:])) for k in range(len(shape))], dtype=np.int64)
    for h, nq in zip(sf.dual_hnfs, sf.pool.abs_norms):
        pts = lattice_points_in_range(h, lo, hi)
        # points of one lattice are distinct, so plain fancy-index addition is safe
        weights[(pts - lo) @ strides] += int(nq)
    return weights.reshape(shape)


def passing_weight_grid(sf: ScaleFunction, S: int) -> np.ndarray:
    return passing_weight_range(sf, [-S] * sf.n, [S] * sf.n)


def analytic_window(sf: ScaleFunction, lo, hi) -> np.ndarray:
    """``F_hat(s)`` for every ``s`` in the box ``lo <= s <= hi`` (array indexed from ``lo``)."""
    lo = np.asarray(lo, dtype=np.int64)
    w = passing_weight_range(sf, lo, hi)
    vals = np.zeros(w.shape)
    nz = np.nonzero(w)
    if len(nz[0]):
        sq = sum((ix + lo[k]) ** 2 for k, ix in enumerate(nz))
        vals[nz] = sf.bump.phi_hat_of_sq(sq, sf.scale) * (w[nz] / sf.total_norm)
    origin = tuple(int(-x) for x in lo)
    if all(0 <= o < d for o, d in zip(origin, w.shape)):
        vals[origin] = 1.0
    return vals


def analytic_table(sf: ScaleFunction, S: int) -> FourierTable:
    vals = analytic_window(sf, [-S] * sf.n, [S] * sf.n)
    return FourierTable(vals, {"M": sf.M, "tau": sf.tau, "provenance": "analytic", "S": S})


# ---------------------------------------------------------------------------
# Sampling on a grid and the DFT cross-check
# ---------------------------------------------------------------------------

def sample_grid(sf: ScaleFunction, grid_res: int, chunk: int = 4_000_000) -> np.ndarray:
    """Values of ``F_M`` at the points ``k / grid_res`` of the torus."""
    if 1.0 / grid_res > sf.radius / 8.0 * (1 + 1e-12):
        raise ResolutionTooCoarse(
            f"grid spacing 1/{grid_res} exceeds radius/8 = {sf.radius / 8:.3e}"
        )
    n = sf.n
    centers = sf.centers
    half = int(math.ceil(sf.radius * grid_res)) + 1
    axis = np.arange(-half, half + 1)
    offsets = np.stack([g.ravel() for g in np.meshgrid(*([axis] * n), indexing="ij")], axis=-1)
    base = np.floor(centers * grid_res).astype(np.int64)
    frac = centers * grid_res - base
    strides = grid_res ** np.arange(n - 1, -1, -1)
    out = np.zeros(grid_res**n)
    amp = 1.0 / sf.g_hat_zero
    per = max(1, chunk // len(offsets))
    for start in range(0, len(centers), per):
        b = base[start:start + per]
        f = frac[start:start + per]
        # displacement (grid point - center) in units of the bump radius
        disp = (offsets[None, :, :] - f[:, None, :]) / (grid_res * sf.radius)
        r = np.sqrt((disp**2).sum(axis=-1))
        inside = r < 1.0
        vals = sf.bump.phi(r[inside]) * amp
        idx = ((b[:, None, :] + offsets[None, :, :]) % grid_res) @ strides
        out += np.bincount(idx[inside], weights=vals, minlength=grid_res**n)
    return out.reshape((grid_res,) * n)


def grid_mass(samples: np.ndarray) -> float:
    """Periodic trapezoid rule on the unit torus."""
    return float(samples.mean())


def dft_crosscheck(samples: np.ndarray, S_max: int) -> FourierTable:
    """Discrete transform of the samples, normalized so the zero entry is 1."""
    res = samples.shape[0]
    if 2 * S_max + 1 > res:
        raise TableTooSmall(f"grid of {res} points cannot resolve |s| <= {S_max}")
    coef = np.fft.fftn(samples)
    coef = coef / coef[(0,) * samples.ndim]
    idx = np.arange(-S_max, S_max + 1) % res
    vals = coef[np.ix_(*([idx] * samples.ndim))]
    return FourierTable(vals, {"provenance": "dft", "grid": res})


def aliased_table(sf: ScaleFunction, grid_res: int, S_max: int, wraps: int = 2) -> FourierTable:
    """Exact prediction of the DFT: ``sum_k F_hat(s + k * grid_res)`` over ``|k|_inf <= wraps``."""
    big = S_max + wraps * grid_res
    full = analytic_table(sf, big)
    out = np.zeros((2 * S_max + 1,) * sf.n)
    ks = np.stack([g.ravel() for g in np.meshgrid(*([np.arange(-wraps, wraps + 1)] * sf.n), indexing="ij")], -1)
    for k in ks:
        sl = tuple(slice(big + kk * grid_res - S_max, big + kk * grid_res + S_max + 1) for kk in k)
        out += full.values[sl]
    return FourierTable(out, {"provenance": "aliased", "grid": grid_res})


def support_distance_ok(sf: ScaleFunction, samples: np.ndarray) -> bool:
    """Every grid point with ``F_M > 0`` lies within the bump radius of some center."""
    from scipy.spatial import cKDTree

    res = samples.shape[0]
    pts = np.argwhere(samples > 0) / res
    if len(pts) == 0:
        return True
    tree = cKDTree(sf.centers, boxsize=1.0 + 1e-15)
    d, _ = tree.query(np.mod(pts, 1.0))
    return bool(np.all(d <= sf.radius * (1 + 1e-9)))


# ---------------------------------------------------------------------------
# Single-scale bound report
# ---------------------------------------------------------------------------

def verify_single_scale_bounds(table: FourierTable, M: int, tau: float, C: float | None = None,
                               p: float | None = None, bump: BumpProfile | None = None) -> dict:
    n = table.n
    bump = bump or bump_profile(n)
    p = bump.tail_power if p is None else p
    C = bump.decay_radius(p) if C is None else C
    upper = C * float(M) ** (1.0 + tau)
    if table.S < upper:
        raise TableTooSmall(f"table radius {table.S} < C M^(1+tau) = {upper:.1f}")
    zero_r = integer_nth_root_floor(M, 2 * n)
    mag = np.abs(table.values)
    ninf = np.broadcast_to(table.norm_inf(), mag.shape)
    norm = np.sqrt(np.broadcast_to(table.norm_sq(), mag.shape).astype(float))
    origin = (table.S,) * n
    zero_band = (ninf > 0) & (ninf <= zero_r)
    middle = (ninf > zero_r) & (norm < upper)
    tail = norm >= upper
    band_max = float(mag[middle].max()) if middle.any() else 0.0
    tail_max = float(mag[tail].max()) if tail.any() else 0.0
    tail_const = float((mag[tail] * norm[tail] ** p).max()) if tail.any() else 0.0
    return {
        "M": M,
        "tau": tau,
        "n": n,
        "C": C,
        "p": p,
        "zero_band_radius": zero_r,
        "value_at_zero": complex(table.values[origin]).real,
        "zero_at_origin_exact": bool(table.values[origin] == 1.0),
        "zero_band_max": float(mag[zero_band].max()) if zero_band.any() else 0.0,
        "band_max": band_max,
        "band_constant": band_max * float(M) ** n,
        "tail_max": tail_max,
        "tail_constant": tail_const,
        "tail_le_band": tail_max <= band_max,
    }


def write_report(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, default=_json_default))
    return path


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(type(x))
