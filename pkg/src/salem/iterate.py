"""Multi-scale products ``mu_{j+1} = F_{M_{j+1}} mu_j`` computed on the Fourier side.

Coefficient tables are convolved on a box; the part of a factor that lies
outside its box is accounted for by a declared l^1 tail mass, giving an
explicit truncation bound for every output coefficient.  Each step is checked
against the envelopes

    |mu_j(s)| <= (3/2 - 2^-j) |s|^(-n/(1+tau) + Delta_j)    for |s| < m_j
    |mu_j(s)| <= |s|^(-p + Delta_j)                          for |s| >= m_j

and the perturbation bound ``|mu_{j+1}(s) - mu_j(s)| <= 2^-(j+1) |s|^-n/(1+tau)``
for ``|s| <= M_{j+1}^{1/(2n)}``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .bump import BumpProfile, bump_profile
from .errors import (
    BoundViolated,
    ConfigInvalid,
    EmptyBand,
    HypothesisViolated,
    InsufficientSupport,
    TableTooSmall,
)
from .measure import FourierTable, ScaleFunction, analytic_table, analytic_window, build_scale_function
from .numfield import FieldContext, integer_nth_root_floor

TRUNCATION_BUDGET = 1e-6
DIRECT_LIMIT = 5e10


# ---------------------------------------------------------------------------
# Schedule
# ---------------------------------------------------------------------------

@dataclass
class Schedule:
    """Scales ``M_j``, slacks ``delta_j`` and cutoffs ``m_j`` (all indexed from ``j = 1``).

    ``growth`` fixes ``m_j = growth * M_j^(1+tau)``; when it is ``None`` the
    cutoff is the point past which the bump transform obeys the tail envelope.
    """

    tau: float
    delta_star: float
    M: list[int]
    deltas: list[float] | None = None
    growth: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.deltas is None:
            self.deltas = [self.delta_star * 2.0 ** (-j - 1) for j in range(1, len(self.M) + 1)]
        self.M = [int(m) for m in self.M]
        self.validate()

    @property
    def steps(self) -> int:
        return len(self.M)

    def validate(self):
        if self.tau < 1:
            raise ConfigInvalid("tau", f"must be >= 1, got {self.tau}")
        if not self.delta_star > 0:
            raise ConfigInvalid("delta_star", "must be positive")
        if len(self.deltas) < len(self.M):
            raise ConfigInvalid("deltas", "need one slack per scale")
        if any(d <= 0 for d in self.deltas):
            raise ConfigInvalid("deltas", "slacks must be positive")
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ConfigInvalid("deltas", "slacks must be strictly decreasing")
        if 2.0 * sum(self.deltas[: len(self.M)]) >= self.delta_star:
            raise ConfigInvalid("deltas", "2 * sum(delta_j) must stay below delta_star")
        if any(m % 2 or m < 2 for m in self.M):
            raise ConfigInvalid("M", "scales must be even integers >= 2")
        if any(b <= a for a, b in zip(self.M, self.M[1:])):
            raise ConfigInvalid("M", "scales must be strictly increasing")
        if self.growth is not None and self.growth <= 0:
            raise ConfigInvalid("growth", "must be positive")

    def delta(self, j: int) -> float:
        return self.deltas[j - 1]

    def Delta(self, j: int) -> float:
        return 2.0 * sum(self.deltas[:j])

    def power(self, n: int) -> float:
        return 2.0 * n if self.p is None else self.p

    def scale(self, j: int) -> float:
        return float(self.M[j - 1]) ** (1.0 + self.tau)

    def cutoff(self, j: int, bump: BumpProfile) -> float:
        """``m_j``."""
        if self.growth is not None:
            return self.growth * self.scale(j)
        return tail_cutoff(bump, self.scale(j), self.power(bump.n) - self.Delta(j))

    def eta(self, j: int, bump: BumpProfile) -> float:
        """``eta_{j+1} = 2^-(j+1) m_j^(-n/(1+tau))``, the allowance used when forming ``mu_{j+1}``."""
        n = bump.n
        return 2.0 ** (-(j + 1)) * self.cutoff(j, bump) ** (-n / (1.0 + self.tau))

    def to_dict(self) -> dict:
        return {"tau": self.tau, "delta_star": self.delta_star, "M": list(self.M),
                "deltas": list(self.deltas), "growth": self.growth, "p": self.p}


def tail_cutoff(bump: BumpProfile, scale: float, power: float) -> float:
    """Smallest ``|s|`` beyond which ``|phi_hat(|s|/scale)| <= |s|^-power`` on the tabulated range."""
    return _tail_cutoff(bump.n, bump.rho_max, float(scale), float(power))


@lru_cache(maxsize=256)
def _tail_cutoff(n: int, rho_max: float, scale: float, power: float) -> float:
    bump = bump_profile(n, rho_max)
    rho = np.linspace(0.0, bump.rho_max, int(bump.rho_max * 2000) + 1)[1:]
    bad = np.abs(bump.phi_hat(rho)) > (rho * scale) ** (-power)
    if not bad.any():
        return float(rho[0] * scale)
    last = int(np.nonzero(bad)[0][-1])
    return float(rho[min(last + 1, len(rho) - 1)] * scale)


# ---------------------------------------------------------------------------
# Tail masses
# ---------------------------------------------------------------------------

def bump_tail_integral(bump: BumpProfile, rho0: float, samples: int = 200_000) -> float:
    """``int_{|x| > rho0} |phi_hat(x)| dx`` over R^n (zero past the tabulated range)."""
    from .bump import sphere_area

    if rho0 >= bump.rho_max:
        return 0.0
    rho = np.linspace(rho0, bump.rho_max, samples)
    f = np.abs(bump.phi_hat(rho)) * rho ** (bump.n - 1)
    return float(sphere_area(bump.n) * np.trapezoid(f, rho))


def scale_tail_mass(sf: ScaleFunction, S: int) -> float:
    """Estimate of ``sum_{|s|_inf > S} |F_hat(s)|``.

    Each modulus contributes ``|N(q)|/total`` on a lattice of covolume ``|N(q)|``,
    so the sum is ``(#pool / total) * scale^n * int_{|x| > S/scale} |phi_hat|``.
    """
    density = len(sf.pool) / sf.total_norm
    return density * sf.scale**sf.n * bump_tail_integral(sf.bump, S / sf.scale)


def scale_l1_mass(sf: ScaleFunction) -> float:
    return 1.0 + scale_tail_mass(sf, 0)


def support_radius_for_budget(sf: ScaleFunction, budget: float, cap: int | None = None) -> int:
    """Smallest box radius (in steps of ``scale / 8``) whose tail mass estimate is within ``budget``."""
    step = max(1, int(sf.scale // 8))
    limit = cap if cap is not None else int(sf.bump.rho_max * sf.scale) + step
    # the tail mass decreases in S, so bisect over multiples of step
    lo, hi = 1, max(1, -(-limit // step))
    while lo < hi:
        mid = (lo + hi) // 2
        if scale_tail_mass(sf, mid * step) > budget:
            lo = mid + 1
        else:
            hi = mid
    return min(lo * step, limit)


# ---------------------------------------------------------------------------
# Convolution
# ---------------------------------------------------------------------------

def _tail(table: FourierTable) -> float:
    return float(table.meta.get("tail_l1", 0.0))


def _sup(table: FourierTable) -> float:
    return max(float(np.abs(table.values).max()), float(table.meta.get("tail_sup", 0.0)))


def truncation_bound(f: FourierTable, g: FourierTable, S_max: int) -> float:
    """Bound on ``|sum over missing s'|`` for every output ``|s|_inf <= S_max``.

    Missing terms have ``s'`` outside the box of ``f`` or ``s - s'`` outside the
    box of ``g``; the first set costs at most ``tail(f) sup|g|`` and the second
    (empty when the box of ``g`` reaches ``S_max + S_f``) at most ``tail(g) sup|f|``.
    """
    bound = _tail(f) * _sup(g)
    if g.S < S_max + f.S:
        bound += _tail(g) * _sup(f)
    return bound


def convolve_tables(f: FourierTable, g: FourierTable, S_max: int,
                    budget: float = TRUNCATION_BUDGET) -> FourierTable:
    """``(f * g)(s) = sum_{s'} f(s') g(s - s')`` for ``|s|_inf <= S_max``."""
    if f.n != g.n:
        raise ValueError("tables of different dimension")
    if S_max > f.S + g.S:
        raise InsufficientSupport(f"S_max={S_max} exceeds the combined support {f.S + g.S}")
    bound = truncation_bound(f, g, S_max)
    if bound > budget:
        raise InsufficientSupport(
            f"truncation bound {bound:.3e} exceeds budget {budget:.1e}; enlarge the input tables"
        )
    n = f.n
    out_side = 2 * S_max + 1
    # direct window sums are cheaper when the output box is tiny
    if out_side**n * f.values.size <= DIRECT_LIMIT and out_side**n <= 1024 and g.S >= S_max + f.S:
        vals = _direct_convolution(f, g, S_max)
    else:
        full = fftconvolve(f.values, g.values)
        c = f.S + g.S
        vals = full[tuple(slice(c - S_max, c + S_max + 1) for _ in range(n))]
    meta = {
        "provenance": "convolution",
        "truncation_bound": bound,
        "tail_l1": None,
        "S": S_max,
    }
    return FourierTable(np.array(vals), meta)


def _direct_convolution(f: FourierTable, g: FourierTable, S_max: int) -> np.ndarray:
    n = f.n
    nz = np.nonzero(f.values)
    fvals = f.values[nz]
    # g is indexed at s - s' = s - (idx - S_f)
    base = [g.S + f.S - ix for ix in nz]
    out = np.zeros((2 * S_max + 1,) * n, dtype=np.result_type(f.values, g.values))
    for idx in np.ndindex(*out.shape):
        pos = tuple(b + (i - S_max) for b, i in zip(base, idx))
        out[idx] = np.dot(fvals, g.values[pos])
    return out


def convolve_with_scale(g: FourierTable, sf: ScaleFunction, S_max: int, *,
                        budget: float = TRUNCATION_BUDGET, block: int = 1024) -> FourierTable:
    """``sum_{s'} g(s') F_hat(s - s')`` for ``|s|_inf <= S_max`` with ``F_hat`` evaluated exactly.

    The table of ``g`` is split into blocks; each block is convolved against the
    window of ``F_hat`` it reaches, so no table of ``F_hat`` larger than
    ``2 S_max + block`` per side is ever formed.  The only truncation is the
    part of ``g`` outside its box, bounded by ``tail(g) * max|F_hat| <= tail(g)``.
    """
    n = g.n
    bound = _tail(g)
    if bound > budget:
        raise InsufficientSupport(
            f"truncation bound {bound:.3e} exceeds budget {budget:.1e}; enlarge the input table"
        )
    out = np.zeros((2 * S_max + 1,) * n)
    edges = list(range(-g.S, g.S + 1, block))
    for corner in np.ndindex(*([len(edges)] * n)):
        a = np.array([edges[c] for c in corner])
        b = np.minimum(a + block - 1, g.S)
        sl = tuple(slice(int(x) + g.S, int(y) + g.S + 1) for x, y in zip(a, b))
        gb = g.values[sl]
        if not np.any(gb):
            continue
        window = analytic_window(sf, -S_max - b, S_max - a)
        out += fftconvolve(window, gb, mode="valid")
    return FourierTable(out, {"provenance": "convolution", "truncation_bound": bound, "S": S_max})


def product_tail_mass(f_l1: float, f_tail_half: float, g_l1: float, g_tail_half: float) -> float:
    """l^1 mass of ``f * g`` outside a box, from the masses of each factor outside half that box."""
    return f_l1 * g_tail_half + f_tail_half * g_l1


# ---------------------------------------------------------------------------
# Convolution stability
# ---------------------------------------------------------------------------

def _norms(table: FourierTable):
    shape = table.values.shape
    return (np.sqrt(np.broadcast_to(table.norm_sq(), shape).astype(float)),
            np.broadcast_to(table.norm_inf(), shape))


def _min_margin(mag, env, mask, norm, table):
    if not mask.any():
        return math.inf, None
    m = env[mask] - mag[mask]
    k = int(np.argmin(m))
    pos = np.argwhere(mask)[k]
    return float(m[k]), tuple(int(x) - table.S for x in pos)


def check_convolution_stability(f: FourierTable, g: FourierTable, *, M: int, m: float, delta: float,
                                eps: float, eta: float, tau: float, C_delta: float = 32.0,
                                f_tail_from: float | None = None, p: float | None = None,
                                large_from: float | None = None, S_max: int | None = None,
                                h: FourierTable | None = None) -> dict:
    """Check the hypotheses on ``f`` and ``g`` and then the three estimates for ``f * g``.

    ``f_tail_from`` is where ``f`` switches to the tail envelope (default: the
    point past which ``|f(s)| <= |s|^-p`` on the table); ``large_from`` is where
    the large range begins (default ``exp(M)``).
    """
    n = f.n
    p = 2.0 * n if p is None else p
    gmax = float(np.abs(g.values).max())
    if not eta < 1.5 - gmax:
        raise HypothesisViolated("eta < 3/2 - max|g|", None, 1.5 - gmax - eta)
    zero_r = integer_nth_root_floor(M, 2 * n)
    fmag = np.abs(f.values)
    fnorm, finf = _norms(f)
    origin = (f.S,) * n
    if abs(f.values[origin] - 1.0) > 1e-12:
        raise HypothesisViolated("f(0) = 1", (0,) * n, -abs(f.values[origin] - 1.0))
    if fmag.max() > 1.0 + 1e-12:
        k = np.unravel_index(np.argmax(fmag), fmag.shape)
        raise HypothesisViolated("|f| <= 1", tuple(int(x) - f.S for x in k), 1.0 - fmag.max())
    zb = (finf > 0) & (finf <= zero_r)
    if zb.any() and fmag[zb].max() > 0:
        k = np.argwhere(zb & (fmag > 0))[0]
        raise HypothesisViolated("f = 0 on the zero band", tuple(int(x) - f.S for x in k), -fmag[zb].max())
    if f_tail_from is None:
        viol = (fmag > np.where(fnorm > 0, fnorm, 1.0) ** (-p)) & (fnorm > 0)
        f_tail_from = float(fnorm[viol].max()) + 1e-9 if viol.any() else 0.0
    middle = (finf > zero_r) & (fnorm < f_tail_from)
    band_env = C_delta * float(M) ** (-n + delta)
    mm, ms = _min_margin(fmag, np.full(fmag.shape, band_env), middle, fnorm, f)
    if mm < 0:
        raise HypothesisViolated("|f| <= C_delta M^(-n+delta) on the middle band", ms, mm)
    tail = fnorm >= f_tail_from
    tm, ts = _min_margin(fmag, np.where(fnorm > 0, fnorm, 1.0) ** (-p), tail, fnorm, f)
    if tm < 0:
        raise HypothesisViolated("|f| <= |s|^-p on the tail", ts, tm)
    gmag = np.abs(g.values)
    gnorm, _ = _norms(g)
    gm, gs = _min_margin(gmag, np.where(gnorm > 0, gnorm, 1.0) ** (-p + eps), gnorm >= m, gnorm, g)
    if gm < 0:
        raise HypothesisViolated("|g| <= |s|^(-p+eps) for |s| >= m", gs, gm)

    S_out = min(f.S, g.S) if S_max is None else S_max
    if h is None:
        h = convolve_tables(f, g, S_out)
    gc = g.crop(h.S) if g.S >= h.S else g
    hmag = np.abs(h.values)
    hnorm, _ = _norms(h)
    small_r = float(M) ** (1.0 / (2 * n)) / 100.0
    large_from = math.exp(M) if large_from is None else large_from
    small = hnorm <= small_r
    diff = np.abs(h.values - gc.values) if gc.S == h.S else None
    if diff is None:
        raise TableTooSmall("g does not cover the output box")
    sm, ss = _min_margin(diff, np.full(diff.shape, eta), small, hnorm, h)
    safe = np.where(hnorm > 0, hnorm, 1.0)
    med = (hnorm >= small_r) & (hnorm <= large_from)
    md, mds = _min_margin(hmag, safe ** (-n / (1.0 + tau) + 2 * delta + eps), med, hnorm, h)
    lg = hnorm >= large_from
    lm, ls = _min_margin(hmag, safe ** (-p + 2 * delta + eps), lg, hnorm, h)
    trunc = float(h.meta.get("truncation_bound", 0.0))
    return {
        "small": {"margin": sm, "worst_s": ss, "radius": small_r},
        "medium": {"margin": md, "worst_s": mds},
        "large": {"margin": lm, "worst_s": ls, "from": large_from},
        "truncation_bound": trunc,
        "f_tail_from": f_tail_from,
        "ok": all(x >= trunc for x in (sm, md, lm)),
    }


# ---------------------------------------------------------------------------
# Induction envelopes
# ---------------------------------------------------------------------------

def induction_envelope(norm: np.ndarray, j: int, n: int, tau: float, Delta: float, m: float, p: float):
    safe = np.where(norm > 0, norm, 1.0)
    small = (1.5 - 2.0 ** (-j)) * safe ** (-n / (1.0 + tau) + Delta)
    large = safe ** (-p + Delta)
    env = np.where(norm < m, small, large)
    return np.where(norm > 0, env, np.inf)


def check_induction(table: FourierTable, j: int, schedule: Schedule, bump: BumpProfile) -> dict:
    n = table.n
    norm, _ = _norms(table)
    m = schedule.cutoff(j, bump)
    env = induction_envelope(norm, j, n, schedule.tau, schedule.Delta(j), m, schedule.power(n))
    mag = np.abs(table.values)
    trunc = float(table.meta.get("truncation_bound", 0.0))
    margin = env - mag - trunc
    below = norm < m
    out = {"step": j, "m": m, "Delta": schedule.Delta(j), "truncation_bound": trunc}
    for name, mask in (("small_s", below & (norm > 0)), ("large_s", ~below)):
        if mask.any():
            k = int(np.argmin(np.where(mask, margin, np.inf)))
            pos = np.unravel_index(k, margin.shape)
            out[name] = {"margin": float(margin[pos]), "worst_s": tuple(int(x) - table.S for x in pos)}
        else:
            out[name] = {"margin": math.inf, "worst_s": None}
    return out


def check_single_scale_tail(sf: ScaleFunction, j: int, schedule: Schedule, S_from: float) -> dict:
    """Envelope check for ``mu_1 = F_M`` beyond its table, via ``|F_hat(s)| <= |phi_hat(|s|/scale)|``."""
    bump = sf.bump
    n = sf.n
    hi = bump.rho_max * sf.scale
    if S_from >= hi:
        return {"margin": math.inf, "worst_s": None}
    r = np.linspace(S_from, hi, 400_000)
    m = schedule.cutoff(j, bump)
    env = induction_envelope(r, j, n, schedule.tau, schedule.Delta(j), m, schedule.power(n))
    margin = env - np.abs(bump.phi_hat(r / sf.scale))
    k = int(np.argmin(margin))
    return {"margin": float(margin[k]), "worst_radius": float(r[k])}


def check_perturbation(new: FourierTable, old: FourierTable, j: int, M_next: int, tau: float) -> dict:
    """``|mu_{j+1}(s) - mu_j(s)| <= 2^-(j+1) |s|^(-n/(1+tau))`` for ``0 < |s| <= M_{j+1}^{1/(2n)}``."""
    n = new.n
    R = float(M_next) ** (1.0 / (2 * n))
    S = min(int(math.floor(R)), new.S, old.S)
    a, b = new.crop(S), old.crop(S)
    norm, _ = _norms(a)
    mask = (norm > 0) & (norm <= R)
    safe = np.where(norm > 0, norm, 1.0)
    env = 2.0 ** (-(j + 1)) * safe ** (-n / (1.0 + tau))
    trunc = float(new.meta.get("truncation_bound", 0.0)) + float(old.meta.get("truncation_bound", 0.0))
    margin = env - np.abs(a.values - b.values) - trunc
    if not mask.any():
        return {"margin": math.inf, "worst_s": None, "radius": R}
    k = int(np.argmin(np.where(mask, margin, np.inf)))
    pos = np.unravel_index(k, margin.shape)
    return {"margin": float(margin[pos]), "worst_s": tuple(int(x) - S for x in pos), "radius": R}


# ---------------------------------------------------------------------------
# Support masks
# ---------------------------------------------------------------------------

def support_mask(sf: ScaleFunction, grid_res: int) -> np.ndarray:
    """Grid cells meeting the closed support of ``F_M`` (cells of side ``1/grid_res``)."""
    n = sf.n
    reach = sf.radius + math.sqrt(n) / (2.0 * grid_res)
    half = int(math.ceil(reach * grid_res)) + 1
    axis = np.arange(-half, half + 1)
    offsets = np.stack([g.ravel() for g in np.meshgrid(*([axis] * n), indexing="ij")], axis=-1)
    mask = np.zeros(grid_res**n, dtype=bool)
    strides = grid_res ** np.arange(n - 1, -1, -1)
    centers = sf.centers
    base = np.floor(centers * grid_res).astype(np.int64)
    per = max(1, 2_000_000 // len(offsets))
    for start in range(0, len(centers), per):
        b = base[start:start + per]
        c = centers[start:start + per]
        cells = b[:, None, :] + offsets[None, :, :]
        d = np.sqrt((((cells + 0.5) / grid_res - c[:, None, :]) ** 2).sum(-1))
        hit = d <= reach
        mask[((cells % grid_res) @ strides)[hit]] = True
    return mask.reshape((grid_res,) * n)


# ---------------------------------------------------------------------------
# Iteration
# ---------------------------------------------------------------------------

@dataclass
class StepResult:
    j: int
    M: int
    table: FourierTable
    report: dict
    mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return report_ok(self.report)


def _scale_table(sf: ScaleFunction, S: int) -> FourierTable:
    t = analytic_table(sf, S)
    t.meta.update({"tail_l1": scale_tail_mass(sf, S), "l1": scale_l1_mass(sf),
                   "truncation_bound": 0.0})
    return t


def first_step(sf: ScaleFunction, schedule: Schedule, S_max: int, *, budget: float = TRUNCATION_BUDGET,
               more_steps: bool = True, mask_res: int | None = None):
    """``mu_1 = F_{M_1}``; returns the working table (possibly larger than ``S_max``) and the step result."""
    bump = sf.bump
    S_work = max(S_max, support_radius_for_budget(sf, budget)) if more_steps else S_max
    cur = _scale_table(sf, S_work)
    cur.meta.update({"step": 1, "M": sf.M})
    rep = {"induction": check_induction(cur, 1, schedule, bump),
           "beyond_table": check_single_scale_tail(sf, 1, schedule, cur.S),
           "mass": float(np.real(cur.values[(cur.S,) * sf.n]))}
    mask = support_mask(sf, mask_res) if mask_res else None
    shown = cur.crop(S_max) if cur.S > S_max else cur
    return cur, StepResult(1, sf.M, shown, rep, mask)


def next_step(cur: FourierTable, sf: ScaleFunction, j: int, schedule: Schedule, S_max: int, *,
              budget: float = TRUNCATION_BUDGET, prev_mask: np.ndarray | None = None,
              mask_res: int | None = None):
    """``mu_{j+1} = F_{M_{j+1}} mu_j`` from the working table of ``mu_j``."""
    n = sf.n
    new = convolve_with_scale(cur, sf, S_max, budget=budget)
    f_l1 = scale_l1_mass(sf)
    # l^1 bookkeeping for a further step: mass of mu_{j+1} outside the output box
    half = S_max // 2
    g_half = cur.crop(min(half, cur.S))
    g_tail_half = _tail(cur) + float(np.abs(cur.values).sum() - np.abs(g_half.values).sum())
    new.meta.update({
        "step": j + 1,
        "M": sf.M,
        "l1": float(cur.meta.get("l1", math.inf)) * f_l1,
        "tail_l1": product_tail_mass(f_l1, scale_tail_mass(sf, half),
                                     float(cur.meta.get("l1", math.inf)), g_tail_half)
                   + float(new.meta["truncation_bound"]),
    })
    old = cur.crop(S_max) if cur.S > S_max else cur
    rep = {
        "induction": check_induction(new, j + 1, schedule, sf.bump),
        "perturbation": check_perturbation(new, old, j, sf.M, schedule.tau),
        "mass": float(np.real(new.values[(S_max,) * n])),
        "eta": schedule.eta(j, sf.bump),
    }
    mask = prev_mask & support_mask(sf, mask_res) if (prev_mask is not None and mask_res) else None
    return new, StepResult(j + 1, sf.M, new, rep, mask)


def iterate_schedule(ctx: FieldContext, schedule: Schedule, S_max: int, *,
                     budget: float = TRUNCATION_BUDGET, mask_res: int | None = None,
                     strict: bool = True, scale_functions: list | None = None) -> list[StepResult]:
    """Run every step of ``schedule``; raise :class:`BoundViolated` on the first failed envelope when ``strict``."""
    sfs = scale_functions or [build_scale_function(ctx, M, schedule.tau) for M in schedule.M]
    cur, res = first_step(sfs[0], schedule, S_max, budget=budget, more_steps=schedule.steps > 1,
                          mask_res=mask_res)
    results = [res]
    _raise_if(strict, res.report, 1)
    for j in range(1, schedule.steps):
        cur, res = next_step(cur, sfs[j], j, schedule, S_max, budget=budget,
                             prev_mask=results[-1].mask, mask_res=mask_res)
        results.append(res)
        _raise_if(strict, res.report, j + 1)
    return results


def _raise_if(strict: bool, rep: dict, j: int):
    if not strict:
        return
    for name, sub in _bound_items(rep):
        if sub["margin"] < 0:
            raise BoundViolated(j, name, sub.get("worst_s"), sub["margin"])


def _bound_items(rep: dict):
    ind = rep["induction"]
    yield "small_s", ind["small_s"]
    yield "large_s", ind["large_s"]
    if "perturbation" in rep:
        yield "perturbation", rep["perturbation"]


def report_ok(rep: dict) -> bool:
    return all(sub["margin"] >= 0 for _, sub in _bound_items(rep))


def first_violation(results: list[StepResult]):
    """``(step, bound, s, margin)`` of the first failed envelope, or ``None``."""
    for r in results:
        for name, sub in _bound_items(r.report):
            if sub["margin"] < 0:
                return r.j, name, sub.get("worst_s"), sub["margin"]
    return None


@dataclass
class AutoResult:
    schedule: Schedule
    results: list[StepResult]
    attempts: list[dict]
    complete: bool


def auto_schedule(ctx: FieldContext, tau: float, delta_star: float, S_max: int, steps: int = 2, *,
                  M_1: int = 4, M_cap: int = 256, budget: float = TRUNCATION_BUDGET,
                  growth: float | None = None, p: float | None = None, mask_res: int | None = None,
                  log=None) -> AutoResult:
    """Fix ``M_1`` and choose each later ``M_{j+1}`` as the first of ``2 M_j, 4 M_j, ...`` whose step passes.

    When no scale up to ``M_cap`` passes, the search stops with the last trial
    kept in ``results`` and ``complete`` set to False.
    """
    sf1 = build_scale_function(ctx, M_1, tau)
    sched = Schedule(tau, delta_star, [M_1], growth=growth, p=p)
    cur, res = first_step(sf1, sched, S_max, budget=budget, more_steps=steps > 1, mask_res=mask_res)
    results = [res]
    attempts = [{"step": 1, "M": M_1, "ok": res.ok, "report": res.report}]
    chosen = [M_1]
    for j in range(1, steps):
        M = 2 * chosen[-1]
        best = None
        while M <= M_cap:
            trial = Schedule(tau, delta_star, chosen + [M], growth=growth, p=p)
            try:
                sf = build_scale_function(ctx, M, tau)
                new, step = next_step(cur, sf, j, trial, S_max, budget=budget,
                                      prev_mask=results[-1].mask, mask_res=mask_res)
            except InsufficientSupport as exc:
                attempts.append({"step": j + 1, "M": M, "ok": False, "error": str(exc)})
                if log:
                    log(f"step {j + 1}: M={M} insufficient support")
                break
            attempts.append({"step": j + 1, "M": M, "ok": step.ok, "report": step.report})
            if log:
                log(f"step {j + 1}: M={M} {'ok' if step.ok else 'violated'}")
            best = (M, new, step)
            if step.ok:
                break
            M *= 2
        if best is None:
            return AutoResult(Schedule(tau, delta_star, chosen, growth=growth, p=p), results, attempts, False)
        M, cur, step = best
        chosen.append(M)
        results.append(step)
        if not step.ok:
            return AutoResult(Schedule(tau, delta_star, chosen, growth=growth, p=p), results, attempts, False)
    return AutoResult(Schedule(tau, delta_star, chosen, growth=growth, p=p), results, attempts, True)



# ---------------------------------------------------------------------------
# Decay slope
# ---------------------------------------------------------------------------

def shell_maxima(table: FourierTable, R_lo: float, R_hi: float) -> list[tuple[float, float]]:
    norm, _ = _norms(table)
    mag = np.abs(table.values)
    out = []
    R = float(R_lo)
    while R < R_hi:
        top = min(2.0 * R, R_hi)
        mask = (norm >= R) & (norm < top)
        if mask.any():
            out.append((R, float(mag[mask].max())))
        R *= 2.0
    return out


def decay_fit(table: FourierTable, R_lo: float, R_hi: float) -> dict:
    """Least-squares slope of ``log max_{|s| in [R, 2R)} |coeff|`` against ``log R``.

    Shells whose maximum does not exceed the table's truncation bound carry no
    resolved information (they are indistinguishable from zero) and are left
    out of the fit, like shells that vanish identically.
    """
    if R_hi > table.S * math.sqrt(table.n):
        raise TableTooSmall(f"band end {R_hi} exceeds the table")
    floor = float(table.meta.get("truncation_bound", 0.0) or 0.0)
    shells = shell_maxima(table, R_lo, R_hi)
    pts = [(R, v) for R, v in shells if v > floor]
    if len(pts) < 2:
        raise EmptyBand(f"fewer than two resolved shells in [{R_lo}, {R_hi}]")
    x = np.log([r for r, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return {"slope": float(slope), "intercept": float(intercept), "shells": shells,
            "used": len(pts), "floor": floor, "band": [float(R_lo), float(R_hi)]}


def decay_slope(table: FourierTable, R_lo: float, R_hi: float) -> float:
    return decay_fit(table, R_lo, R_hi)["slope"]
