"""The smooth bump ``phi(x) = c exp(-1/(1 - |x|^2))`` on the unit ball and its Fourier transform.

The transform of a radial function is radial:

    phi_hat(rho) = |S^{n-1}| * int_0^1 phi(r) r^{n-1} K_n(2 pi rho r) dr,
    K_n(z) = Gamma(n/2) (2/z)^{n/2-1} J_{n/2-1}(z),   K_n(0) = 1,

evaluated once by Gauss-Legendre quadrature on a Chebyshev node set per unit
interval of ``rho`` and interpolated from there (``phi_hat`` is entire, so
the piecewise Chebyshev series converge to roundoff).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma, j0, j1, jv

QUAD_NODES = 2000
CHEB_DEGREE = 48


def _profile(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def radial_kernel(n: int, z):
    """``K_n(z)``: the angular average of ``exp(-i z cos theta)`` over the sphere."""
    z = np.asarray(z, dtype=float)
    nu = n / 2.0 - 1.0
    out = np.ones_like(z)
    small = np.abs(z) < 1e-8
    big = ~small
    zb = z[big]
    if n == 1:
        out[big] = np.cos(zb)
    elif n == 2:
        out[big] = j0(zb)
    elif n == 3:
        out[big] = np.sin(zb) / zb
    elif n == 4:
        out[big] = 2.0 * j1(zb) / zb
    else:
        out[big] = gamma(nu + 1.0) * (2.0 / zb) ** nu * jv(nu, zb)
    # next term of the series: -z^2 / (4 (nu + 1))
    out[small] = 1.0 - z[small] ** 2 / (4.0 * (nu + 1.0))
    return out


def sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass
class BumpProfile:
    n: int
    rho_max: float = 160.0
    tail_power: float | None = None
    const: float = field(init=False)
    _coefs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.tail_power is None:
            self.tail_power = 2.0 * self.n
        x, w = leggauss(QUAD_NODES)
        self._r = 0.5 * (x + 1.0)
        self._w = 0.5 * w * _profile(self._r) * self._r ** (self.n - 1) * sphere_area(self.n)
        self.const = 1.0 / self._w.sum()
        self._w = self._w * self.const
        self._build_table()

    # -- direct quadrature ------------------------------------------------

    def phi(self, r):
        """Bump value at radius ``r`` (normalized to unit integral over R^n)."""
        return self.const * _profile(r)

    def phi_hat_quadrature(self, rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        out = np.empty_like(rho)
        for start in range(0, len(rho), 256):
            blk = rho[start:start + 256]
            k = radial_kernel(self.n, 2.0 * np.pi * blk[:, None] * self._r[None, :])
            out[start:start + 256] = k @ self._w
        return out

    # -- tabulation ---------------------------------------------------------

    def _build_table(self):
        count = int(math.ceil(self.rho_max))
        nodes = np.cos(np.pi * (np.arange(CHEB_DEGREE + 1) + 0.5) / (CHEB_DEGREE + 1))
        coefs = np.empty((count, CHEB_DEGREE + 1))
        for i in range(count):
            pts = i + 0.5 * (nodes + 1.0)
            coefs[i] = cheb.chebfit(nodes, self.phi_hat_quadrature(pts), CHEB_DEGREE)
        self._coefs = coefs

    def phi_hat(self, rho):
        """Transform at radius ``rho`` (array); exactly 0 beyond ``rho_max``."""
        rho = np.asarray(rho, dtype=float)
        flat = rho.ravel()
        out = np.zeros_like(flat)
        inside = flat < self.rho_max
        r = flat[inside]
        idx = np.minimum(r.astype(np.int64), len(self._coefs) - 1)
        t = 2.0 * (r - idx) - 1.0
        # Clenshaw recurrence with per-point coefficient rows
        b1 = np.zeros_like(t)
        b2 = np.zeros_like(t)
        for k in range(CHEB_DEGREE, 0, -1):
            b1, b2 = 2.0 * t * b1 - b2 + self._coefs[idx, k], b1
        out[inside] = t * b1 - b2 + self._coefs[idx, 0]
        return out.reshape(rho.shape)

    def phi_hat_of_sq(self, s_sq, scale: float):
        """``phi_hat(sqrt(s_sq) / scale)`` evaluated once per distinct integer ``s_sq``."""
        s_sq = np.asarray(s_sq)
        uniq, inv = np.unique(s_sq, return_inverse=True)
        vals = self.phi_hat(np.sqrt(uniq.astype(float)) / scale)
        return vals[inv].reshape(s_sq.shape)

    @property
    def tail_bound(self) -> float:
        """Largest |phi_hat| on the last tabulated unit interval (truncation level)."""
        grid = np.linspace(self.rho_max - 1.0, self.rho_max - 1e-9, 400)
        return float(np.abs(self.phi_hat(grid)).max())

    def decay_radius(self, power: float | None = None, step: float = 1e-3) -> float:
        """``s_0``: smallest ``rho_0 >= 1`` with ``|phi_hat(rho)| <= rho^-power`` on ``[rho_0, rho_max)``."""
        p = self.tail_power if power is None else power
        grid = np.arange(1.0, self.rho_max, step)
        bad = np.abs(self.phi_hat(grid)) > grid ** (-p)
        if not bad.any():
            return 1.0
        last = int(np.nonzero(bad)[0][-1])
        return float(grid[min(last + 1, len(grid) - 1)])


@lru_cache(maxsize=8)
def bump_profile(n: int, rho_max: float = 160.0) -> BumpProfile:
    return BumpProfile(n=n, rho_max=rho_max)
