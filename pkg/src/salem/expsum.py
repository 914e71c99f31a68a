"""Exponential sums over residue classes and their exact vanishing test.

For a modulus ``q`` and an integer frequency ``s`` the sum

    S(q, s) = sum_{r in R_q} e(-s . A_q^{-1} r),      e(t) = exp(2 pi i t),

equals ``|N(q)|`` when ``(A_q^{-1})^T s`` is an integer vector and vanishes
otherwise.  ``integrality_criterion`` decides which case holds with integer
arithmetic only; ``exp_sum_bruteforce`` evaluates the sum term by term.
"""

from __future__ import annotations

import enum

import numpy as np

from . import linalg
from .errors import ZeroModulus
from .numfield import FieldElement, divides
from .residues import ResidueSystem, residue_system

MAX_NORM = 10**6


class Criterion(enum.Enum):
    INTEGRAL = "Integral"
    NON_INTEGRAL = "NonIntegral"

    def __str__(self):
        return self.value


def as_frequency(s, n: int) -> np.ndarray:
    arr = np.asarray(s)
    if arr.shape != (n,):
        raise ValueError(f"frequency must have {n} entries, got shape {arr.shape}")
    if arr.dtype.kind not in "iu":
        if not np.all(arr == np.round(arr)):
            raise ValueError("frequency vectors must have integer entries")
    return arr.astype(np.int64)


def _adjugate_and_det(q: FieldElement):
    a = q.ctx.mult_matrix_int(q.int_coords())
    det = int(linalg.int_det_batch(a))
    if det == 0:
        raise ZeroModulus(f"modulus {q.conj_free_repr()} has zero norm")
    return np.asarray(linalg.int_adj_batch(a), dtype=np.int64), det


def dual_numerators(q: FieldElement, s) -> tuple[np.ndarray, int]:
    """Return ``(u, D)`` with ``(A_q^{-1})^T s = u / D`` and ``D = |N(q)|``."""
    adj, det = _adjugate_and_det(q)
    s = np.atleast_2d(np.asarray(s, dtype=np.int64))
    u = s @ adj  # rows: (adj^T s)^T
    if det < 0:
        u = -u
    return u, abs(det)


def integrality_criterion(q: FieldElement, s) -> Criterion:
    u, d = dual_numerators(q, as_frequency(s, q.ctx.n))
    return Criterion.INTEGRAL if np.all(u % d == 0) else Criterion.NON_INTEGRAL


def integrality_batch(q: FieldElement, svecs) -> np.ndarray:
    """Boolean mask: True where ``(A_q^{-1})^T s`` is integral, for each row of ``svecs``."""
    u, d = dual_numerators(q, svecs)
    return np.all(u % d == 0, axis=1)


def _roots(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def exp_sum_bruteforce(q: FieldElement, s, system: ResidueSystem | None = None, reps=None) -> complex:
    """Term-by-term evaluation of the residue exponential sum.

    ``reps`` may override the representatives (any complete system gives the
    same value).  Phases are reduced exactly modulo 1 before exponentiation.
    """
    return complex(exp_sum_table(q, np.atleast_2d(as_frequency(s, q.ctx.n)), system, reps)[0])


def exp_sum_table(q: FieldElement, svecs, system: ResidueSystem | None = None, reps=None,
                  chunk: int = 2**22) -> np.ndarray:
    """Brute-force sums for every row of ``svecs``; summation order over reps is fixed."""
    if system is None and reps is None:
        system = residue_system(q)
    r = np.asarray(reps if reps is not None else system.reps_array, dtype=np.int64)
    u, d = dual_numerators(q, svecs)
    if d > MAX_NORM:
        raise ValueError(f"|N(q)| = {d} exceeds the roundoff guard {MAX_NORM}")
    roots = _roots(d)
    # every summand depends on s only through u mod d, so each distinct
    # phase vector is summed once
    u, inverse = np.unique(u % d, axis=0, return_inverse=True)
    rf = r.T.astype(np.float64)
    exact = float(d) * float(d) * r.shape[1] < 2**52
    vals = np.empty(len(u), dtype=np.complex128)
    step = max(1, chunk // max(len(r), 1))
    for start in range(0, len(u), step):
        block = u[start:start + step]
        if exact:
            ph = np.fmod(block.astype(np.float64) @ rf, d).astype(np.int64)
        else:
            ph = (block @ r.T) % d
        # e(-k/d) = roots[-k mod d]
        vals[start:start + step] = roots[(-ph) % d].sum(axis=1)
    return vals[inverse.ravel()]


def predicted_sum(q: FieldElement, s) -> int:
    from .numfield import field_norm

    if integrality_criterion(q, s) is Criterion.INTEGRAL:
        return abs(int(field_norm(q)))
    return 0


def cleared_dual(q: FieldElement, s) -> FieldElement:
    """``C_B * sum_j s_j w'_j`` as an element in original coordinates."""
    ctx = q.ctx
    return ctx.element(ctx.cleared_dual_int([int(x) for x in s]))


def weak_vanishing_direction_holds(q: FieldElement, s) -> bool:
    """If the criterion is integral then ``q`` divides ``C_B * s'``; vacuous otherwise."""
    if integrality_criterion(q, s) is Criterion.NON_INTEGRAL:
        return True
    return divides(q, cleared_dual(q, s))


def check_rows(q: FieldElement, svecs, sums) -> list[dict]:
    """Rows for the ``expsum-check`` CSV."""
    u, d = dual_numerators(q, svecs)
    integral = np.all(u % d == 0, axis=1)
    rows = []
    for s, val, ok in zip(np.asarray(svecs), sums, integral):
        pred = d if ok else 0
        rows.append(
            dict(
                q=" ".join(str(int(x)) for x in q.int_coords()),
                s=" ".join(str(int(x)) for x in s),
                sum_re=float(val.real),
                sum_im=float(val.imag),
                criterion=str(Criterion.INTEGRAL if ok else Criterion.NON_INTEGRAL),
                match=bool(abs(val - pred) <= 1e-9),
            )
        )
    return rows
