"""Complete residue systems of the ring of integers modulo a principal ideal.

The ideal generated by ``q`` is the column lattice ``A_q Z^n``.  Its upper
triangular Hermite form has diagonal ``d_0 .. d_{n-1}`` with product
``|N(q)|``, and the box ``0 <= x_k < d_k`` is a complete set of representatives.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import linalg
from .errors import NotIntegral, ZeroModulus
from .numfield import FieldElement


@dataclass(frozen=True, eq=False)
class ResidueSystem:
    modulus: FieldElement
    hnf: tuple                # upper triangular generators of A_q Z^n
    smith: tuple              # invariant factors of A_q
    reps_array: np.ndarray = field(repr=False)

    @property
    def norm(self) -> int:
        return len(self.reps_array)

    @property
    def box(self) -> tuple:
        return tuple(self.hnf[k][k] for k in range(len(self.hnf)))

    @cached_property
    def reps(self) -> list:
        ctx = self.modulus.ctx
        return [ctx.element(row.tolist()) for row in self.reps_array]

    def shifted(self, j: int) -> np.ndarray:
        """Representatives translated by the basis element ``w_j`` (still a complete system)."""
        out = self.reps_array.copy()
        out[:, j] += 1
        return out


def _box_points(box) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(d, dtype=np.int64) for d in box], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def residue_system(q: FieldElement) -> ResidueSystem:
    if not q.is_integral:
        raise NotIntegral(f"modulus {q.conj_free_repr()} is not an algebraic integer")
    a = q.ctx.mult_matrix_int(q.int_coords())
    det = int(linalg.int_det_batch(a))
    if det == 0:
        raise ZeroModulus(f"modulus {q.conj_free_repr()} has zero norm")
    h = linalg.hnf_upper(a.tolist())
    box = tuple(h[k][k] for k in range(len(h)))
    reps = _box_points(box)
    assert len(reps) == abs(det)
    return ResidueSystem(
        modulus=q,
        hnf=tuple(tuple(r) for r in h),
        smith=tuple(linalg.smith_invariants(a.tolist())),
        reps_array=reps,
    )


def reduce_mod(x: FieldElement, system: ResidueSystem) -> FieldElement:
    """Canonical representative of ``x`` modulo the system's modulus."""
    if not x.is_integral:
        raise NotIntegral(f"{x.conj_free_repr()} is not an algebraic integer")
    if x.ctx is not system.modulus.ctx:
        from .errors import ContextMismatch

        raise ContextMismatch("element and modulus belong to different fields")
    return x.ctx.element(linalg.hnf_reduce(system.hnf, x.int_coords()))


def reduce_mod_array(x, system: ResidueSystem) -> np.ndarray:
    return linalg.hnf_reduce_batch(system.hnf, np.atleast_2d(x))


def write_csv(system: ResidueSystem, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = system.reps_array.shape[1]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"r{k}" for k in range(n)])
        w.writerows(system.reps_array.tolist())
    return path


def read_csv(path: Path) -> np.ndarray:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    return np.array([[int(v) for v in row] for row in rows[1:]], dtype=np.int64)
