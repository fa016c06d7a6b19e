"""Compile a siting instance into a QUBO.

The fixed-count constraint ``sum(x) == CS`` becomes the penalty
``lambda * (sum(x) - CS)**2``; with ``x_j**2 == x_j`` it expands to
``lambda * (1 - 2 CS)`` on every linear term, ``2 lambda`` on every pair and
``lambda * CS**2`` in the offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (
    ProblemInstance,
    ValidationError,
    Weights,
    linear_objective_coefficients,
    validate_instance,
)

QUBO_FORMAT = "evsiting-qubo 1"


@dataclass(frozen=True, eq=False)
class Qubo:
    """``offset + linear @ x + x @ quadratic @ x`` over binary ``x``.

    ``quadratic`` is a dense ``n x n`` array whose only non-zero entries sit
    strictly above the diagonal, i.e. ``quadratic[i, j]`` for ``i < j``.
    """

    linear: np.ndarray
    quadratic: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        lin = np.array(self.linear, dtype=np.float64)
        quad = np.array(self.quadratic, dtype=np.float64)
        n = lin.shape[0]
        if lin.ndim != 1 or quad.shape != (n, n):
            raise ValidationError(
                "dimension-mismatch", f"linear {lin.shape} and quadratic {quad.shape} disagree"
            )
        if np.tril(quad).any():
            raise ValidationError("bad-qubo", "quadratic entries must satisfy i < j")
        if not (np.isfinite(lin).all() and np.isfinite(quad).all() and math.isfinite(self.offset)):
            raise ValidationError("bad-qubo", "coefficients must be finite")
        lin.setflags(write=False)
        quad.setflags(write=False)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "quadratic", quad)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    @property
    def couplings(self) -> dict[tuple[int, int], float]:
        """Non-zero quadratic terms keyed by ``(i, j)`` with ``i < j``."""
        ii, jj = np.nonzero(self.quadratic)
        return {(int(i), int(j)): float(self.quadratic[i, j]) for i, j in zip(ii, jj)}

    def symmetric(self) -> np.ndarray:
        """Full symmetric coupling matrix with a zero diagonal."""
        return self.quadratic + self.quadratic.T

    def max_abs_coefficient(self) -> float:
        return max(
            float(np.abs(self.linear).max(initial=0.0)),
            float(np.abs(self.quadratic).max(initial=0.0)),
        )


def build_qubo(inst: ProblemInstance, w: Weights) -> Qubo:
    validate_instance(inst)
    cs, lam = inst.cs_count, w.lambda_card
    linear = linear_objective_coefficients(inst, w.gammas) + lam * (1 - 2 * cs)
    quadratic = np.triu(-w.gamma3 * inst.q + 2.0 * lam, 1)
    return Qubo(linear, quadratic, lam * cs * cs)


def energy(q: Qubo, x) -> float:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != q.n:
        raise ValidationError("length-mismatch", f"assignment has shape {x.shape}, expected ({q.n},)")
    xf = x.astype(np.float64)
    return q.offset + float(q.linear @ xf) + float(xf @ q.quadratic @ xf)


def write_qubo(q: Qubo, path) -> None:
    """Write the sparse text form.

    Layout: a format line, the variable count, one ``i j coeff`` line per
    non-zero term (``i == j`` for linear terms), then ``offset <value>``.
    Floats use ``repr`` so a read back is exact.
    """
    lines = [QUBO_FORMAT, str(q.n)]
    for i in np.flatnonzero(q.linear):
        lines.append(f"{i} {i} {float(q.linear[i])!r}")
    for (i, j), c in q.couplings.items():
        lines.append(f"{i} {j} {c!r}")
    lines.append(f"offset {q.offset!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_qubo(path) -> Qubo:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or " ".join(rows[0]) != QUBO_FORMAT:
        raise ValidationError("bad-format", f"{path}: missing '{QUBO_FORMAT}' header")
    n = int(rows[1][0])
    linear = np.zeros(n)
    quadratic = np.zeros((n, n))
    offset = 0.0
    for row in rows[2:]:
        if row[0] == "offset":
            offset = float(row[1])
            continue
        i, j, c = int(row[0]), int(row[1]), float(row[2])
        if i == j:
            linear[i] = c
        else:
            quadratic[min(i, j), max(i, j)] = c
    return Qubo(linear, quadratic, offset)
