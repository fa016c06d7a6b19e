"""Domain types and reference evaluation of the siting objective.

The objective has three weighted parts over a binary selection ``x`` of
candidate locations:

* ``Z1`` -- mean POI-to-candidate distance, summed over the selection (minimized)
* ``Z2`` -- mean existing-station-to-candidate distance (maximized, so negated)
* ``Z3`` -- pairwise separation of selected candidates (maximized, so negated)

Everything here is evaluated directly from the distance matrices and serves as
the ground truth the QUBO compiler and the solvers are checked against.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


class ValidationError(ValueError):
    """Raised when an instance, weight set or assignment is malformed.

    ``code`` is a short machine-readable tag such as ``"asymmetric-q"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class SiteKind(str, enum.Enum):
    POI = "poi"
    EXISTING = "existing"
    CANDIDATE = "candidate"


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0) or math.isnan(self.lat):
            raise ValidationError("bad-coordinate", f"latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0) or math.isnan(self.lon):
            raise ValidationError("bad-coordinate", f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class Site:
    id: str
    point: GeoPoint
    kind: SiteKind
    tag: str = ""


class Objective(NamedTuple):
    z1: float
    z2: float
    z3: float
    total: float


@dataclass(frozen=True)
class Weights:
    """Objective multipliers plus the cardinality penalty weight.

    ``gamma2`` and ``gamma3`` are stored as non-negative magnitudes; the
    minus signs of the maximized terms are applied by the evaluators.
    """

    gamma1: float
    gamma2: float
    gamma3: float
    lambda_card: float = 0.0

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3", "lambda_card"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValidationError("bad-weight", f"{name}={value} must be finite and >= 0")

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.gamma1, self.gamma2, self.gamma3)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Sites, distance matrices (km) and the number of stations to open.

    ``d`` is POI x candidate, ``e`` is existing x candidate and ``q`` is
    candidate x candidate. Matrices are copied into read-only float arrays.
    Construction does not validate; call :func:`validate_instance`.
    """

    pois: tuple[Site, ...]
    existing: tuple[Site, ...]
    candidates: tuple[Site, ...]
    cs_count: int
    d: np.ndarray
    e: np.ndarray
    q: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "pois", tuple(self.pois))
        object.__setattr__(self, "existing", tuple(self.existing))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "cs_count", int(self.cs_count))
        d = _frozen(self.d)
        e = _frozen(self.e)
        if e.size == 0 and not self.existing:
            e = _frozen(np.zeros((0, d.shape[1] if d.ndim == 2 else 0)))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "q", _frozen(self.q))

    @property
    def n_pois(self) -> int:
        return len(self.pois)

    @property
    def n_existing(self) -> int:
        return len(self.existing)

    @property
    def n_candidates(self) -> int:
        return len(self.candidates)

    @property
    def sites(self) -> tuple[Site, ...]:
        return self.pois + self.existing + self.candidates


def validate_instance(inst: ProblemInstance) -> ProblemInstance:
    """Check every structural invariant and return ``inst`` unchanged."""
    P, X, E = inst.n_pois, inst.n_existing, inst.n_candidates
    if P < 1:
        raise ValidationError("dimension-mismatch", "pois: at least one POI is required")
    if E < 1:
        raise ValidationError("empty-candidates", "candidates: at least one candidate is required")
    if inst.cs_count < 1:
        raise ValidationError("bad-cs-count", f"cs_count={inst.cs_count} must be >= 1")
    if inst.cs_count > E:
        raise ValidationError(
            "cs-exceeds-candidates", f"cs_count={inst.cs_count} exceeds candidate count {E}"
        )

    ids = [s.id for s in inst.sites]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ValidationError("duplicate-id", f"site ids not unique: {dup[:5]}")

    for name, mat, shape in (("d", inst.d, (P, E)), ("e", inst.e, (X, E)), ("q", inst.q, (E, E))):
        if mat.shape != shape:
            raise ValidationError(
                "dimension-mismatch", f"{name} has shape {mat.shape}, expected {shape}"
            )
        bad = ~np.isfinite(mat)
        if bad.any():
            idx = tuple(int(v) for v in np.argwhere(bad)[0])
            raise ValidationError("non-finite-distance", f"{name}{list(idx)} is not finite")
        neg = mat < 0
        if neg.any():
            idx = tuple(int(v) for v in np.argwhere(neg)[0])
            raise ValidationError("negative-distance", f"{name}{list(idx)} = {mat[idx]} < 0")

    q = inst.q
    diag = np.flatnonzero(np.diag(q) != 0)
    if diag.size:
        i = int(diag[0])
        raise ValidationError("nonzero-diagonal", f"q[{i}][{i}] = {q[i, i]} must be 0")
    asym = np.argwhere(q != q.T)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise ValidationError(
            "asymmetric-q", f"q[{i}][{j}] = {q[i, j]} differs from q[{j}][{i}] = {q[j, i]}"
        )
    return inst


def as_assignment(inst: ProblemInstance, x) -> np.ndarray:
    """Coerce ``x`` to a 0/1 int8 vector of length E, or raise."""
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] != inst.n_candidates:
        raise ValidationError(
            "length-mismatch",
            f"assignment has shape {arr.shape}, expected ({inst.n_candidates},)",
        )
    if not np.isin(arr, (0, 1)).all():
        raise ValidationError("non-binary", "assignment entries must be 0 or 1")
    return arr.astype(np.int8)


def gamma_rule(n_candidates: int) -> tuple[float, float, float]:
    """The multiplier rule gamma = (4E, E/3, 1.7E)."""
    if n_candidates < 1:
        raise ValidationError("bad-cs-count", f"E={n_candidates} must be >= 1")
    E = float(n_candidates)
    return (E * 4, E / 3, E * 1.7)


def linear_objective_coefficients(inst: ProblemInstance, gammas: Sequence[float]) -> np.ndarray:
    """Per-candidate contribution of Z1 + Z2 when that candidate is selected."""
    g1, g2, _ = gammas
    lin = g1 * inst.d.sum(axis=0) / inst.n_pois
    if inst.n_existing:
        lin = lin - g2 * inst.e.sum(axis=0) / inst.n_existing
    return lin


def max_objective_coefficient(inst: ProblemInstance, gammas: Sequence[float]) -> float:
    lin = linear_objective_coefficients(inst, gammas)
    quad = gammas[2] * float(inst.q.max(initial=0.0))
    return max(float(np.abs(lin).max(initial=0.0)), quad)


def default_lambda(inst: ProblemInstance, gammas: Sequence[float]) -> float:
    """Cardinality penalty ``2 * CS * max|coef| * E``.

    Falls back to a unit coefficient scale when every objective coefficient
    is zero so the penalty stays strictly positive.
    """
    scale = max_objective_coefficient(inst, gammas) or 1.0
    return 2.0 * inst.cs_count * scale * inst.n_candidates


def default_weights(n_candidates: int, instance: ProblemInstance | None = None) -> Weights:
    """Multipliers from the candidate count; the penalty needs ``instance``.

    Without an instance ``lambda_card`` is left at 0.
    """
    gammas = gamma_rule(n_candidates)
    lam = default_lambda(instance, gammas) if instance is not None else 0.0
    return Weights(*gammas, lambda_card=lam)


def objective_components(inst: ProblemInstance, w: Weights, x) -> Objective:
    x = as_assignment(inst, x).astype(np.float64)
    z1 = w.gamma1 * float(inst.d.sum(axis=0) @ x) / inst.n_pois
    z2 = 0.0
    if inst.n_existing:
        z2 = -w.gamma2 * float(inst.e.sum(axis=0) @ x) / inst.n_existing
    z3 = -w.gamma3 * float(x @ np.triu(inst.q, 1) @ x)
    return Objective(z1, z2, z3, z1 + z2 + z3)


def cardinality_penalty(inst: ProblemInstance, w: Weights, x) -> float:
    x = as_assignment(inst, x)
    return w.lambda_card * float(int(x.sum()) - inst.cs_count) ** 2
