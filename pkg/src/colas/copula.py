"""Copula-coupled node marks: popularity weights and torus positions.

Each node gets a uniform rank ``U`` (turned into a weight by the marginal
quantile) and ``d`` uniform coordinates.  Under the FGM family ``U`` is
coupled to the *first* coordinate only; the remaining coordinates stay
independent uniforms, so positions are uniform on the torus for every theta.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import rng
from .errors import DomainError, ParameterError, ParseError, UnsupportedError


class CopulaKind(str, Enum):
    PRODUCT = "product"
    FGM = "fgm"


class MarginalKind(str, Enum):
    UNIT_UNIFORM = "uniform"
    PARETO = "pareto"


@dataclass(frozen=True)
class CopulaFamily:
    kind: CopulaKind = CopulaKind.PRODUCT
    theta: float = 0.0
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", CopulaKind(self.kind))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ParameterError(f"position dimension must be >= 1, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if not (0.0 <= self.theta <= 1.0):
            raise ParameterError(f"theta must lie in [0, 1], got {self.theta}")
        if self.kind is CopulaKind.PRODUCT and self.theta != 0.0:
            raise ParameterError("the product copula has no dependence parameter")

    @classmethod
    def product(cls, dim=1):
        return cls(CopulaKind.PRODUCT, 0.0, dim)

    @classmethod
    def fgm(cls, theta, dim=1):
        return cls(CopulaKind.FGM, float(theta), dim)

    @property
    def effective_theta(self):
        return self.theta if self.kind is CopulaKind.FGM else 0.0

    def density(self, u, x1):
        """Copula density c(u, x) for the (U, X_1) pair."""
        return 1.0 + self.effective_theta * (1.0 - 2.0 * np.asarray(u)) * (1.0 - 2.0 * np.asarray(x1))

    def conditional_rank(self, v, x1):
        """Invert F(u | x) = u + a u (1 - u), a = theta (1 - 2 x_1), at level v.

        Uses the root of the quadratic that lies in [0, 1], written in the
        cancellation-free form 2v / ((1 + a) + sqrt((1 + a)^2 - 4 a v)).
        """
        v = np.asarray(v, dtype=np.float64)
        a = self.effective_theta * (1.0 - 2.0 * np.asarray(x1, dtype=np.float64))
        b = 1.0 + a
        disc = np.maximum(b * b - 4.0 * a * v, 0.0)
        return 2.0 * v / (b + np.sqrt(disc))


@dataclass(frozen=True)
class WeightMarginal:
    """Weight law.  ``cap`` optionally truncates weights at W <= cap."""

    kind: MarginalKind = MarginalKind.UNIT_UNIFORM
    alpha: float = 2.5
    x_min: float = 1.0
    cap: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MarginalKind(self.kind))
        if self.kind is MarginalKind.PARETO:
            if not self.alpha > 1.0:
                raise ParameterError(f"Pareto tail index must exceed 1, got {self.alpha}")
            if not self.x_min > 0.0:
                raise ParameterError(f"Pareto scale must be positive, got {self.x_min}")
        if self.cap is not None and not self.cap > 0.0:
            raise ParameterError("weight cap must be positive")

    @classmethod
    def uniform(cls):
        return cls(MarginalKind.UNIT_UNIFORM)

    @classmethod
    def pareto(cls, alpha, x_min=1.0, cap=None):
        return cls(MarginalKind.PARETO, float(alpha), float(x_min), cap)

    def quantile(self, u):
        """F^{-1}(u) without domain checks (vectorised)."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind is MarginalKind.PARETO:
            with np.errstate(divide="ignore"):
                w = self.x_min * (1.0 - u) ** (-1.0 / self.alpha)
        else:
            w = u.copy() if u.ndim else u
        if self.cap is not None:
            w = np.minimum(w, self.cap)
        return w

    def cdf(self, w):
        w = np.asarray(w, dtype=np.float64)
        if self.kind is MarginalKind.PARETO:
            return np.where(w <= self.x_min, 0.0, 1.0 - (self.x_min / np.maximum(w, self.x_min)) ** self.alpha)
        return np.clip(w, 0.0, 1.0)

    def mean(self):
        if self.cap is not None:
            raise UnsupportedError("closed-form mean not available for capped weights")
        if self.kind is MarginalKind.PARETO:
            return self.x_min * self.alpha / (self.alpha - 1.0)
        return 0.5

    def rank_slope(self):
        """Integral of F^{-1}(u) (1 - 2u) du; sets how FGM tilts the conditional mean."""
        if self.cap is not None:
            raise UnsupportedError("closed form not available for capped weights")
        if self.kind is MarginalKind.PARETO:
            a = self.alpha
            return -self.x_min * a / ((2.0 * a - 1.0) * (a - 1.0))
        return -1.0 / 6.0

    @property
    def slowly_varying_constant(self):
        """L(t) for P(W > t) = t^{-alpha} L(t); constant for Pareto."""
        if self.kind is not MarginalKind.PARETO:
            raise UnsupportedError("regular variation needs a Pareto marginal")
        return self.x_min**self.alpha


@dataclass(frozen=True, eq=False)
class MarkSet:
    n: int
    d: int
    weights: np.ndarray
    positions: np.ndarray
    family: CopulaFamily
    marginal: WeightMarginal
    seed: int
    ranks: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        x = np.asarray(self.positions, dtype=np.float64).reshape(len(w), -1)
        if len(w) != self.n or x.shape != (self.n, self.d):
            raise ParameterError("weights/positions do not match (n, d)")
        if np.any(~(w > 0)):
            raise ParameterError("all weights must be positive")
        if np.any((x < 0.0) | (x >= 1.0)):
            raise ParameterError("positions must lie in [0, 1)^d")
        w.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "positions", x)

    def __eq__(self, other):
        if not isinstance(other, MarkSet):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.positions, other.positions)
        )

    def to_csv(self, path):
        write_marks_csv(self, path)


def sample_marks(n, family, marginal, seed):
    """Draw ``n`` i.i.d. marks from the copula-seeded law.

    Mark ``i`` depends only on ``(seed, i)``; the arrays are bit-identical
    for repeated calls and independent of ``n`` for shared indices.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"need n >= 1 nodes, got {n}")
    n = int(n)
    d = family.dim
    idx = np.arange(n, dtype=np.int64)
    pos = np.empty((n, d))
    for c in range(d):
        pos[:, c] = rng.uniforms(seed, rng.STREAM_POSITION + c, idx)
    v = rng.uniforms(seed, rng.STREAM_WEIGHT, idx)
    u = family.conditional_rank(v, pos[:, 0])
    # keep the rank strictly inside (0, 1); the quadratic root can round to 0
    u = np.clip(u, 2.0**-60, np.nextafter(1.0, 0.0))
    w = marginal.quantile(u)
    return MarkSet(n, d, w, pos, family, marginal, int(seed), ranks=u)


def conditional_moment(p, theta, x, marginal=None):
    """E[W^p | X_1 = x] under FGM with unit-uniform weights."""
    if marginal is not None and marginal.kind is not MarginalKind.UNIT_UNIFORM:
        raise UnsupportedError("conditional_moment is defined for the unit-uniform marginal")
    if p not in (1, 2, 3):
        raise UnsupportedError(f"moment order must be 1, 2 or 3, got {p}")
    if not 0.0 <= theta <= 1.0:
        raise ParameterError(f"theta must lie in [0, 1], got {theta}")
    x = np.asarray(x, dtype=np.float64)
    if np.any((x < 0.0) | (x > 1.0)):
        raise DomainError("x must lie in [0, 1]")
    val = 1.0 / (p + 1) - theta * (1.0 - 2.0 * x) * p / ((p + 1) * (p + 2))
    return float(val) if val.ndim == 0 else val


def conditional_mean(marginal, theta, x):
    """m_1(x) = E[W | X_1 = x] for any supported marginal (uncapped)."""
    x = np.asarray(x, dtype=np.float64)
    return marginal.mean() + theta * (1.0 - 2.0 * x) * marginal.rank_slope()


def weight_quantile(marginal, u):
    u = np.asarray(u, dtype=np.float64)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise DomainError("quantile level must lie in the open interval (0, 1)")
    q = marginal.quantile(u)
    return float(q) if q.ndim == 0 else q


def write_marks_csv(marks, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["id", "w"] + [f"x{c + 1}" for c in range(marks.d)])
        for i in range(marks.n):
            out.writerow([i, repr(float(marks.weights[i]))] + [repr(float(v)) for v in marks.positions[i]])


def read_marks_csv(path, family=None, marginal=None, seed=0):
    """Load marks written by :func:`write_marks_csv` (ids must be 0..n-1)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty marks file", 1) from None
        if header[:2] != ["id", "w"] or any(h != f"x{c + 1}" for c, h in enumerate(header[2:])):
            raise ParseError(f"unexpected marks header {header!r}", 1)
        d = len(header) - 2
        if d < 1:
            raise ParseError("marks need at least one position coordinate", 1)
        ids, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 2:
                raise ParseError(f"expected {d + 2} fields, got {len(row)}", lineno)
            try:
                ids.append(int(row[0]))
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    ids = np.asarray(ids, dtype=np.int64)
    if not np.array_equal(np.sort(ids), np.arange(len(ids))):
        raise ParseError("mark ids must be exactly 0..n-1")
    data = np.asarray(rows, dtype=np.float64)[np.argsort(ids)]
    family = family or CopulaFamily.product(d)
    marginal = marginal or WeightMarginal.uniform()
    return MarkSet(len(ids), d, data[:, 0], data[:, 1:], family, marginal, seed)


def ball_volume(d, radius=1.0):
    if d == 1:
        return 2.0 * radius
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * radius**d
