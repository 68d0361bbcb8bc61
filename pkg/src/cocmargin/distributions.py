"""Finite discrete distributions with a left-continuous quantile convention.

A :class:`DiscreteDistribution` is the law of a real random variable with
finite support.  Construction canonicalizes: support points are sorted
ascending, duplicates merged, probabilities renormalized to sum to one, and
atoms below ``PROB_FLOOR`` dropped (then renormalized again).  Equality is
therefore exact array equality, which keeps cross-engine comparisons sharp.

The quantile uses the generalized inverse ``F^{-1}(u) = min{y : F(y) >= u}``
for ``u`` in (0, 1]; at a CDF jump point the lower step value is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

# Atoms below this mass are dropped on construction and the rest renormalized.
PROB_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Law of a finitely supported real random variable."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if values.ndim != 1 or probs.ndim != 1:
            raise ValueError("values and probs must be one-dimensional")
        if values.shape != probs.shape:
            raise ValueError("values and probs must have the same length")
        if values.size == 0:
            raise ValueError("support must be nonempty")
        if not np.all(np.isfinite(values)):
            raise ValueError("support points must be finite")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0.0):
            raise ValueError("probs must be finite and nonnegative")
        total = probs.sum()
        if total <= 0.0:
            raise ValueError("probs must have positive total mass")

        # Canonical form: sorted support, duplicates merged, mass renormalized.
        values = values + 0.0  # fresh array; also maps -0.0 to +0.0
        order = np.argsort(values, kind="stable")
        values = values[order]
        probs = probs[order]
        uniq, start = np.unique(values, return_index=True)
        if uniq.size != values.size:
            probs = np.add.reduceat(probs, start)
            values = uniq
        probs = probs / probs.sum()
        keep = probs >= PROB_FLOOR
        if not np.all(keep):
            values = values[keep]
            probs = probs[keep]
            probs = probs / probs.sum()
        values.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_cum", None)

    # -- constructors ------------------------------------------------------

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDistribution":
        return cls(np.array([float(value)]), np.array([1.0]))

    @classmethod
    def uniform(cls, values: Iterable[float]) -> "DiscreteDistribution":
        vals = np.asarray(list(values), dtype=float)
        if vals.size == 0:
            raise ValueError("support must be nonempty")
        return cls(vals, np.full(vals.size, 1.0 / vals.size))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "DiscreteDistribution":
        pts = list(pairs)
        return cls(np.array([p[0] for p in pts], dtype=float), np.array([p[1] for p in pts], dtype=float))

    # -- basic queries ------------------------------------------------------

    @property
    def cum_probs(self) -> np.ndarray:
        """Cumulative probabilities F(y_i); the last entry is forced to 1."""
        cached = object.__getattribute__(self, "_cum")
        if cached is None:
            cum = np.cumsum(self.probs)
            cum[-1] = 1.0
            cum.flags.writeable = False
            object.__setattr__(self, "_cum", cum)
            cached = cum
        return cached

    def quantile(self, u: float) -> float:
        """Smallest support point y with F(y) >= u, for u in (0, 1]."""
        if not 0.0 < u <= 1.0:
            raise ValueError(f"quantile level must lie in (0, 1], got {u!r}")
        idx = int(np.searchsorted(self.cum_probs, u, side="left"))
        if idx >= self.values.size:
            idx = self.values.size - 1
        return float(self.values[idx])

    def cdf(self, y: float) -> float:
        """P(Y <= y)."""
        idx = int(np.searchsorted(self.values, y, side="right"))
        if idx == 0:
            return 0.0
        return float(self.cum_probs[idx - 1])

    def expectation(self) -> float:
        return float(np.dot(self.values, self.probs))

    # -- transforms ---------------------------------------------------------

    def negate(self) -> "DiscreteDistribution":
        """Law of -Y."""
        return DiscreteDistribution(-self.values[::-1], self.probs[::-1])

    def shift(self, c: float) -> "DiscreteDistribution":
        """Law of Y + c."""
        return DiscreteDistribution(self.values + float(c), self.probs)

    def scale(self, c: float) -> "DiscreteDistribution":
        """Law of c * Y for c >= 0."""
        c = float(c)
        if c < 0.0:
            raise ValueError("scale factor must be nonnegative; compose with negate() instead")
        if c == 0.0:
            return DiscreteDistribution.point_mass(0.0)
        return DiscreteDistribution(self.values * c, self.probs)

    def positive_part(self) -> "DiscreteDistribution":
        """Law of max(Y, 0)."""
        return DiscreteDistribution(np.maximum(self.values, 0.0), self.probs)

    def pushforward(self, f: Callable[[np.ndarray], np.ndarray]) -> "DiscreteDistribution":
        """Law of f(Y) for a measurable f applied pointwise to the support."""
        return DiscreteDistribution(np.asarray(f(self.values), dtype=float), self.probs)

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.probs.tobytes()))

    def isclose(self, other: "DiscreteDistribution", tol: float = 1e-12) -> bool:
        """Same support within tol and same masses within tol."""
        if self.values.size != other.values.size:
            return False
        return bool(
            np.all(np.abs(self.values - other.values) <= tol)
            and np.all(np.abs(self.probs - other.probs) <= tol)
        )


def convolve(d1: DiscreteDistribution, d2: DiscreteDistribution) -> DiscreteDistribution:
    """Law of Y1 + Y2 for independent Y1 ~ d1, Y2 ~ d2."""
    values = (d1.values[:, None] + d2.values[None, :]).ravel()
    probs = (d1.probs[:, None] * d2.probs[None, :]).ravel()
    return DiscreteDistribution(values, probs)


def mixture(components: Sequence[DiscreteDistribution], weights: Sequence[float]) -> DiscreteDistribution:
    """Mixture law: with probability weights[i], draw from components[i]."""
    if len(components) == 0 or len(components) != len(weights):
        raise ValueError("components and weights must be nonempty and equal-length")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or w.sum() <= 0.0:
        raise ValueError("weights must be nonnegative with positive total")
    values = np.concatenate([c.values for c in components])
    probs = np.concatenate([wi * c.probs for wi, c in zip(w, components)])
    return DiscreteDistribution(values, probs)
