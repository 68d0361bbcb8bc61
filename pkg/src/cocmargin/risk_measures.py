"""Quantile-based risk and utility functionals driven by spectral measures.

A :class:`SpectralMeasure` is a probability measure on (0, 1) given by
finitely many interior atoms plus a piecewise-constant density.  Risk
functionals integrate the quantile of the *negated* argument against the
measure (loss convention); utility functionals integrate the quantile of the
argument itself.  Value-at-risk is the unit atom at ``1 - p``; expected
shortfall at level ``p`` is the flat density ``1/p`` on ``(1 - p, 1)``.

Bounded density plus an atom-free neighbourhood of the endpoints gives the
interval-mass regularity bound recorded as ``density_bound`` (sup of the
density) and ``endpoint_gap`` (distance from the closest atom to {0, 1}):
every open interval within ``endpoint_gap`` of an endpoint has mass at most
``density_bound`` times its length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import ndtr, ndtri

from .distributions import DiscreteDistribution

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def std_normal_cdf(x: float) -> float:
    return float(ndtr(x))


def std_normal_quantile(u: float) -> float:
    if not 0.0 < u < 1.0:
        raise ValueError(f"standard normal quantile needs u in (0, 1), got {u!r}")
    return float(ndtri(u))


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Probability measure on (0, 1): interior atoms + piecewise-constant density."""

    atom_locations: np.ndarray
    atom_masses: np.ndarray
    density_breaks: np.ndarray  # 0 = b_0 < ... < b_k = 1
    density_levels: np.ndarray  # one nonnegative level per piece

    def __post_init__(self) -> None:
        locs = np.asarray(self.atom_locations, dtype=float) + 0.0
        masses = np.asarray(self.atom_masses, dtype=float) + 0.0
        breaks = np.asarray(self.density_breaks, dtype=float) + 0.0
        levels = np.asarray(self.density_levels, dtype=float) + 0.0
        if locs.ndim != 1 or masses.ndim != 1 or locs.shape != masses.shape:
            raise ValueError("atom locations and masses must be equal-length 1-d arrays")
        if locs.size and (np.any(locs <= 0.0) or np.any(locs >= 1.0)):
            raise ValueError("atoms must lie strictly inside (0, 1)")
        if locs.size and np.any(np.diff(locs) <= 0.0):
            raise ValueError("atom locations must be strictly increasing")
        if np.any(masses <= 0.0):
            raise ValueError("atom masses must be positive")
        if breaks.ndim != 1 or breaks.size < 2 or breaks[0] != 0.0 or breaks[-1] != 1.0:
            raise ValueError("density breaks must run from 0.0 to 1.0")
        if np.any(np.diff(breaks) <= 0.0):
            raise ValueError("density breaks must be strictly increasing")
        if levels.shape != (breaks.size - 1,):
            raise ValueError("need exactly one density level per piece")
        if np.any(levels < 0.0) or not np.all(np.isfinite(levels)):
            raise ValueError("density levels must be finite and nonnegative")
        total = masses.sum() + float(np.dot(levels, np.diff(breaks)))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"total mass must be 1 within 1e-12, got {total!r}")
        for arr in (locs, masses, breaks, levels):
            arr.flags.writeable = False
        object.__setattr__(self, "atom_locations", locs)
        object.__setattr__(self, "atom_masses", masses)
        object.__setattr__(self, "density_breaks", breaks)
        object.__setattr__(self, "density_levels", levels)
        gap = 0.5 if locs.size == 0 else float(min(locs.min(), 1.0 - locs.max()))
        object.__setattr__(self, "endpoint_gap", gap)
        object.__setattr__(self, "density_bound", float(levels.max()))

    # -- constructors ------------------------------------------------------

    @classmethod
    def var(cls, p: float) -> "SpectralMeasure":
        """Unit atom at 1 - p (value-at-risk at level p)."""
        if not 0.0 < p < 1.0:
            raise ValueError(f"VaR level must lie in (0, 1), got {p!r}")
        return cls(np.array([1.0 - p]), np.array([1.0]), np.array([0.0, 1.0]), np.array([0.0]))

    @classmethod
    def expected_shortfall(cls, p: float) -> "SpectralMeasure":
        """Flat density 1/p on (1 - p, 1) (expected shortfall at level p)."""
        if not 0.0 < p <= 1.0:
            raise ValueError(f"ES level must lie in (0, 1], got {p!r}")
        if p == 1.0:
            return cls.lebesgue()
        return cls(np.array([]), np.array([]), np.array([0.0, 1.0 - p, 1.0]), np.array([0.0, 1.0 / p]))

    @classmethod
    def lebesgue(cls) -> "SpectralMeasure":
        """Uniform density on (0, 1); integrating a quantile against it gives the mean."""
        return cls(np.array([]), np.array([]), np.array([0.0, 1.0]), np.array([1.0]))

    # -- queries -------------------------------------------------------------

    @property
    def has_atoms(self) -> bool:
        return self.atom_locations.size > 0

    def mass_of_open_interval(self, a: float, b: float) -> float:
        """Measure of the open interval (a, b) within [0, 1]."""
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError("need 0 <= a <= b <= 1")
        inside = (self.atom_locations > a) & (self.atom_locations < b)
        total = float(self.atom_masses[inside].sum())
        lo = np.maximum(a, self.density_breaks[:-1])
        hi = np.minimum(b, self.density_breaks[1:])
        total += float(np.dot(self.density_levels, np.clip(hi - lo, 0.0, None)))
        return total


@dataclass(frozen=True)
class RiskMeasure:
    """A spectral measure tagged with its family for closed-form dispatch."""

    kind: str  # "var" | "es" | "spectral"
    level: float | None
    measure: SpectralMeasure

    @classmethod
    def var(cls, p: float) -> "RiskMeasure":
        return cls("var", float(p), SpectralMeasure.var(p))

    @classmethod
    def expected_shortfall(cls, p: float) -> "RiskMeasure":
        return cls("es", float(p), SpectralMeasure.expected_shortfall(p))

    @classmethod
    def spectral(cls, measure: SpectralMeasure) -> "RiskMeasure":
        return cls("spectral", None, measure)


MeasureLike = Union[RiskMeasure, SpectralMeasure]


def _measure_of(m: MeasureLike) -> SpectralMeasure:
    return m.measure if isinstance(m, RiskMeasure) else m


def integrate_step_quantile(values: np.ndarray, cum: np.ndarray, m: MeasureLike) -> float:
    """Exact integral of a step quantile function against the measure.

    ``values`` is the sorted support, ``cum`` the cumulative probabilities with
    ``cum[-1] == 1``; the quantile equals ``values[i]`` on ``(cum[i-1], cum[i]]``.
    """
    measure = _measure_of(m)
    total = 0.0
    n = values.size
    for u, w in zip(measure.atom_locations, measure.atom_masses):
        idx = int(np.searchsorted(cum, u, side="left"))
        if idx >= n:
            idx = n - 1
        total += w * float(values[idx])
    if np.any(measure.density_levels > 0.0):
        edges_lo = np.concatenate(([0.0], cum[:-1]))
        for a, b, lvl in zip(measure.density_breaks[:-1], measure.density_breaks[1:], measure.density_levels):
            if lvl == 0.0:
                continue
            overlap = np.clip(np.minimum(b, cum) - np.maximum(a, edges_lo), 0.0, None)
            total += lvl * float(np.dot(values, overlap))
    return float(total)


def integrate_quantile(dist: DiscreteDistribution, m: MeasureLike) -> float:
    """Exact integral of the step quantile of ``dist`` against the measure."""
    return integrate_step_quantile(dist.values, dist.cum_probs, m)


def risk(dist: DiscreteDistribution, m: MeasureLike) -> float:
    """Risk functional: quantile of the negated argument integrated against m."""
    return integrate_quantile(dist.negate(), m)


def utility(dist: DiscreteDistribution, m: MeasureLike) -> float:
    """Utility functional: quantile of the argument itself integrated against m."""
    return integrate_quantile(dist, m)


def var_level(dist: DiscreteDistribution, p: float) -> float:
    """Value-at-risk at level p: the (1-p)-quantile of the negated argument."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"VaR level must lie in (0, 1), got {p!r}")
    return dist.negate().quantile(1.0 - p)


def es_level(dist: DiscreteDistribution, p: float) -> float:
    """Expected shortfall at level p; delegates to the shared integrator."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"ES level must lie in (0, 1], got {p!r}")
    return risk(dist, SpectralMeasure.expected_shortfall(p))


# -- standard normal closed forms -------------------------------------------


def _pdf_at_quantile(u: float) -> float:
    """phi(Phi^{-1}(u)) with the endpoint limits phi(+-inf) = 0."""
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return std_normal_pdf(float(ndtri(u)))


def normal_quantile_integral(a: float, b: float) -> float:
    """Integral of Phi^{-1}(u) du over (a, b) in closed form."""
    if not 0.0 <= a <= b <= 1.0:
        raise ValueError("need 0 <= a <= b <= 1")
    return _pdf_at_quantile(a) - _pdf_at_quantile(b)


def normal_risk(m: MeasureLike) -> float:
    """Risk functional applied to a standard normal argument.

    VaR and ES use their closed forms; a general spectral measure integrates
    Phi^{-1} piece by piece, which is exact because the antiderivative of
    Phi^{-1} is -phi(Phi^{-1}).
    """
    if isinstance(m, RiskMeasure):
        if m.kind == "var":
            return float(ndtri(1.0 - m.level))
        if m.kind == "es":
            return _pdf_at_quantile(1.0 - m.level) / m.level
        measure = m.measure
    else:
        measure = m
    total = 0.0
    for u, w in zip(measure.atom_locations, measure.atom_masses):
        total += w * float(ndtri(u))
    for a, b, lvl in zip(measure.density_breaks[:-1], measure.density_breaks[1:], measure.density_levels):
        if lvl != 0.0:
            total += lvl * normal_quantile_integral(a, b)
    return float(total)


def normal_shifted_positive_part_integral(r: float, m: MeasureLike) -> float:
    """Integral of (r + Phi^{-1}(u))_+ against the measure, in closed form.

    This is the utility functional applied to (r - eps)_+ for a standard
    normal eps, written through the quantile of r - eps.
    """
    measure = _measure_of(m)
    u_star = float(ndtr(-r))  # below this level the integrand is zero
    total = 0.0
    for u, w in zip(measure.atom_locations, measure.atom_masses):
        total += w * max(r + float(ndtri(u)), 0.0)
    for a, b, lvl in zip(measure.density_breaks[:-1], measure.density_breaks[1:], measure.density_levels):
        if lvl == 0.0:
            continue
        lo = max(a, u_star)
        if b > lo:
            total += lvl * (r * (b - lo) + normal_quantile_integral(lo, b))
    return float(total)
