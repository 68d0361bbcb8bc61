"""One-step cost-of-capital valuation operator.

For a one-period obligation Y, the operator charges the capital the risk
functional demands for -Y, minus the discounted utility the capital provider
assigns to the unused buffer (r - Y)_+:

    value = r - u((r - Y)_+) / (1 + eta),   r = risk functional of -Y.

It is translation invariant, positively homogeneous and monotone, so
multi-period values follow by backward composition (see the engine modules).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ndtr

from .distributions import DiscreteDistribution
from .errors import UnsupportedConfiguration
from .risk_measures import (
    RiskMeasure,
    SpectralMeasure,
    integrate_step_quantile,
    normal_risk,
    normal_shifted_positive_part_integral,
    std_normal_pdf,
)


@dataclass(frozen=True)
class ValuationSpec:
    """Risk functional, capital-provider utility and cost-of-capital rate.

    ``utility=None`` means plain expectation (the Lebesgue spectral measure).
    ``eta_schedule`` optionally overrides ``eta`` per period in the recursion
    engines; every closed form requires a constant rate and rejects a schedule.
    """

    risk: RiskMeasure
    eta: float = 0.06
    utility: Optional[SpectralMeasure] = None
    eta_schedule: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if not isinstance(self.risk, RiskMeasure):
            raise ValueError("risk must be a RiskMeasure")
        if self.utility is not None and not isinstance(self.utility, SpectralMeasure):
            raise ValueError("utility must be None (expectation) or a SpectralMeasure")
        if not (np.isfinite(self.eta) and self.eta > 0.0):
            raise ValueError(f"cost-of-capital rate must be positive, got {self.eta!r}")
        if self.eta_schedule is not None:
            sched = tuple(float(e) for e in self.eta_schedule)
            if len(sched) == 0 or any(not (np.isfinite(e) and e > 0.0) for e in sched):
                raise ValueError("eta_schedule entries must be positive")
            object.__setattr__(self, "eta_schedule", sched)

    @property
    def utility_is_expectation(self) -> bool:
        return self.utility is None

    @property
    def utility_measure(self) -> SpectralMeasure:
        return SpectralMeasure.lebesgue() if self.utility is None else self.utility

    def eta_at(self, t: int) -> float:
        if self.eta_schedule is None:
            return self.eta
        if not 0 <= t < len(self.eta_schedule):
            raise ValueError(f"period {t} outside the eta schedule of length {len(self.eta_schedule)}")
        return self.eta_schedule[t]

    def constant_eta(self, what: str) -> float:
        if self.eta_schedule is not None:
            raise UnsupportedConfiguration(f"{what} requires a constant cost-of-capital rate")
        return self.eta


def _one_step_arrays(
    values: np.ndarray,
    probs: np.ndarray,
    cum: np.ndarray,
    eta: float,
    risk_measure: SpectralMeasure,
    utility_measure: Optional[SpectralMeasure],
) -> tuple[float, float, float]:
    """Core operator on a sorted support; returns (risk term, utility term, value).

    ``utility_measure=None`` selects the expectation fast path.
    """
    r = integrate_step_quantile(values, cum, risk_measure)
    slack = np.maximum(r - values, 0.0)
    if utility_measure is None:
        u = float(np.dot(slack, probs))
    else:
        # (r - y)_+ is nonincreasing in y, so reversing gives the sorted support.
        zcum = np.cumsum(probs[::-1])
        zcum[-1] = 1.0
        u = integrate_step_quantile(slack[::-1], zcum, utility_measure)
    return r, u, r - u / (1.0 + eta)


def one_step_components(
    dist: DiscreteDistribution, spec: ValuationSpec, period: Optional[int] = None
) -> tuple[float, float, float]:
    """(risk term, utility term, value) of the operator on one obligation law."""
    if spec.eta_schedule is not None and period is None:
        raise UnsupportedConfiguration(
            "a per-period cost-of-capital schedule needs an explicit period index"
        )
    eta = spec.eta if period is None else spec.eta_at(period)
    return _one_step_arrays(
        dist.values, dist.probs, dist.cum_probs, eta, spec.risk.measure, spec.utility
    )


def one_step_value(
    dist: DiscreteDistribution, spec: ValuationSpec, period: Optional[int] = None
) -> float:
    """Value of carrying one period of the obligation Y ~ dist."""
    return one_step_components(dist, spec, period)[2]


def one_step_upper_bound(dist: DiscreteDistribution, spec: ValuationSpec) -> float:
    """(eta * r + E[Y]) / (1 + eta); exact when (r - Y)_+ = r - Y on the support.

    Valid for expectation utility only.
    """
    if not spec.utility_is_expectation:
        raise UnsupportedConfiguration("the linear upper bound assumes expectation utility")
    eta = spec.constant_eta("one_step_upper_bound")
    r = integrate_step_quantile(dist.values, dist.cum_probs, spec.risk.measure)
    return (eta * r + dist.expectation()) / (1.0 + eta)


def one_step_value_normal(spec: ValuationSpec) -> float:
    """Closed form of the operator on a standard normal obligation.

    With r the risk functional of the negated standard normal,
    value = r - (r * Phi(r) + phi(r)) / (1 + eta).
    """
    if not spec.utility_is_expectation:
        raise UnsupportedConfiguration(
            "closed form needs expectation utility; use one_step_value_normal_spectral"
        )
    eta = spec.constant_eta("one_step_value_normal")
    r = normal_risk(spec.risk)
    return r - (r * float(ndtr(r)) + std_normal_pdf(r)) / (1.0 + eta)


def one_step_value_normal_spectral(spec: ValuationSpec) -> float:
    """Operator on a standard normal obligation with a spectral utility."""
    eta = spec.constant_eta("one_step_value_normal_spectral")
    r = normal_risk(spec.risk)
    u = normal_shifted_positive_part_integral(r, spec.utility_measure)
    return r - u / (1.0 + eta)


def normal_one_step(spec: ValuationSpec) -> float:
    """Dispatch to the expectation or spectral normal closed form."""
    if spec.utility_is_expectation:
        return one_step_value_normal(spec)
    return one_step_value_normal_spectral(spec)


def weight_function_value(dist: DiscreteDistribution, spec: ValuationSpec) -> float:
    """Operator evaluated through its distortion-weight representation.

    When both the risk density (nondecreasing) and the utility density
    (nonincreasing) are atomless, the operator equals the quantile of Y
    integrated against a single probability density

        w(u) = (1 - A / (1 + eta)) * m_r(u) + m_u(1 - u) / (1 + eta) * 1{u <= g}

    where g = P(Y <= r) including the atom at r, and A is the mass of m_u on
    (1 - g, 1).  Raises for configurations outside that representation.
    """
    eta = spec.constant_eta("weight_function_value")
    mr = spec.risk.measure
    mu = spec.utility_measure
    if mr.has_atoms or mu.has_atoms:
        raise UnsupportedConfiguration("weight representation needs atomless risk and utility measures")
    if np.any(np.diff(mr.density_levels) < 0.0):
        raise UnsupportedConfiguration("weight representation needs a nondecreasing risk density")
    if np.any(np.diff(mu.density_levels) > 0.0):
        raise UnsupportedConfiguration("weight representation needs a nonincreasing utility density")

    r = integrate_step_quantile(dist.values, dist.cum_probs, mr)
    g = dist.cdf(r)
    a_mass = mu.mass_of_open_interval(1.0 - g, 1.0)
    c_risk = 1.0 - a_mass / (1.0 + eta)
    c_util = 1.0 / (1.0 + eta)

    breaks = np.unique(
        np.concatenate((mr.density_breaks, 1.0 - mu.density_breaks[::-1], np.array([g])))
    )
    breaks = breaks[(breaks >= 0.0) & (breaks <= 1.0)]
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    mr_lvl = mr.density_levels[np.searchsorted(mr.density_breaks, mids, side="right") - 1]
    mu_lvl = mu.density_levels[np.searchsorted(mu.density_breaks, 1.0 - mids, side="right") - 1]
    levels = c_risk * mr_lvl + c_util * mu_lvl * (mids < g)
    weight = SpectralMeasure(np.array([]), np.array([]), breaks, levels)
    return integrate_step_quantile(dist.values, dist.cum_probs, weight)


def with_eta(spec: ValuationSpec, eta: float) -> ValuationSpec:
    """Copy of a valuation spec with a different constant cost-of-capital rate."""
    return replace(spec, eta=eta, eta_schedule=None)
