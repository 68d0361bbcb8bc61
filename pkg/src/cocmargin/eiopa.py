"""Solvency II style comparators for the term-life portfolio.

Best estimates, the stressed-mortality solvency capital requirement, and two
risk-margin formulas: the ratio-projection shortcut (Method 2) and the generic
discounted cost-of-capital sum.  These are the quantities the exact
cost-of-capital margin is benchmarked against; none of them feed back into the
valuation engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .life import Cohort, MakehamLaw, MortalityTable, annual_death_rates, mortality_table


@dataclass(frozen=True)
class EiopaParams:
    """Cost-of-capital rate, mortality stress, and discount curve.

    ``discount_curve[k]`` is the risk-free rate for maturity k+1 years; an
    empty curve means no discounting.  The stress multiplies the force of
    mortality by default; ``stress_rates=True`` multiplies the one-year death
    probabilities instead (capped at 1).
    """

    coc_rate: float = 0.06
    stress_factor: float = 1.15
    discount_curve: tuple = ()
    stress_rates: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.coc_rate) or self.coc_rate <= 0:
            raise ValueError("coc_rate must be positive")
        if not math.isfinite(self.stress_factor) or self.stress_factor <= 0:
            raise ValueError("stress_factor must be positive")
        curve = tuple(float(r) for r in self.discount_curve)
        if any(not math.isfinite(r) or r <= -1.0 for r in curve):
            raise ValueError("discount rates must be finite and above -1")
        object.__setattr__(self, "discount_curve", curve)

    def rate(self, maturity: int) -> float:
        """Risk-free rate for the given maturity in years (0 beyond the curve)."""
        idx = maturity - 1
        if idx < 0:
            raise ValueError("maturity must be at least 1")
        return self.discount_curve[idx] if idx < len(self.discount_curve) else 0.0


def _expected_deaths(cohort: Cohort, table: MortalityTable) -> np.ndarray:
    return cohort.size * table.death_fractions


def best_estimate(cohort: Cohort, law: MakehamLaw, i: int = 1) -> float:
    """Expected remaining death payments from year i on (no discounting)."""
    if not 1 <= i <= cohort.horizon:
        raise ValueError(f"start year must lie in [1, {cohort.horizon}], got {i}")
    return float(_expected_deaths(cohort, mortality_table(cohort, law))[i - 1 :].sum())


def _stressed_table(cohort: Cohort, law: MakehamLaw, params: EiopaParams) -> MortalityTable:
    if params.stress_rates:
        rates = annual_death_rates(law, cohort.age, cohort.horizon)
        return MortalityTable.from_annual_rates(np.clip(params.stress_factor * rates, 0.0, 1.0))
    return mortality_table(cohort, law.scaled(params.stress_factor))


def scr(cohort: Cohort, law: MakehamLaw, params: EiopaParams = EiopaParams()) -> float:
    """Increase of the total best estimate under the stressed mortality."""
    stressed = _expected_deaths(cohort, _stressed_table(cohort, law, params)).sum()
    base = _expected_deaths(cohort, mortality_table(cohort, law)).sum()
    return float(stressed - base)


def risk_margin_method2(
    cohort: Cohort, law: MakehamLaw, params: EiopaParams = EiopaParams()
) -> float:
    """Ratio-projection risk margin: CoC * (SCR / BE_1) * sum of the BE_i.

    Projects the initial capital requirement onto future years in proportion
    to the remaining best estimate, then charges the cost-of-capital rate.
    """
    deaths = _expected_deaths(cohort, mortality_table(cohort, law))
    first = float(deaths.sum())
    if first == 0.0:
        raise ValueError("method-2 margin undefined: first-year best estimate is zero")
    remaining_sum = float(np.arange(1, cohort.horizon + 1) @ deaths)
    return params.coc_rate * (scr(cohort, law, params) / first) * remaining_sum


def risk_margin_article37(scr_sequence, params: EiopaParams = EiopaParams()) -> float:
    """Discounted cost-of-capital sum over a projected capital-requirement path."""
    values = [float(s) for s in scr_sequence]
    if any(not math.isfinite(s) for s in values):
        raise ValueError("capital requirements must be finite")
    total = 0.0
    for t, s in enumerate(values):
        total += s / (1.0 + params.rate(t + 1)) ** (t + 1)
    return params.coc_rate * total
