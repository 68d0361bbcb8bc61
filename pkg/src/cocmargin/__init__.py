"""Cost-of-capital margin valuation for insurance liability cash flows.

The package values a stream of liability cash flows by backward induction
with a one-step operator built from a quantile-based risk measure and a
capital-provider utility: each period the margin is what a capital provider
charges, at a fixed cost-of-capital rate, for carrying the shortfall risk
of the next period's obligations.

Engines:

- exact backward induction on finite scenario trees (``oracle``),
- state recursion for binomial survival portfolios (``life``),
- closed forms for autoregressive flows (``autoregressive``),
- closed forms and recursions for multivariate normal flows (``gaussian``),
- regulatory comparison quantities (``eiopa``),
- a command line interface emitting deterministic CSV/JSON sweeps (``cli``).
"""

from .distributions import DiscreteDistribution
from .risk_measures import RiskMeasure, SpectralMeasure, es_level, normal_risk, risk, utility, var_level
from .valuation import (
    UnsupportedConfiguration,
    ValuationSpec,
    one_step_upper_bound,
    one_step_value,
    one_step_value_normal,
    one_step_value_normal_spectral,
    weight_function_value,
)

__all__ = [
    "DiscreteDistribution",
    "RiskMeasure",
    "SpectralMeasure",
    "risk",
    "utility",
    "var_level",
    "es_level",
    "normal_risk",
    "ValuationSpec",
    "UnsupportedConfiguration",
    "one_step_value",
    "one_step_value_normal",
    "one_step_value_normal_spectral",
    "one_step_upper_bound",
    "weight_function_value",
]

__version__ = "0.1.0"
