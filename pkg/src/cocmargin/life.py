"""Term-life portfolio engine: Makeham mortality and nested-binomial valuation.

A cohort of identical contracts pays one unit per death during the contract
horizon.  With N_t survivors after t years and one-year death probabilities
q_t, deaths follow the nested binomial model D_{t+1} | N_t ~ Bin(N_t, q_t).
The backward recursion values the death-count flow exactly, one state at a
time:

    G_T(n) = 0,   G_t(n) = OneStep(law of D + G_{t+1}(n - D)),  D ~ Bin(n, q_t).

The engine also records the per-step risk terms, which assemble into the
capital-provider upper bound

    value0 <= eta * sum_t E[risk_t(N_t) - G_t(N_t)]

with the expectation under the forward law N_t ~ Bin(N_0, survival_t); the
bracket is unchanged by centering, so the raw tables serve the centered value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .distributions import PROB_FLOOR, DiscreteDistribution
from .errors import ResourceLimitError
from .valuation import ValuationSpec, one_step_components

VALUE_STATE_CAP = 5000
MOMENT_STATE_CAP = 2000


@dataclass(frozen=True)
class MakehamLaw:
    """Force of mortality alpha + beta * exp(gamma * age).

    ``increasing=False`` flips the exponent sign, giving a hazard that decays
    with age; it exists as a comparison variant and is not suitable for human
    mortality.
    """

    alpha: float
    beta: float
    gamma: float
    increasing: bool = True

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @classmethod
    def m90(cls) -> "MakehamLaw":
        """Parameters of the Swedish M90 male mortality table."""
        return cls(alpha=0.001, beta=0.000012, gamma=0.101314)

    def force(self, age: float) -> float:
        sign = 1.0 if self.increasing else -1.0
        return self.alpha + self.beta * math.exp(sign * self.gamma * age)

    def survival(self, age: float, years: float) -> float:
        """P(remaining lifetime from ``age`` exceeds ``years``)."""
        if age < 0 or years < 0:
            raise ValueError("age and years must be nonnegative")
        if self.increasing:
            integral = self.alpha * years + (self.beta / self.gamma) * (
                math.exp(self.gamma * (age + years)) - math.exp(self.gamma * age)
            )
        else:
            integral = self.alpha * years + (self.beta / self.gamma) * (
                math.exp(-self.gamma * age) - math.exp(-self.gamma * (age + years))
            )
        return math.exp(-integral)

    def scaled(self, factor: float) -> "MakehamLaw":
        """Law with the whole force of mortality multiplied by ``factor``."""
        if not math.isfinite(factor) or factor <= 0:
            raise ValueError("factor must be positive")
        return MakehamLaw(factor * self.alpha, factor * self.beta, self.gamma, self.increasing)


@dataclass(frozen=True)
class Cohort:
    """``size`` identical contracts on lives aged ``age``, expiring after ``horizon`` years."""

    size: int
    age: float
    horizon: int

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 0:
            raise ValueError("size must be a nonnegative integer")
        if not math.isfinite(self.age) or self.age < 0:
            raise ValueError("age must be nonnegative")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ValueError("horizon must be a positive integer")


def annual_death_rates(law: MakehamLaw, age: float, horizon: int) -> np.ndarray:
    """One-year death probabilities q_t = 1 - S(t+1)/S(t) for t = 0..horizon-1."""
    surv = np.array([law.survival(age, float(u)) for u in range(horizon + 1)])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(surv[:-1] > 0.0, surv[1:] / surv[:-1], 0.0)
    return np.clip(1.0 - ratio, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class MortalityTable:
    """Annual rates with their derived survival and deferred death probabilities.

    ``deferred[i, l]`` is the probability that a life alive at year l dies in
    year i+1, i.e. rates[i] times the survivals from l through i-1 (zero for
    l > i).  ``survival_probs[i]`` is the probability of surviving i years.
    """

    rates: np.ndarray
    survival_probs: np.ndarray
    deferred: np.ndarray

    @classmethod
    def from_annual_rates(cls, rates) -> "MortalityTable":
        q = np.asarray(rates, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("rates must be a nonempty 1-d sequence")
        if np.any(~np.isfinite(q)) or np.any(q < 0.0) or np.any(q > 1.0):
            raise ValueError("rates must lie in [0, 1]")
        horizon = q.size
        survival = np.concatenate(([1.0], np.cumprod(1.0 - q)))
        deferred = np.zeros((horizon, horizon))
        for i in range(horizon):
            for start in range(i + 1):
                deferred[i, start] = q[i] * np.prod(1.0 - q[start:i])
        for arr in (q, survival, deferred):
            arr.flags.writeable = False
        return cls(rates=q, survival_probs=survival, deferred=deferred)

    @property
    def horizon(self) -> int:
        return self.rates.size

    @property
    def death_fractions(self) -> np.ndarray:
        """Probability of death in each year as seen from the start (deferred from 0)."""
        return self.deferred[:, 0]


def mortality_table(cohort: Cohort, law: MakehamLaw) -> MortalityTable:
    return MortalityTable.from_annual_rates(annual_death_rates(law, cohort.age, cohort.horizon))


def expected_deaths(cohort: Cohort, law: MakehamLaw) -> np.ndarray:
    """E[D_t] for t = 1..horizon."""
    return cohort.size * mortality_table(cohort, law).death_fractions


def _binomial_support(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Support points (integers) and probabilities of Bin(n, p), tiny tails dropped."""
    if n == 0 or p <= 0.0:
        return np.zeros(1, dtype=np.int64), np.ones(1)
    if p >= 1.0:
        return np.full(1, n, dtype=np.int64), np.ones(1)
    mean = n * p
    half = 12.0 * math.sqrt(mean * (1.0 - p)) + 10.0
    lo = max(0, int(math.floor(mean - half)))
    hi = min(n, int(math.ceil(mean + half)))
    k = np.arange(lo, hi + 1, dtype=np.int64)
    kf = k.astype(float)
    log_pmf = (
        gammaln(n + 1.0)
        - gammaln(kf + 1.0)
        - gammaln(n - kf + 1.0)
        + kf * math.log(p)
        + (n - kf) * math.log1p(-p)
    )
    pmf = np.exp(log_pmf)
    keep = pmf >= PROB_FLOOR
    pmf = pmf[keep]
    return k[keep], pmf / pmf.sum()


def survivor_count_dist(cohort: Cohort, law: MakehamLaw, t: int) -> DiscreteDistribution:
    """Law of the survivor count N_t, a Bin(size, survival_probs[t]) variable."""
    if not 0 <= t <= cohort.horizon:
        raise ValueError(f"time must lie in [0, {cohort.horizon}], got {t}")
    p = float(mortality_table(cohort, law).survival_probs[t])
    k, pmf = _binomial_support(cohort.size, p)
    return DiscreteDistribution(k.astype(float), pmf)


@dataclass(frozen=True, eq=False)
class LifeValuation:
    """Backward-recursion output for one cohort.

    ``values[t, n]`` is G_t(n), the value at time t of all remaining death
    payments given n survivors; ``risks[t, n]`` the matching one-step risk
    term.  ``value0`` is the centered initial value G_0(size) - best_estimate,
    and ``bound`` its capital-provider upper bound (valid when the valuation
    uses the plain expectation as utility).
    """

    table: MortalityTable
    values: np.ndarray
    risks: np.ndarray
    best_estimate: float
    value0: float
    bound_terms: np.ndarray
    bound: float

    def table_rows(self):
        """Rows (t, n, value, risk, bound_term) over the whole state grid.

        ``bound_term`` carries the forward-probability weight of the state, so
        eta times the column sum reproduces ``bound``.
        """
        horizon, states = self.risks.shape
        for t in range(horizon + 1):
            k, pmf = _binomial_support(states - 1, float(self.table.survival_probs[t]))
            weights = np.zeros(states)
            weights[k] = pmf
            for n in range(states):
                risk = float(self.risks[t, n]) if t < horizon else 0.0
                excess = weights[n] * (risk - float(self.values[t, n])) if t < horizon else 0.0
                yield t, n, float(self.values[t, n]), risk, excess


def value_table(
    cohort: Cohort, law: MakehamLaw, spec: ValuationSpec, threads: int = 1
) -> LifeValuation:
    """Exact nested-binomial valuation of the death-count cash flow.

    States within one time layer are independent given the next layer, so they
    can be filled in parallel; results do not depend on the thread count.
    """
    if cohort.size > VALUE_STATE_CAP:
        raise ResourceLimitError(
            f"cohort size {cohort.size} exceeds the exact-recursion cap {VALUE_STATE_CAP}; "
            "use the Gaussian approximation for large portfolios"
        )
    eta = spec.constant_eta("the life-portfolio bound")
    table = mortality_table(cohort, law)
    T, n0 = cohort.horizon, cohort.size
    values = np.zeros((T + 1, n0 + 1))
    risks = np.zeros((T, n0 + 1))

    def fill(t: int, lo: int, hi: int) -> None:
        q_t = float(table.rates[t])
        g_next = values[t + 1]
        for n in range(lo, hi):
            k, pmf = _binomial_support(n, q_t)
            law_t = DiscreteDistribution(k + g_next[n - k], pmf)
            r, _, w = one_step_components(law_t, spec, period=t)
            risks[t, n] = r
            values[t, n] = w

    workers = max(1, int(threads))
    for t in range(T - 1, -1, -1):
        if workers == 1 or n0 < 64:
            fill(t, 0, n0 + 1)
            continue
        edges = np.linspace(0, n0 + 1, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda ab: fill(t, ab[0], ab[1]), zip(edges[:-1], edges[1:])))

    best_estimate = float(n0 * table.death_fractions.sum())
    bound_terms = np.zeros(T)
    for t in range(T):
        k, pmf = _binomial_support(n0, float(table.survival_probs[t]))
        bound_terms[t] = float(pmf @ (risks[t, k] - values[t, k]))
    return LifeValuation(
        table=table,
        values=values,
        risks=risks,
        best_estimate=best_estimate,
        value0=float(values[0, n0] - best_estimate),
        bound_terms=bound_terms,
        bound=float(eta * bound_terms.sum()),
    )


def _binom_matrix(nmax: int, p: float) -> np.ndarray:
    """Matrix [n, k] = P(Bin(n, p) = k) for n, k = 0..nmax."""
    out = np.zeros((nmax + 1, nmax + 1))
    n = np.arange(nmax + 1, dtype=float)[:, None]
    k = np.arange(nmax + 1, dtype=float)[None, :]
    valid = k <= n
    if p <= 0.0:
        out[:, 0] = 1.0
        return out
    if p >= 1.0:
        np.fill_diagonal(out, 1.0)
        return out
    log_pmf = (
        gammaln(n + 1.0)
        - gammaln(k + 1.0)
        - gammaln(np.where(valid, n - k, 0.0) + 1.0)
        + k * math.log(p)
        + np.where(valid, n - k, 0.0) * math.log1p(-p)
    )
    out[valid] = np.exp(log_pmf[valid])
    return out


@dataclass(frozen=True, eq=False)
class DeathCountMoments:
    """First and second moments of the death counts (D_1, ..., D_T)."""

    mean: np.ndarray
    second_moment: np.ndarray

    def covariance(self) -> np.ndarray:
        return self.second_moment - np.outer(self.mean, self.mean)


def death_count_moments(cohort: Cohort, law: MakehamLaw) -> DeathCountMoments:
    """Exact death-count moments by explicit summation over the nested binomials.

    E[D_{i+1} D_{j+1}] is summed over the survivor count N_i, the deaths in
    year i+1, and the deaths in year j+1 given the survivors after year i+1;
    no binomial-mean shortcuts are taken inside the sums.
    """
    if cohort.size > MOMENT_STATE_CAP:
        raise ResourceLimitError(
            f"cohort size {cohort.size} exceeds the exact-moment cap {MOMENT_STATE_CAP}"
        )
    table = mortality_table(cohort, law)
    n0, T = cohort.size, cohort.horizon
    mean = n0 * table.death_fractions
    second = np.zeros((T, T))
    states = np.arange(n0 + 1, dtype=float)
    shift = np.arange(n0 + 1)[:, None] - np.arange(n0 + 1)[None, :]
    lower = shift >= 0
    for i in range(T):
        forward = _binom_matrix(n0, float(table.survival_probs[i]))[n0]
        deaths_i = _binom_matrix(n0, float(table.rates[i]))
        second[i, i] = float(forward @ (deaths_i @ states**2))
        weighted = deaths_i * states[None, :]
        for j in range(i + 1, T):
            deaths_j = _binom_matrix(n0, float(table.deferred[j, i + 1]))
            later_mean = deaths_j @ states
            cross = np.where(lower, later_mean[np.clip(shift, 0, None)], 0.0)
            second[i, j] = float(forward @ (weighted * cross).sum(axis=1))
            second[j, i] = second[i, j]
    mean.flags.writeable = False
    second.flags.writeable = False
    return DeathCountMoments(mean=mean, second_moment=second)


def death_count_covariance_categorical(cohort: Cohort, law: MakehamLaw) -> np.ndarray:
    """Death-count covariance from each life's single categorical death year.

    Every contract contributes one draw over the disjoint events "dies in year
    t" with probabilities given by the deferred death fractions, which makes
    the count vector multinomial-marginal with the classic closed form.
    """
    fractions = mortality_table(cohort, law).death_fractions
    return cohort.size * (np.diag(fractions) - np.outer(fractions, fractions))
