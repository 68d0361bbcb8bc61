"""Valuation of multivariate normal cash flows under revelation schedules.

For zero-mean jointly normal flows X_1, ..., X_T the multi-period value has a
closed form: each period contributes the one-step normal value scaled by the
standard deviation of the information released that period,

    value_t = OneStepNormal * sum_{s>t} sqrt(a_s),
    a_s = Var(tail | info at s-1) - Var(tail | info at s).

Information arrival is a revelation schedule m: {0..T} -> {0..T}, m(t) >= t,
nondecreasing, m(0) = 0, m(T) = T: at time t the coordinates X_1..X_{m(t)}
are known.  m(t) = t is the natural filtration.  All conditional variances
come from one Cholesky factor of the covariance (the trailing block of L
is the conditional factor given the leading coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NumericalError, UnsupportedConfiguration
from .valuation import ValuationSpec, normal_one_step

SYM_TOL = 1e-12
VARIANCE_SLACK = 1e-10


def _check_schedule(schedule: Sequence[int], horizon: int) -> tuple[int, ...]:
    sched = tuple(int(s) for s in schedule)
    if len(sched) != horizon + 1:
        raise ValueError(f"schedule must have {horizon + 1} entries, got {len(sched)}")
    if sched[0] != 0 or sched[-1] != horizon:
        raise ValueError("schedule must start at 0 and end at the horizon")
    for t, m in enumerate(sched):
        if m < t or m > horizon:
            raise ValueError(f"schedule entry m({t})={m} outside [t, horizon]")
    if any(a > b for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be nondecreasing")
    return sched


def _check_symmetric(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be a square matrix")
    scale = max(1.0, float(np.abs(cov).max()))
    if np.abs(cov - cov.T).max() > SYM_TOL * scale:
        raise ValueError("covariance must be symmetric")
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Zero-mean normal flows: covariance of (X_1..X_T) plus a revelation schedule."""

    cov: np.ndarray
    schedule: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        cov = _check_symmetric(self.cov)
        np.linalg.cholesky(cov)  # raises LinAlgError unless positive definite
        cov.flags.writeable = False
        object.__setattr__(self, "cov", cov)
        horizon = cov.shape[0]
        sched = tuple(range(horizon + 1)) if self.schedule is None else _check_schedule(
            self.schedule, horizon
        )
        object.__setattr__(self, "schedule", sched)

    @property
    def horizon(self) -> int:
        return self.cov.shape[0]

    def has_natural_schedule(self) -> bool:
        return self.schedule == tuple(range(self.horizon + 1))


def prefix_conditional_variances(
    cov: np.ndarray, weights: np.ndarray, prefix_sizes: Sequence[int], spd: bool = True
) -> np.ndarray:
    """Var(w'X | X_1..X_k) for each prefix size k.

    With the Cholesky factor L of the covariance, the conditional covariance
    of the trailing block given the first k coordinates is L[k:,k:] L[k:,k:]'.
    The pseudo-inverse route handles positive semidefinite input.
    """
    n = cov.shape[0]
    out = np.empty(len(prefix_sizes))
    if spd:
        factor = np.linalg.cholesky(cov)
        for i, k in enumerate(prefix_sizes):
            z = factor[k:, k:].T @ weights[k:]
            out[i] = float(z @ z)
        return out
    for i, k in enumerate(prefix_sizes):
        wb = weights[k:]
        base = float(wb @ cov[k:, k:] @ wb)
        if k == 0:
            out[i] = base
            continue
        cross = cov[:k, k:] @ wb
        out[i] = base - float(cross @ np.linalg.pinv(cov[:k, :k], rcond=1e-12) @ cross)
    return out


def _released_std_sum(variances: np.ndarray) -> float:
    """Sum of sqrt of per-period variance drops, tolerating float-level negatives."""
    drops = variances[:-1] - variances[1:]
    if np.any(drops < -VARIANCE_SLACK):
        raise NumericalError(f"conditional variance increased by {float(-drops.min())!r}")
    return float(np.sqrt(np.clip(drops, 0.0, None)).sum())


def value_closed_form(model: GaussianModel, spec: ValuationSpec, t: int = 0) -> float:
    """State-free part of the value at time t (the whole value when t = 0).

    For t > 0 the full value adds the conditional mean of the tail sum; its
    coefficients come from :func:`conditional_mean_coefficients`.
    """
    T = model.horizon
    if not 0 <= t <= T:
        raise ValueError(f"time must lie in [0, {T}], got {t}")
    if t == T:
        return 0.0
    w = np.zeros(T)
    w[t:] = 1.0
    sizes = [model.schedule[s] for s in range(t, T + 1)]
    b = prefix_conditional_variances(model.cov, w, sizes)
    return normal_one_step(spec) * _released_std_sum(b)


def conditional_mean_coefficients(model: GaussianModel, t: int) -> np.ndarray:
    """Coefficients c with E[X_{t+1}+...+X_T | info at t] = c . X_{1..m(t)}."""
    T = model.horizon
    if not 0 <= t <= T:
        raise ValueError(f"time must lie in [0, {T}], got {t}")
    k = model.schedule[t]
    w = np.zeros(T)
    w[t:] = 1.0
    coef = w[:k].copy()
    if k and k < T:
        coef += np.linalg.solve(model.cov[:k, :k], model.cov[:k, k:] @ w[k:])
    return coef


@dataclass(frozen=True)
class RecursiveValue:
    """Affine value functions: value at t is constants[t] + coefficients[t] . X_{1..t}."""

    constants: np.ndarray
    coefficients: tuple[np.ndarray, ...]


def value_recursive(model: GaussianModel, spec: ValuationSpec) -> RecursiveValue:
    """Backward recursion for the natural filtration; dual route to the closed form.

    Each step regresses X_{t+1} on the seen coordinates, prices the fresh
    conditional standard deviation, and pushes the affine representation back.
    """
    if not model.has_natural_schedule():
        raise UnsupportedConfiguration("the backward recursion assumes the natural filtration")
    w0 = normal_one_step(spec)
    T = model.horizon
    cov = model.cov
    constants = np.zeros(T + 1)
    coeffs: list[np.ndarray] = [np.zeros(T)] * (T + 1)
    coeffs[T] = np.zeros(T)
    for t in range(T - 1, -1, -1):
        reg = np.linalg.solve(cov[:t, :t], cov[:t, t]) if t else np.zeros(0)
        cond_var = float(cov[t, t] - cov[t, :t] @ reg)
        if cond_var < -VARIANCE_SLACK:
            raise NumericalError(f"negative conditional variance {cond_var!r}")
        carried = 1.0 + coeffs[t + 1][t]
        constants[t] = constants[t + 1] + abs(carried) * np.sqrt(max(cond_var, 0.0)) * w0
        vec = np.zeros(T)
        vec[:t] = coeffs[t + 1][:t] + carried * reg
        coeffs[t] = vec
    return RecursiveValue(constants, tuple(c[:t] for t, c in enumerate(coeffs)))


def value_bounds(model: GaussianModel, spec: ValuationSpec) -> tuple[float, float]:
    """Sandwich for the initial value: scaling the total std by 1 and sqrt(T)."""
    total_std = float(np.sqrt(np.ones(model.horizon) @ model.cov @ np.ones(model.horizon)))
    w0 = normal_one_step(spec)
    return w0 * total_std, w0 * np.sqrt(model.horizon) * total_std


def compare_revelation_schedules(
    model: GaussianModel, spec: ValuationSpec, schedule2: Sequence[int]
) -> tuple[float, float]:
    """Initial values under the model's schedule and a time-advanced version of it.

    The second schedule must satisfy m2(t) = m(s(t)) for time points s(t) >= t:
    its information sets are the model's own, reached sooner.  Under that
    coupling the second value can never exceed the first.  Merely requiring
    m2(t) >= m(t) pointwise is not enough: an intermediate prefix size absent
    from the original schedule splits one variance release into two, which can
    raise the value.
    """
    sched2 = _check_schedule(schedule2, model.horizon)
    for t, m2 in enumerate(sched2):
        if m2 not in model.schedule[t:]:
            raise ValueError(
                f"schedule entry m2({t})={m2} is not one of the model's later information sets"
            )
    v1 = value_closed_form(model, spec)
    v2 = value_closed_form(GaussianModel(model.cov, sched2), spec)
    return v1, v2


@dataclass(frozen=True, eq=False)
class JointGaussianModel:
    """Two flow vectors on a common horizon: block covariance of (X, Y).

    Coordinates 0..T-1 hold X, coordinates T..2T-1 hold Y.  Positive
    semidefinite covariance is allowed (perfectly dependent blocks arise
    naturally, e.g. Y = X), handled by pseudo-inverse conditioning.
    """

    cov: np.ndarray

    def __post_init__(self) -> None:
        cov = _check_symmetric(self.cov)
        if cov.shape[0] % 2 != 0:
            raise ValueError("joint covariance must have even dimension")
        floor = np.linalg.eigvalsh(cov).min()
        if floor < -1e-10 * max(1.0, float(np.abs(cov).max())):
            raise ValueError("joint covariance must be positive semidefinite")
        cov.flags.writeable = False
        object.__setattr__(self, "cov", cov)

    @property
    def horizon(self) -> int:
        return self.cov.shape[0] // 2


def joint_values(joint: JointGaussianModel, spec: ValuationSpec) -> tuple[float, float, float]:
    """(value of X+Y, value of X, value of Y) under the natural joint filtration.

    Both coordinates of a period are revealed together; the sum can never be
    worth more than the parts priced separately.
    """
    T = joint.horizon
    perm = np.ravel(np.column_stack((np.arange(T), np.arange(T) + T)))
    cov = joint.cov[np.ix_(perm, perm)]
    w0 = normal_one_step(spec)
    sizes = [2 * s for s in range(T + 1)]

    def one(weights: np.ndarray) -> float:
        b = prefix_conditional_variances(cov, weights[perm], sizes, spd=False)
        return w0 * _released_std_sum(b)

    w_sum = np.ones(2 * T)
    w_x = np.concatenate((np.ones(T), np.zeros(T)))
    w_y = np.concatenate((np.zeros(T), np.ones(T)))
    return one(w_sum), one(w_x), one(w_y)


def covariance_from_cohorts(cohorts) -> tuple[GaussianModel, np.ndarray]:
    """Death-count covariance and mean vector for independent survival cohorts.

    ``cohorts``: sequence of (Cohort, MakehamLaw) pairs sharing one horizon.
    Returns the natural-filtration model for the centered counts and the mean
    vector (reported separately; valuation only needs the covariance).
    """
    from .life import death_count_covariance_categorical, expected_deaths

    items = list(cohorts)
    if not items:
        raise ValueError("need at least one cohort")
    horizons = {c.horizon for c, _ in items}
    if len(horizons) != 1:
        raise ValueError("cohorts must share one horizon")
    T = horizons.pop()
    cov = np.zeros((T, T))
    mean = np.zeros(T)
    for cohort, law in items:
        cov += death_count_covariance_categorical(cohort, law)
        mean += expected_deaths(cohort, law)
    return GaussianModel(cov), mean


# -- covariance CSV round trip ---------------------------------------------------


def write_covariance_csv(cov: np.ndarray, path) -> None:
    cov = np.asarray(cov, dtype=float)
    lines = [f"T={cov.shape[0]}"]
    for row in cov:
        lines.append(",".join(repr(float(x)) for x in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_covariance_csv(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("T="):
        raise ValueError("covariance CSV must start with a 'T=<n>' header line")
    n = int(lines[0][2:])
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows after the header, got {len(lines) - 1}")
    rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    cov = np.array(rows, dtype=float)
    if cov.shape != (n, n):
        raise ValueError("covariance rows must match the declared size")
    return cov
