"""Closed-form valuation of first-order autoregressive cash flows.

With X_0 = 0 and X_{t+1} = a_{t+1} X_t + Z_{t+1} (independent innovations),
the remaining-obligation value is affine in the current state: each future
period contributes the one-step value of its innovation, weighted by how many
times that innovation is carried through the recursion.  The carry weights
satisfy b_T = 1, b_t = 1 + b_{t+1} a_{t+1}, and

    value_0 = sum_t |b_{t+1}| * OneStep(sign(b_{t+1}) * Z_{t+1}).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .distributions import DiscreteDistribution
from .errors import UnsupportedConfiguration
from .valuation import ValuationSpec, normal_one_step, one_step_value


@dataclass(frozen=True)
class NormalInnovation:
    """Centered normal innovation with standard deviation sigma."""

    sigma: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


Innovation = Union[DiscreteDistribution, NormalInnovation]


@dataclass(frozen=True)
class ARModel:
    """Coefficients a_{t+1} = alphas[t] and innovation laws of Z_{t+1}."""

    alphas: tuple[float, ...]
    innovations: tuple[Innovation, ...]

    def __post_init__(self) -> None:
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) == 0 or any(not np.isfinite(a) for a in alphas):
            raise ValueError("alphas must be a nonempty sequence of finite numbers")
        innovations = tuple(self.innovations)
        if len(innovations) != len(alphas):
            raise ValueError("need exactly one innovation law per period")
        for z in innovations:
            if not isinstance(z, (DiscreteDistribution, NormalInnovation)):
                raise ValueError("innovations must be DiscreteDistribution or NormalInnovation")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "innovations", innovations)

    @property
    def horizon(self) -> int:
        return len(self.alphas)

    @classmethod
    def iid(cls, horizon: int, alpha: float, innovation: Innovation) -> "ARModel":
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        return cls((float(alpha),) * horizon, (innovation,) * horizon)

    def all_normal(self) -> bool:
        return all(isinstance(z, NormalInnovation) for z in self.innovations)


def carry_weights(model: ARModel) -> np.ndarray:
    """Weights b_1, ..., b_T; b_t counts how period-t innovations propagate."""
    T = model.horizon
    b = np.empty(T)
    b[T - 1] = 1.0
    for t in range(T - 2, -1, -1):
        b[t] = 1.0 + b[t + 1] * model.alphas[t + 1]
    return b


def _signed_one_step(z: Innovation, sign: float, spec: ValuationSpec) -> float:
    if isinstance(z, NormalInnovation):
        # centered normal is symmetric, so the sign never matters
        return z.sigma * normal_one_step(spec)
    law = z if sign >= 0.0 else z.negate()
    return one_step_value(law, spec)


def period_terms(model: ARModel, spec: ValuationSpec) -> np.ndarray:
    """Per-period contributions |b_{t+1}| * OneStep(sign(b_{t+1}) Z_{t+1})."""
    spec.constant_eta("autoregressive closed form")
    b = carry_weights(model)
    terms = np.empty(model.horizon)
    for t in range(model.horizon):
        weight = b[t]
        if weight == 0.0:
            terms[t] = 0.0
            continue
        sign = 1.0 if weight >= 0.0 else -1.0  # sign(0) := +1 by convention
        terms[t] = abs(weight) * _signed_one_step(model.innovations[t], sign, spec)
    return terms


def remaining_constants(model: ARModel, spec: ValuationSpec) -> np.ndarray:
    """State-free value parts d_t = sum of period terms from t on; d_T = 0."""
    terms = period_terms(model, spec)
    out = np.zeros(model.horizon + 1)
    out[:-1] = np.cumsum(terms[::-1])[::-1]
    return out


def value0(model: ARModel, spec: ValuationSpec) -> float:
    """Initial value of the whole stream X_1 + ... + X_T."""
    return float(period_terms(model, spec).sum())


def value_at(model: ARModel, spec: ValuationSpec, t: int, x_t: float) -> float:
    """Value at time t in state X_t = x_t: affine with slope b_{t+1} a_{t+1}."""
    if not 0 <= t <= model.horizon:
        raise ValueError(f"time must lie in [0, {model.horizon}], got {t}")
    consts = remaining_constants(model, spec)
    if t == model.horizon:
        return 0.0
    slope = carry_weights(model)[t] * model.alphas[t]
    return float(consts[t] + slope * x_t)


def weight_sum_constant_alpha(alpha: float, horizon: int) -> float:
    """Sum of the carry weights for a constant coefficient with |alpha| < 1.

    Equals (alpha^{T+1} - (T+1) alpha + T) / (1 - alpha)^2; near alpha = 1 the
    closed form cancels catastrophically, so the double-sum form takes over.
    """
    if not abs(alpha) < 1.0:
        raise ValueError(f"|alpha| must be below 1, got {alpha!r}")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    T = horizon
    if abs(1.0 - alpha) < 0.05:
        j = np.arange(T)
        return float(np.dot(T - j, alpha**j))
    return (alpha ** (T + 1) - (T + 1) * alpha + T) / (1.0 - alpha) ** 2


def induced_covariance(model: ARModel) -> np.ndarray:
    """Covariance of (X_1, ..., X_T) when every innovation is normal."""
    if not model.all_normal():
        raise UnsupportedConfiguration("covariance form needs normal innovations")
    T = model.horizon
    load = np.zeros((T, T))
    for t in range(T):
        for j in range(t + 1):
            load[t, j] = model.innovations[j].sigma * float(np.prod(model.alphas[j + 1 : t + 1]))
    return load @ load.T
