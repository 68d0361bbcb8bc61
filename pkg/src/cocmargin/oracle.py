"""Exact valuation on finite scenario trees, plus a nested Monte Carlo estimator.

The tree engine is the ground truth the other engines are checked against:
on a finite event tree every conditional law is explicit, so backward
induction with the one-step operator is exact up to float arithmetic.  Two
independent code paths are provided: per-node recursion on incremental cash
flows, and a right fold that composes the operators on accumulated leaf sums;
translation invariance makes them agree.

The nested Monte Carlo estimator replaces each conditional law with an
empirical inner sample, branching ``inner_samples`` per level; ``outer_paths``
independent replications of the whole nested tree give the point estimate
(their mean) and a bootstrap standard error.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional, Sequence

import numpy as np

from .distributions import DiscreteDistribution
from .errors import ResourceLimitError
from .risk_measures import SpectralMeasure, integrate_step_quantile
from .valuation import ValuationSpec, one_step_value

MAX_TREE_NODES = 500_000
MAX_NESTED_DRAWS = 2_000_000_000
PROB_SUM_TOL = 1e-12


@dataclass(eq=False)
class TreeNode:
    """One event-tree node: transition probability, cash received, children."""

    prob: float
    cash: float
    children: tuple

    def is_leaf(self) -> bool:
        return len(self.children) == 0


class ScenarioTree:
    """Finite event tree with equal-depth leaves and exact branch probabilities."""

    def __init__(self, root: TreeNode):
        if root.prob != 1.0 or root.cash != 0.0:
            raise ValueError("root must carry probability 1 and zero cash")
        self.root = root
        self.horizon = self._validate()
        if self.horizon < 1:
            raise ValueError("tree must have at least one period")

    def _validate(self) -> int:
        depth_seen: set[int] = set()
        count = 0
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            count += 1
            if count > MAX_TREE_NODES:
                raise ResourceLimitError(f"tree exceeds {MAX_TREE_NODES} nodes")
            if not np.isfinite(node.cash):
                raise ValueError("node cash must be finite")
            if node.is_leaf():
                depth_seen.add(depth)
                continue
            total = 0.0
            for child in node.children:
                if not 0.0 < child.prob <= 1.0:
                    raise ValueError("child probabilities must lie in (0, 1]")
                total += child.prob
                stack.append((child, depth + 1))
            if abs(total - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"child probabilities must sum to 1 within 1e-12, got {total!r}")
        if len(depth_seen) != 1:
            raise ValueError("all leaves must sit at the same depth")
        return depth_seen.pop()

    def nodes(self) -> Iterator[tuple[TreeNode, int]]:
        """Preorder traversal yielding (node, depth)."""
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            for child in reversed(node.children):
                stack.append((child, depth + 1))

    # -- JSON round trip: the file holds the root's child list ----------------

    @classmethod
    def from_obj(cls, obj) -> "ScenarioTree":
        if not isinstance(obj, list):
            raise ValueError("tree JSON must be a list of child nodes")

        def parse(spec) -> TreeNode:
            if not isinstance(spec, dict) or not set(spec) <= {"p", "x", "children"}:
                raise ValueError("tree nodes must be objects with keys p, x, children")
            if "p" not in spec or "x" not in spec:
                raise ValueError("tree nodes need both p and x")
            kids = tuple(parse(c) for c in spec.get("children", []))
            return TreeNode(float(spec["p"]), float(spec["x"]), kids)

        return cls(TreeNode(1.0, 0.0, tuple(parse(c) for c in obj)))

    @classmethod
    def from_json(cls, text: str) -> "ScenarioTree":
        return cls.from_obj(json.loads(text))

    def to_obj(self) -> list:
        def dump(node: TreeNode) -> dict:
            return {"p": node.prob, "x": node.cash, "children": [dump(c) for c in node.children]}

        return [dump(c) for c in self.root.children]

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)


def tree_values(tree: ScenarioTree, spec: ValuationSpec) -> Dict[TreeNode, float]:
    """Backward induction; returns the value carried at every node.

    The value at a node of depth t prices the remaining cash flows
    X_{t+1}, ..., X_T; leaves carry 0.
    """

    values: Dict[TreeNode, float] = {}

    def visit(node: TreeNode, depth: int) -> float:
        if node.is_leaf():
            values[node] = 0.0
            return 0.0
        child_totals = [visit(c, depth + 1) + c.cash for c in node.children]
        law = DiscreteDistribution(np.array(child_totals), np.array([c.prob for c in node.children]))
        v = one_step_value(law, spec, period=depth)
        values[node] = v
        return v

    visit(tree.root, 0)
    return values


def tree_root_value(tree: ScenarioTree, spec: ValuationSpec) -> float:
    return tree_values(tree, spec)[tree.root]


def tree_value_composed(tree: ScenarioTree, spec: ValuationSpec) -> float:
    """Right fold of the one-step operators over accumulated leaf sums.

    Cash is accumulated down to the leaves once; each fold step applies the
    operator to the conditional law of the already-composed quantity.  Agrees
    with :func:`tree_values` at the root by translation invariance.
    """

    def fold(node: TreeNode, depth: int, prefix: float) -> float:
        if node.is_leaf():
            return prefix
        composed = [fold(c, depth + 1, prefix + c.cash) for c in node.children]
        law = DiscreteDistribution(np.array(composed), np.array([c.prob for c in node.children]))
        return one_step_value(law, spec, period=depth)

    return fold(tree.root, 0, 0.0)


def running_sums(tree: ScenarioTree) -> Dict[TreeNode, float]:
    """Per-node accumulated cash: sum of x along the path from the root."""
    sums: Dict[TreeNode, float] = {}

    def visit(node: TreeNode, acc: float) -> None:
        sums[node] = acc
        for child in node.children:
            visit(child, acc + child.cash)

    visit(tree.root, 0.0)
    return sums


def monetary_utility(
    tree: ScenarioTree, spec: ValuationSpec, terminal: Dict[TreeNode, float]
) -> Dict[TreeNode, float]:
    """Conditional monetary utility of an adapted process on the tree.

    Only the terminal slice matters: the utility at a node of depth t is the
    negated operator composition applied to the negated terminal values of the
    subtree.  Returns the utility at every node; at leaves it equals the
    terminal value itself.
    """

    out: Dict[TreeNode, float] = {}

    def visit(node: TreeNode, depth: int) -> float:
        if node.is_leaf():
            neg = -terminal[node]
            out[node] = terminal[node]
            return neg
        folded = [visit(c, depth + 1) for c in node.children]
        law = DiscreteDistribution(np.array(folded), np.array([c.prob for c in node.children]))
        v = one_step_value(law, spec, period=depth)
        out[node] = -v
        return v

    visit(tree.root, 0)
    return out


# -- nested Monte Carlo --------------------------------------------------------


class IIDNormalSampler:
    """Independent centered normal cash flows, one std dev per period."""

    def __init__(self, sigmas: Sequence[float] | float, horizon: Optional[int] = None):
        if np.isscalar(sigmas):
            if horizon is None:
                raise ValueError("scalar sigma needs an explicit horizon")
            sigmas = [float(sigmas)] * int(horizon)
        self.sigmas = tuple(float(s) for s in sigmas)
        if any(s < 0.0 for s in self.sigmas) or len(self.sigmas) == 0:
            raise ValueError("sigmas must be nonnegative and nonempty")
        self.horizon = len(self.sigmas)

    def draw(self, t: int, last: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.sigmas[t] * rng.standard_normal((last.size, size))


class ARSampler:
    """First-order autoregressive cash flows X_{t+1} = a_{t+1} X_t + sigma_{t+1} Z."""

    def __init__(self, alphas: Sequence[float] | float, sigmas: Sequence[float] | float,
                 horizon: Optional[int] = None):
        if np.isscalar(alphas) or np.isscalar(sigmas):
            if horizon is None:
                raise ValueError("scalar coefficients need an explicit horizon")
            if np.isscalar(alphas):
                alphas = [float(alphas)] * int(horizon)
            if np.isscalar(sigmas):
                sigmas = [float(sigmas)] * int(horizon)
        self.alphas = tuple(float(a) for a in alphas)
        self.sigmas = tuple(float(s) for s in sigmas)
        if len(self.alphas) != len(self.sigmas) or len(self.alphas) == 0:
            raise ValueError("alphas and sigmas must be nonempty and equal-length")
        self.horizon = len(self.alphas)

    def draw(self, t: int, last: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
        noise = self.sigmas[t] * rng.standard_normal((last.size, size))
        return self.alphas[t] * last[:, None] + noise


class ConstantSampler:
    """Deterministic cash flows; useful as a degenerate consistency check."""

    def __init__(self, values: Sequence[float]):
        self.values = tuple(float(v) for v in values)
        if len(self.values) == 0:
            raise ValueError("values must be nonempty")
        self.horizon = len(self.values)

    def draw(self, t: int, last: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full((last.size, size), self.values[t])


def _order_statistic_weights(m: int, measure: SpectralMeasure) -> np.ndarray:
    """Measure mass assigned to each of m equally likely order statistics."""
    cum = np.arange(1, m + 1) / m
    w = np.zeros(m)
    for u, mass in zip(measure.atom_locations, measure.atom_masses):
        idx = int(np.searchsorted(cum, u, side="left"))
        w[min(idx, m - 1)] += mass
    if np.any(measure.density_levels > 0.0):
        lo_edges = np.concatenate(([0.0], cum[:-1]))
        for a, b, lvl in zip(measure.density_breaks[:-1], measure.density_breaks[1:],
                             measure.density_levels):
            if lvl != 0.0:
                w += lvl * np.clip(np.minimum(b, cum) - np.maximum(a, lo_edges), 0.0, None)
    return w


def _w_rows(mat: np.ndarray, spec: ValuationSpec, period: int) -> np.ndarray:
    """One-step value of the empirical law of each row."""
    m = mat.shape[1]
    eta = spec.eta_at(period)
    if spec.risk.kind == "var" and spec.utility_is_expectation:
        cum = np.arange(1, m + 1) / m
        idx = min(int(np.searchsorted(cum, 1.0 - spec.risk.level, side="left")), m - 1)
        part = np.partition(mat, idx, axis=1)
        r = part[:, idx]
        u = np.maximum(r[:, None] - part, 0.0).mean(axis=1)
        return r - u / (1.0 + eta)
    srt = np.sort(mat, axis=1)
    w_risk = _order_statistic_weights(m, spec.risk.measure)
    r = srt @ w_risk
    slack_sorted = np.maximum(r[:, None] - srt, 0.0)[:, ::-1]
    if spec.utility_is_expectation:
        u = slack_sorted.mean(axis=1)
    else:
        u = slack_sorted @ _order_statistic_weights(m, spec.utility_measure)
    return r - u / (1.0 + eta)


def _one_replication(sampler, spec: ValuationSpec, inner: int,
                     rng: np.random.Generator) -> float:
    horizon = sampler.horizon
    # forward pass: materialize flows up to the second-to-last level
    level_draws: list[np.ndarray] = []
    last = np.zeros(1)
    for t in range(horizon - 1):
        draws = sampler.draw(t, last, rng, inner)
        level_draws.append(draws)
        last = draws.reshape(-1)
    # deepest level, chunked: continuation value at each depth-(T-1) node
    chunk_rows = max(1, int(40_000_000 // inner))
    n_deep = last.size
    v_next = np.empty(n_deep)
    for start in range(0, n_deep, chunk_rows):
        block = last[start : start + chunk_rows]
        finals = sampler.draw(horizon - 1, block, rng, inner)
        v_next[start : start + chunk_rows] = _w_rows(finals, spec, horizon - 1)
    # backward pass through the stored levels
    for t in range(horizon - 2, -1, -1):
        law_rows = level_draws[t] + v_next.reshape(level_draws[t].shape)
        v_next = _w_rows(law_rows, spec, t)
    return float(v_next[0])


def nested_monte_carlo(
    sampler,
    spec: ValuationSpec,
    outer_paths: int,
    inner_samples: int,
    seed: int,
    threads: int = 1,
    bootstrap_resamples: int = 1000,
) -> tuple[float, float]:
    """(estimate, standard error) for the initial value of the sampled flows.

    Each of ``outer_paths`` replications builds a full nested tree branching
    ``inner_samples`` per level and runs backward induction on the empirical
    laws; the estimate is the replication mean, the standard error a bootstrap
    over replications.  Per-replication counter-based RNG streams make the
    result independent of the thread count.
    """
    if inner_samples < 1000:
        raise ValueError("inner_samples below 1000 gives unusable tail estimates; refusing")
    if outer_paths < 1:
        raise ValueError("outer_paths must be at least 1")
    horizon = sampler.horizon
    total_draws = sum(inner_samples ** (t + 1) for t in range(horizon))
    if total_draws > MAX_NESTED_DRAWS:
        raise ResourceLimitError(
            f"nested tree needs {total_draws} draws, above the {MAX_NESTED_DRAWS} cap"
        )
    root = np.random.SeedSequence(seed)
    streams = root.spawn(outer_paths + 1)
    rngs = [np.random.Generator(np.random.Philox(s)) for s in streams[:outer_paths]]

    estimates = np.empty(outer_paths)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_one_replication, sampler, spec, inner_samples, rngs[i])
                for i in range(outer_paths)
            ]
            for i, fut in enumerate(futures):
                estimates[i] = fut.result()
    else:
        for i in range(outer_paths):
            estimates[i] = _one_replication(sampler, spec, inner_samples, rngs[i])

    estimate = float(estimates.mean())
    boot_rng = np.random.Generator(np.random.Philox(streams[outer_paths]))
    idx = boot_rng.integers(0, outer_paths, size=(bootstrap_resamples, outer_paths))
    se = float(estimates[idx].mean(axis=1).std())
    return estimate, se
