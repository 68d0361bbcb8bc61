"""Shared randomized-model builders for the test suite."""

import numpy as np

from cocmargin.distributions import DiscreteDistribution
from cocmargin.risk_measures import RiskMeasure, SpectralMeasure


def random_dist(rng, max_support=12, spread=10.0):
    n = int(rng.integers(1, max_support + 1))
    values = rng.normal(0.0, spread, n)
    probs = rng.dirichlet(np.ones(n))
    return DiscreteDistribution(values, probs)


def random_measure(rng, allow_atoms=True):
    """Random spectral measure: a few interior atoms plus a random step density."""
    n_atoms = int(rng.integers(0, 4)) if allow_atoms else 0
    locs = np.sort(rng.uniform(0.05, 0.95, n_atoms))
    while locs.size > 1 and np.any(np.diff(locs) <= 1e-6):
        locs = np.sort(rng.uniform(0.05, 0.95, n_atoms))
    atom_mass = float(rng.uniform(0.0, 0.9)) if n_atoms else 0.0
    masses = rng.dirichlet(np.ones(n_atoms)) * atom_mass if n_atoms else np.array([])
    k = int(rng.integers(1, 5))
    inner = np.sort(rng.uniform(0.02, 0.98, k - 1))
    breaks = np.concatenate(([0.0], inner, [1.0]))
    raw = rng.uniform(0.0, 1.0, k)
    widths = np.diff(breaks)
    density_mass = 1.0 - (masses.sum() if n_atoms else 0.0)
    raw_total = float(np.dot(raw, widths))
    if raw_total <= 0.0:
        raw = np.ones(k)
        raw_total = 1.0
    levels = raw * (density_mass / raw_total)
    return SpectralMeasure(locs, masses, breaks, levels)


def random_risk_measure(rng):
    pick = rng.integers(0, 3)
    if pick == 0:
        return RiskMeasure.var(float(rng.uniform(0.01, 0.3)))
    if pick == 1:
        return RiskMeasure.expected_shortfall(float(rng.uniform(0.02, 0.5)))
    return RiskMeasure.spectral(random_measure(rng))


def random_spd(rng, n, scale=1.0):
    a = rng.normal(0.0, 1.0, (n, n))
    return scale * (a @ a.T + 0.1 * np.eye(n))


def random_schedule(rng, horizon, floor=None):
    """Valid revelation schedule, revealing at least as much as ``floor``."""
    base = tuple(range(horizon + 1)) if floor is None else tuple(floor)
    out = [0]
    for t in range(1, horizon):
        lo = max(base[t], out[-1])
        out.append(int(rng.integers(lo, horizon + 1)))
    out.append(horizon)
    return tuple(out)


def death_tree(size, rates, benefit=1.0):
    """Fully enumerated scenario tree of the death counts, one level per year."""
    from scipy.stats import binom

    from cocmargin.oracle import ScenarioTree

    def children(alive, t):
        if t == len(rates):
            return []
        return [
            {
                "p": float(binom.pmf(d, alive, rates[t])),
                "x": benefit * d,
                "children": children(alive - d, t + 1),
            }
            for d in range(alive + 1)
        ]

    return ScenarioTree.from_obj(children(size, 0))


def random_tree(rng, max_depth=4, max_branch=3, spread=2.0):
    from cocmargin.oracle import ScenarioTree, TreeNode

    depth = int(rng.integers(1, max_depth + 1))

    def build(level):
        if level == depth:
            return ()
        k = int(rng.integers(1, max_branch + 1))
        probs = rng.dirichlet(np.ones(k))
        return tuple(
            TreeNode(float(p), float(rng.normal(0.0, spread)), build(level + 1)) for p in probs
        )

    return ScenarioTree(TreeNode(1.0, 0.0, build(0)))


def map_tree_cash(tree, f):
    """New tree with each non-root cash x replaced by f(x, depth)."""
    from cocmargin.oracle import ScenarioTree, TreeNode

    def rebuild(node, depth):
        kids = tuple(rebuild(c, depth + 1) for c in node.children)
        if depth == 0:
            return TreeNode(node.prob, node.cash, kids)
        return TreeNode(node.prob, float(f(node.cash, depth)), kids)

    return ScenarioTree(rebuild(tree.root, 0))


def random_valuation_spec(rng, allow_spectral_utility=True):
    from cocmargin.risk_measures import SpectralMeasure
    from cocmargin.valuation import ValuationSpec

    eta = float(rng.uniform(0.01, 0.5))
    util = None
    if allow_spectral_utility and rng.integers(0, 2):
        util = SpectralMeasure.expected_shortfall(float(rng.uniform(0.3, 1.0)))
    return ValuationSpec(risk=random_risk_measure(rng), eta=eta, utility=util)
