"""Acceptance battery for the valuation engine.

Each check prints one summary line (run with ``pytest -s`` to see them all;
pytest shows the lines of failing checks in any mode) and then asserts the
same condition.  The battery covers cross-engine agreement, dual derivations,
a frozen Monte Carlo anchor, moment identities, value bounds, five invariant
sweeps, and the portfolio-level comparisons on a thousand-contract term-life
book run off over one to thirty years.
"""

import time

import numpy as np
import pytest
from scipy.special import ndtri

from cocmargin import RiskMeasure, ValuationSpec
from cocmargin.autoregressive import ARModel, NormalInnovation, induced_covariance, value0
from cocmargin.eiopa import EiopaParams, risk_margin_method2
from cocmargin.gaussian import (
    GaussianModel,
    JointGaussianModel,
    compare_revelation_schedules,
    conditional_mean_coefficients,
    covariance_from_cohorts,
    joint_values,
    value_bounds,
    value_closed_form,
    value_recursive,
)
from cocmargin.life import (
    Cohort,
    MakehamLaw,
    annual_death_rates,
    death_count_covariance_categorical,
    death_count_moments,
    value_table,
)
from cocmargin.oracle import monetary_utility, tree_root_value
from cocmargin.valuation import normal_one_step, one_step_value
from helpers import (
    death_tree,
    map_tree_cash,
    random_dist,
    random_schedule,
    random_spd,
    random_tree,
    random_valuation_spec,
)

SPEC = ValuationSpec(RiskMeasure.var(0.005), 0.06)
M90 = MakehamLaw.m90()
SWEEP_SIZE = 1000
SWEEP_AGE = 50.0
SWEEP_HORIZON = 30


def _report(label, passed, detail):
    print(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")


@pytest.fixture(scope="module")
def term_life_sweep():
    """Exact margin, its upper bound, the regulatory margin and the normal
    proxy for a 1000-contract book of 50 year olds, horizons 1..30."""
    started = time.perf_counter()
    rows = []
    for horizon in range(1, SWEEP_HORIZON + 1):
        cohort = Cohort(SWEEP_SIZE, SWEEP_AGE, horizon)
        exact = value_table(cohort, M90, SPEC)
        regulatory = risk_margin_method2(cohort, M90, EiopaParams())
        model, _ = covariance_from_cohorts([(cohort, M90)])
        proxy = value_closed_form(model, SPEC)
        rows.append((horizon, exact.value0, exact.bound, regulatory, proxy))
    return {"rows": rows, "elapsed": time.perf_counter() - started}


def test_life_recursion_matches_tree_enumeration():
    started = time.perf_counter()
    worst = 0.0
    for size, horizon in ((1, 1), (2, 2), (4, 3), (5, 4)):
        rates = annual_death_rates(M90, SWEEP_AGE, horizon)
        enumerated = tree_root_value(death_tree(size, rates), SPEC)
        recursed = value_table(Cohort(size, SWEEP_AGE, horizon), M90, SPEC)
        worst = max(worst, abs(float(recursed.values[0, size]) - enumerated))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-12 and elapsed < 10.0
    _report(
        "life recursion equals full tree enumeration",
        ok,
        f"max diff {worst:.2e} (tol 1e-12), {elapsed:.2f} s",
    )
    assert ok


def test_gaussian_recursion_agrees_with_closed_form():
    started = time.perf_counter()
    rng = np.random.default_rng(901)
    worst = 0.0
    for _ in range(100):
        horizon = int(rng.integers(1, 9))
        model = GaussianModel(random_spd(rng, horizon, float(rng.uniform(0.2, 3.0))))
        rec = value_recursive(model, SPEC)
        for t in range(horizon + 1):
            worst = max(worst, abs(rec.constants[t] - value_closed_form(model, SPEC, t)))
            coef_diff = rec.coefficients[t] - conditional_mean_coefficients(model, t)
            worst = max(worst, float(np.max(np.abs(coef_diff), initial=0.0)))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(
        "backward recursion equals closed-form value on random covariances",
        ok,
        f"100 models, max diff {worst:.2e} (tol 1e-10), {elapsed:.2f} s",
    )
    assert ok


def test_autoregressive_value_agrees_with_gaussian_route():
    started = time.perf_counter()
    rng = np.random.default_rng(902)
    worst = 0.0
    for _ in range(50):
        horizon = int(rng.integers(1, 9))
        alphas = tuple(float(rng.uniform(-0.9, 0.9)) for _ in range(horizon))
        sigmas = tuple(float(rng.uniform(0.3, 2.0)) for _ in range(horizon))
        model = ARModel(alphas, tuple(NormalInnovation(s) for s in sigmas))
        direct = value0(model, SPEC)
        via_cov = value_closed_form(GaussianModel(induced_covariance(model)), SPEC)
        worst = max(worst, abs(direct - via_cov))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-10 and elapsed < 5.0
    _report(
        "autoregressive closed form equals value of the induced covariance",
        ok,
        f"50 models, max diff {worst:.2e} (tol 1e-10), {elapsed:.2f} s",
    )
    assert ok


def test_normal_one_step_constant_matches_frozen_monte_carlo():
    started = time.perf_counter()
    exact = normal_one_step(SPEC)
    threshold = float(ndtri(0.995))
    rng = np.random.default_rng(20260825)
    pairs, chunk, done, total = 5_000_000, 1_000_000, 0, 0.0
    while done < pairs:
        z = rng.standard_normal(min(chunk, pairs - done))
        shortfall = np.maximum(threshold - z, 0.0) + np.maximum(threshold + z, 0.0)
        total += 0.5 * float(shortfall.sum())
        done += z.size
    estimate = threshold - (total / pairs) / (1.0 + SPEC.eta)
    mc_diff = abs(estimate - exact)
    quoted_diff = abs(exact - 0.14430)
    elapsed = time.perf_counter() - started
    ok = mc_diff <= 1e-4 and quoted_diff <= 1e-4 and elapsed < 30.0
    _report(
        "normal one-step constant matches a 10^7-draw antithetic Monte Carlo",
        ok,
        f"exact {exact:.7f}, Monte Carlo diff {mc_diff:.2e} (tol 1e-4), {elapsed:.2f} s",
    )
    assert ok


def test_death_count_moment_sums_match_multinomial_covariance():
    started = time.perf_counter()
    worst = 0.0
    for size in (1, 7, 50):
        cohort = Cohort(size, SWEEP_AGE, 10)
        nested = death_count_moments(cohort, M90).covariance()
        closed = death_count_covariance_categorical(cohort, M90)
        worst = max(worst, float(np.max(np.abs(nested - closed))))
    elapsed = time.perf_counter() - started
    ok = worst <= 1e-9 and elapsed < 10.0
    _report(
        "nested binomial moment sums equal the multinomial covariance",
        ok,
        f"sizes 1/7/50 at horizon 10, max diff {worst:.2e} (tol 1e-9), {elapsed:.2f} s",
    )
    assert ok


def test_value_bounds_hold_and_portfolio_bound_dominates(term_life_sweep):
    rng = np.random.default_rng(903)
    sandwich_ok = True
    for _ in range(100):
        horizon = int(rng.integers(1, 9))
        model = GaussianModel(random_spd(rng, horizon, float(rng.uniform(0.2, 3.0))))
        lower, upper = value_bounds(model, SPEC)
        value = value_closed_form(model, SPEC)
        sandwich_ok = sandwich_ok and lower - 1e-10 <= value <= upper + 1e-10
    w0 = normal_one_step(SPEC)
    equality_gap = 0.0
    for sigma, horizon in ((0.5, 3), (1.0, 6), (2.0, 4)):
        model = GaussianModel(sigma * sigma * np.eye(horizon))
        value = value_closed_form(model, SPEC)
        _, upper = value_bounds(model, SPEC)
        equality_gap = max(
            equality_gap, abs(value - upper), abs(value - horizon * sigma * w0)
        )
    life_ok = all(value <= bound + 1e-10 for _, value, bound, _, _ in term_life_sweep["rows"])
    ok = sandwich_ok and equality_gap <= 1e-10 and life_ok
    _report(
        "value bounds sandwich random models and the buffer-capital bound "
        "dominates every exact portfolio margin",
        ok,
        f"100 sandwiches, even-release equality gap {equality_gap:.2e} (tol 1e-10), "
        f"{SWEEP_HORIZON} portfolio rows",
    )
    assert ok


def _one_step_operator_violations(cases):
    rng = np.random.default_rng(911)
    violations = 0
    for _ in range(cases):
        dist = random_dist(rng)
        spec = random_valuation_spec(rng)
        base = one_step_value(dist, spec)
        shift = float(rng.normal(0.0, 4.0))
        shifted = one_step_value(dist.shift(shift), spec)
        if abs(shifted - base - shift) > 1e-8 * max(1.0, abs(base) + abs(shift)):
            violations += 1
        factor = float(rng.uniform(0.0, 3.0))
        scaled = one_step_value(dist.scale(factor), spec)
        if abs(scaled - factor * base) > 1e-8 * max(1.0, abs(factor * base)):
            violations += 1
        bumps = rng.uniform(0.0, 3.0, dist.values.size)
        richer = one_step_value(type(dist)(dist.values + bumps, dist.probs), spec)
        if richer < base - 1e-9:
            violations += 1
    return violations


def _tree_value_violations(cases):
    rng = np.random.default_rng(912)
    violations = 0
    for _ in range(cases):
        tree = random_tree(rng)
        spec = random_valuation_spec(rng)
        base = tree_root_value(tree, spec)
        cut = int(rng.integers(1, tree.horizon + 1))
        raised = map_tree_cash(
            tree, lambda x, d: x + float(rng.uniform(0.0, 2.0)) if d >= cut else x
        )
        if tree_root_value(raised, spec) < base - 1e-9:
            violations += 1
    return violations


def _terminal_utility_violations(cases):
    rng = np.random.default_rng(913)
    violations = 0
    for _ in range(cases):
        tree = random_tree(rng)
        spec = random_valuation_spec(rng)
        terminal = {n: float(rng.normal(0.0, 4.0)) for n, _ in tree.nodes()}
        phi = monetary_utility(tree, spec, terminal)
        shift = float(rng.normal(0.0, 3.0))
        shifted = monetary_utility(tree, spec, {n: v + shift for n, v in terminal.items()})
        if abs(shifted[tree.root] - phi[tree.root] - shift) > 1e-9:
            violations += 1
        richer = monetary_utility(
            tree, spec, {n: v + float(rng.uniform(0.0, 2.0)) for n, v in terminal.items()}
        )
        if richer[tree.root] < phi[tree.root] - 1e-9:
            violations += 1
        zero = monetary_utility(tree, spec, {n: 0.0 for n in terminal})
        if abs(zero[tree.root]) > 1e-12:
            violations += 1
        if tree.horizon >= 2:
            cut = int(rng.integers(1, tree.horizon))
            replaced = {}

            def assign(node, depth, anchor):
                anchor = phi[node] if depth == cut else anchor
                replaced[node] = terminal[node] if anchor is None else anchor
                for child in node.children:
                    assign(child, depth + 1, anchor)

            assign(tree.root, 0, None)
            stitched = monetary_utility(tree, spec, replaced)
            if any(
                abs(stitched[n] - phi[n]) > 1e-9 for n, d in tree.nodes() if d <= cut
            ):
                violations += 1
    return violations


def _joint_subadditivity_violations(cases):
    rng = np.random.default_rng(914)
    violations = 0
    for _ in range(cases):
        horizon = int(rng.integers(1, 5))
        style = rng.integers(0, 3)
        if style == 0:
            factor = rng.normal(size=(2 * horizon, 2 * horizon + 1))
            cov = factor @ factor.T
        elif style == 1:
            block = random_spd(rng, horizon, 1.0)
            c = float(rng.uniform(-2.0, 2.0))
            cov = np.block([[block, c * block], [c * block, c * c * block]])
        else:
            bx = random_spd(rng, horizon, 1.0)
            by = random_spd(rng, horizon, 1.0)
            zero = np.zeros((horizon, horizon))
            cov = np.block([[bx, zero], [zero, by]])
        v_sum, v_x, v_y = joint_values(JointGaussianModel(cov), SPEC)
        if v_sum > v_x + v_y + 1e-8:
            violations += 1
    return violations


def _early_information_violations(cases):
    rng = np.random.default_rng(915)
    violations = 0
    for _ in range(cases):
        horizon = int(rng.integers(2, 7))
        cov = random_spd(rng, horizon, float(rng.uniform(0.2, 3.0)))
        schedule = random_schedule(rng, horizon)
        time_map = random_schedule(rng, horizon)
        earlier = tuple(schedule[s] for s in time_map)
        model = GaussianModel(cov, schedule)
        v_base, v_early = compare_revelation_schedules(model, SPEC, earlier)
        if v_early > v_base + 1e-10:
            violations += 1
    return violations


def test_invariant_sweeps_hold_with_zero_violations():
    cases = 500
    results = {
        "one-step translation/scaling/monotonicity": _one_step_operator_violations(cases),
        "tree values rise with later cash": _tree_value_violations(cases),
        "terminal utility axioms and cut consistency": _terminal_utility_violations(cases),
        "joint Gaussian subadditivity": _joint_subadditivity_violations(cases),
        "earlier information never raises the value": _early_information_violations(cases),
    }
    total = sum(results.values())
    ok = total == 0
    _report(
        "invariant sweeps hold with zero violations",
        ok,
        f"{len(results)} families x {cases} cases, "
        + ", ".join(f"{name}: {count}" for name, count in results.items()),
    )
    assert ok


def test_regulatory_margin_crosses_exact_margin(term_life_sweep):
    diffs = [regulatory - value for _, value, _, regulatory, _ in term_life_sweep["rows"]]
    signs = np.sign(diffs)
    changes = int(np.sum((signs[:-1] != signs[1:]) & (signs[:-1] != 0) & (signs[1:] != 0)))
    first = next(
        (t + 1 for t, (a, b) in enumerate(zip(signs, signs[1:])) if a != 0 and b != 0 and a != b),
        None,
    )
    elapsed = term_life_sweep["elapsed"]
    ok = changes >= 1 and elapsed < 600.0
    _report(
        "regulatory margin under- and overshoots the exact margin across horizons",
        ok,
        f"{changes} sign change(s), first between horizons {first} and "
        f"{None if first is None else first + 1}, sweep {elapsed:.1f} s (limit 600 s)",
    )
    assert ok


def test_normal_proxy_tracks_exact_margin_within_five_percent(term_life_sweep):
    rows = {h: (value, proxy) for h, value, _, _, proxy in term_life_sweep["rows"]}
    deviations = {
        horizon: abs(rows[horizon][1] - rows[horizon][0]) / rows[horizon][0]
        for horizon in (5, 10, 20, 30)
    }
    worst = max(deviations.values())
    ok = worst <= 0.05
    _report(
        "normal proxy within 5% of the exact margin",
        ok,
        "relative deviations "
        + ", ".join(f"{h}y {d:.1%}" for h, d in deviations.items())
        + " (tol 5.0%)",
    )
    assert ok, (
        "the normal proxy undershoots the exact margin by "
        + ", ".join(f"{d:.1%} at horizon {h}" for h, d in deviations.items())
        + "; a 5% band is not attainable at this portfolio size because the"
        " yearly death counts are small integers: their 99.5% quantile sits a"
        " whole count or more above the matching normal quantile, and that"
        " per-period gap shrinks only like one over the root of the expected"
        " count (compare 8 versus 7.48 in the first year). The proxy is exact"
        " for the covariance it is given; the gap is the discreteness of the"
        " binomial tail, not an implementation artifact."
    )
