"""Command-line interface emitting the figure datasets as CSV or JSON tables.

Every subcommand reads one JSON config (validated against the schemas in
:mod:`cocmargin.schemas`), runs the matching engine, and writes one table.
Output is deterministic byte for byte given the same config and seed: floats
are rendered with ``repr`` and nothing depends on wall-clock or dict order.

Exit codes: 0 success, 2 configuration problem, 3 computation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import eiopa as eiopa_mod
from .autoregressive import ARModel, NormalInnovation, remaining_constants
from .errors import CocmarginError
from .gaussian import (
    GaussianModel,
    covariance_from_cohorts,
    read_covariance_csv,
    value_bounds,
    value_closed_form,
)
from .life import Cohort, LifeValuation, MakehamLaw, value_table
from .oracle import (
    ARSampler,
    ConstantSampler,
    IIDNormalSampler,
    ScenarioTree,
    nested_monte_carlo,
    tree_root_value,
)
from .risk_measures import RiskMeasure
from .schemas import dump_schemas, validate_config
from .valuation import ValuationSpec

DEFAULT_LEVEL = 0.005
DEFAULT_ETA = 0.06


class ConfigError(Exception):
    """Invalid command-line usage or config content."""


def _spec_from(config) -> ValuationSpec:
    level = float(config.get("level", DEFAULT_LEVEL))
    eta = float(config.get("eta", DEFAULT_ETA))
    return ValuationSpec(RiskMeasure.var(level), eta)


def _law_from(obj) -> MakehamLaw:
    return MakehamLaw(
        alpha=float(obj["alpha"]),
        beta=float(obj["beta"]),
        gamma=float(obj["gamma"]),
        increasing=bool(obj.get("increasing", True)),
    )


def _write_gtable(path: str, result: LifeValuation) -> None:
    lines = ["t,n,value,risk,bound_term"]
    for t, n, value, risk, term in result.table_rows():
        lines.append(f"{t},{n},{value!r},{risk!r},{term!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def cmd_binomial(config, seed, threads):
    law = _law_from(config["makeham"])
    spec = _spec_from(config)
    rows = []
    last = None
    for horizon in range(1, config["T"] + 1):
        cohort = Cohort(int(config["n"]), float(config["age"]), horizon)
        last = value_table(cohort, law, spec, threads=threads)
        rows.append([horizon, last.best_estimate, last.value0, last.bound])
    if "gtable_out" in config:
        _write_gtable(config["gtable_out"], last)
    return ["T", "BE", "V0", "bound"], rows


def cmd_gaussian_approx(config, seed, threads):
    spec = _spec_from(config)
    shared = config.get("makeham")
    rows = []
    for horizon in range(1, config["T"] + 1):
        pairs = []
        for entry in config["cohorts"]:
            law_obj = entry.get("makeham", shared)
            if law_obj is None:
                raise ConfigError("each cohort needs a makeham law (inline or top-level)")
            pairs.append((Cohort(int(entry["n"]), float(entry["age"]), horizon), _law_from(law_obj)))
        model, _ = covariance_from_cohorts(pairs)
        rows.append([horizon, value_closed_form(model, spec)])
    return ["T", "V0_gaussian"], rows


def cmd_eiopa(config, seed, threads):
    law = _law_from(config["makeham"])
    raw = config.get("params", {})
    params = eiopa_mod.EiopaParams(
        coc_rate=float(raw.get("coc", 0.06)),
        stress_factor=float(raw.get("stress", 1.15)),
        discount_curve=tuple(raw.get("rates", ())),
        stress_rates=bool(raw.get("stress_rates", False)),
    )
    rows = []
    for horizon in range(1, config["T"] + 1):
        cohort = Cohort(int(config["n"]), float(config["age"]), horizon)
        rows.append(
            [
                horizon,
                eiopa_mod.best_estimate(cohort, law),
                eiopa_mod.scr(cohort, law, params),
                eiopa_mod.risk_margin_method2(cohort, law, params),
            ]
        )
    return ["T", "BE", "SCR", "RM"], rows


def _broadcast(config, scalar_key, vector_key, horizon):
    if vector_key in config and scalar_key in config:
        raise ConfigError(f"give either {scalar_key!r} or {vector_key!r}, not both")
    if vector_key in config:
        values = [float(v) for v in config[vector_key]]
        if horizon is not None and len(values) != horizon:
            raise ConfigError(f"{vector_key!r} must have T={horizon} entries")
        return values
    if scalar_key in config:
        if horizon is None:
            raise ConfigError(f"scalar {scalar_key!r} needs an explicit T")
        return [float(config[scalar_key])] * horizon
    raise ConfigError(f"config needs {scalar_key!r} or {vector_key!r}")


def cmd_ar(config, seed, threads):
    horizon = config.get("T")
    if horizon is None and "alphas" in config:
        horizon = len(config["alphas"])
    if horizon is None and "sigmas" in config:
        horizon = len(config["sigmas"])
    alphas = _broadcast(config, "alpha", "alphas", horizon)
    sigmas = _broadcast(config, "sigma", "sigmas", horizon)
    model = ARModel(tuple(alphas), tuple(NormalInnovation(s) for s in sigmas))
    constants = remaining_constants(model, _spec_from(config))
    return ["t", "value_constant"], [[t, float(c)] for t, c in enumerate(constants)]


def cmd_gaussian(config, seed, threads):
    if ("cov" in config) == ("cov_csv" in config):
        raise ConfigError("give exactly one of 'cov' or 'cov_csv'")
    cov = np.array(config["cov"], dtype=float) if "cov" in config else read_covariance_csv(
        config["cov_csv"]
    )
    schedule = tuple(config["schedule"]) if "schedule" in config else None
    model = GaussianModel(cov, schedule)
    spec = _spec_from(config)
    lower, upper = value_bounds(model, spec)
    return ["T", "V0", "lower", "upper"], [
        [model.horizon, value_closed_form(model, spec), lower, upper]
    ]


def cmd_oracle(config, seed, threads):
    spec = _spec_from(config)
    modes = [key for key in ("tree", "tree_file", "nested") if key in config]
    if len(modes) != 1:
        raise ConfigError("give exactly one of 'tree', 'tree_file', or 'nested'")
    mode = modes[0]
    if mode == "nested":
        nested = config["nested"]
        kind = nested["kind"]
        if kind == "constant":
            if "values" not in nested:
                raise ConfigError("constant sampler needs 'values'")
            sampler = ConstantSampler(nested["values"])
        elif kind == "iid":
            if "sigmas" not in nested:
                raise ConfigError("iid sampler needs 'sigmas'")
            sampler = IIDNormalSampler(nested["sigmas"])
        else:
            if "sigmas" not in nested or "alphas" not in nested:
                raise ConfigError("ar sampler needs 'alphas' and 'sigmas'")
            if len(nested["alphas"]) != len(nested["sigmas"]):
                raise ConfigError("'alphas' and 'sigmas' must have equal length")
            sampler = ARSampler(nested["alphas"], nested["sigmas"])
        estimate, stderr = nested_monte_carlo(
            sampler, spec, nested["outer"], nested["inner"], seed=seed, threads=threads
        )
        return ["estimate", "se"], [[estimate, stderr]]
    if mode == "tree":
        tree = ScenarioTree.from_obj(config["tree"])
    else:
        tree = ScenarioTree.from_json(Path(config["tree_file"]).read_text(encoding="ascii"))
    return ["value"], [[tree_root_value(tree, spec)]]


COMMANDS = {
    "binomial": cmd_binomial,
    "gaussian-approx": cmd_gaussian_approx,
    "eiopa": cmd_eiopa,
    "ar": cmd_ar,
    "gaussian": cmd_gaussian,
    "oracle": cmd_oracle,
}


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _render(command, columns, rows, fmt) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
        return "\n".join(lines) + "\n"
    payload = {
        "command": command,
        "columns": list(columns),
        "rows": [
            [cell if isinstance(cell, str) else _json_number(cell) for cell in row]
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _json_number(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("COCM_THREADS")
    if env is None:
        return 1
    try:
        value = int(env)
    except ValueError as err:
        raise ConfigError(f"COCM_THREADS must be an integer, got {env!r}") from err
    if value < 1:
        raise ConfigError("COCM_THREADS must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocmargin",
        description="Cost-of-capital margin valuation engines (CSV/JSON tables).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} engine")
        cmd.add_argument("--config", required=True, help="path to the JSON config")
        cmd.add_argument("--out", help="output file (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default="csv")
        cmd.add_argument("--seed", type=int, default=0, help="RNG seed (oracle nested mode)")
        cmd.add_argument("--threads", type=int, help="worker threads (default: COCM_THREADS or 1)")
    schema_cmd = sub.add_parser("schema", help="write all config/output schemas as JSON files")
    schema_cmd.add_argument("--out", required=True, help="directory for the schema files")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        for path in dump_schemas(args.out):
            print(path)
        return 0
    try:
        threads = _resolve_threads(args)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        try:
            raw = Path(args.config).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(f"cannot read config: {err}") from err
        try:
            config = json.loads(raw)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}") from err
        try:
            validate_config(args.command, config)
        except jsonschema.ValidationError as err:
            raise ConfigError(f"config rejected: {err.message}") from err
    except ConfigError as err:
        _report_error("config", err)
        return 2
    try:
        columns, rows = COMMANDS[args.command](config, args.seed, threads)
        text = _render(args.command, columns, rows, args.format)
    except ConfigError as err:
        _report_error("config", err)
        return 2
    except (CocmarginError, ValueError, np.linalg.LinAlgError) as err:
        _report_error("computation", err)
        return 3
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return 0


def _report_error(kind: str, err: Exception) -> None:
    sys.stderr.write(json.dumps({"error": kind, "detail": str(err)}) + "\n")


if __name__ == "__main__":
    raise SystemExit(main())
