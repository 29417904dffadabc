"""Command-line interface.

One subcommand per artifact: ``policy`` writes the order-up-to table,
``cost`` the policy cost comparison for a single instance, ``experiment``
the full-factorial result tables, and ``simulate`` a simulation-based cost
estimate.  All inputs come from a JSON config document; ``--out``,
``--format``, and ``--seed`` override config values.

Exit codes: 0 success, 2 configuration error, 3 model instability,
4 convergence or resource failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .discrete import (
    DiscreteParams,
    IntPmf,
    expected_costs_discrete,
    policy_table_discrete,
)
from .errors import (
    ConvergenceError,
    InstabilityError,
    ParameterError,
    ResourceLimitError,
)
from .experiments import (
    ExperimentGrid,
    run_grid,
    summarize,
    write_instances_csv,
    write_results_json,
    write_summary_csv,
)
from .policy import PolicyTable, cost_report, expected_cost_fixed, policy_table
from .simulate import simulate_continuous, simulate_discrete
from .transient import ContinuousParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNSTABLE = 3
EXIT_NO_CONVERGENCE = 4


def _require(config: dict, key: str, kind: str = "config"):
    if key not in config:
        raise ParameterError(f"{kind} is missing required field {key!r}")
    return config[key]


def _int_pmf(raw, field_name: str) -> IntPmf:
    try:
        pairs = [(int(v), float(p)) for v, p in raw]
    except (TypeError, ValueError) as exc:
        raise ParameterError(
            f"field {field_name!r} must be a list of [value, probability] pairs"
        ) from exc
    try:
        return IntPmf.from_pairs(pairs)
    except ParameterError as exc:
        raise ParameterError(f"field {field_name!r}: {exc}") from exc


def _continuous_params(raw: dict) -> ContinuousParams:
    kwargs = {
        "lam": float(_require(raw, "lambda", "params")),
        "mu": float(_require(raw, "mu", "params")),
        "lead_time": float(_require(raw, "L", "params")),
        "h1": float(_require(raw, "h1", "params")),
        "h2": float(_require(raw, "h2", "params")),
        "b": float(_require(raw, "b", "params")),
    }
    if "epsilon" in raw:
        kwargs["epsilon"] = float(raw["epsilon"])
    if "queue_tail_mass" in raw:
        kwargs["queue_tail_mass"] = float(raw["queue_tail_mass"])
    return ContinuousParams(**kwargs)


def _discrete_params(raw: dict) -> DiscreteParams:
    kwargs = {
        "demand": _int_pmf(_require(raw, "demand", "params"), "demand"),
        "capacity": _int_pmf(_require(raw, "capacity", "params"), "capacity"),
        "lead_periods": int(_require(raw, "L", "params")),
        "h1": float(_require(raw, "h1", "params")),
        "h2": float(_require(raw, "h2", "params")),
        "b": float(_require(raw, "b", "params")),
    }
    for key in ("stabilization_tol", "max_periods"):
        if key in raw:
            kwargs[key] = type(DiscreteParams.__dataclass_fields__[key].default)(raw[key])
    return DiscreteParams(**kwargs)


def _load_config(path: str) -> dict:
    try:
        with open(path) as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ParameterError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ParameterError("config must be a JSON object")
    return config


def _model_and_params(config: dict):
    model = _require(config, "model")
    raw = _require(config, "params")
    if model == "continuous":
        return model, _continuous_params(raw)
    if model == "discrete":
        return model, _discrete_params(raw)
    raise ParameterError(f"model must be 'continuous' or 'discrete', got {model!r}")


def _echo_lines(model: str, raw_params: dict) -> list[str]:
    lines = [f"# model={model}"]
    lines += [f"# {key}={json.dumps(value)}" for key, value in sorted(raw_params.items())]
    return lines


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text)


def cmd_policy(config: dict, out: str, fmt: str) -> int:
    model, params = _model_and_params(config)
    table = policy_table(params) if model == "continuous" else policy_table_discrete(params)
    if fmt == "json":
        document = {
            "model": model,
            "params": config["params"],
            "targets": list(table.targets[:-1]),
            "saturation_backlog": table.i_sat,
            "saturation_target": table.saturation_value,
        }
        _write_text(out, json.dumps(document, indent=2) + "\n")
    else:
        lines = _echo_lines(model, config["params"])
        lines.append("i,target")
        lines += [f"{i},{t}" for i, t in enumerate(table.targets[:-1])]
        lines.append(f">={table.i_sat},{table.saturation_value}")
        _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote policy table ({len(table.targets)} levels) to {out}")
    return EXIT_OK


def cmd_cost(config: dict, out: str, fmt: str) -> int:
    model, params = _model_and_params(config)
    report = cost_report(params) if model == "continuous" else expected_costs_discrete(params)
    if fmt == "json":
        _write_text(out, json.dumps(dataclasses.asdict(report), indent=2) + "\n")
    else:
        lines = _echo_lines(model, config["params"])
        lines.append("fixed_target,cost_fixed,cost_state_dep,savings_pct")
        lines.append(f"{report.fixed_target},{report.cost_fixed!r},"
                     f"{report.cost_state_dependent!r},{report.savings_pct!r}")
        _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote cost report to {out}")
    return EXIT_OK


def _grid_from_config(config: dict) -> ExperimentGrid:
    model = _require(config, "model")
    if model == "continuous":
        grid = ExperimentGrid.continuous()
    elif model == "discrete":
        grid = ExperimentGrid.discrete()
    else:
        raise ParameterError(f"model must be 'continuous' or 'discrete', got {model!r}")
    overrides = config.get("experiment", {})
    fields = {}
    for key in ("lambdas", "cases", "lead_times", "h1_values", "b_values"):
        if key in overrides:
            fields[key] = tuple(overrides[key])
    for key in ("mu", "h2", "epsilon"):
        if key in overrides:
            fields[key] = float(overrides[key])
    return dataclasses.replace(grid, **fields) if fields else grid


def cmd_experiment(config: dict, out: str, fmt: str) -> int:
    grid = _grid_from_config(config)
    reports = run_grid(grid)
    rows = summarize(reports)
    if fmt == "json":
        write_results_json(reports, rows, out)
        print(f"wrote {len(reports)} instances + summary to {out}")
    else:
        summary_out = config.get("experiment", {}).get("summary_out")
        if summary_out is None:
            stem = Path(out)
            summary_out = str(stem.with_name(stem.stem + "_summary" + stem.suffix))
        write_instances_csv(reports, out)
        write_summary_csv(rows, summary_out)
        print(f"wrote {len(reports)} instances to {out}, summary to {summary_out}")
    return EXIT_OK


def cmd_simulate(config: dict, out: str, fmt: str, seed: int | None) -> int:
    model, params = _model_and_params(config)
    sim = config.get("simulation", {})
    if seed is None:
        seed = int(sim.get("seed", 0))
    policy_kind = sim.get("policy", "state_dependent")
    if policy_kind not in ("state_dependent", "fixed"):
        raise ParameterError("simulation.policy must be 'state_dependent' or 'fixed'")

    if model == "continuous":
        if policy_kind == "state_dependent":
            table = policy_table(params)
        else:
            table = PolicyTable.constant(expected_cost_fixed(params)[0], "continuous")
        horizon = float(sim.get("horizon", 1e6))
        warmup = float(sim["warmup"]) if "warmup" in sim else None
        estimate = simulate_continuous(params, table, horizon, warmup=warmup, seed=seed)
    else:
        if policy_kind == "state_dependent":
            table = policy_table_discrete(params)
        else:
            table = PolicyTable.constant(
                expected_costs_discrete(params).fixed_target, "discrete")
        horizon = int(sim.get("horizon", 10 ** 6))
        warmup = int(sim["warmup"]) if "warmup" in sim else None
        estimate = simulate_discrete(params, table, horizon, warmup_periods=warmup,
                                     seed=seed)

    if fmt == "json":
        document = {"model": model, "policy": policy_kind,
                    "params": config["params"],
                    **dataclasses.asdict(estimate)}
        _write_text(out, json.dumps(document, indent=2) + "\n")
    else:
        lines = _echo_lines(model, config["params"])
        lines.append(f"# policy={policy_kind}")
        lines.append("mean,stderr,horizon,warmup,seed,batches")
        lines.append(f"{estimate.mean!r},{estimate.stderr!r},{estimate.horizon!r},"
                     f"{estimate.warmup!r},{estimate.seed},{estimate.batches}")
        _write_text(out, "\n".join(lines) + "\n")
    print(f"wrote simulation estimate to {out}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atopolicy",
        description="State-dependent base-stock policies for a two-module assembly system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("policy", "compute the order-up-to table"),
        ("cost", "compare state-dependent and fixed policy costs"),
        ("experiment", "run a full-factorial experiment"),
        ("simulate", "estimate costs by simulation"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to a JSON config document")
        cmd.add_argument("--out", help="output path (overrides config)")
        cmd.add_argument("--format", choices=("csv", "json"), help="output format")
        if name == "simulate":
            cmd.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        fmt = args.format or config.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ParameterError(f"format must be 'csv' or 'json', got {fmt!r}")
        default_out = f"{args.command}_output.{fmt}"
        out = args.out or config.get("out", default_out)
        if args.command == "policy":
            return cmd_policy(config, out, fmt)
        if args.command == "cost":
            return cmd_cost(config, out, fmt)
        if args.command == "experiment":
            return cmd_experiment(config, out, fmt)
        return cmd_simulate(config, out, fmt, getattr(args, "seed", None))
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (ConvergenceError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
