"""Command-line interface: calibrate, verify, sweep, and breach subcommands.

Grids of (alpha, epsilon) cells are evaluated over a scenario set and the
results land as deterministic CSV or JSON tables: identical requests with
the same seed produce byte-identical files. Exit codes: 0 success,
2 configuration error, 3 solver failure, 4 failed verification.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import calibrate as cal
from . import ingest
from . import verify as ver
from .dist import (
    DiscreteDistribution,
    ExponentialParams,
    GaussianParams,
    LaplaceParams,
    PrivacySpec,
    noise_variance,
)
from .errors import (
    EmptyConditional,
    EmptySample,
    FunctionalOverflow,
    InfeasibleEvenAtInfinity,
    IntegrationFailure,
    InvalidValue,
    IoError,
    NonInvertibleRate,
    NonNormalizable,
    NoRoot,
    NotMonotone,
    ParseError,
    PuffercalError,
    UnknownCategory,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

_CONFIG_ERRORS = (
    InvalidValue,
    IoError,
    ParseError,
    UnknownCategory,
    EmptyConditional,
    EmptySample,
)
_SOLVER_ERRORS = (
    NoRoot,
    NotMonotone,
    NonInvertibleRate,
    FunctionalOverflow,
    IntegrationFailure,
    NonNormalizable,
    InfeasibleEvenAtInfinity,
)

_GAUSSIAN_KINDS = {"gaussian", "baseline-gaussian"}
_LAPLACE_KINDS = {"laplace", "winf", "baseline-laplace"}

CALIBRATE_COLUMNS = (
    "mechanism", "alpha", "epsilon", "pair", "parameter", "variance",
    "functional_value", "log_functional_value", "binding",
    "no_noise_needed", "experimental",
)
SWEEP_COLUMNS = ("alpha", "epsilon", "mechanism", "parameter", "variance")
VERIFY_COLUMNS = (
    "mechanism", "alpha", "epsilon", "pair", "parameter",
    "divergence_ij", "divergence_ji", "slack", "passed", "inconclusive",
    "chernoff_bound",
)
BREACH_COLUMNS = (
    "mechanism", "alpha", "epsilon", "pair", "parameter",
    "mc_breach_estimate", "mc_half_width", "chernoff_bound",
    "sample_count", "seed",
)


class _ConfigError(Exception):
    pass


class _SolverCellError(Exception):
    pass


def _parse_grid(text: str, name: str) -> list[float]:
    """Parse '1.2,2,inf' lists and 'start:stop:step' ranges (mixable)."""
    values: list[float] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            parts = token.split(":")
            if len(parts) != 3:
                raise _ConfigError(f"{name}: range syntax is start:stop:step, got {token!r}")
            try:
                start, stop, step = (float(p) for p in parts)
            except ValueError:
                raise _ConfigError(f"{name}: could not parse range {token!r}") from None
            if not all(math.isfinite(v) for v in (start, stop, step)):
                raise _ConfigError(f"{name}: range bounds must be finite, got {token!r}")
            if step <= 0 or stop < start:
                raise _ConfigError(f"{name}: bad range {token!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values.extend(start + k * step for k in range(count))
        else:
            try:
                values.append(float(token))
            except ValueError:
                raise _ConfigError(f"{name}: could not parse value {token!r}") from None
    if not values:
        raise _ConfigError(f"{name}: grid is empty")
    return values


def _resolve_scenarios(source: str, data_dir: Path) -> cal.ScenarioSet:
    """Resolve a builtin scenario name or a JSON scenario file."""
    if source == "point-mass":
        return cal.ScenarioSet(
            pairs=(
                cal.ScenarioPair(
                    p_i=DiscreteDistribution((0.0,), (1.0,)),
                    p_j=DiscreteDistribution((1.0,), (1.0,)),
                    label="point-mass",
                ),
            )
        )
    builtin = {cfg.label: cfg for cfg in ingest.builtin_scenarios()}
    if source in builtin:
        cfg = builtin[source]
        dataset = data_dir / cfg.dataset_path
        if not dataset.exists():
            raise _ConfigError(
                f"dataset file {dataset} not found; fetch it first "
                f"(scripts/fetch_datasets.py). {cfg.fetch_note}"
            )
        table = ingest.load_table(dataset, cfg.column_names, cfg.delimiter)
        return cal.ScenarioSet(pairs=(ingest.scenario_pair_from_table(table, cfg),))
    path = Path(source)
    if not path.exists():
        raise _ConfigError(
            f"unknown scenario {source!r}: not a builtin "
            f"(point-mass, {', '.join(sorted(builtin))}) and not a file"
        )
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise _ConfigError(f"could not read scenario file {path}: {exc}") from exc
    pairs: list[cal.ScenarioPair] = []
    for k, entry in enumerate(obj.get("pairs", [])):
        try:
            p, _ = ingest.distribution_from_json(entry["p"])
            q, _ = ingest.distribution_from_json(entry["q"])
        except (KeyError, TypeError, ParseError, InvalidValue) as exc:
            raise _ConfigError(f"scenario file {path}, pairs[{k}]: {exc}") from exc
        pairs.append(cal.ScenarioPair(p_i=p, p_j=q, label=str(entry.get("label", f"pair-{k}"))))
    for k, entry in enumerate(obj.get("datasets", [])):
        try:
            cfg = ingest.ScenarioConfig(
                dataset_path=entry["dataset_path"],
                x_attribute=entry["x_attribute"],
                secret_attribute=entry["secret_attribute"],
                value_i=entry["value_i"],
                value_j=entry["value_j"],
                numeric_coding=entry.get("numeric_coding"),
                drop_missing=entry.get("drop_missing", True),
                column_names=tuple(entry["column_names"]) if entry.get("column_names") else None,
                delimiter=entry.get("delimiter", ","),
                label=entry.get("label", f"dataset-{k}"),
            )
        except (KeyError, TypeError, InvalidValue) as exc:
            raise _ConfigError(f"scenario file {path}, datasets[{k}]: {exc}") from exc
        dataset = Path(cfg.dataset_path)
        if not dataset.is_absolute():
            candidate = path.parent / dataset
            dataset = candidate if candidate.exists() else data_dir / dataset
        table = ingest.load_table(dataset, cfg.column_names, cfg.delimiter)
        pairs.append(ingest.scenario_pair_from_table(table, cfg))
    if not pairs:
        raise _ConfigError(f"scenario file {path} defines no pairs")
    return cal.ScenarioSet(pairs=tuple(pairs))


def _mechanism_instance(kind: str, parameter: float):
    """Noise-mechanism object for a calibrated parameter; None when parameter is 0."""
    if parameter == 0.0:
        return None
    if kind in _GAUSSIAN_KINDS:
        return GaussianParams(sigma=parameter)
    if kind == "exponential":
        return ExponentialParams(scale=parameter)
    return LaplaceParams(scale=parameter)


def _variance(kind: str, parameter: float) -> float:
    if parameter == 0.0:
        return 0.0
    if kind in _GAUSSIAN_KINDS:
        return parameter**2
    if kind == "exponential":
        return noise_variance(ExponentialParams(scale=parameter))
    return 2.0 * parameter**2


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(columns, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def _json_cell(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return value


def _json_text(command: str, columns, rows) -> str:
    payload = {
        "command": command,
        "rows": [{c: _json_cell(row.get(c)) for c in columns if c in row} for row in rows],
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _emit(args, command: str, columns, rows, filename: str | None = None,
          json_columns=None) -> None:
    if args.format == "json":
        text = _json_text(command, json_columns or columns, rows)
        suffix = ".json"
    else:
        text = _csv_text(columns, rows)
        suffix = ".csv"
    sys.stdout.write(text)
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        name = (filename or command) + suffix
        (out_dir / name).write_text(text, encoding="utf-8")


def _calibrate_cell(scenarios, kind, alpha, epsilon, tol):
    """All per-pair rows for one grid cell, with the binding pair flagged."""
    spec = PrivacySpec(alpha=alpha, epsilon=epsilon)
    results = []
    for index, pair in enumerate(scenarios.pairs):
        label = pair.label or f"pair-{index}"
        try:
            result = cal.calibrate_pair(pair, kind, spec, tol)
        except _SOLVER_ERRORS as exc:
            raise _SolverCellError(
                f"mechanism={kind} alpha={alpha!r} epsilon={epsilon!r} "
                f"pair={label}: {exc}"
            ) from exc
        results.append((label, result))
    # max() keeps the first maximum, i.e. the lowest-index tie-break.
    binding_index = max(range(len(results)), key=lambda k: results[k][1].parameter)
    rows = []
    for index, (label, result) in enumerate(results):
        rows.append(
            {
                "mechanism": kind,
                "alpha": alpha,
                "epsilon": epsilon,
                "pair": label,
                "parameter": result.parameter,
                "variance": _variance(kind, result.parameter),
                "functional_value": result.functional_value,
                "log_functional_value": result.log_functional_value,
                "binding": index == binding_index,
                "no_noise_needed": result.no_noise_needed,
                "experimental": result.experimental,
            }
        )
    return rows


def _map_cells(cells, worker, jobs: int):
    if jobs <= 1:
        return [worker(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, cells))


def _verify_cell_rows(scenarios, kind, alpha, epsilon, parameter):
    """Verification rows for one (mechanism, alpha, epsilon, parameter) cell."""
    spec = PrivacySpec(alpha=alpha, epsilon=epsilon)
    mech = _mechanism_instance(kind, parameter)
    rows = []
    if mech is None:
        # Zero noise: compare the raw conditional distributions directly.
        for index, pair in enumerate(scenarios.pairs):
            div_ij = ver.renyi_divergence_discrete(pair.p_i, pair.p_j, alpha)
            div_ji = ver.renyi_divergence_discrete(pair.p_j, pair.p_i, alpha)
            worst = max(div_ij, div_ji)
            chernoff = (
                ver.chernoff_breach_bound(worst, spec)
                if 1.0 < alpha < math.inf and math.isfinite(worst)
                else None
            )
            rows.append(
                {
                    "mechanism": kind,
                    "alpha": alpha,
                    "epsilon": epsilon,
                    "pair": pair.label or f"pair-{index}",
                    "parameter": parameter,
                    "divergence_ij": div_ij,
                    "divergence_ji": div_ji,
                    "slack": epsilon - worst,
                    "passed": worst <= epsilon + ver.PASS_SLACK,
                    "inconclusive": False,
                    "chernoff_bound": chernoff,
                }
            )
        return rows
    for report in ver.verify_rpp(scenarios, mech, spec):
        rows.append(
            {
                "mechanism": kind,
                "alpha": alpha,
                "epsilon": epsilon,
                "pair": report.pair_label,
                "parameter": parameter,
                "divergence_ij": report.divergence_ij,
                "divergence_ji": report.divergence_ji,
                "slack": report.slack,
                "passed": report.passed,
                "inconclusive": report.inconclusive,
                "chernoff_bound": report.chernoff_bound,
            }
        )
    return rows


def cmd_calibrate(args) -> int:
    scenarios = _resolve_scenarios(args.scenario, Path(args.data_dir))
    alphas = _parse_grid(args.alpha, "--alpha")
    epsilons = _parse_grid(args.epsilon, "--epsilon")
    kinds = args.mechanism or ["laplace"]
    cells = [(k, a, e) for k in kinds for a in alphas for e in epsilons]
    row_blocks = _map_cells(
        cells, lambda cell: _calibrate_cell(scenarios, *cell, args.tol), args.jobs
    )
    rows = [row for block in row_blocks for row in block]
    _emit(args, "calibrate", CALIBRATE_COLUMNS, rows)
    if args.verify:
        failures = _verify_emitted(scenarios, rows, args)
        if failures:
            sys.stderr.write(f"{failures} cells failed re-verification\n")
            return EXIT_VERIFY
    return EXIT_OK


def _verify_emitted(scenarios, calibration_rows, args) -> int:
    failures = 0
    seen = set()
    for row in calibration_rows:
        if not row["binding"]:
            continue
        key = (row["mechanism"], row["alpha"], row["epsilon"])
        if key in seen:
            continue
        seen.add(key)
        reports = _verify_cell_rows(
            scenarios, row["mechanism"], row["alpha"], row["epsilon"], row["parameter"]
        )
        failures += sum(1 for r in reports if r["passed"] is not True)
    return failures


def cmd_verify(args) -> int:
    scenarios = _resolve_scenarios(args.scenario, Path(args.data_dir))
    alphas = _parse_grid(args.alpha, "--alpha")
    epsilons = _parse_grid(args.epsilon, "--epsilon")
    kind = args.mechanism
    rows = []
    for alpha in alphas:
        for epsilon in epsilons:
            if args.parameter is not None:
                parameter = args.parameter
            else:
                spec = PrivacySpec(alpha=alpha, epsilon=epsilon)
                try:
                    parameter = cal.calibrate_over_scenarios(
                        scenarios, kind, spec, args.tol
                    ).parameter
                except _SOLVER_ERRORS as exc:
                    raise _SolverCellError(
                        f"mechanism={kind} alpha={alpha!r} epsilon={epsilon!r}: {exc}"
                    ) from exc
            rows.extend(_verify_cell_rows(scenarios, kind, alpha, epsilon, parameter))
    _emit(args, "verify", VERIFY_COLUMNS, rows)
    if any(row["passed"] is not True for row in rows):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenarios = _resolve_scenarios(args.scenario, Path(args.data_dir))
    alphas = _parse_grid(args.alpha, "--alpha")
    epsilons = _parse_grid(args.epsilon, "--epsilon")
    kinds = args.mechanism or ["laplace"]
    status = EXIT_OK
    for kind in kinds:
        cells = [(kind, a, e) for a in alphas for e in epsilons]
        row_blocks = _map_cells(
            cells, lambda cell: _calibrate_cell(scenarios, *cell, args.tol), args.jobs
        )
        rows = []
        for block in row_blocks:
            binding = next(row for row in block if row["binding"])
            rows.append(
                {
                    "alpha": binding["alpha"],
                    "epsilon": binding["epsilon"],
                    "mechanism": kind,
                    "pair": binding["pair"],
                    "parameter": binding["parameter"],
                    "variance": binding["variance"],
                }
            )
        # The JSON form adds the binding pair label required by the schema.
        _emit(
            args, "sweep", SWEEP_COLUMNS, rows,
            filename=f"sweep_{kind}",
            json_columns=(*SWEEP_COLUMNS, "pair"),
        )
        if args.verify:
            for row in rows:
                reports = _verify_cell_rows(
                    scenarios, kind, row["alpha"], row["epsilon"], row["parameter"]
                )
                if any(r["passed"] is not True for r in reports):
                    sys.stderr.write(
                        f"verification failed: mechanism={kind} "
                        f"alpha={row['alpha']!r} epsilon={row['epsilon']!r}\n"
                    )
                    status = EXIT_VERIFY
    return status


def cmd_breach(args) -> int:
    scenarios = _resolve_scenarios(args.scenario, Path(args.data_dir))
    alphas = _parse_grid(args.alpha, "--alpha")
    epsilons = _parse_grid(args.epsilon, "--epsilon")
    kind = args.mechanism
    rows = []
    for alpha in alphas:
        for epsilon in epsilons:
            spec = PrivacySpec(alpha=alpha, epsilon=epsilon)
            if args.parameter is not None:
                parameter = args.parameter
            else:
                try:
                    parameter = cal.calibrate_over_scenarios(
                        scenarios, kind, spec, args.tol
                    ).parameter
                except _SOLVER_ERRORS as exc:
                    raise _SolverCellError(
                        f"mechanism={kind} alpha={alpha!r} epsilon={epsilon!r}: {exc}"
                    ) from exc
            mech = _mechanism_instance(kind, parameter)
            if mech is None:
                raise _ConfigError(
                    "breach estimation needs a strictly positive parameter"
                )
            for index, pair in enumerate(scenarios.pairs):
                pair_seed = args.seed + index
                estimate, half_width = ver.monte_carlo_breach(
                    pair.p_i, pair.p_j, mech, epsilon, args.n, pair_seed
                )
                chernoff = None
                if 1.0 < alpha < math.inf:
                    divergence = ver.renyi_divergence_numeric(
                        pair.p_i, pair.p_j, mech, alpha
                    )
                    chernoff = ver.chernoff_breach_bound(divergence, spec)
                rows.append(
                    {
                        "mechanism": kind,
                        "alpha": alpha,
                        "epsilon": epsilon,
                        "pair": pair.label or f"pair-{index}",
                        "parameter": parameter,
                        "mc_breach_estimate": estimate,
                        "mc_half_width": half_width,
                        "chernoff_bound": chernoff,
                        "sample_count": args.n,
                        "seed": pair_seed,
                    }
                )
    _emit(args, "breach", BREACH_COLUMNS, rows)
    return EXIT_OK


def _add_common_arguments(parser: argparse.ArgumentParser, multi_mechanism: bool) -> None:
    parser.add_argument(
        "--scenario",
        required=True,
        help="builtin name (point-mass, adult, heart-disease, student-performance) "
        "or a JSON scenario file",
    )
    parser.add_argument("--alpha", default="2", help="comma list and/or start:stop:step ranges; 'inf' allowed")
    parser.add_argument("--epsilon", default="1", help="comma list and/or start:stop:step ranges")
    if multi_mechanism:
        parser.add_argument(
            "--mechanism",
            action="append",
            choices=cal.MECHANISM_KINDS,
            help="repeatable; defaults to laplace",
        )
    else:
        parser.add_argument(
            "--mechanism", default="laplace", choices=cal.MECHANISM_KINDS
        )
    parser.add_argument("--out", default=None, help="directory for output files")
    parser.add_argument("--format", default="csv", choices=("csv", "json"))
    parser.add_argument("--tol", type=float, default=1e-9, help="solver relative tolerance")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("PUFFERCAL_JOBS", "1")),
        help="worker pool size for grid evaluation (env PUFFERCAL_JOBS)",
    )
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("PUFFERCAL_DATA_DIR", "data"),
        help="directory holding fetched dataset files (env PUFFERCAL_DATA_DIR)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="puffercal",
        description="Calibrate and verify additive-noise mechanisms for "
        "order-alpha pufferfish privacy budgets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cal = sub.add_parser("calibrate", help="solve noise parameters over a grid")
    _add_common_arguments(p_cal, multi_mechanism=True)
    p_cal.add_argument("--verify", action="store_true", help="re-verify every emitted parameter")
    p_cal.set_defaults(handler=cmd_calibrate)

    p_ver = sub.add_parser("verify", help="check the divergence bound per pair")
    _add_common_arguments(p_ver, multi_mechanism=False)
    p_ver.add_argument("--parameter", type=float, default=None, help="noise parameter; calibrated in-run when omitted")
    p_ver.set_defaults(handler=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="emit per-mechanism plot-data files")
    _add_common_arguments(p_sweep, multi_mechanism=True)
    p_sweep.add_argument("--verify", action="store_true", help="re-verify every emitted parameter")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_breach = sub.add_parser("breach", help="Monte-Carlo breach probability estimate")
    _add_common_arguments(p_breach, multi_mechanism=False)
    p_breach.add_argument("--parameter", type=float, default=None, help="noise parameter; calibrated in-run when omitted")
    p_breach.add_argument("--n", type=int, default=100000, help="Monte-Carlo sample count (>= 1000)")
    p_breach.set_defaults(handler=cmd_breach)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _SolverCellError as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER
    except _SOLVER_ERRORS as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER
    except (_ConfigError, *_CONFIG_ERRORS) as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except PuffercalError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
