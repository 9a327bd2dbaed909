"""Command-line tool: CSV ingestion, pipeline orchestration, report emission.

Subcommands: ``estimate`` (full pipeline on a price CSV), ``test``
(standalone diagnostics on precomputed residuals), ``simulate`` (Monte Carlo
studies with known ground truth), ``lags`` (information-criterion table
only).  Exit codes: 0 ok, 2 configuration, 3 data, 4 convergence,
5 internal.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .errors import (
    AsymHedgeError,
    ConfigError,
    InsufficientDataError,
    InvalidInputError,
)
from .garch import GarchSystemParams, LagOrders, filter_volatility, residuals
from .inference import (
    analyze_components,
    multivariate_arch_test,
    select_lags,
    wald_symmetry_test,
)
from .optimize import OptimizerConfig
from .report import (
    FIXED_CLOCK,
    ReportDocument,
    build_estimate_report,
    build_lag_report,
    build_study_report,
    build_test_report,
    render_text,
)
from .series import PriceSeries, first_difference, log_difference, split_components
from .sim import DgpSpec, run_study

__all__ = ["RunConfig", "ingest_csv", "run_pipeline", "main"]

DATA_DIR_ENV = "ASYMHEDGE_DATA_DIR"

_MIN_USABLE_ROWS = 30


@dataclass(frozen=True)
class RunConfig:
    """Everything one estimation run needs, validated up front."""

    input: str
    date_column: str = "date"
    spot_column: str = "spot"
    futures_column: str = "futures"
    date_format: str | None = None
    differencing: str = "levels"
    distribution: str = "student_t"
    criterion: str = "bic"
    max_lag: int = 2
    exhaustive: bool = False
    force_path: str = "auto"
    orders: tuple[int, ...] | None = None
    alpha: float = 0.05
    pretest_alpha: float = 0.05
    pretest_lags: int = 1
    seed: int = 0
    max_iterations: int = 500
    restarts: int = 3
    output_format: str = "text"
    output: str | None = None
    fixed_clock: bool = False
    reference_file: str | None = None

    def __post_init__(self):
        if not self.input:
            raise ConfigError("an input CSV path is required")
        for name in ("date_column", "spot_column", "futures_column"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a nonempty column name")
        _require_choice("differencing", self.differencing, ("levels", "logs"))
        _require_choice("distribution", self.distribution, ("gaussian", "student_t"))
        _require_choice("criterion", self.criterion, ("aic", "bic", "hqc"))
        _require_choice("force_path", self.force_path, ("auto", "sure", "mgarch"))
        _require_choice("output_format", self.output_format, ("text", "json"))
        for name in ("alpha", "pretest_alpha"):
            level = getattr(self, name)
            if not 0.0 < level < 1.0:
                raise ConfigError(f"{name} must be inside (0, 1), got {level}")
        if self.max_lag < 1:
            raise ConfigError(f"max_lag must be at least 1, got {self.max_lag}")
        if self.pretest_lags < 1:
            raise ConfigError(f"pretest_lags must be at least 1, got {self.pretest_lags}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be at least 1, got {self.restarts}")
        if self.orders is not None:
            orders = tuple(int(v) for v in self.orders)
            if len(orders) not in (2, 6) or any(v < 0 for v in orders):
                raise ConfigError(
                    "orders must be two values k,q (applied to all three recursions) "
                    f"or six values, nonnegative, got {self.orders}"
                )
            object.__setattr__(self, "orders", orders)

    def lag_orders(self) -> LagOrders | None:
        if self.orders is None:
            return None
        if len(self.orders) == 2:
            k, q = self.orders
            return LagOrders(k, q, k, q, k, q)
        return LagOrders(*self.orders)

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            max_iterations=self.max_iterations,
            restarts=self.restarts,
            seed=self.seed,
        )

    def record(self) -> dict:
        return {
            "input": self.input,
            "date_column": self.date_column,
            "spot_column": self.spot_column,
            "futures_column": self.futures_column,
            "date_format": self.date_format,
            "differencing": self.differencing,
            "distribution": self.distribution,
            "criterion": self.criterion,
            "max_lag": self.max_lag,
            "exhaustive": self.exhaustive,
            "force_path": self.force_path,
            "orders": None if self.orders is None else list(self.orders),
            "alpha": self.alpha,
            "pretest_alpha": self.pretest_alpha,
            "pretest_lags": self.pretest_lags,
            "seed": self.seed,
            "max_iterations": self.max_iterations,
            "restarts": self.restarts,
        }


def _require_choice(name: str, value: str, allowed: tuple[str, ...]) -> None:
    if value not in allowed:
        raise ConfigError(f"{name} must be one of {', '.join(allowed)}; got {value!r}")


def resolve_input(path: str) -> str:
    """Resolve a data path, falling back to the directory in ASYMHEDGE_DATA_DIR."""
    if os.path.exists(path):
        return path
    base = os.environ.get(DATA_DIR_ENV)
    if base:
        candidate = os.path.join(base, path)
        if os.path.exists(candidate):
            return candidate
    raise ConfigError(f"input file not found: {path}")


def _parse_date(raw: str, fmt: str | None):
    text = raw.strip()
    if not text:
        return None
    try:
        if fmt is None:
            value = np.datetime64(text)
        else:
            value = np.datetime64(datetime.strptime(text, fmt))
    except ValueError:
        return None
    return np.datetime64(value, "ns")


def _parse_price(raw) -> float | None:
    if raw is None:
        return None
    try:
        value = float(raw)
    except (TypeError, ValueError):
        return None
    if not np.isfinite(value):
        return None
    return value


def ingest_csv(path: str, config: RunConfig, min_rows: int = _MIN_USABLE_ROWS) -> tuple[PriceSeries, dict]:
    """Read (date, spot, futures) columns into a validated price series.

    Rows with missing or non-numeric fields are dropped and counted; the
    count travels with the returned record so reports can surface it.
    Duplicate dates are an error naming the date.  ``min_rows`` defaults to
    the floor estimation needs; callers that only want parsing can lower it
    to the price-series minimum of 3.
    """
    resolved = resolve_input(path)
    with open(resolved, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in (config.date_column, config.spot_column, config.futures_column):
            if column not in header:
                raise ConfigError(
                    f"column {column!r} not found in {resolved} (header: {', '.join(header)})"
                )
        timestamps = []
        spot = []
        futures = []
        rows_read = 0
        dropped = 0
        for row in reader:
            rows_read += 1
            date = _parse_date(row.get(config.date_column) or "", config.date_format)
            s = _parse_price(row.get(config.spot_column))
            f = _parse_price(row.get(config.futures_column))
            if date is None or s is None or f is None:
                dropped += 1
                continue
            timestamps.append(date)
            spot.append(s)
            futures.append(f)

    seen = set()
    for date in timestamps:
        if date in seen:
            raise InvalidInputError(f"duplicate date in {resolved}: {np.datetime_as_string(date, unit='D')}")
        seen.add(date)
    usable = len(timestamps)
    if usable < min_rows:
        raise InsufficientDataError(
            f"{resolved} has {usable} usable rows after dropping {dropped}; "
            f"need at least {min_rows}"
        )
    series = PriceSeries(
        timestamps=np.array(timestamps, dtype="datetime64[ns]"),
        spot=np.array(spot),
        futures=np.array(futures),
    )
    record = {
        "input": resolved,
        "rows_read": rows_read,
        "rows_dropped": dropped,
        "observations": usable,
        "date_start": np.datetime_as_string(series.timestamps[0], unit="D"),
        "date_end": np.datetime_as_string(series.timestamps[-1], unit="D"),
    }
    return series, record


def _load_reference(config: RunConfig, resolved_input: str) -> dict | None:
    """Explicit reference file, else a `<stem>_reference.json` sidecar."""
    path = config.reference_file
    if path is None:
        stem, _ = os.path.splitext(resolved_input)
        candidate = stem + "_reference.json"
        if not os.path.exists(candidate):
            return None
        path = candidate
    elif not os.path.exists(path):
        raise ConfigError(f"reference file not found: {path}")
    with open(path, encoding="utf-8") as handle:
        try:
            reference = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"reference file {path} is not valid JSON: {exc}") from exc
    if not isinstance(reference, dict):
        raise InvalidInputError(f"reference file {path} must hold a JSON object")
    return reference


def run_pipeline(config: RunConfig) -> ReportDocument:
    """Ingest, difference, split, pre-test, estimate, test, and report."""
    prices, data_record = ingest_csv(config.input, config)
    if config.differencing == "levels":
        returns = first_difference(prices)
    else:
        returns = log_difference(prices)
    components = split_components(returns)
    data_record["changes"] = len(returns)
    data_record["differencing"] = config.differencing

    outcome = analyze_components(
        components,
        force_path=config.force_path,
        pretest_lags=config.pretest_lags,
        pretest_alpha=config.pretest_alpha,
        orders=config.lag_orders(),
        max_lag=config.max_lag,
        criterion=config.criterion,
        dist=config.distribution,
        config=config.optimizer_config(),
        exhaustive=config.exhaustive,
    )

    series = None
    if outcome.estimation is not None:
        est = outcome.estimation
        u_pos, u_neg = residuals(est.params, components)
        filtered = filter_volatility(est.params, u_pos, u_neg)
        dates = [np.datetime_as_string(d, unit="D") for d in prices.timestamps[1:]]
        series = {
            "date": dates,
            "var_pos": [float(v) for v in filtered.var_pos],
            "var_neg": [float(v) for v in filtered.var_neg],
            "cov_cross": [float(v) for v in filtered.cov_cross],
        }

    reference = _load_reference(config, data_record["input"])
    return build_estimate_report(
        outcome,
        config_record=config.record(),
        data_record=data_record,
        alpha=config.alpha,
        pretest_alpha=config.pretest_alpha,
        reference=reference,
        series=series,
        clock=FIXED_CLOCK if config.fixed_clock else None,
    )


def _emit(doc: ReportDocument, output_format: str, output: str | None) -> None:
    text = doc.to_json() if output_format == "json" else render_text(doc)
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def _add_data_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="price CSV path")
    parser.add_argument("--date-column", default="date")
    parser.add_argument("--spot-column", default="spot")
    parser.add_argument("--futures-column", default="futures")
    parser.add_argument(
        "--date-format",
        default=None,
        help="strptime format for the date column (default ISO-8601)",
    )
    parser.add_argument("--differencing", choices=("levels", "logs"), default="levels")


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--distribution", choices=("gaussian", "student_t"), default="student_t")
    parser.add_argument("--criterion", choices=("aic", "bic", "hqc"), default="bic")
    parser.add_argument("--max-lag", type=int, default=2)
    parser.add_argument(
        "--exhaustive",
        action="store_true",
        help="cross the lag grid over the three recursions instead of tying them",
    )
    parser.add_argument(
        "--orders",
        default=None,
        help="pin lag orders: 'k,q' for all recursions or six values "
        "'k+,q+,k-,q-,kx,qx'; skips selection",
    )
    parser.add_argument("--max-iterations", type=int, default=500)
    parser.add_argument("--restarts", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)


def _add_output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--output", default=None, help="write the report here instead of stdout")
    parser.add_argument(
        "--fixed-clock",
        action="store_true",
        help="pin the report timestamp (for reproducible output)",
    )


def _parse_orders_flag(raw: str | None) -> tuple[int, ...] | None:
    if raw is None:
        return None
    try:
        values = tuple(int(part) for part in raw.split(","))
    except ValueError as exc:
        raise ConfigError(f"orders must be comma-separated integers, got {raw!r}") from exc
    return values


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input=args.input,
        date_column=args.date_column,
        spot_column=args.spot_column,
        futures_column=args.futures_column,
        date_format=args.date_format,
        differencing=args.differencing,
        distribution=args.distribution,
        criterion=args.criterion,
        max_lag=args.max_lag,
        exhaustive=args.exhaustive,
        force_path=getattr(args, "force_path", "auto"),
        orders=_parse_orders_flag(args.orders),
        alpha=getattr(args, "alpha", 0.05),
        pretest_alpha=getattr(args, "pretest_alpha", 0.05),
        pretest_lags=getattr(args, "pretest_lags", 1),
        seed=args.seed,
        max_iterations=args.max_iterations,
        restarts=args.restarts,
        output_format=args.format,
        output=args.output,
        fixed_clock=args.fixed_clock,
        reference_file=getattr(args, "reference_file", None),
    )


def _cmd_estimate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    doc = run_pipeline(config)
    _emit(doc, config.output_format, config.output)
    return 0


def _cmd_lags(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    prices, data_record = ingest_csv(config.input, config)
    returns = first_difference(prices) if config.differencing == "levels" else log_difference(prices)
    components = split_components(returns)
    data_record["changes"] = len(returns)
    data_record["differencing"] = config.differencing
    selection = select_lags(
        components,
        max_lag=config.max_lag,
        criterion=config.criterion,
        dist=config.distribution,
        config=config.optimizer_config(),
        exhaustive=config.exhaustive,
    )
    doc = build_lag_report(
        selection,
        config_record=config.record(),
        data_record=data_record,
        clock=FIXED_CLOCK if config.fixed_clock else None,
    )
    _emit(doc, config.output_format, config.output)
    return 0


def _read_residual_csv(path: str, u_pos_column: str, u_neg_column: str):
    resolved = resolve_input(path)
    u_pos = []
    u_neg = []
    with open(resolved, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in (u_pos_column, u_neg_column):
            if column not in header:
                raise ConfigError(f"column {column!r} not found in {resolved}")
        for row in reader:
            p = _parse_price(row.get(u_pos_column))
            n = _parse_price(row.get(u_neg_column))
            if p is None or n is None:
                raise InvalidInputError(f"non-numeric residual row in {resolved}")
            u_pos.append(p)
            u_neg.append(n)
    return np.array(u_pos), np.array(u_neg), resolved


def _cmd_test(args: argparse.Namespace) -> int:
    if args.residuals is None and args.wald is None:
        raise ConfigError("test needs --residuals and/or --wald")
    arch = None
    data_record: dict = {}
    if args.residuals is not None:
        u_pos, u_neg, resolved = _read_residual_csv(
            args.residuals, args.u_pos_column, args.u_neg_column
        )
        arch = multivariate_arch_test(u_pos, u_neg, lags=args.lags)
        data_record["residuals"] = resolved
        data_record["observations"] = len(u_pos)
    wald = None
    if args.wald is not None:
        parts = args.wald.split(",")
        if len(parts) != 5:
            raise ConfigError(
                "--wald needs five values: h_pos,h_neg,var_pos,var_neg,cov"
            )
        try:
            h_pos, h_neg, var_pos, var_neg, cov = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"--wald values must be numeric, got {args.wald!r}") from exc
        wald = wald_symmetry_test(h_pos, h_neg, np.array([[var_pos, cov], [cov, var_neg]]))
    config_record = {
        "residuals": args.residuals,
        "lags": args.lags,
        "pretest_alpha": args.pretest_alpha,
        "wald": args.wald,
    }
    doc = build_test_report(
        config_record=config_record,
        data_record=data_record,
        arch_test=arch,
        wald=wald,
        pretest_alpha=args.pretest_alpha,
        clock=FIXED_CLOCK if args.fixed_clock else None,
    )
    _emit(doc, args.format, args.output)
    return 0


def _parse_recursion_flag(name: str, raw: str) -> tuple[float, list[float], list[float]]:
    """'gamma' or 'gamma,phi,lambda' (one ARCH and one GARCH lag at most)."""
    parts = raw.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"--{name} values must be numeric, got {raw!r}") from exc
    if len(values) == 1:
        return values[0], [], []
    if len(values) == 3:
        return values[0], [values[1]], [values[2]]
    raise ConfigError(f"--{name} needs 'gamma' or 'gamma,phi,lambda', got {raw!r}")


def _cmd_simulate(args: argparse.Namespace) -> int:
    gamma_v, phi_v, lambda_v = _parse_recursion_flag("variance", args.variance)
    gamma_x, phi_x, lambda_x = _parse_recursion_flag("cross", args.cross)
    nu = args.nu if args.innovation == "student_t" else None
    truth = GarchSystemParams(
        alpha_pos=args.alpha_pos,
        h_pos=args.h_pos,
        alpha_neg=args.alpha_neg,
        h_neg=args.h_neg,
        gamma_pos=gamma_v,
        phi_pos=phi_v,
        lambda_pos=lambda_v,
        gamma_neg=gamma_v,
        phi_neg=phi_v,
        lambda_neg=lambda_v,
        gamma_cross=gamma_x,
        phi_cross=phi_x,
        lambda_cross=lambda_x,
        nu=nu,
    )
    spec = DgpSpec(
        true_params=truth,
        T=args.t,
        seed=args.seed,
        innovation=args.innovation,
    )
    result = run_study(
        spec,
        replications=args.replications,
        force_path=args.force_path,
        pretest_alpha=args.pretest_alpha,
    )
    config_record = {
        "T": args.t,
        "replications": args.replications,
        "innovation": args.innovation,
        "seed": args.seed,
        "force_path": args.force_path,
        "pretest_alpha": args.pretest_alpha,
    }
    truth_record = {
        "alpha_pos": truth.alpha_pos,
        "h_pos": truth.h_pos,
        "alpha_neg": truth.alpha_neg,
        "h_neg": truth.h_neg,
        "gamma_pos": truth.gamma_pos,
        "phi_pos": list(truth.phi_pos),
        "lambda_pos": list(truth.lambda_pos),
        "gamma_neg": truth.gamma_neg,
        "phi_neg": list(truth.phi_neg),
        "lambda_neg": list(truth.lambda_neg),
        "gamma_cross": truth.gamma_cross,
        "phi_cross": list(truth.phi_cross),
        "lambda_cross": list(truth.lambda_cross),
        "nu": truth.nu,
    }
    doc = build_study_report(
        result,
        config_record=config_record,
        truth_record=truth_record,
        clock=FIXED_CLOCK if args.fixed_clock else None,
    )
    _emit(doc, args.format, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymhedge",
        description=(
            "Estimate symmetric and position-dependent optimal hedge ratios "
            "from spot/futures price series and test ratio symmetry."
        ),
        epilog=f"Relative input paths also resolve against ${DATA_DIR_ENV} when set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run the full estimation pipeline on a price CSV")
    _add_data_arguments(p_est)
    _add_model_arguments(p_est)
    p_est.add_argument("--force-path", choices=("auto", "sure", "mgarch"), default="auto")
    p_est.add_argument("--alpha", type=float, default=0.05, help="significance level for the strategy section")
    p_est.add_argument("--pretest-alpha", type=float, default=0.05)
    p_est.add_argument("--pretest-lags", type=int, default=1)
    p_est.add_argument(
        "--reference-file",
        default=None,
        help="JSON with published estimates to display alongside "
        "(default: <input stem>_reference.json when present)",
    )
    _add_output_arguments(p_est)
    p_est.set_defaults(func=_cmd_estimate)

    p_lags = sub.add_parser("lags", help="information-criterion lag selection table only")
    _add_data_arguments(p_lags)
    _add_model_arguments(p_lags)
    _add_output_arguments(p_lags)
    p_lags.set_defaults(func=_cmd_lags)

    p_test = sub.add_parser("test", help="diagnostics on precomputed residuals")
    p_test.add_argument("--residuals", default=None, help="CSV of residual components")
    p_test.add_argument("--u-pos-column", default="u_pos")
    p_test.add_argument("--u-neg-column", default="u_neg")
    p_test.add_argument("--lags", type=int, default=1)
    p_test.add_argument("--pretest-alpha", type=float, default=0.05)
    p_test.add_argument(
        "--wald",
        default=None,
        help="standalone symmetry test from 'h_pos,h_neg,var_pos,var_neg,cov'",
    )
    _add_output_arguments(p_test)
    p_test.set_defaults(func=_cmd_test)

    p_sim = sub.add_parser("simulate", help="Monte Carlo size/power/recovery study")
    p_sim.add_argument("--t", type=int, default=1500, help="sample length per replication")
    p_sim.add_argument("--replications", type=int, default=500)
    p_sim.add_argument("--alpha-pos", type=float, default=0.08)
    p_sim.add_argument("--h-pos", type=float, default=0.5)
    p_sim.add_argument("--alpha-neg", type=float, default=-0.08)
    p_sim.add_argument("--h-neg", type=float, default=0.5)
    p_sim.add_argument(
        "--variance",
        default="1e-4",
        help="component variance recursion 'gamma' or 'gamma,phi,lambda' (both sides)",
    )
    p_sim.add_argument(
        "--cross",
        default="0",
        help="covariance recursion 'gamma' or 'gamma,phi,lambda'",
    )
    p_sim.add_argument("--innovation", choices=("gaussian", "student_t"), default="gaussian")
    p_sim.add_argument("--nu", type=float, default=8.0, help="degrees of freedom for t innovations")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--force-path", choices=("auto", "sure", "mgarch"), default="auto")
    p_sim.add_argument("--pretest-alpha", type=float, default=0.05)
    _add_output_arguments(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AsymHedgeError as exc:
        if exc.exit_code == 0:
            print(str(exc))
            return 0
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
