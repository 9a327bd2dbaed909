"""Versioned report documents for estimation runs and simulation studies.

A report is a plain-data tree (dicts, lists, strings, numbers, None) so
that JSON emission is deterministic and ``from_json(to_json(doc))`` equals
the original document.  The text rendering is produced from the same tree,
which guarantees every number shown in text is present in the JSON at full
precision.  Timestamps come from an injectable clock so test runs can pin
them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone

import numpy as np

from .errors import InvalidInputError, NoHedgeNeeded
from .ratios import strategy_for

__all__ = [
    "SCHEMA_VERSION",
    "FIXED_CLOCK",
    "ReportDocument",
    "build_estimate_report",
    "build_study_report",
    "build_lag_report",
    "build_test_report",
    "render_text",
]

SCHEMA_VERSION = "1"
FIXED_CLOCK = "1970-01-01T00:00:00Z"

RATIO_DECIMALS = 6

_SECTION_ORDER = (
    "schema_version",
    "generated_at",
    "title",
    "config",
    "data",
    "pretest",
    "path",
    "lag_selection",
    "estimates",
    "wald",
    "significance",
    "strategy",
    "diagnostics",
    "series",
    "study",
    "reference",
    "notes",
)


def current_clock() -> str:
    """UTC timestamp in the report's ISO format."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _check_p_values(node, where: str) -> None:
    if isinstance(node, dict):
        for key, value in node.items():
            if key == "p_value" and isinstance(value, (int, float)):
                if not 0.0 <= float(value) <= 1.0:
                    raise InvalidInputError(
                        f"p-value {value} outside [0, 1] in report section {where}"
                    )
            _check_p_values(value, where if not isinstance(value, dict) else key)
    elif isinstance(node, (list, tuple)):
        for item in node:
            _check_p_values(item, where)


@dataclass
class ReportDocument:
    """One run's results as a JSON-ready tree.

    Sections that do not apply to a given run are None and are omitted
    from the emitted JSON.  Every ``p_value`` anywhere in the tree must
    lie in [0, 1].
    """

    generated_at: str
    title: str
    config: dict
    data: dict | None = None
    pretest: dict | None = None
    path: dict | None = None
    lag_selection: dict | None = None
    estimates: dict | None = None
    wald: dict | None = None
    significance: dict | None = None
    strategy: dict | None = None
    diagnostics: dict | None = None
    series: dict | None = None
    study: dict | None = None
    reference: dict | None = None
    notes: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self):
        for f in fields(self):
            _check_p_values(getattr(self, f.name), f.name)

    def to_json(self) -> str:
        obj = {}
        for key in _SECTION_ORDER:
            value = getattr(self, key)
            if value is None:
                continue
            if key == "notes" and not value:
                continue
            obj[key] = value
        return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        obj = json.loads(text)
        if not isinstance(obj, dict):
            raise InvalidInputError("report JSON must be an object")
        version = obj.get("schema_version")
        if version != SCHEMA_VERSION:
            raise InvalidInputError(
                f"unsupported report schema_version {version!r}, expected {SCHEMA_VERSION!r}"
            )
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise InvalidInputError(f"unknown report sections {sorted(unknown)}")
        kwargs = {key: obj[key] for key in obj}
        return cls(**kwargs)


def _py(value):
    """Recursively convert numpy scalars/arrays to plain Python."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_py(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _py(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_py(v) for v in value]
    return value


def _orders_record(orders) -> dict:
    return {
        "k_pos": orders.k_pos,
        "q_pos": orders.q_pos,
        "k_neg": orders.k_neg,
        "q_neg": orders.q_neg,
        "k_cross": orders.k_cross,
        "q_cross": orders.q_cross,
    }


def _strategy_entry(ratio_name: str, h: float, asset_position: str) -> dict:
    entry = {
        "asset_position": asset_position,
        "ratio_used": ratio_name,
        "ratio": float(h),
    }
    try:
        strat = strategy_for(h, asset_position)
        entry["futures_position"] = strat.futures_position
        entry["futures_per_unit_asset"] = abs(float(h))
    except NoHedgeNeeded as exc:
        entry["futures_position"] = "none"
        entry["note"] = str(exc)
    return entry


def _estimates_table(outcome) -> list[dict]:
    rows = []
    est = outcome.estimation
    if est is not None:
        mean_names = {"alpha_pos", "h_pos", "alpha_neg", "h_neg"}
        for i, name in enumerate(est.param_names):
            se = None if est.se is None else float(est.se[i])
            row = {"name": name, "estimate": float(est.param_vector[i]), "se": se}
            if name in mean_names and se is not None and se > 0:
                z = row["estimate"] / se
                row["z"] = z
                row["p_value"] = _two_sided_p(z)
            else:
                row["z"] = None
                row["p_value"] = None
            rows.append(row)
        return rows
    order = (
        ("alpha_pos", outcome.estimate_pos.alpha, 0),
        ("h_pos", outcome.estimate_pos.h, 1),
        ("alpha_neg", outcome.estimate_neg.alpha, 2),
        ("h_neg", outcome.estimate_neg.h, 3),
    )
    coef_cov = outcome.sure_coefficient_cov
    for name, value, idx in order:
        se = None if coef_cov is None else float(np.sqrt(coef_cov[idx, idx]))
        row = {"name": name, "estimate": float(value), "se": se}
        if se is not None and se > 0:
            z = row["estimate"] / se
            row["z"] = z
            row["p_value"] = _two_sided_p(z)
        else:
            row["z"] = None
            row["p_value"] = None
        rows.append(row)
    return rows


def _two_sided_p(z: float) -> float:
    from scipy import stats

    return float(stats.chi2.sf(z * z, df=1))


def build_estimate_report(
    outcome,
    config_record: dict,
    data_record: dict,
    alpha: float = 0.05,
    pretest_alpha: float = 0.05,
    reference: dict | None = None,
    series: dict | None = None,
    extra_diagnostics: dict | None = None,
    notes: list[str] | None = None,
    clock: str | None = None,
) -> ReportDocument:
    """Assemble the full estimation report from a pipeline outcome.

    ``alpha`` is the significance level gating the strategy section;
    ``reference`` optionally holds published estimates to display next to
    the fitted ones.  ``clock`` overrides the timestamp (fixed-clock mode).
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"significance level must be inside (0, 1), got {alpha}")

    pretest = {
        "test": "multivariate ARCH LM",
        "note": (
            "LM stand-in: each squared/cross residual regressed on a constant "
            "and its joint lags; statistic sums n R^2 over the three equations"
        ),
        "lags": outcome.arch_test.lags_used,
        "statistic": float(outcome.arch_test.statistic),
        "dof": int(outcome.arch_test.dof),
        "p_value": float(outcome.arch_test.p_value),
        "alpha": float(pretest_alpha),
        "reject_homoskedasticity": bool(outcome.arch_test.p_value < pretest_alpha),
    }

    path = {
        "estimator": outcome.path,
        "forced": bool(outcome.forced),
    }
    if outcome.path_warning:
        path["warning"] = outcome.path_warning

    lag_selection = None
    if outcome.lag_selection is not None:
        sel = outcome.lag_selection
        lag_selection = {
            "criterion": sel.criterion,
            "chosen": _orders_record(sel.chosen),
            "table": [
                {
                    "orders": _orders_record(cand.orders),
                    "loglik": None if cand.loglik is None else float(cand.loglik),
                    "n_params": int(cand.n_params),
                    "value": None if cand.value is None else float(cand.value),
                    "converged": bool(cand.converged),
                    "error": cand.error,
                }
                for cand in sel.table
            ],
        }

    est = outcome.estimation
    h_pos = float(outcome.estimate_pos.h)
    h_neg = float(outcome.estimate_neg.h)
    estimates = {
        "method": outcome.path,
        "n_obs": int(outcome.n_obs),
        "distribution": None if est is None else est.dist,
        "loglik": None if est is None else float(est.loglik),
        "h_pos": h_pos,
        "h_neg": h_neg,
        "ratio_neg_over_pos": None if h_pos == 0.0 else h_neg / h_pos,
        "table": _estimates_table(outcome),
    }
    if est is not None:
        estimates["orders"] = _orders_record(est.orders)

    wald = {
        "restriction": outcome.wald.restriction,
        "statistic": float(outcome.wald.statistic),
        "dof": int(outcome.wald.dof),
        "p_value": float(outcome.wald.p_value),
        "estimate_diff": float(outcome.wald.estimate_diff),
        "se_diff": float(outcome.wald.se_diff),
        "rejected": [
            {"level": level, "rejected": bool(outcome.wald.p_value < level)}
            for level in (0.10, 0.05, 0.01)
        ],
    }

    sig_pos = outcome.significance_pos
    sig_neg = outcome.significance_neg
    significance = {
        "alpha": float(alpha),
        "h_pos": {
            "statistic": float(sig_pos[0]),
            "dof": 1,
            "p_value": float(sig_pos[1]),
            "significant": bool(sig_pos[1] < alpha),
        },
        "h_neg": {
            "statistic": float(sig_neg[0]),
            "dof": 1,
            "p_value": float(sig_neg[1]),
            "significant": bool(sig_neg[1] < alpha),
        },
    }

    strategy = None
    notes = list(notes or [])
    if sig_pos[1] < alpha and sig_neg[1] < alpha:
        strategy = {
            "alpha": float(alpha),
            "long_asset": _strategy_entry("h_neg", h_neg, "long"),
            "short_asset": _strategy_entry("h_pos", h_pos, "short"),
        }
    else:
        notes.append(
            "strategy section omitted: at least one component ratio is not "
            f"significant at the {alpha:g} level"
        )

    if est is not None:
        cov_basis = "observed information (inverse Hessian)"
    else:
        cov_basis = "feasible GLS coefficient covariance"
    diagnostics = {
        "covariance": f"{cov_basis}; sandwich (robust) errors are future work",
    }
    if est is not None:
        diagnostics.update(
            {
                "converged": bool(est.converged),
                "iterations": int(est.iterations),
                "gradient_norm": float(est.gradient_norm),
                "pd_violations": int(est.pd_violations),
                "data_scale": float(est.scale),
            }
        )
    if extra_diagnostics:
        diagnostics.update(_py(extra_diagnostics))

    return ReportDocument(
        generated_at=clock if clock is not None else current_clock(),
        title="Asymmetric hedge ratio estimation",
        config=_py(config_record),
        data=_py(data_record),
        pretest=pretest,
        path=path,
        lag_selection=lag_selection,
        estimates=_py(estimates),
        wald=wald,
        significance=significance,
        strategy=strategy,
        diagnostics=diagnostics,
        series=_py(series) if series else None,
        reference=_py(reference) if reference else None,
        notes=notes,
    )


def build_study_report(
    result,
    config_record: dict,
    truth_record: dict,
    clock: str | None = None,
    notes: list[str] | None = None,
) -> ReportDocument:
    """Wrap a simulation study result in the shared report envelope."""
    study = {
        "replications": int(result.replications),
        "completed": int(result.completed),
        "failures": list(result.failures),
        "rejection_rate": {f"{level:g}": float(rate) for level, rate in result.rejection_rate.items()},
        "bias": {k: float(v) for k, v in result.bias.items()},
        "rmse": {k: float(v) for k, v in result.rmse.items()},
        "mean_estimate": {k: float(v) for k, v in result.mean_estimate.items()},
        "estimate_sd": {k: float(v) for k, v in result.estimate_sd.items()},
        "path_counts": dict(result.path_counts),
        "redraw_total": int(result.redraw_total),
        "truth": _py(truth_record),
        "rng": "numpy PCG64 (default_rng), per-replication streams seeded by (seed, replication)",
    }
    return ReportDocument(
        generated_at=clock if clock is not None else current_clock(),
        title="Simulation study",
        config=_py(config_record),
        study=study,
        notes=list(notes or []),
    )


def build_lag_report(
    selection,
    config_record: dict,
    data_record: dict,
    clock: str | None = None,
) -> ReportDocument:
    """Report holding only the lag-selection table."""
    lag_selection = {
        "criterion": selection.criterion,
        "chosen": _orders_record(selection.chosen),
        "table": [
            {
                "orders": _orders_record(cand.orders),
                "loglik": None if cand.loglik is None else float(cand.loglik),
                "n_params": int(cand.n_params),
                "value": None if cand.value is None else float(cand.value),
                "converged": bool(cand.converged),
                "error": cand.error,
            }
            for cand in selection.table
        ],
    }
    return ReportDocument(
        generated_at=clock if clock is not None else current_clock(),
        title="Lag order selection",
        config=_py(config_record),
        data=_py(data_record),
        lag_selection=lag_selection,
    )


def build_test_report(
    config_record: dict,
    data_record: dict,
    arch_test=None,
    wald=None,
    pretest_alpha: float = 0.05,
    clock: str | None = None,
) -> ReportDocument:
    """Report for standalone diagnostics on precomputed residuals."""
    pretest = None
    if arch_test is not None:
        pretest = {
            "test": "multivariate ARCH LM",
            "note": (
                "LM stand-in: each squared/cross residual regressed on a constant "
                "and its joint lags; statistic sums n R^2 over the three equations"
            ),
            "lags": arch_test.lags_used,
            "statistic": float(arch_test.statistic),
            "dof": int(arch_test.dof),
            "p_value": float(arch_test.p_value),
            "alpha": float(pretest_alpha),
            "reject_homoskedasticity": bool(arch_test.p_value < pretest_alpha),
        }
    wald_section = None
    if wald is not None:
        wald_section = {
            "restriction": wald.restriction,
            "statistic": float(wald.statistic),
            "dof": int(wald.dof),
            "p_value": float(wald.p_value),
            "estimate_diff": float(wald.estimate_diff),
            "se_diff": float(wald.se_diff),
            "rejected": [
                {"level": level, "rejected": bool(wald.p_value < level)}
                for level in (0.10, 0.05, 0.01)
            ],
        }
    return ReportDocument(
        generated_at=clock if clock is not None else current_clock(),
        title="Diagnostics",
        config=_py(config_record),
        data=_py(data_record),
        pretest=pretest,
        wald=wald_section,
    )


def _fmt_ratio(value) -> str:
    if value is None:
        return "-"
    return f"{value:.{RATIO_DECIMALS}f}"


def _fmt_num(value) -> str:
    if value is None:
        return "-"
    return f"{value:.6g}"


def _orders_str(rec: dict) -> str:
    return (
        f"pos ({rec['k_pos']},{rec['q_pos']}) "
        f"neg ({rec['k_neg']},{rec['q_neg']}) "
        f"cross ({rec['k_cross']},{rec['q_cross']})"
    )


def _rule(title: str) -> list[str]:
    return [title, "-" * len(title)]


def render_text(doc: ReportDocument) -> str:
    """Human-readable rendering of the exact values stored in the document."""
    lines: list[str] = [doc.title, "=" * len(doc.title)]
    lines.append(f"generated: {doc.generated_at} (schema {doc.schema_version})")
    lines.append("")

    if doc.data:
        lines += _rule("Data")
        for key, value in doc.data.items():
            lines.append(f"{key}: {value}")
        lines.append("")

    if doc.pretest:
        p = doc.pretest
        lines += _rule(f"Heteroskedasticity pre-test ({p['test']}, lags={p['lags']})")
        lines.append(
            f"statistic {_fmt_num(p['statistic'])}  dof {p['dof']}  p-value {_fmt_num(p['p_value'])}"
        )
        decision = "rejected" if p["reject_homoskedasticity"] else "not rejected"
        lines.append(f"homoskedasticity {decision} at level {_fmt_num(p['alpha'])}")
        lines.append(f"note: {p['note']}")
        lines.append("")

    if doc.path:
        forced = " (forced)" if doc.path.get("forced") else ""
        lines.append(f"estimation path: {doc.path['estimator']}{forced}")
        if "warning" in doc.path:
            lines.append(f"warning: {doc.path['warning']}")
        lines.append("")

    if doc.lag_selection:
        sel = doc.lag_selection
        lines += _rule(f"Lag selection ({sel['criterion']})")
        lines.append(f"chosen: {_orders_str(sel['chosen'])}")
        for cand in sel["table"]:
            status = "ok" if cand["converged"] else f"failed ({cand['error'] or 'not converged'})"
            lines.append(
                f"  {_orders_str(cand['orders'])}: value {_fmt_num(cand['value'])} "
                f"loglik {_fmt_num(cand['loglik'])} params {cand['n_params']} [{status}]"
            )
        lines.append("")

    if doc.estimates:
        est = doc.estimates
        header = f"Estimates ({est['method']}, T={est['n_obs']}"
        if est.get("distribution"):
            header += f", {est['distribution']}"
        header += ")"
        lines += _rule(header)
        if est.get("loglik") is not None:
            lines.append(f"log-likelihood: {_fmt_num(est['loglik'])}")
        if est.get("orders"):
            lines.append(f"orders: {_orders_str(est['orders'])}")
        lines.append(f"{'parameter':<16}{'estimate':>14}{'se':>13}{'z':>12}{'p-value':>14}")
        for row in est["table"]:
            lines.append(
                f"{row['name']:<16}"
                f"{_fmt_ratio(row['estimate']):>14}"
                f"{_fmt_num(row['se']):>13}"
                f"{_fmt_num(row['z']):>12}"
                f"{_fmt_num(row['p_value']):>14}"
            )
        lines.append(
            f"h_pos {_fmt_ratio(est['h_pos'])}  h_neg {_fmt_ratio(est['h_neg'])}"
            + (
                f"  h_neg/h_pos {_fmt_num(est['ratio_neg_over_pos'])}"
                if est.get("ratio_neg_over_pos") is not None
                else ""
            )
        )
        lines.append("")

    if doc.wald:
        w = doc.wald
        lines += _rule(f"Symmetry test (Wald, H0: {w['restriction']})")
        lines.append(
            f"statistic {_fmt_num(w['statistic'])}  dof {w['dof']}  p-value {_fmt_num(w['p_value'])}"
        )
        lines.append(
            f"difference {_fmt_ratio(w['estimate_diff'])}  se {_fmt_num(w['se_diff'])}"
        )
        for entry in w["rejected"]:
            decision = "rejected" if entry["rejected"] else "not rejected"
            lines.append(f"  at level {_fmt_num(entry['level'])}: {decision}")
        if not any(entry["rejected"] for entry in w["rejected"]):
            lines.append("a common hedge ratio for both components is adequate")
        lines.append("")

    if doc.significance:
        s = doc.significance
        lines += _rule(f"Individual significance (chi-square(1), alpha={_fmt_num(s['alpha'])})")
        for name in ("h_pos", "h_neg"):
            entry = s[name]
            verdict = "significant" if entry["significant"] else "not significant"
            lines.append(
                f"{name}: statistic {_fmt_num(entry['statistic'])} "
                f"p-value {_fmt_num(entry['p_value'])} [{verdict}]"
            )
        lines.append("")

    if doc.strategy:
        st = doc.strategy
        lines += _rule(f"Hedging strategy (ratios significant at {_fmt_num(st['alpha'])})")
        for key, label in (("long_asset", "long the asset"), ("short_asset", "short the asset")):
            entry = st[key]
            if entry["futures_position"] == "none":
                lines.append(f"{label}: no futures hedge needed ({entry['note']})")
            else:
                lines.append(
                    f"{label}: take a {entry['futures_position']} futures position, "
                    f"{_fmt_ratio(entry['futures_per_unit_asset'])} futures per unit "
                    f"of the asset (uses {entry['ratio_used']} = {_fmt_ratio(entry['ratio'])})"
                )
        lines.append("")

    if doc.study:
        st = doc.study
        lines += _rule("Simulation study")
        lines.append(
            f"replications {st['replications']} completed {st['completed']} "
            f"failed {len(st['failures'])}"
        )
        for msg in st["failures"]:
            lines.append(f"  failed {msg}")
        lines.append("rejection rates:")
        for level, rate in st["rejection_rate"].items():
            lines.append(f"  level {level}: {_fmt_num(rate)}")
        lines.append(f"{'parameter':<12}{'mean':>14}{'sd':>14}{'bias':>14}{'rmse':>14}")
        for name in st["mean_estimate"]:
            lines.append(
                f"{name:<12}"
                f"{_fmt_num(st['mean_estimate'][name]):>14}"
                f"{_fmt_num(st['estimate_sd'][name]):>14}"
                f"{_fmt_num(st['bias'][name]):>14}"
                f"{_fmt_num(st['rmse'][name]):>14}"
            )
        lines.append(f"paths: {st['path_counts']}")
        lines.append(f"sign-violation redraws: {st['redraw_total']}")
        lines.append(f"rng: {st['rng']}")
        lines.append("")

    if doc.diagnostics:
        lines += _rule("Diagnostics")
        for key, value in doc.diagnostics.items():
            lines.append(f"{key}: {value}")
        lines.append("")

    if doc.reference:
        ref = doc.reference
        lines += _rule("Published reference comparison")
        if "label" in ref:
            lines.append(ref["label"])
        for key in ("h_pos", "h_neg"):
            if key in ref:
                fitted = None if doc.estimates is None else doc.estimates.get(key)
                line = f"{key}: published {_fmt_ratio(ref[key])}"
                if fitted is not None:
                    line += f"  fitted {_fmt_ratio(fitted)}"
                lines.append(line)
        if "wald_p" in ref:
            lines.append(f"published symmetry-test p-value: {ref['wald_p']}")
        if "disclaimer" in ref:
            lines.append(ref["disclaimer"])
        lines.append("")

    if doc.notes:
        lines += _rule("Notes")
        for note in doc.notes:
            lines.append(f"- {note}")
        lines.append("")

    return "\n".join(lines).rstrip() + "\n"
