"""CSV renderings of sweeps, plans and equilibrium reports.

Every file starts with a ``# run:`` comment echoing the resolved run
configuration; readers skip it with ``pandas.read_csv(..., comment="#")``.
"""

import logging
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from app.core.config import settings
from app.models import (
    BatchRealization,
    EquilibriumReport,
    FrontierSweep,
    RunConfig,
    ShiftPlan,
)

logger = logging.getLogger(__name__)


def _columns(prefix: str, n: int) -> list[str]:
    return [f"{prefix}_{i}" for i in range(1, n + 1)]


def frontier_frame(sweep: FrontierSweep) -> pd.DataFrame:
    if not sweep.points:
        return pd.DataFrame(columns=["cert_residual"])
    n = len(sweep.points[0].x)
    rows = [
        [*p.m, *p.x, *p.payoffs, p.cert_residual] for p in sweep.points
    ]
    return pd.DataFrame(
        rows, columns=[*_columns("m", n), *_columns("x", n), *_columns("U", n), "cert_residual"]
    )


def _plan_row(plan: ShiftPlan) -> list[object]:
    return [
        *plan.x_p,
        *plan.c,
        plan.eps,
        plan.theta,
        plan.residual_max,
        *plan.verification.oracle_argmax,
        plan.verification.verdict.value,
    ]


def _plan_columns(n: int) -> list[str]:
    return [
        *_columns("x_p", n),
        *_columns("c", n),
        "eps",
        "theta",
        "residual_max",
        *_columns("argmax", n),
        "verdict",
    ]


def plan_frame(plans: Sequence[ShiftPlan]) -> pd.DataFrame:
    n = len(plans[0].x_p) if plans else 0
    return pd.DataFrame([_plan_row(p) for p in plans], columns=_plan_columns(n))


def batch_frame(batch: BatchRealization, n: int) -> pd.DataFrame:
    """One row per swept point in sweep order; failed rows keep x_p and the error."""
    width = len(_plan_columns(n))
    rows: list[tuple[int, list[object], str]] = [
        (index, _plan_row(plan), "") for index, plan in _indexed_plans(batch)
    ]
    for failure in batch.failures:
        row: list[object] = [*failure.x_p, *[None] * (width - n - 1), "failed"]
        rows.append((failure.index, row, failure.error))
    rows.sort(key=lambda r: r[0])
    frame = pd.DataFrame([r[1] for r in rows], columns=_plan_columns(n))
    frame.insert(0, "row", [r[0] + 1 for r in rows])
    frame["error"] = [r[2] for r in rows]
    return frame


def _indexed_plans(batch: BatchRealization) -> list[tuple[int, ShiftPlan]]:
    failed = {f.index for f in batch.failures}
    indices = [i for i in range(batch.total) if i not in failed]
    return list(zip(indices, batch.plans))


def report_frame(report: EquilibriumReport) -> pd.DataFrame:
    n = len(report.x)
    return pd.DataFrame(
        {
            "player": range(1, n + 1),
            "x": report.x,
            "payoff": report.payoffs,
            "residual": report.residuals,
            "oracle_argmax": report.oracle_argmax,
        }
    )


def report_summary(report: EquilibriumReport) -> str:
    digits = settings.CSV_SIGNIFICANT_DIGITS
    return (
        f"summary: kind={report.kind.value} verdict={report.verdict.value} "
        f"max_residual={report.max_residual:.{digits}g} iterations={report.iterations}"
    )


def to_csv_text(
    frame: pd.DataFrame,
    run: RunConfig | None = None,
    footer: Sequence[str] = (),
) -> str:
    """Render at a fixed number of significant digits with ``\\n`` line endings."""
    # the output path is left out so reruns into other files stay byte-identical
    head = ""
    if run is not None:
        head = f"# run: {run.model_dump_json(exclude={'out'}, exclude_none=True)}\n"
    body = frame.to_csv(
        index=False,
        float_format=f"%.{settings.CSV_SIGNIFICANT_DIGITS}g",
        lineterminator="\n",
    )
    tail = "".join(f"# {line}\n" for line in footer)
    return head + body + tail


def write_csv(text: str, out: str | Path) -> Path:
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    logger.info("Wrote %s", path)
    return path
