"""Plot-ready data tables: one row per plotted point, fixed column order."""

import csv
from typing import IO, Iterable, Optional, Sequence

from src.models.estimate import EstimateRecord, FitResult, VariantRatio

Row = dict[str, object]

CURVE_COLUMNS = ("L", "rate", "P", "ci_lo", "ci_hi")
LSTAR_COLUMNS = ("rate", "L_star", "P", "ci_lo", "ci_hi", "L_star_optimistic")
ALPHA_COLUMNS = ("rate", "alpha", "alpha_lo", "alpha_hi", "r_squared")
RATIO_COLUMNS = ("L", "ratio", "ci_lo", "ci_hi", "flagged")


def _curve_row(r: EstimateRecord) -> Row:
    return {"L": r.L, "rate": r.rate, "P": r.P, "ci_lo": r.ci_lo, "ci_hi": r.ci_hi}


def p_curves(records: Iterable[EstimateRecord]) -> list[Row]:
    """P against rate, one curve per L."""
    return [_curve_row(r) for r in sorted(records, key=lambda r: (r.L, r.rate))]


def l_curves(records: Iterable[EstimateRecord]) -> list[Row]:
    """P against L, one curve per rate."""
    return [_curve_row(r) for r in sorted(records, key=lambda r: (r.rate, r.L))]


def lstar_rows(results: Iterable[tuple[float, Optional[int], Sequence[EstimateRecord]]]) -> list[Row]:
    """One row per rate: L*, the interval of the L* point, and the optimistic L*.

    `L_star_optimistic` is the first measured L whose interval reaches
    below the rate, the smallest size the data cannot rule out.
    """
    rows = []
    for rate, L_star, records in sorted(results, key=lambda r: r[0]):
        at_star = next((r for r in records if r.L == L_star), None)
        optimistic = next((r.L for r in sorted(records, key=lambda r: r.L) if r.ci_lo < rate), None)
        rows.append({
            "rate": rate,
            "L_star": L_star,
            "P": at_star.P if at_star else None,
            "ci_lo": at_star.ci_lo if at_star else None,
            "ci_hi": at_star.ci_hi if at_star else None,
            "L_star_optimistic": optimistic,
        })
    return rows


def alpha_rows(fits: Iterable[FitResult]) -> list[Row]:
    rows = []
    for fit in sorted(fits, key=lambda f: f.rate):
        lo, hi = fit.alpha_ci if fit.alpha_ci else (None, None)
        rows.append({"rate": fit.rate, "alpha": fit.alpha, "alpha_lo": lo, "alpha_hi": hi,
                     "r_squared": fit.r_squared})
    return rows


def ratio_rows(ratios: Iterable[VariantRatio]) -> list[Row]:
    return [
        {"L": v.L, "ratio": v.ratio, "ci_lo": v.ci_lo, "ci_hi": v.ci_hi, "flagged": v.flagged}
        for v in sorted(ratios, key=lambda v: v.L)
    ]


def write_table(rows: Iterable[Row], columns: Sequence[str], out: IO[str]) -> None:
    writer = csv.DictWriter(out, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: ("" if row.get(c) is None else row[c]) for c in columns})
