"""Resumable parameter sweeps and JSON-lines / CSV result files."""

import csv
import json
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

from pydantic import ValidationError

from src.models.decoding import DecoderConfig
from src.models.estimate import CSV_COLUMNS, EstimateRecord, EstimationMethod, RunSpec, point_key
from src.services.estimation import estimate_P, estimate_P_stratified
from src.services.lattice import build_geometry
from src.utils.errors import HdrgError, SweepError
from src.utils.logging import generate_run_id, get_run_id, get_structured_logger, run_context

logger = get_structured_logger(__name__)

PathLike = Union[str, Path]


def read_records(path: PathLike) -> list[EstimateRecord]:
    """Load records from a JSON-lines file; unparseable lines are skipped with a warning."""
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(EstimateRecord.model_validate_json(line))
            except ValidationError as e:
                logger.warning("Skipping malformed record", path=str(path), line=line_no, error=str(e))
    return records


def write_records(records: Iterable[EstimateRecord], path: PathLike, append: bool = False) -> int:
    """Write one JSON document per line; returns the number written."""
    count = 0
    with Path(path).open("a" if append else "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.model_dump_json() + "\n")
            count += 1
    return count


def export_csv(records: Iterable[EstimateRecord], out: Union[PathLike, IO[str]]) -> None:
    """CSV with the fixed column order L, p, p_prime, q, variant, n, failures, P, ci_lo, ci_hi, seed."""
    if isinstance(out, (str, Path)):
        with Path(out).open("w", newline="", encoding="utf-8") as fh:
            export_csv(records, fh)
        return
    writer = csv.DictWriter(out, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(record.csv_row())


def _estimate_point(spec: RunSpec, L: int, rate: float, context: tuple[int, int]) -> EstimateRecord:
    geom = build_geometry(L)
    noise = spec.noise_at(rate)
    config = DecoderConfig(metric=spec.variant, count_operations=False)
    if spec.method == EstimationMethod.STRATIFIED:
        return estimate_P_stratified(
            geom, noise, config,
            budget=spec.stratified_budget, tail=spec.stratified_tail, context=context,
        )
    return estimate_P(
        geom, noise, config,
        target_failures=spec.target_failures, max_samples=spec.max_samples,
        context=context, workers=spec.workers,
    )


def run_sweep(
    spec: RunSpec,
    out_path: Optional[PathLike] = None,
    run_id: Optional[str] = None,
) -> Iterator[EstimateRecord]:
    """Estimate every (L, rate) point of the grid, yielding records in grid order.

    Point (i, j) uses context [i, j], so trial t draws from
    derive_stream(seed, [i, j, t]). Points already present in `out_path`
    (matched by record key) are yielded from the file instead of rerun; new
    records are appended as soon as they finish. A failure to persist one
    point is logged and does not stop the sweep; a failure to estimate one
    raises SweepError carrying the point key.

    Log lines are tagged with `run_id` (the caller's current run id, or a
    fresh one). It is bound only while a point is being estimated, so a
    partly consumed sweep leaves the caller's context untouched.
    """
    run_id = run_id or get_run_id() or generate_run_id()
    done = {r.key: r for r in read_records(out_path)} if out_path else {}
    with run_context(run_id):
        logger.info(
            "Sweep started",
            points=len(spec.L_values) * len(spec.p_values),
            resumed=len(done),
        )

    for i, L in enumerate(spec.L_values):
        for j, rate in enumerate(spec.p_values):
            noise = spec.noise_at(rate)
            key = point_key(L, noise.model, noise.p, noise.p_prime, noise.q,
                            spec.variant, spec.method, spec.seed)
            if key in done:
                logger.debug("Point already complete", key=key)
                yield done[key]
                continue

            with run_context(run_id):
                try:
                    record = _estimate_point(spec, L, rate, (i, j))
                except HdrgError as e:
                    logger.error("Sweep point failed", key=key, error=str(e))
                    raise SweepError(f"sweep point L={L}, rate={rate} failed: {e}", point_key=key) from e
                if out_path:
                    try:
                        write_records([record], out_path, append=True)
                    except OSError as e:
                        logger.error("Could not persist point", key=key, path=str(out_path), error=str(e))
            yield record

    with run_context(run_id):
        logger.info("Sweep finished")


def load_run_spec(path: PathLike) -> RunSpec:
    """Read a sweep config file (a JSON object with RunSpec field names)."""
    with Path(path).open(encoding="utf-8") as fh:
        return RunSpec.model_validate(json.load(fh))
