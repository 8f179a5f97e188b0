"""Command-line entry point: `hdrg <subcommand> [flags]`.

Every subcommand prints one JSON document (or a CSV table with
--format csv) on stdout. Logs go to stderr. Exit codes: 0 success,
1 usage error, 2 runtime error.
"""

import argparse
import io
import json
import math
import sys
from collections import defaultdict
from typing import Any, Callable, Optional, Sequence

from pydantic import BaseModel, ValidationError

from src.models.cli import CliConfig, Command
from src.models.decoding import DecoderConfig, Metric
from src.models.estimate import EstimateRecord, EstimationMethod
from src.models.noise import NoiseModel
from src.services import tables
from src.services.decoder import decode_pattern
from src.services.estimation import compare_variants, estimate_P, estimate_P_stratified, find_L_star
from src.services.fitting import BETA_CANTOR, fit_alpha, fit_beta, threshold_scan
from src.services.lattice import anyons, build_geometry, pattern_to_ids, syndrome_of
from src.services.noise import cantor_pattern, derive_stream, expected_flip_fraction, sample
from src.services.oracle import oracle_report
from src.services.sweep import export_csv, load_run_spec, read_records, run_sweep
from src.utils.errors import HdrgError, InvalidFitPointError, SweepError
from src.utils.logging import get_structured_logger, run_context
from src.utils.logging_config import LoggingConfig

logger = get_structured_logger(__name__)

Payload = tuple[Any, Optional[Callable[[io.StringIO], None]]]


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    """'8', '8,16,24' or the inclusive range '3:11'."""
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}")


def _metric(text: str) -> str:
    value = text.upper()
    if value not in Metric.__members__:
        raise argparse.ArgumentTypeError(f"variant must be standard or shortcut, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = UsageErrorParser(add_help=False)
    common.add_argument("--L", dest="L_values", type=_int_list, help="lattice size(s): 8 | 8,16,24 | 3:11")
    common.add_argument("--p", dest="p_values", type=_float_list, help="i.i.d. flip rate(s)")
    common.add_argument("--p-prime", dest="p_prime_values", type=_float_list, help="correlated primary rate(s)")
    common.add_argument("--q", type=float, help="correlated neighbour probability")
    common.add_argument("--variant", type=_metric, help="standard | shortcut")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--target-failures", dest="target_failures", type=int)
    common.add_argument("--max-samples", dest="max_samples", type=int)
    common.add_argument("--out", help="also write the output to this path")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--threads", type=int, help="worker processes")
    common.add_argument("--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = UsageErrorParser(prog="hdrg", description="HDRG planar-code decoder toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(Command.DECODE.value, parents=[common], help="decode one pattern, print the trace")
    p.add_argument("--pattern", help="sampled | cantor:N | ids:1,2,3")
    p.add_argument("--row", type=int)
    p.add_argument("--start-col", dest="start_col", type=int)

    p = sub.add_parser(Command.SAMPLE.value, parents=[common], help="estimate P at one point")
    p.add_argument("--method", type=str.upper, choices=[m.value for m in EstimationMethod])

    p = sub.add_parser(Command.SWEEP.value, parents=[common], help="run a sweep config (resumable via --out)")
    p.add_argument("--config", dest="config_path", required=True)

    sub.add_parser(Command.LSTAR.value, parents=[common], help="smallest L with P < p")

    p = sub.add_parser(Command.FIT.value, parents=[common], help="beta or alpha fit of a results file")
    p.add_argument("fit_kind", choices=["beta", "alpha"])
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--beta", type=float, help="fixed beta for alpha fits")
    p.add_argument("--c", type=float, help="length scale for alpha fits")
    p.add_argument("--bootstrap", type=int, help="bootstrap resamples for the alpha interval")

    p = sub.add_parser(Command.THRESHOLD.value, parents=[common], help="threshold from curve crossings")
    p.add_argument("--in", dest="in_path", required=True)

    p = sub.add_parser(Command.ADVERSARIAL.value, parents=[common], help="failing cluster and both outcomes")
    p.add_argument("--level", type=int)
    p.add_argument("--row", type=int)
    p.add_argument("--start-col", dest="start_col", type=int)

    p = sub.add_parser(Command.ORACLE.value, parents=[common], help="exhaustive small-lattice reference")
    p.add_argument("--w-max", dest="w_max", type=int)

    p = sub.add_parser(Command.COMPARE.value, parents=[common], help="paired variant ratio per L")
    p.add_argument("--numerator", type=_metric)
    p.add_argument("--denominator", type=_metric)
    return parser


def _dump(model: BaseModel) -> Any:
    # non-finite floats become null
    return json.loads(model.model_dump_json())


def _records_csv(records: Sequence[EstimateRecord]) -> Callable[[io.StringIO], None]:
    return lambda out: export_csv(records, out)


def _table(rows: list[dict], columns: Sequence[str]) -> Callable[[io.StringIO], None]:
    return lambda out: tables.write_table(rows, columns, out)


def _effective_rate(cfg: CliConfig) -> float:
    noise = cfg.noise()
    if noise.model == NoiseModel.IID:
        return noise.p
    return expected_flip_fraction(noise.p_prime, noise.q)


def run_decode(cfg: CliConfig) -> Payload:
    geom = build_geometry(cfg.L)
    kind, _, arg = cfg.pattern.partition(":")
    if kind == "cantor":
        row = geom.L // 2 if cfg.row is None else cfg.row
        error, _ = cantor_pattern(geom, int(arg), row, cfg.start_col, validate=False)
    elif kind == "ids":
        error = geom.pattern(int(x) for x in arg.split(",") if x)
    else:
        error = sample(geom, cfg.noise(), derive_stream(cfg.seed))
    result, failed = decode_pattern(geom, error, DecoderConfig(metric=cfg.variant))
    payload = {
        "L": geom.L,
        "variant": cfg.variant.value,
        "pattern": cfg.pattern,
        "seed": cfg.seed,
        "error": pattern_to_ids(error),
        "anyons": [list(a) for a in anyons(geom, syndrome_of(geom, error))],
        "result": _dump(result),
        "failed": failed,
    }
    return payload, None


def run_sample(cfg: CliConfig) -> Payload:
    geom = build_geometry(cfg.L)
    config = DecoderConfig(metric=cfg.variant, count_operations=False)
    if cfg.method == EstimationMethod.STRATIFIED:
        record = estimate_P_stratified(geom, cfg.noise(), config)
    else:
        record = estimate_P(geom, cfg.noise(), config, cfg.target_failures, cfg.max_samples,
                            workers=cfg.threads)
    return {**_dump(record), "effective_p": _effective_rate(cfg)}, _records_csv([record])


def run_sweep_command(cfg: CliConfig) -> Payload:
    spec = load_run_spec(cfg.config_path)
    # flags given on the command line win over the config file
    update: dict[str, int] = {}
    if "seed" in cfg.model_fields_set:
        update["seed"] = cfg.seed
    if "threads" in cfg.model_fields_set:
        update["workers"] = cfg.threads
    spec = spec.model_copy(update=update)
    records = list(run_sweep(spec, out_path=cfg.out))
    return [_dump(r) for r in records], _records_csv(records)


def run_lstar(cfg: CliConfig) -> Payload:
    config = DecoderConfig(metric=cfg.variant, count_operations=False)
    L_values = cfg.L_values or list(range(2, 33))
    results = []
    records = []
    for rate in cfg.rates:
        L_star, found = find_L_star(cfg.noise(rate), config, L_values, cfg.target_failures,
                                    cfg.max_samples, workers=cfg.threads)
        results.append((rate, L_star, found))
        records.extend(found)
    payload = {
        "results": tables.lstar_rows(results),
        "records": [_dump(r) for r in records],
    }
    return payload, _table(tables.lstar_rows(results), tables.LSTAR_COLUMNS)


def _load_for_fit(cfg: CliConfig) -> list[EstimateRecord]:
    records = [r for r in read_records(cfg.in_path) if r.variant == cfg.variant]
    if cfg.L_values:
        records = [r for r in records if r.L in cfg.L_values]
    if cfg.rates:
        records = [r for r in records if any(math.isclose(r.rate, x) for x in cfg.rates)]
    return records


def run_fit(cfg: CliConfig) -> Payload:
    by_rate: dict[float, list[EstimateRecord]] = defaultdict(list)
    for record in _load_for_fit(cfg):
        by_rate[record.rate].append(record)

    fits = []
    for rate in sorted(by_rate):
        points = sorted(by_rate[rate], key=lambda r: r.L)
        try:
            if cfg.fit_kind == "beta":
                fits.append(fit_beta(points))
            else:
                fits.append(fit_alpha(points, cfg.beta or BETA_CANTOR, cfg.c, cfg.bootstrap, cfg.seed))
        except InvalidFitPointError as e:
            if len(cfg.rates) == 1:
                raise
            logger.warning("Skipping rate", rate=rate, reason=str(e))
    if not fits:
        raise InvalidFitPointError(f"no fittable records in {cfg.in_path}")

    payload = _dump(fits[0]) if len(fits) == 1 else [_dump(f) for f in fits]
    if cfg.fit_kind == "alpha":
        return payload, _table(tables.alpha_rows(fits), tables.ALPHA_COLUMNS)
    rows = [{"rate": f.rate, "beta": f.beta, "r_squared": f.r_squared} for f in fits]
    return payload, _table(rows, ("rate", "beta", "r_squared"))


def run_threshold(cfg: CliConfig) -> Payload:
    records = _load_for_fit(cfg)
    estimate = threshold_scan(records)
    return _dump(estimate), _table(tables.p_curves(records), tables.CURVE_COLUMNS)


def run_adversarial(cfg: CliConfig) -> Payload:
    geom = build_geometry(cfg.L)
    row = geom.L // 2 if cfg.row is None else cfg.row
    error, spec = cantor_pattern(geom, cfg.level, row, cfg.start_col, validate=cfg.level > 0)
    outcomes = {}
    for metric in Metric:
        result, failed = decode_pattern(geom, error, DecoderConfig(metric=metric))
        outcomes[metric.value] = {
            "failed": failed,
            "k_max": result.k_max,
            "pairings": [_dump(p) for p in result.pairings],
        }
    payload = {
        "L": geom.L,
        "spec": _dump(spec),
        "error": pattern_to_ids(error),
        "weight": int(error.sum()),
        "outcomes": outcomes,
    }
    return payload, None


def run_oracle(cfg: CliConfig) -> Payload:
    geom = build_geometry(cfg.L)
    report = oracle_report(geom, DecoderConfig(metric=cfg.variant), cfg.p_values, cfg.w_max,
                           workers=cfg.threads)
    rows = [{"p": p, "P": rate} for p, rate in zip(report.p_values, report.failure_rates)]
    return _dump(report), _table(rows, ("p", "P"))


def run_compare(cfg: CliConfig) -> Payload:
    ratios = compare_variants(cfg.L_values, cfg.noise(), cfg.target_failures, cfg.max_samples,
                              cfg.numerator, cfg.denominator, workers=cfg.threads)
    return [_dump(r) for r in ratios], _table(tables.ratio_rows(ratios), tables.RATIO_COLUMNS)


HANDLERS: dict[Command, Callable[[CliConfig], Payload]] = {
    Command.DECODE: run_decode,
    Command.SAMPLE: run_sample,
    Command.SWEEP: run_sweep_command,
    Command.LSTAR: run_lstar,
    Command.FIT: run_fit,
    Command.THRESHOLD: run_threshold,
    Command.ADVERSARIAL: run_adversarial,
    Command.ORACLE: run_oracle,
    Command.COMPARE: run_compare,
}


def _render(cfg: CliConfig, payload: Payload) -> str:
    document, csv_writer = payload
    if cfg.format == "csv":
        if csv_writer is None:
            raise ValueError(f"{cfg.command.value} has no CSV output")
        buffer = io.StringIO()
        csv_writer(buffer)
        return buffer.getvalue()
    return json.dumps(document, indent=2) + "\n"


def _fail(exc: BaseException) -> int:
    document = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SweepError) and exc.point_key:
        document["point_key"] = exc.point_key
    sys.stderr.write(json.dumps(document) + "\n")
    return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    LoggingConfig.setup_logging(args.log_level)
    try:
        cfg = CliConfig.model_validate({k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as e:
        return _fail(e)

    with run_context() as run_id:
        logger.info("Command started", command=cfg.command.value, cli_run_id=run_id)
        try:
            text = _render(cfg, HANDLERS[cfg.command](cfg))
            sys.stdout.write(text)
            if cfg.out and cfg.command != Command.SWEEP:
                cfg.out.write_text(text, encoding="utf-8")
        except (HdrgError, ValueError, IndexError, OSError) as e:
            logger.error("Command failed", command=cfg.command.value, error=str(e))
            return _fail(e)
    return 0


if __name__ == "__main__":
    sys.exit(main())
