"""Error pattern generators: i.i.d., nearest-neighbour correlated, and failing Cantor clusters."""

from typing import Optional, Sequence

import numpy as np

from src.models.decoding import DecoderConfig, Metric
from src.models.noise import CantorSpec, NoiseConfig, NoiseModel
from src.services.decoder import decode_pattern
from src.services.lattice import CodeGeometry, ErrorPattern
from src.utils.errors import LatticeTooSmallError
from src.utils.logging import get_structured_logger

logger = get_structured_logger(__name__)

RandomStream = np.random.Generator


def derive_stream(master_seed: int, context: Sequence[int] = ()) -> RandomStream:
    """Counter-based stream keyed by (master seed, context indices).

    The context becomes the SeedSequence spawn key, so distinct contexts give
    independent Philox streams and identical ones replay the same draws.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(i) for i in context))
    return np.random.Generator(np.random.Philox(seq))


def sample_iid(geom: CodeGeometry, p: float, stream: RandomStream) -> ErrorPattern:
    """Flip every qubit independently with probability p."""
    return stream.random(geom.num_qubits) < p


def sample_correlated(geom: CodeGeometry, p_prime: float, q: float, stream: RandomStream) -> ErrorPattern:
    """Primary flips with probability p'; each primary flips one random neighbour with probability q.

    The first Q draws decide the primaries exactly as `sample_iid` does, so
    q = 0 reproduces the i.i.d. pattern of the same stream. Secondaries are
    XOR-ed in and never spawn further flips.
    """
    Q = geom.num_qubits
    primary = stream.random(Q) < p_prime
    spread = stream.random(Q) < q
    pick = stream.random(Q)

    sources = np.flatnonzero(primary & spread)
    if not len(sources):
        return primary
    table, degree = geom.neighbour_table
    choice = np.minimum((pick[sources] * degree[sources]).astype(np.int64), degree[sources] - 1)
    targets = table[sources, choice]
    toggles = np.bincount(targets, minlength=Q) % 2
    return primary ^ toggles.astype(bool)


def sample(geom: CodeGeometry, noise: NoiseConfig, stream: RandomStream) -> ErrorPattern:
    if noise.model == NoiseModel.IID:
        return sample_iid(geom, noise.p, stream)
    return sample_correlated(geom, noise.p_prime, noise.q, stream)


def expected_flip_fraction(p_prime: float, q: float) -> float:
    """Approximate fraction of flipped qubits under the correlated model."""
    return (1.0 + q) * p_prime


def uniform_cluster_width(m: int, n: int) -> int:
    """Width of a level-n cluster built from m evenly spaced level-(n-1) clusters."""
    if m < 2 or n < 0:
        raise ValueError(f"need m >= 2 and n >= 0, got m={m}, n={n}")
    return (2 * m - 1) ** n


def cantor_width(n: int) -> int:
    """Anyon extent of the level-n failing cluster, w_n = 3 w_{n-1} - 1."""
    return (3**n + 1) // 2


def _cantor_columns(n: int, start: int) -> list[int]:
    if n == 0:
        return [start]
    w = cantor_width(n - 1)
    return _cantor_columns(n - 1, start) + _cantor_columns(n - 1, start + 2 * w - 1)


def cantor_pattern(
    geom: CodeGeometry,
    n: int,
    row: int,
    start_col: Optional[int] = None,
    validate: bool = True,
) -> tuple[ErrorPattern, CantorSpec]:
    """Level-n failing cluster of 2^n horizontal errors in one row.

    Two level-(n-1) clusters are placed w_{n-1} - 1 apart instead of w_{n-1},
    which makes the decoder pair the wrong anyons at every level. By default
    the cluster is centred. With `validate` the standard decoder is run and
    must fail on the result.
    """
    if n < 0:
        raise ValueError(f"level must be >= 0, got {n}")
    L = geom.L
    width = cantor_width(n)
    if start_col is None:
        start_col = (L - 1 - width) // 2
    columns = _cantor_columns(n, start_col)
    if not 0 <= row < L or start_col < 0 or columns[-1] > L - 3:
        raise LatticeTooSmallError(
            f"level-{n} cluster at row {row}, column {start_col} does not fit L={L}"
        )

    error = geom.pattern(geom.H(row, c) for c in columns)
    spec = CantorSpec(
        level=n,
        row=row,
        width=width,
        error_count=len(columns),
        start_col=start_col,
        columns=columns,
    )
    if validate:
        _, failed = decode_pattern(geom, error, DecoderConfig(metric=Metric.STANDARD))
        if not failed:
            raise LatticeTooSmallError(
                f"level-{n} cluster at column {start_col} is corrected by the standard decoder at L={L}"
            )
    logger.debug("Cantor pattern built", L=L, level=n, row=row, start_col=start_col)
    return error, spec
