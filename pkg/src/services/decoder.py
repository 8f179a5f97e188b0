"""Hard-decision ring-growing decoder for the planar-code bit-flip sector.

Anyons are paired at growing search distance k = 1, 2, ... . In each pass
every live anyon (row-major order) looks for its nearest partner among the
live anyons and the two boundaries; ties go to the lowest node index, i.e.
anyons before LEFT before RIGHT. A partner at distance <= k is annihilated
with a correction chain. Passes repeat at the same k until one makes no
annihilation, then k grows.

With the SHORTCUT metric every annihilation of (c, d) lowers distances to
min(D(a,b), D(a,c) + D(d,b), D(a,d) + D(c,b)) and remembers (c, d) as the
witness of the improvement, so the eventual a-b correction can be routed
through the stored c-d chain.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import numpy.typing as npt

from src.models.decoding import DecodeResult, DecoderConfig, Metric, Pairing
from src.services.lattice import (
    CodeGeometry,
    Edge,
    ErrorPattern,
    Node,
    Syndrome,
    anyons,
    geodesic_qubits,
    is_logical_failure,
    pattern_to_ids,
    syndrome_of,
)
from src.utils.errors import DecoderInvariantError
from src.utils.logging import get_structured_logger

logger = get_structured_logger(__name__)

# Stand-in for the infinite LEFT-RIGHT distance; twice it still fits int64.
INF = 10**9

# Documented constant of the examined-pair work bound, examined <= C * L**5.
WORK_BOUND_CONSTANT = 8


@dataclass
class DistanceTable:
    """Pairwise node distances, liveness and shortcut witnesses.

    Node index i < n is the i-th anyon (row-major); n is LEFT and n + 1 is RIGHT.
    witness_first[a, b] = c, witness_second[a, b] = d means D(a, b) was last
    lowered to D(a, c) + D(d, b) by the annihilation of (c, d); -1 if never.
    """
    nodes: list[Node]
    D: npt.NDArray[np.int64]
    alive: npt.NDArray[np.bool_]
    witness_first: npt.NDArray[np.int64]
    witness_second: npt.NDArray[np.int64]

    @property
    def num_anyons(self) -> int:
        return len(self.nodes) - 2

    @property
    def left(self) -> int:
        return len(self.nodes) - 2

    @property
    def right(self) -> int:
        return len(self.nodes) - 1

    def index(self, node: Node) -> int:
        if node == Edge.LEFT:
            return self.left
        if node == Edge.RIGHT:
            return self.right
        return self.nodes.index(node)


def init_table(geom: CodeGeometry, syndrome: Syndrome) -> DistanceTable:
    """Fill D with Manhattan / boundary distances over all syndrome anyons."""
    coords = anyons(geom, syndrome)
    n = len(coords)
    size = n + 2
    D = np.zeros((size, size), dtype=np.int64)
    if n:
        rc = np.array(coords, dtype=np.int64)
        D[:n, :n] = (np.abs(rc[:, 0, None] - rc[None, :, 0])
                     + np.abs(rc[:, 1, None] - rc[None, :, 1]))
        D[:n, n] = rc[:, 1] + 1
        D[:n, n + 1] = geom.L - 1 - rc[:, 1]
        D[n, :n] = D[:n, n]
        D[n + 1, :n] = D[:n, n + 1]
    D[n, n + 1] = D[n + 1, n] = INF
    return DistanceTable(
        nodes=[*coords, Edge.LEFT, Edge.RIGHT],
        D=D,
        alive=np.ones(size, dtype=bool),
        witness_first=np.full((size, size), -1, dtype=np.int64),
        witness_second=np.full((size, size), -1, dtype=np.int64),
    )


def shortcut_update(table: DistanceTable, c: int, d: int) -> None:
    """Apply the shortcut distance update after annihilating nodes c and d.

    Only pairs of live nodes (boundaries are always live) other than c and d
    are updated; entries involving dead anyons are never read again, so they
    stay frozen and witness chains always point back in time.
    """
    live = table.alive.copy()
    live[[c, d]] = False
    idx = np.flatnonzero(live)
    if len(idx) < 2:
        return
    D = table.D
    block = D[np.ix_(idx, idx)]
    via_cd = D[idx, c][:, None] + D[d, idx][None, :]
    via_dc = D[idx, d][:, None] + D[c, idx][None, :]
    use_cd = via_cd <= via_dc
    best = np.where(use_cd, via_cd, via_dc)
    improved = best < block

    # LEFT-RIGHT stays infinite
    pos = {node: i for i, node in enumerate(idx)}
    if table.left in pos and table.right in pos:
        li, ri = pos[table.left], pos[table.right]
        improved[li, ri] = improved[ri, li] = False

    if not improved.any():
        return
    rows, cols = np.nonzero(improved)
    a_idx, b_idx = idx[rows], idx[cols]
    D[a_idx, b_idx] = best[rows, cols]
    first = np.where(use_cd[rows, cols], c, d)
    table.witness_first[a_idx, b_idx] = first
    table.witness_second[a_idx, b_idx] = np.where(first == c, d, c)


@dataclass
class _DecodeState:
    geom: CodeGeometry
    table: DistanceTable
    correction: npt.NDArray[np.bool_]
    stored: dict[tuple[int, int], npt.NDArray[np.bool_]] = field(default_factory=dict)
    cache: dict[tuple[int, int], npt.NDArray[np.bool_]] = field(default_factory=dict)


def _pair_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def expand_correction(state: _DecodeState, a: int, b: int) -> npt.NDArray[np.bool_]:
    """Correction chain for annihilating nodes a and b.

    Without a witness this is the canonical geodesic. With witness (c, d) it is
    expand(a, c) ^ stored(c, d) ^ expand(d, b); the stored chain cancels the
    earlier c-d correction so the net effect only toggles a and b.
    """
    table = state.table
    first = int(table.witness_first[a, b])
    if first < 0:
        return geodesic_qubits(state.geom, table.nodes[a], table.nodes[b])

    cacheable = not (table.alive[a] and table.alive[b])
    if cacheable and (a, b) in state.cache:
        return state.cache[(a, b)]

    second = int(table.witness_second[a, b])
    stored = state.stored.get(_pair_key(first, second))
    if stored is None:
        raise DecoderInvariantError(
            f"no stored chain for witness pair {table.nodes[first]}-{table.nodes[second]}"
        )
    chain = expand_correction(state, a, first) ^ stored ^ expand_correction(state, second, b)
    if cacheable:
        state.cache[(a, b)] = chain
    return chain


def _label(node: Node):
    return node.value if isinstance(node, Edge) else node


def decode(geom: CodeGeometry, syndrome: Syndrome, config: Optional[DecoderConfig] = None) -> DecodeResult:
    """Decode a syndrome; the returned correction reproduces it exactly."""
    config = config or DecoderConfig()
    table = init_table(geom, syndrome)
    state = _DecodeState(geom=geom, table=table, correction=geom.empty_pattern())
    n = table.num_anyons
    shortcut = config.metric == Metric.SHORTCUT
    D, alive = table.D, table.alive

    pairings: list[Pairing] = []
    edge_counts = {Edge.LEFT.value: 0, Edge.RIGHT.value: 0}
    examined = 0
    passes = 0
    k_max = 0
    live_anyons = n
    k = 1
    k_limit = 2 * geom.L

    while live_anyons:
        if k > k_limit:
            raise DecoderInvariantError(f"search distance {k} exceeded 2L = {k_limit}")
        passes += 1
        annihilated = False
        for a in range(n):
            if not alive[a]:
                continue
            row = np.where(alive, D[a], INF)
            row[a] = INF
            b = int(np.argmin(row))
            if config.count_operations:
                examined += live_anyons + 1
            if row[b] > k:
                continue

            chain = expand_correction(state, a, b)
            state.correction ^= chain
            state.stored[_pair_key(a, b)] = chain
            alive[a] = False
            live_anyons -= 1
            if b < n:
                alive[b] = False
                live_anyons -= 1
            else:
                edge_counts[table.nodes[b].value] += 1
            pairings.append(Pairing(a=_label(table.nodes[a]), b=_label(table.nodes[b]), k=k))
            k_max = k
            annihilated = True
            if shortcut:
                shortcut_update(table, a, b)
        if not annihilated:
            k += 1

    if not np.array_equal(syndrome_of(geom, state.correction), np.asarray(syndrome, dtype=bool)):
        raise DecoderInvariantError("correction does not reproduce the input syndrome")

    logger.debug(
        "Decode completed",
        L=geom.L,
        metric=config.metric.value,
        anyons=n,
        k_max=k_max,
        passes=passes,
        examined=examined,
    )
    return DecodeResult(
        correction=pattern_to_ids(state.correction),
        pairings=pairings,
        k_max=k_max,
        examined=examined,
        passes=passes,
        edge_counts=edge_counts,
    )


def decode_pattern(
    geom: CodeGeometry,
    error: ErrorPattern,
    config: Optional[DecoderConfig] = None,
) -> tuple[DecodeResult, bool]:
    """Decode the syndrome of an error pattern and test the residual for logical failure."""
    result = decode(geom, syndrome_of(geom, error), config)
    residual = np.asarray(error, dtype=bool).copy()
    residual[result.correction] ^= True
    return result, is_logical_failure(geom, residual)


def work_bound(L: int) -> int:
    """Upper bound on the examined-pair counter for a size-L lattice."""
    return WORK_BOUND_CONSTANT * L**5
