"""Test helper functions."""

from typing import Iterator

import numpy as np

from src.models.decoding import DecoderConfig
from src.services.decoder import decode
from src.services.lattice import CodeGeometry, Edge, ErrorPattern, Node, geodesic_qubits, syndrome_of


def residual_of(geom: CodeGeometry, error: ErrorPattern, config: DecoderConfig) -> ErrorPattern:
    """error XOR correction for one decoder run."""
    result = decode(geom, syndrome_of(geom, error), config)
    residual = error.copy()
    residual[result.correction] ^= True
    return residual


def random_errors(
    sizes: list[int],
    rates: list[float],
    trials: int,
    seed: int = 0,
) -> Iterator[tuple[int, float, np.ndarray]]:
    """(L, p, error) triples drawn round-robin over sizes and rates."""
    gen = np.random.default_rng(seed)
    for t in range(trials):
        L = sizes[t % len(sizes)]
        p = rates[(t // len(sizes)) % len(rates)]
        Q = 2 * L * L - 2 * L + 1
        yield L, p, gen.random(Q) < p


def random_monotone_path(
    geom: CodeGeometry,
    a: Node,
    b: Node,
    gen: np.random.Generator,
) -> ErrorPattern:
    """A shortest chain between two nodes with its steps in random order.

    Chains to a boundary are straight and have no alternative.
    """
    if isinstance(a, Edge) or isinstance(b, Edge):
        return geodesic_qubits(geom, a, b)
    (r, c), (rb, cb) = a, b
    dr = 1 if rb > r else -1
    dc = 1 if cb > c else -1
    steps = np.array([0] * abs(rb - r) + [1] * abs(cb - c))
    gen.shuffle(steps)
    ids = []
    for step in steps:
        if step == 0:
            ids.append(geom.V(min(r, r + dr), c))
            r += dr
        else:
            ids.append(geom.H(r, min(c, c + dc)))
            c += dc
    return geom.pattern(ids)
