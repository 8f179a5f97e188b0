"""Bit-flip sector of the distance-L planar code.

Plaquettes P(r, c) form an L x (L-1) grid. Qubit ids are assigned block by
block, row-major inside each block:

    H(r, c)   c in [0, L-3]   toggles P(r, c) and P(r, c+1)
    BL(r)                     toggles P(r, 0)
    BR(r)                     toggles P(r, L-2)
    V(r, c)   r in [0, L-2]   toggles P(r, c) and P(r+1, c)

Plaquette id = r * (L-1) + c. Both mappings are part of the on-disk pattern
format and must stay stable.

Error patterns and syndromes are dense boolean vectors (numpy) composing
under XOR.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Union

import numpy as np
import numpy.typing as npt
from scipy.sparse import csr_matrix

from src.utils.errors import InvalidPairError, InvalidSizeError, SyndromeNotTrivialError


class Edge(str, Enum):
    """Virtual boundary nodes an anyon may be paired with."""
    LEFT = "LEFT"
    RIGHT = "RIGHT"


Anyon = tuple[int, int]
Node = Union[Anyon, Edge]
ErrorPattern = npt.NDArray[np.bool_]
Syndrome = npt.NDArray[np.bool_]

INFINITE_DISTANCE = math.inf


@dataclass(frozen=True, eq=False)
class CodeGeometry:
    """Immutable lattice description; build with `build_geometry`."""
    L: int
    qubit_plaquettes: npt.NDArray[np.int64]
    check_matrix: csr_matrix

    @property
    def num_rows(self) -> int:
        return self.L

    @property
    def num_cols(self) -> int:
        return self.L - 1

    @property
    def num_plaquettes(self) -> int:
        return self.L * (self.L - 1)

    @property
    def num_qubits(self) -> int:
        return 2 * self.L * self.L - 2 * self.L + 1

    @property
    def bl_offset(self) -> int:
        return self.L * (self.L - 2)

    @property
    def br_offset(self) -> int:
        return self.bl_offset + self.L

    @property
    def v_offset(self) -> int:
        return self.br_offset + self.L

    def H(self, r: int, c: int) -> int:
        if not (0 <= r < self.L and 0 <= c <= self.L - 3):
            raise IndexError(f"H({r},{c}) outside lattice L={self.L}")
        return r * (self.L - 2) + c

    def BL(self, r: int) -> int:
        if not 0 <= r < self.L:
            raise IndexError(f"BL({r}) outside lattice L={self.L}")
        return self.bl_offset + r

    def BR(self, r: int) -> int:
        if not 0 <= r < self.L:
            raise IndexError(f"BR({r}) outside lattice L={self.L}")
        return self.br_offset + r

    def V(self, r: int, c: int) -> int:
        if not (0 <= r <= self.L - 2 and 0 <= c <= self.L - 2):
            raise IndexError(f"V({r},{c}) outside lattice L={self.L}")
        return self.v_offset + r * (self.L - 1) + c

    def label(self, qubit: int) -> str:
        """Human-readable name of a qubit id, e.g. ``H(2,1)``."""
        if not 0 <= qubit < self.num_qubits:
            raise IndexError(f"qubit {qubit} outside lattice L={self.L}")
        if qubit < self.bl_offset:
            r, c = divmod(qubit, self.L - 2)
            return f"H({r},{c})"
        if qubit < self.br_offset:
            return f"BL({qubit - self.bl_offset})"
        if qubit < self.v_offset:
            return f"BR({qubit - self.br_offset})"
        r, c = divmod(qubit - self.v_offset, self.L - 1)
        return f"V({r},{c})"

    def plaquette_id(self, r: int, c: int) -> int:
        if not (0 <= r < self.L and 0 <= c < self.L - 1):
            raise IndexError(f"P({r},{c}) outside lattice L={self.L}")
        return r * (self.L - 1) + c

    def plaquette_coords(self, plaquette: int) -> Anyon:
        r, c = divmod(int(plaquette), self.L - 1)
        return (r, c)

    def empty_pattern(self) -> ErrorPattern:
        return np.zeros(self.num_qubits, dtype=bool)

    def pattern(self, qubits: Iterable[int]) -> ErrorPattern:
        """Pattern from qubit ids; repeated ids cancel (XOR semantics)."""
        out = self.empty_pattern()
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexError(f"qubit {q} outside lattice L={self.L}")
            out[q] ^= True
        return out

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        """Per-qubit sorted neighbours: qubits sharing at least one plaquette."""
        csc = self.check_matrix.tocsc()
        by_plaquette = [
            self.check_matrix.indices[self.check_matrix.indptr[p]:self.check_matrix.indptr[p + 1]]
            for p in range(self.num_plaquettes)
        ]
        result = []
        for q in range(self.num_qubits):
            plaquettes = csc.indices[csc.indptr[q]:csc.indptr[q + 1]]
            found: set[int] = set()
            for p in plaquettes:
                found.update(int(x) for x in by_plaquette[p])
            found.discard(q)
            result.append(tuple(sorted(found)))
        return tuple(result)

    @cached_property
    def neighbour_table(self) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        """Padded neighbour table (Q x max_degree, -1 padding) and degree vector."""
        degree = np.array([len(n) for n in self.neighbours], dtype=np.int64)
        table = np.full((self.num_qubits, int(degree.max())), -1, dtype=np.int64)
        for q, nbrs in enumerate(self.neighbours):
            table[q, :len(nbrs)] = nbrs
        return table, degree


@lru_cache(maxsize=64)
def build_geometry(L: int) -> CodeGeometry:
    """Build the bit-flip sector geometry of a distance-L planar code."""
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise InvalidSizeError(f"lattice size must be an integer >= 2, got {L!r}")
    L = int(L)
    cols = L - 1
    num_qubits = 2 * L * L - 2 * L + 1
    incidence = np.full((num_qubits, 2), -1, dtype=np.int64)

    q = 0
    for r in range(L):
        for c in range(L - 2):
            incidence[q] = (r * cols + c, r * cols + c + 1)
            q += 1
    for r in range(L):
        incidence[q, 0] = r * cols
        q += 1
    for r in range(L):
        incidence[q, 0] = r * cols + L - 2
        q += 1
    for r in range(L - 1):
        for c in range(L - 1):
            incidence[q] = (r * cols + c, (r + 1) * cols + c)
            q += 1

    qubits, slots = np.nonzero(incidence >= 0)
    plaquettes = incidence[qubits, slots]
    check = csr_matrix(
        (np.ones(len(qubits), dtype=np.uint8), (plaquettes, qubits)),
        shape=(L * cols, num_qubits),
    )
    incidence.setflags(write=False)
    return CodeGeometry(L=L, qubit_plaquettes=incidence, check_matrix=check)


def syndrome_of(geom: CodeGeometry, error: ErrorPattern) -> Syndrome:
    """Plaquettes touched by an odd number of flipped qubits."""
    counts = geom.check_matrix @ np.asarray(error, dtype=np.uint8)
    return (counts % 2).astype(bool)


def anyons(geom: CodeGeometry, syndrome: Syndrome) -> list[Anyon]:
    """Occupied plaquettes in row-major order."""
    return [geom.plaquette_coords(p) for p in np.flatnonzero(syndrome)]


def syndrome_from_anyons(geom: CodeGeometry, coords: Iterable[Anyon]) -> Syndrome:
    out = np.zeros(geom.num_plaquettes, dtype=bool)
    for r, c in coords:
        out[geom.plaquette_id(r, c)] ^= True
    return out


def pattern_to_ids(error: ErrorPattern) -> list[int]:
    """Sorted qubit ids of a pattern (the JSON serialization)."""
    return [int(q) for q in np.flatnonzero(error)]


def pattern_from_ids(geom: CodeGeometry, ids: Iterable[int]) -> ErrorPattern:
    return geom.pattern(ids)


def qubit_neighbours(geom: CodeGeometry) -> tuple[tuple[int, ...], ...]:
    return geom.neighbours


def node_distance(geom: CodeGeometry, a: Node, b: Node) -> Union[int, float]:
    """Manhattan distance between nodes; LEFT-RIGHT is infinite."""
    if isinstance(a, Edge) and isinstance(b, Edge):
        return 0 if a == b else INFINITE_DISTANCE
    if isinstance(a, Edge):
        a, b = b, a
    r, c = a
    if b == Edge.LEFT:
        return c + 1
    if b == Edge.RIGHT:
        return geom.L - 1 - c
    return abs(r - b[0]) + abs(c - b[1])


def geodesic_ids(geom: CodeGeometry, a: Node, b: Node) -> list[int]:
    """Qubit ids of the canonical shortest chain: vertical from a, then horizontal."""
    if isinstance(a, Edge) and isinstance(b, Edge):
        raise InvalidPairError(f"cannot join two virtual nodes {a.value}-{b.value}")
    if a == b:
        raise InvalidPairError(f"cannot join node {a} to itself")
    if isinstance(a, Edge):
        a, b = b, a
    ra, ca = a
    if b == Edge.LEFT:
        return [geom.H(ra, c) for c in range(ca)] + [geom.BL(ra)]
    if b == Edge.RIGHT:
        return [geom.H(ra, c) for c in range(ca, geom.L - 2)] + [geom.BR(ra)]
    rb, cb = b
    chain = [geom.V(r, ca) for r in range(min(ra, rb), max(ra, rb))]
    chain.extend(geom.H(rb, c) for c in range(min(ca, cb), max(ca, cb)))
    return chain


def geodesic_qubits(geom: CodeGeometry, a: Node, b: Node) -> ErrorPattern:
    return geom.pattern(geodesic_ids(geom, a, b))


def cut_parity(geom: CodeGeometry, residual: ErrorPattern, cut: int) -> int:
    """Crossing parity of a vertical cut.

    cut -1 is the left boundary, cut L-2 the right boundary and cut c in
    [0, L-3] lies between plaquette columns c and c+1.
    """
    L = geom.L
    if cut == -1:
        crossing = residual[geom.bl_offset:geom.br_offset]
    elif cut == L - 2:
        crossing = residual[geom.br_offset:geom.v_offset]
    elif 0 <= cut <= L - 3:
        crossing = residual[cut:geom.bl_offset:L - 2]
    else:
        raise IndexError(f"cut {cut} outside [-1, {L - 2}]")
    return int(np.count_nonzero(crossing) % 2)


def is_logical_failure(geom: CodeGeometry, residual: ErrorPattern) -> bool:
    """True iff a trivial-syndrome residual crosses the left boundary an odd number of times."""
    if syndrome_of(geom, residual).any():
        raise SyndromeNotTrivialError("residual operator still carries anyons")
    return cut_parity(geom, residual, -1) == 1

