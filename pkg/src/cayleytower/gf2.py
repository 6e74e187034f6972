"""Exact GF(2) arithmetic for 3x3 matrices and 27-bit diagonal vectors.

Representation:
    Mat3:   int in [0, 512), bit (3*r + c) = entry (r, c), row-major.
    SBlock: int in [0, 2**27), three Mat3 components a(1), a(2), a(3);
            bits [9*(i-1), 9*i) hold component a(i).

Component indices follow the 1-based mod-3 convention throughout: wrap3()
maps any integer to a representative in {1, 2, 3}.

Multiplication uses on-the-fly popcounts by default; a precomputed 512x512
product table can be enabled via enable_mul_table() or the environment
variable CAYLEYTOWER_MAT3_TABLE=1.
"""

from __future__ import annotations

import os

MASK9 = (1 << 9) - 1
MASK27 = (1 << 27) - 1
MAT3_ID = 0b100010001  # bits 0, 4, 8
SBLOCK_ZERO = 0

_MUL_TABLE: list[list[int]] | None = None


def wrap3(i: int) -> int:
    """Map an integer index to its representative in {1, 2, 3}."""
    return (i - 1) % 3 + 1


def enable_mul_table(enabled: bool = True) -> None:
    """Switch mat3_mul to a precomputed 512x512 lookup table."""
    global _MUL_TABLE
    if not enabled:
        _MUL_TABLE = None
        return
    if _MUL_TABLE is not None:
        return
    import numpy as np

    vals = np.arange(512, dtype=np.uint16)
    bits = ((vals[:, None] >> np.arange(9)) & 1).astype(np.uint8).reshape(512, 3, 3)
    prod = np.einsum("aik,bkj->abij", bits, bits) % 2
    packed = (prod.reshape(512, 512, 9) << np.arange(9)).sum(axis=-1)
    _MUL_TABLE = packed.astype(np.uint16).tolist()


def mat3_mul(a: int, b: int) -> int:
    """GF(2) product of two 3x3 matrices packed as 9-bit ints."""
    if _MUL_TABLE is not None:
        return _MUL_TABLE[a][b]
    # columns of b as 3-bit masks
    c0 = (b & 1) | ((b >> 2) & 2) | ((b >> 4) & 4)
    c1 = ((b >> 1) & 1) | ((b >> 3) & 2) | ((b >> 5) & 4)
    c2 = ((b >> 2) & 1) | ((b >> 4) & 2) | ((b >> 6) & 4)
    r0 = a & 7
    r1 = (a >> 3) & 7
    r2 = (a >> 6) & 7
    return (
        ((r0 & c0).bit_count() & 1)
        | (((r0 & c1).bit_count() & 1) << 1)
        | (((r0 & c2).bit_count() & 1) << 2)
        | (((r1 & c0).bit_count() & 1) << 3)
        | (((r1 & c1).bit_count() & 1) << 4)
        | (((r1 & c2).bit_count() & 1) << 5)
        | (((r2 & c0).bit_count() & 1) << 6)
        | (((r2 & c1).bit_count() & 1) << 7)
        | (((r2 & c2).bit_count() & 1) << 8)
    )


def mat3_from_rows(rows) -> int:
    """Pack a 3x3 iterable of 0/1 entries into a Mat3 int."""
    m = 0
    for r, row in enumerate(rows):
        for c, e in enumerate(row):
            if e:
                m |= 1 << (3 * r + c)
    return m


def mat3_rows(m: int) -> tuple[tuple[int, ...], ...]:
    """Unpack a Mat3 int into a 3x3 tuple of 0/1 entries."""
    return tuple(tuple((m >> (3 * r + c)) & 1 for c in range(3)) for r in range(3))


def sblock_comp(s: int, i: int) -> int:
    """Component a(i) of an SBlock, i taken mod 3 in {1, 2, 3}."""
    return (s >> (9 * (wrap3(i) - 1))) & MASK9


def sblock_build(m1: int, m2: int, m3: int) -> int:
    return m1 | (m2 << 9) | (m3 << 18)


def sblock_from_rows(rows) -> int:
    """Pack a 3x9 display (component j = columns 3(j-1)..3j-1) into an SBlock."""
    comps = []
    for j in range(3):
        comps.append(mat3_from_rows([row[3 * j : 3 * j + 3] for row in rows]))
    return sblock_build(*comps)


def sblock_rows(s: int) -> tuple[tuple[int, ...], ...]:
    """Unpack an SBlock into its 3x9 display."""
    blocks = [mat3_rows(sblock_comp(s, j)) for j in (1, 2, 3)]
    return tuple(tuple(e for b in blocks for e in b[r]) for r in range(3))


class Subspace27:
    """Subspace of 27-bit GF(2) vectors, stored as a reduced echelon basis.

    Basis vectors are ordered by decreasing pivot (highest set bit); each
    pivot occurs in exactly one basis vector. Use span() to construct.
    """

    __slots__ = ("basis",)

    def __init__(self, basis):
        self.basis = tuple(basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: int) -> int:
        for row in self.basis:
            if (v >> (row.bit_length() - 1)) & 1:
                v ^= row
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace27) and self.basis == other.basis

    def __hash__(self) -> int:
        return hash(self.basis)

    def __repr__(self) -> str:
        return f"Subspace27(dim={self.dim})"

    def vectors(self):
        """All 2**dim member vectors, ascending."""
        out = [0]
        for row in self.basis:
            out += [v ^ row for v in out]
        return sorted(out)


def span(vectors) -> Subspace27:
    """Reduced echelon span of 27-bit GF(2) vectors."""
    rows: dict[int, int] = {}  # pivot -> row
    for v in vectors:
        for p in sorted(rows, reverse=True):
            if (v >> p) & 1:
                v ^= rows[p]
        if v:
            rows[v.bit_length() - 1] = v
    # back-substitute to reduced form
    pivots = sorted(rows, reverse=True)
    for idx, p in enumerate(pivots):
        for q in pivots[:idx]:
            if (rows[q] >> p) & 1:
                rows[q] ^= rows[p]
    return Subspace27(rows[p] for p in pivots)


if os.environ.get("CAYLEYTOWER_MAT3_TABLE") == "1":
    enable_mul_table()
