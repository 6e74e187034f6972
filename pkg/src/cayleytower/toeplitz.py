"""Truncated block-Toeplitz unitriangular matrices over GF(2).

A TruncElem is a truncation level n together with diagonals (a_1, ..., a_n),
each an SBlock. It stands for the coset of the infinite 3-periodic upper
unitriangular block-Toeplitz matrix with those diagonals modulo the normal
subgroup of matrices whose first n diagonals vanish.

The group law is the closed recursion

    c_j(k) = a_j(k) + b_j(k) + sum_{s=1}^{j-1} a_s(k) b_{j-s}(k+s)

with component indices mod 3; inverses come from the matching recursion
d_1 = a_1, d_j(k) = a_j(k) + sum_s a_s(k) d_{j-s}(k+s) (all signs vanish
over GF(2)). dense_mul() is an independent oracle that expands elements to
literal banded matrices of 3x3 blocks and multiplies them entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import MASK27, mat3_mul, sblock_build, sblock_comp, wrap3


class LevelMismatchError(ValueError):
    """Raised when two elements of different truncation level are combined."""


@dataclass(frozen=True, slots=True)
class TruncElem:
    level: int
    diags: tuple[int, ...]

    def __post_init__(self):
        if self.level != len(self.diags):
            raise ValueError(f"level {self.level} != {len(self.diags)} diagonals")

    def is_identity(self) -> bool:
        return not any(self.diags)

    def __repr__(self) -> str:
        return f"TruncElem(level={self.level}, hex={to_hex(self)!r})"


def identity(level: int) -> TruncElem:
    return TruncElem(level, (0,) * level)


def _check_levels(x: TruncElem, y: TruncElem) -> None:
    if x.level != y.level:
        raise LevelMismatchError(f"levels {x.level} != {y.level}")


def mul(x: TruncElem, y: TruncElem) -> TruncElem:
    """Group product; equal levels required."""
    _check_levels(x, y)
    n = x.level
    a, b = x.diags, y.diags
    out = []
    for j in range(1, n + 1):
        aj, bj = a[j - 1], b[j - 1]
        comps = []
        for k in (1, 2, 3):
            c = sblock_comp(aj, k) ^ sblock_comp(bj, k)
            for s in range(1, j):
                c ^= mat3_mul(sblock_comp(a[s - 1], k), sblock_comp(b[j - s - 1], k + s))
            comps.append(c)
        out.append(sblock_build(*comps))
    return TruncElem(n, tuple(out))


def inv(x: TruncElem) -> TruncElem:
    """Group inverse via the diagonal recursion."""
    n = x.level
    a = x.diags
    d: list[int] = []
    for j in range(1, n + 1):
        comps = []
        for k in (1, 2, 3):
            c = sblock_comp(a[j - 1], k)
            for s in range(1, j):
                c ^= mat3_mul(sblock_comp(a[s - 1], k), sblock_comp(d[j - s - 1], k + s))
            comps.append(c)
        d.append(sblock_build(*comps))
    return TruncElem(n, tuple(d))


def commutator(x: TruncElem, y: TruncElem) -> TruncElem:
    """[x, y] = x^-1 y^-1 x y."""
    _check_levels(x, y)
    return mul(mul(mul(inv(x), inv(y)), x), y)


def conjugate(x: TruncElem, g: TruncElem) -> TruncElem:
    """g^-1 x g."""
    return mul(mul(inv(g), x), g)


def depth(x: TruncElem) -> int:
    """Number of leading zero diagonals (= level for the identity)."""
    for i, d in enumerate(x.diags):
        if d:
            return i
    return x.level


def make_Mk(k: int, a: int, level: int) -> TruncElem:
    """Element with diagonals 1..k zero, diagonal k+1 equal to a, rest zero."""
    if k >= level:
        raise ValueError(f"k={k} must be < level={level}")
    return TruncElem(level, (0,) * k + (a,) + (0,) * (level - k - 1))


def truncate(x: TruncElem, j: int) -> TruncElem:
    """Keep the first j diagonals; a group homomorphism."""
    if j > x.level or j < 0:
        raise ValueError(f"cannot truncate level {x.level} to {j}")
    return TruncElem(j, x.diags[:j])


def closed_square_lead(k: int, a: int) -> tuple[int, int]:
    """Depth and leading diagonal of the square of any M_k(a, ...).

    Returns (2k+1, c) with c(i) = a(i) a(i+k+1).
    """
    comps = [mat3_mul(sblock_comp(a, i), sblock_comp(a, i + k + 1)) for i in (1, 2, 3)]
    return 2 * k + 1, sblock_build(*comps)


def closed_comm_lead(k: int, a: int, b: int) -> tuple[int, int]:
    """Depth and leading diagonal of [M_k(a, ...), M_0(b, ...)].

    Returns (k+1, c) with c(i) = a(i) b(i+k+1) + b(i) a(i+1), independent of
    the higher diagonals of either argument.
    """
    comps = [
        mat3_mul(sblock_comp(a, i), sblock_comp(b, i + k + 1))
        ^ mat3_mul(sblock_comp(b, i), sblock_comp(a, i + 1))
        for i in (1, 2, 3)
    ]
    return k + 1, sblock_build(*comps)


def random_elem(rng, level: int) -> TruncElem:
    return TruncElem(level, tuple(rng.getrandbits(27) for _ in range(level)))


# --- integer / byte / hex packing -------------------------------------------
# Bit b of the packed integer is bit (b % 27) of diagonal (b // 27 + 1):
# diagonal-major, then component-major, then row-major within each 3x3 block.

def to_int(x: TruncElem) -> int:
    v = 0
    for j, d in enumerate(x.diags):
        v |= d << (27 * j)
    return v


def from_int(v: int, level: int) -> TruncElem:
    return TruncElem(level, tuple((v >> (27 * j)) & MASK27 for j in range(level)))


def num_bytes(level: int) -> int:
    return (27 * level + 7) // 8


def to_bytes(x: TruncElem) -> bytes:
    return to_int(x).to_bytes(num_bytes(x.level), "little")


def from_bytes(raw: bytes, level: int) -> TruncElem:
    return from_int(int.from_bytes(raw, "little"), level)


def to_hex(x: TruncElem) -> str:
    width = (27 * x.level + 3) // 4
    return format(to_int(x), f"0{width}x") if x.level else ""


def from_hex(s: str, level: int) -> TruncElem:
    return from_int(int(s, 16) if s else 0, level)


# --- dense banded oracle ------------------------------------------------------

def to_dense(x: TruncElem, nblocks: int | None = None) -> np.ndarray:
    """Literal (3*nblocks)^2 0/1 matrix of the 3-periodic banded expansion.

    Block entry (m, m+j) (0-based block row m) is a_j((m mod 3) + 1).
    """
    n = x.level
    if nblocks is None:
        nblocks = n + 3
    dense = np.zeros((3 * nblocks, 3 * nblocks), dtype=np.uint8)
    for m in range(nblocks):
        dense[3 * m : 3 * m + 3, 3 * m : 3 * m + 3] = np.eye(3, dtype=np.uint8)
        for j in range(1, min(n, nblocks - 1 - m) + 1):
            comp = sblock_comp(x.diags[j - 1], m + 1)
            block = [[(comp >> (3 * r + c)) & 1 for c in range(3)] for r in range(3)]
            dense[3 * m : 3 * m + 3, 3 * (m + j) : 3 * (m + j) + 3] = block
    return dense


def read_dense_diagonals(dense: np.ndarray, level: int) -> TruncElem:
    """Read diagonals 1..level back out of a dense block matrix.

    Component a_j(r+1) is taken from block (r, r+j) for r = 0, 1, 2.
    """
    nblocks = dense.shape[0] // 3
    if nblocks < level + 3:
        raise ValueError(f"{nblocks} block rows cannot expose diagonal {level}")
    diags = []
    for j in range(1, level + 1):
        comps = []
        for r in range(3):
            block = dense[3 * r : 3 * r + 3, 3 * (r + j) : 3 * (r + j) + 3]
            comps.append(sum(int(block[a, b]) << (3 * a + b) for a in range(3) for b in range(3)))
        diags.append(sblock_build(*comps))
    return TruncElem(level, tuple(diags))


def dense_mul(x: TruncElem, y: TruncElem, nblocks: int | None = None) -> TruncElem:
    """Oracle product: expand, multiply literal matrices mod 2, read back."""
    _check_levels(x, y)
    if nblocks is None:
        nblocks = x.level + 3
    dx = to_dense(x, nblocks)
    dy = to_dense(y, nblocks)
    prod = (dx.astype(np.int64) @ dy.astype(np.int64)) % 2
    return read_dense_diagonals(prod.astype(np.uint8), x.level)
