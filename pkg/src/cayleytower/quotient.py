"""Enumeration of the finite quotient groups as packed bit vectors.

Level-i elements are encoded as the 27*i-bit integers of toeplitz.to_int,
stored little-endian in numpy uint8 rows padded to a multiple of 8 bytes.
Right (and left) multiplication by a fixed element is an affine map over
GF(2) on these encodings, so a whole frontier can be multiplied with a few
hundred byte-table lookups; breadth-first closure of the generator images
then enumerates a quotient in seconds even at two million elements.

Canonical element order is ascending encoded integer; ordinals index the
sorted element array, with the identity always at ordinal 0.
"""

from __future__ import annotations

import hashlib
import os
import struct
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import toeplitz
from .generators import x0_elem, x1_elem
from .toeplitz import TruncElem

DEFAULT_LEVEL_CAP = 8
CACHE_MAGIC = b"CTW1"

# covering-index pattern 4, 8, then (4, 8, 8) repeating from level 3
_INDEX_PATTERN = {0: 4, 1: 8, 2: 8}


class ResourceCapError(RuntimeError):
    """Enumeration refused or failed for resource reasons."""


def predicted_order(level: int) -> int:
    """Order implied by the covering-index pattern 4, 8, (4, 8, 8)*."""
    order = 1
    for i in range(1, level + 1):
        order *= 4 if i == 1 else (8 if i == 2 else _INDEX_PATTERN[i % 3])
    return order


def storage_bytes(level: int) -> int:
    return max(8, (toeplitz.num_bytes(level) + 7) // 8 * 8)


def elem_to_row(x: TruncElem) -> np.ndarray:
    return np.frombuffer(
        toeplitz.to_int(x).to_bytes(storage_bytes(x.level), "little"), dtype=np.uint8
    ).copy()


def row_to_elem(row: np.ndarray, level: int) -> TruncElem:
    return toeplitz.from_int(int.from_bytes(row.tobytes(), "little"), level)


def _words_view(rows: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(rows).view(np.uint64).reshape(rows.shape[0], -1)


def sort_rows(rows: np.ndarray) -> np.ndarray:
    """Rows in canonical (ascending encoded integer) order."""
    w = _words_view(rows)
    order = np.lexsort(tuple(w[:, i] for i in range(w.shape[1])))
    return rows[order]


def dedup_rows(rows: np.ndarray) -> np.ndarray:
    """Canonically sorted distinct rows."""
    if len(rows) == 0:
        return rows
    srt = sort_rows(rows)
    keep = np.empty(len(srt), dtype=bool)
    keep[0] = True
    np.any(srt[1:] != srt[:-1], axis=1, out=keep[1:])
    return srt[keep]


def rows_to_keys(rows: np.ndarray) -> list[bytes]:
    buf = np.ascontiguousarray(rows).tobytes()
    nb = rows.shape[1]
    return [buf[i : i + nb] for i in range(0, len(buf), nb)]


class AffineMap:
    """A GF(2)-affine map on packed encodings, applied via byte tables."""

    def __init__(self, tables: np.ndarray, const: np.ndarray):
        self.tables = tables  # (nbytes, 256, nbytes) uint8
        self.const = const    # (nbytes,) uint8

    @classmethod
    def from_scalar(cls, fn: Callable[[TruncElem], TruncElem], level: int) -> "AffineMap":
        """Tabulate an affine scalar function (e.g. fixed-factor multiplication)."""
        nb = storage_bytes(level)
        nbits = 27 * level
        const = elem_to_row(fn(toeplitz.identity(level)))
        cols = np.zeros((nb * 8, nb), dtype=np.uint8)
        for b in range(nbits):
            img = elem_to_row(fn(toeplitz.from_int(1 << b, level)))
            cols[b] = img ^ const
        tables = np.zeros((nb, 256, nb), dtype=np.uint8)
        for p in range(nb):
            t = tables[p]
            for v in range(1, 256):
                low = v & -v
                t[v] = t[v ^ low] ^ cols[8 * p + low.bit_length() - 1]
        return cls(tables, const)

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        out = np.broadcast_to(self.const, rows.shape).copy()
        for p in range(rows.shape[1]):
            out ^= self.tables[p][rows[:, p]]
        return out


@dataclass
class QuotientGroup:
    """An enumerated finite quotient with canonical element ordinals."""

    level: int
    elements: np.ndarray  # (order, storage_bytes) uint8, canonically sorted
    v0: int
    v1: int
    _index: dict[bytes, int] | None = field(default=None, repr=False)
    _maps: dict = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def element(self, ordinal: int) -> TruncElem:
        return row_to_elem(self.elements[ordinal], self.level)

    def index(self) -> dict[bytes, int]:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(rows_to_keys(self.elements))}
        return self._index

    def ordinals_of_rows(self, rows: np.ndarray) -> np.ndarray:
        idx = self.index()
        return np.fromiter((idx[k] for k in rows_to_keys(rows)), dtype=np.int64, count=len(rows))

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        idx = self.index()
        return np.fromiter((k in idx for k in rows_to_keys(rows)), dtype=bool, count=len(rows))

    def ordinal_of(self, x: TruncElem) -> int:
        return self.index()[elem_to_row(x).tobytes()]

    def generator_elems(self) -> tuple[TruncElem, TruncElem]:
        return self.element(self.v0), self.element(self.v1)

    def right_mul_map(self, g: TruncElem) -> AffineMap:
        key = ("r", toeplitz.to_int(g))
        if key not in self._maps:
            self._maps[key] = AffineMap.from_scalar(lambda e: toeplitz.mul(e, g), self.level)
        return self._maps[key]

    def conj_map(self, g: TruncElem) -> AffineMap:
        """x -> g^-1 x g."""
        key = ("c", toeplitz.to_int(g))
        if key not in self._maps:
            gi = toeplitz.inv(g)
            self._maps[key] = AffineMap.from_scalar(
                lambda e: toeplitz.mul(toeplitz.mul(gi, e), g), self.level
            )
        return self._maps[key]

    def symbol_maps(self) -> list[tuple[str, AffineMap]]:
        """Right-multiplication maps for v0, v0^-1, v1, v1^-1."""
        v0e, v1e = self.generator_elems()
        return [
            ("v0", self.right_mul_map(v0e)),
            ("v0inv", self.right_mul_map(toeplitz.inv(v0e))),
            ("v1", self.right_mul_map(v1e)),
            ("v1inv", self.right_mul_map(toeplitz.inv(v1e))),
        ]


@dataclass
class Subgroup:
    """Ordinal-indexed subgroup of an enumerated quotient."""

    parent: QuotientGroup
    members: np.ndarray           # sorted ordinals, int64
    gens: tuple[int, ...] = ()    # ordinals generating this subgroup

    @property
    def order(self) -> int:
        return len(self.members)

    def member_set(self) -> frozenset[int]:
        return frozenset(int(m) for m in self.members)

    def member_rows(self) -> np.ndarray:
        return self.parent.elements[self.members]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and np.array_equal(self.members, other.members)
        )


def _trivial_group() -> QuotientGroup:
    return QuotientGroup(0, np.zeros((1, 8), dtype=np.uint8), 0, 0)


def enumerate_quotient(
    level: int,
    cap: int = DEFAULT_LEVEL_CAP,
    force: bool = False,
    cache_dir: str | None = None,
    log: Callable[[str], None] | None = None,
) -> QuotientGroup:
    """Breadth-first closure of the generator images at the given level.

    Levels above `cap` are refused unless `force` is set; the error names
    the order the covering-index pattern predicts.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if level == 0:
        return _trivial_group()
    if level > cap and not force:
        raise ResourceCapError(
            f"level {level} exceeds cap {cap}; predicted order {predicted_order(level)}"
            " (pass force/--force-level-9 to proceed)"
        )
    if cache_dir:
        cached = load_cache(cache_dir, level)
        if cached is not None:
            return cached

    v0 = x0_elem(level, allow_clip=level < 5)
    v1 = x1_elem(level, allow_clip=level < 5)
    nb = storage_bytes(level)
    maps = [
        AffineMap.from_scalar(lambda e, g=g: toeplitz.mul(e, g), level)
        for g in (v0, toeplitz.inv(v0), v1, toeplitz.inv(v1))
    ]

    ident = elem_to_row(toeplitz.identity(level)).reshape(1, nb)
    known: set[bytes] = set(rows_to_keys(ident))
    chunks = [ident]
    frontier = ident
    while len(frontier):
        cand = dedup_rows(np.concatenate([m(frontier) for m in maps]))
        fresh_mask = np.fromiter(
            (k not in known for k in rows_to_keys(cand)), dtype=bool, count=len(cand)
        )
        frontier = cand[fresh_mask]
        if len(frontier):
            known.update(rows_to_keys(frontier))
            chunks.append(frontier)
            if log:
                log(f"level {level}: {sum(len(c) for c in chunks)} elements")

    elements = sort_rows(np.concatenate(chunks))
    group = QuotientGroup(level, elements, 0, 0)
    group.v0 = group.ordinal_of(v0)
    group.v1 = group.ordinal_of(v1)
    if cache_dir:
        save_cache(cache_dir, group)
    return group


def build_tower(
    max_level: int,
    cap: int = DEFAULT_LEVEL_CAP,
    force: bool = False,
    cache_dir: str | None = None,
    log: Callable[[str], None] | None = None,
) -> dict[int, QuotientGroup]:
    return {
        i: enumerate_quotient(i, cap=cap, force=force, cache_dir=cache_dir, log=log)
        for i in range(max_level + 1)
    }


# --- homomorphisms, kernels, closures ----------------------------------------

def truncate_rows(rows: np.ndarray, level: int, j: int) -> np.ndarray:
    """Encodings of the first j diagonals, in level-j storage width."""
    nb_out = storage_bytes(j)
    nbits = 27 * j
    out = np.zeros((len(rows), nb_out), dtype=np.uint8)
    full = nbits // 8
    out[:, :full] = rows[:, :full]
    if nbits % 8:
        out[:, full] = rows[:, full] & ((1 << (nbits % 8)) - 1)
    return out


def truncation_hom(ki: QuotientGroup, kj: QuotientGroup) -> np.ndarray:
    """Ordinal map of the truncation homomorphism K_i -> K_j."""
    if kj.level > ki.level:
        raise ValueError("target level exceeds source level")
    if kj.level == ki.level:
        return np.arange(ki.order, dtype=np.int64)
    if kj.level == 0:
        return np.zeros(ki.order, dtype=np.int64)
    return kj.ordinals_of_rows(truncate_rows(ki.elements, ki.level, kj.level))


def kernel_subgroup(ki: QuotientGroup, j: int) -> Subgroup:
    """Elements whose first j diagonals vanish (j <= level)."""
    if j > ki.level or j < 0:
        raise ValueError(f"kernel level {j} out of range")
    if j == 0:
        members = np.arange(ki.order, dtype=np.int64)
    else:
        trunc = truncate_rows(ki.elements, ki.level, j)
        members = np.nonzero(~trunc.any(axis=1))[0].astype(np.int64)
    return Subgroup(ki, members)


def subgroup_closure(
    ki: QuotientGroup, gens: Iterable[int], normal: bool = False
) -> Subgroup:
    """Smallest subgroup containing gens; with normal=True, also closed under
    conjugation by the group generators (normal closure)."""
    nb = ki.elements.shape[1]
    ident = ki.elements[0].reshape(1, nb)
    known: set[bytes] = set(rows_to_keys(ident))
    chunks = [ident]

    maps: list[AffineMap] = []
    gen_ords: list[int] = []
    seen_gens: set[int] = set()
    gen_queue = [int(g) for g in dict.fromkeys(int(g) for g in gens) if int(g) != 0]
    conj_maps = (
        [ki.conj_map(g) for g in ki.generator_elems()] if normal else []
    )

    frontier = np.zeros((0, nb), dtype=np.uint8)
    while True:
        if gen_queue:
            new_maps = []
            for g in gen_queue:
                if g in seen_gens:
                    continue
                seen_gens.add(g)
                gen_ords.append(g)
                ge = ki.element(g)
                new_maps.append(ki.right_mul_map(ge))
                new_maps.append(ki.right_mul_map(toeplitz.inv(ge)))
            gen_queue = []
            if new_maps:
                # sweep existing members with the new maps only
                members_now = np.concatenate(chunks + ([frontier] if len(frontier) else []))
                extra = dedup_rows(np.concatenate([m(members_now) for m in new_maps]))
                mask = np.fromiter(
                    (k not in known for k in rows_to_keys(extra)), dtype=bool, count=len(extra)
                )
                extra = extra[mask]
                if len(extra):
                    known.update(rows_to_keys(extra))
                    frontier = np.concatenate([frontier, extra]) if len(frontier) else extra
                maps.extend(new_maps)

        while len(frontier):
            chunks.append(frontier)
            cand = dedup_rows(np.concatenate([m(frontier) for m in maps]))
            mask = np.fromiter(
                (k not in known for k in rows_to_keys(cand)), dtype=bool, count=len(cand)
            )
            frontier = cand[mask]
            known.update(rows_to_keys(frontier))

        if not normal:
            break
        members_now = np.concatenate(chunks)
        outside: list[np.ndarray] = []
        for cm in conj_maps:
            img = cm(members_now)
            mask = np.fromiter(
                (k not in known for k in rows_to_keys(img)), dtype=bool, count=len(img)
            )
            if mask.any():
                outside.append(img[mask])
        if not outside:
            break
        new_gens = dedup_rows(np.concatenate(outside))
        gen_queue = [int(o) for o in ki.ordinals_of_rows(new_gens)]

    members = np.sort(ki.ordinals_of_rows(np.concatenate(chunks)))
    return Subgroup(ki, members, tuple(gen_ords))


def center(ki: QuotientGroup) -> Subgroup:
    """Elements commuting with both generator images (hence with everything)."""
    v0e, v1e = ki.generator_elems()
    mask = np.ones(ki.order, dtype=bool)
    for g in (v0e, v1e):
        right = ki.right_mul_map(g)(ki.elements)
        left = AffineMap.from_scalar(lambda e, g=g: toeplitz.mul(g, e), ki.level)(ki.elements)
        mask &= ~np.any(right != left, axis=1)
    return Subgroup(ki, np.nonzero(mask)[0].astype(np.int64))


# --- binary cache --------------------------------------------------------------

def cache_path(cache_dir: str, level: int) -> str:
    return os.path.join(cache_dir, f"quotient_level{level}.bin")


def save_cache(cache_dir: str, group: QuotientGroup) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, group.level)
    header = CACHE_MAGIC + struct.pack("<BQII", group.level, group.order, group.v0, group.v1)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(group.elements).tobytes())
    return path


def load_cache(cache_dir: str, level: int) -> QuotientGroup | None:
    path = cache_path(cache_dir, level)
    if not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != CACHE_MAGIC:
        raise ResourceCapError(f"bad cache magic in {path}")
    lvl, order, v0, v1 = struct.unpack("<BQII", raw[4 : 4 + 17])
    if lvl != level:
        raise ResourceCapError(f"cache level mismatch in {path}")
    nb = storage_bytes(level)
    body = np.frombuffer(raw[4 + 17 :], dtype=np.uint8)
    if body.size != order * nb:
        raise ResourceCapError(f"cache payload size mismatch in {path}")
    return QuotientGroup(level, body.reshape(order, nb).copy(), v0, v1)


def cache_checksum(cache_dir: str, level: int) -> str | None:
    path = cache_path(cache_dir, level)
    if not os.path.exists(path):
        return None
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
