"""4-regular Cayley multigraphs of the quotient tower and its refinement.

Vertices are element ordinals; the four generator symbols v0, v0^-1, v1,
v1^-1 each contribute one directed step per vertex, so the symmetric
adjacency counts every vertex with total degree exactly 4. A symbol fixing
a vertex contributes a loop; fixings always come in (s, s^-1) pairs, so the
diagonal adjacency entry is twice the loop count and degrees stay 4.

refine_tower() interpolates each covering step of index 2^m with m-1
intermediate graphs by quotienting along a hyperplane chain inside the
central elementary abelian kernel, giving a tower where every covering
index is exactly 2.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import toeplitz
from .gf2 import span
from .quotient import (
    QuotientGroup,
    Subgroup,
    dedup_rows,
    kernel_subgroup,
    rows_to_keys,
    truncation_hom,
)

SYMBOLS = ("v0", "v0inv", "v1", "v1inv")


@dataclass
class Multigraph:
    """4-regular multigraph given by per-symbol target vertices."""

    n: int
    targets: np.ndarray  # (n, 4) int64, one column per symbol
    level: int | None = None
    _adj: sp.csr_matrix | None = field(default=None, repr=False)

    def adjacency(self) -> sp.csr_matrix:
        if self._adj is None:
            rows = np.repeat(np.arange(self.n, dtype=np.int64), 4)
            cols = self.targets.reshape(-1)
            data = np.ones(4 * self.n, dtype=np.float64)
            self._adj = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
            self._adj.sum_duplicates()
        return self._adj

    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency().sum(axis=1)).reshape(-1)

    def is_symmetric(self) -> bool:
        a = self.adjacency()
        return (a != a.T).nnz == 0

    def loop_count(self, v: int | None = None) -> int:
        diag = self.adjacency().diagonal()
        total = diag if v is None else diag[v : v + 1]
        return int(total.sum() // 2)

    def neighbor_multiset(self, v: int) -> Counter:
        return Counter(int(t) for t in self.targets[v])

    def edge_list(self) -> list[tuple[int, int, int]]:
        """Sorted undirected edges (u, v, multiplicity); loops count once per loop."""
        a = self.adjacency().tocoo()
        out = {}
        for u, v, m in zip(a.row, a.col, a.data):
            u, v, m = int(u), int(v), int(m)
            if u < v:
                out[(u, v)] = m
            elif u == v:
                out[(u, v)] = m // 2
        return sorted((u, v, m) for (u, v), m in out.items())


def build_cayley(ki: QuotientGroup) -> Multigraph:
    """Cayley multigraph on ordinals with respect to the four generator symbols."""
    n = ki.order
    targets = np.empty((n, 4), dtype=np.int64)
    for col, (_, amap) in enumerate(ki.symbol_maps()):
        targets[:, col] = ki.ordinals_of_rows(amap(ki.elements))
    return Multigraph(n, targets, level=ki.level)


def bipartition(g: Multigraph) -> tuple[np.ndarray | None, tuple[int, int] | None]:
    """BFS 2-coloring; returns (colors, None) or (None, an odd-closing edge)."""
    colors = np.full(g.n, -1, dtype=np.int8)
    colors[0] = 0
    queue = [0]
    while queue:
        nxt = []
        for u in queue:
            cu = colors[u]
            for t in g.targets[u]:
                t = int(t)
                if t == u:
                    return None, (u, u)
                if colors[t] == -1:
                    colors[t] = 1 - cu
                    nxt.append(t)
                elif colors[t] == cu:
                    return None, (u, t)
        queue = nxt
    if (colors == -1).any():
        raise ValueError("graph is disconnected")
    return colors, None


def is_connected(g: Multigraph) -> bool:
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = [0]
    while queue:
        nxt = []
        for u in queue:
            for t in g.targets[u]:
                if not seen[t]:
                    seen[t] = True
                    nxt.append(int(t))
        queue = nxt
    return bool(seen.all())


@dataclass
class TowerReport:
    levels: list[dict]

    def indices(self) -> list[int]:
        return [row["covering_index"] for row in self.levels if row["level"] >= 1]


def covering_indices(orders: dict[int, int]) -> TowerReport:
    """Per-level orders and covering indices |K_i| / |K_{i-1}|."""
    levels = []
    for i in sorted(orders):
        row = {"level": i, "order": orders[i]}
        if i - 1 in orders:
            row["covering_index"] = orders[i] // orders[i - 1]
        elif i == 0:
            row["covering_index"] = 1
        levels.append(row)
    return TowerReport(levels)


def is_covering(gbig: Multigraph, gsmall: Multigraph, vmap: np.ndarray) -> bool:
    """Exhaustive local-isomorphism check of a candidate covering map."""
    if len(vmap) != gbig.n:
        return False
    for u in range(gbig.n):
        image = Counter(int(vmap[t]) for t in gbig.targets[u])
        if image != gsmall.neighbor_multiset(int(vmap[u])):
            return False
    return True


def tower_covering_map(ki: QuotientGroup, kj: QuotientGroup) -> np.ndarray:
    return truncation_hom(ki, kj)


# --- 2-fold refinement ----------------------------------------------------------

def _echelon_rows(rows: np.ndarray) -> list[np.ndarray]:
    """Reduced echelon basis of byte rows viewed as GF(2) vectors."""
    ints = [int.from_bytes(r.tobytes(), "little") for r in rows]
    basis = span(v for v in ints if v)
    nb = rows.shape[1]
    return [
        np.frombuffer(v.to_bytes(nb, "little"), dtype=np.uint8).copy()
        for v in basis.basis
    ]


def _reduce_rows(rows: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    """Coset representatives: clear each basis pivot bit by XOR."""
    out = rows.copy()
    for b in basis:
        v = int.from_bytes(b.tobytes(), "little")
        pivot = v.bit_length() - 1
        mask = (out[:, pivot // 8] >> (pivot % 8)) & 1
        out ^= b * mask[:, None]
    return out


@dataclass
class RefinedStep:
    """Chain of quotient graphs between two consecutive tower levels."""

    level: int
    graphs: list[Multigraph]         # from G_{i-1}-isomorphic up to G_i
    maps: list[np.ndarray]           # vertex maps graphs[t+1] -> graphs[t]
    subspace_dims: list[int]         # kernel subspace dimension per graph

    @property
    def intermediates(self) -> int:
        return max(len(self.graphs) - 2, 0)


def refine_tower(ki: QuotientGroup, kim1: QuotientGroup) -> RefinedStep:
    """Index-2 interpolation of the covering step K_i -> K_{i-1}.

    Builds the hyperplane chain of the central kernel, chosen by the
    lexicographically smallest nonzero functional at each step, and the
    Cayley graphs of the corresponding quotients.
    """
    if ki.level != kim1.level + 1:
        raise ValueError("refine_tower expects consecutive levels")
    ker = kernel_subgroup(ki, kim1.level)
    basis = _echelon_rows(ker.member_rows())
    m = len(basis)

    # descending subspace chain: full kernel, then kernels of functionals
    chains: list[list[np.ndarray]] = [basis]
    current = basis
    while len(current) > 1:
        coords_n = len(basis)
        chosen = None
        for mask in range(1, 1 << coords_n):
            vals = [_functional(mask, b, basis) for b in current]
            if any(vals):
                chosen = [
                    b if not v else _xor_rows(b, current[vals.index(1)])
                    for b, v in zip(current, vals)
                ]
                pivot_vec = current[vals.index(1)]
                chosen = [b for b in chosen if b.any()]
                break
        current = _echelon_rows(np.stack(chosen)) if chosen else []
        chains.append(current)
    if m >= 1:
        chains.append([])

    graphs: list[Multigraph] = []
    maps: list[np.ndarray] = []
    reps_prev = None
    symbol_targets = [ki.ordinals_of_rows(amap(ki.elements)) for _, amap in ki.symbol_maps()]
    for sub_basis in chains:
        reps = _reduce_rows(ki.elements, sub_basis)
        uniq = dedup_rows(reps)
        index = {k: t for t, k in enumerate(rows_to_keys(uniq))}
        vert_of = np.fromiter(
            (index[k] for k in rows_to_keys(reps)), dtype=np.int64, count=ki.order
        )
        targets = np.empty((len(uniq), 4), dtype=np.int64)
        # map each coset rep through each symbol, then back to coset ids
        first_elem = np.empty(len(uniq), dtype=np.int64)
        first_elem[vert_of[::-1]] = np.arange(ki.order - 1, -1, -1, dtype=np.int64)
        for col in range(4):
            targets[:, col] = vert_of[symbol_targets[col][first_elem]]
        graphs.append(Multigraph(len(uniq), targets, level=ki.level))
        if reps_prev is not None:
            # vertices of the finer graph map to the coarser one by reduction
            finer_uniq, finer_vert_of = reps_prev
            reduced = _reduce_rows(finer_uniq, sub_basis)
            maps.append(
                np.fromiter(
                    (index[k] for k in rows_to_keys(reduced)),
                    dtype=np.int64,
                    count=len(finer_uniq),
                )
            )
        reps_prev = (uniq, vert_of)

    graphs.reverse()
    maps.reverse()
    return RefinedStep(
        level=ki.level,
        graphs=graphs,
        maps=maps,
        subspace_dims=[len(c) for c in reversed(chains)],
    )


def _functional(mask: int, row: np.ndarray, basis: list[np.ndarray]) -> int:
    """Evaluate the functional picked by `mask` (over basis coordinates) on row."""
    v = int.from_bytes(row.tobytes(), "little")
    coord_bits = 0
    for idx, b in enumerate(basis):
        bv = int.from_bytes(b.tobytes(), "little")
        pivot = bv.bit_length() - 1
        if (v >> pivot) & 1:
            coord_bits |= 1 << idx
            v ^= bv
    return (mask & coord_bits).bit_count() & 1


def _xor_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a ^ b


# --- exports --------------------------------------------------------------------

def to_edge_lines(g: Multigraph) -> list[str]:
    return [f"{u} {v} {m}" for u, v, m in g.edge_list()]

def to_dot(g: Multigraph, name: str = "cayley") -> str:
    lines = [f"graph {name} {{"]
    for u, v, m in g.edge_list():
        for _ in range(m):
            lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines)


def to_json_summary(g: Multigraph) -> dict:
    degrees = g.degrees()
    return {
        "level": g.level,
        "vertices": g.n,
        "edges": int(degrees.sum() // 2),
        "degree_min": float(degrees.min()),
        "degree_max": float(degrees.max()),
        "loops": g.loop_count(),
    }
