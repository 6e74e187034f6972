"""Lower exponent-2 central series and lower central series in the quotients.

The exponent-2 series descends by L_{t+1} = [L_t, K] L_t^2 and the central
series by C_{t+1} = [C_t, K]. Each next term is computed as the normal
closure of squares and generator-commutators of the previous term's
generating set, which equals the full term: the quotient of a term by that
closure is central and elementary abelian (resp. central), so nothing is
missed.

verify_gammabases() checks the 3-periodic index pattern 8, 8, 4 of the
abelian one-diagonal quotients together with the explicit commutator-word
bases; check_conjecture() compares every series term against the matching
truncation kernel at the deepest affordable level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import toeplitz
from .generators import constant_table, iterated_comm
from .gf2 import Subspace27, span
from .quotient import QuotientGroup, Subgroup, kernel_subgroup, subgroup_closure


@dataclass
class SeriesChain:
    parent: QuotientGroup
    kind: str  # "exponent2" | "central"
    terms: list[Subgroup]

    def orders(self) -> list[int]:
        return [t.order for t in self.terms]

    def quotient_log2(self, i: int) -> int:
        """log2 |terms[i] / terms[i+1]|."""
        return int(self.terms[i].order.bit_length() - self.terms[i + 1].order.bit_length())


def _whole_group(kn: QuotientGroup) -> Subgroup:
    return Subgroup(
        kn, np.arange(kn.order, dtype=np.int64), (int(kn.v0), int(kn.v1))
    )


def _step_gens_exponent2(kn: QuotientGroup, gens: tuple[int, ...]) -> list[int]:
    # next term = (term)^2 [term, group]: squares of the term's generators plus
    # their commutators with the two group generators; the quotient of the term
    # by the normal closure of these is then central and elementary abelian.
    elems = [kn.element(g) for g in gens]
    v0e, v1e = kn.generator_elems()
    out = [toeplitz.mul(g, g) for g in elems]
    out += [toeplitz.commutator(g, v) for g in elems for v in (v0e, v1e)]
    return [kn.ordinal_of(e) for e in out]


def _step_gens_central(kn: QuotientGroup, gens: tuple[int, ...]) -> list[int]:
    elems = [kn.element(g) for g in gens]
    v0e, v1e = kn.generator_elems()
    out = [toeplitz.commutator(g, v) for g in elems for v in (v0e, v1e)]
    return [kn.ordinal_of(e) for e in out]


def _series(kn: QuotientGroup, kind: str, max_terms: int | None) -> SeriesChain:
    step = _step_gens_exponent2 if kind == "exponent2" else _step_gens_central
    terms = [_whole_group(kn)]
    while terms[-1].order > 1:
        if max_terms is not None and len(terms) > max_terms:
            break
        seeds = step(kn, terms[-1].gens)
        terms.append(subgroup_closure(kn, seeds, normal=True))
    return SeriesChain(kn, kind, terms)


def exponent2_series(kn: QuotientGroup, max_terms: int | None = None) -> SeriesChain:
    """Terms L_0 = K_n >= L_1 >= ... with L_{t+1} = [L_t, K_n] L_t^2."""
    return _series(kn, "exponent2", max_terms)


def central_series(kn: QuotientGroup, max_terms: int | None = None) -> SeriesChain:
    """Lower central series: terms[0] = K_n, terms[t+1] = [terms[t], K_n].

    terms[0] is the whole group (the first lower central term); terms[t] at
    depth t is the term whose elements conjecturally have their first t
    diagonals zero, aligning it with exponent2_series terms of equal index.
    """
    return _series(kn, "central", max_terms)


def index_lower_bound(k: int) -> int:
    """Proved lower bound for the index of the k-th truncation subgroup."""
    if k < 1:
        raise ValueError("k must be >= 1")
    i, j = divmod(k, 3)
    if (i, j) == (0, 1):
        return 2**2
    if (i, j) == (0, 2):
        return 2**5
    mu = {0: 0, 1: 3, 2: 6}[j]
    return 2 ** (8 * i - 1 + mu)


# commutator words of the quotient bases, per residue of i mod 3:
# (number of leading x0-commutations, extra generator indices to commute with)
_BASIS_WORDS = {
    1: ((None, ()), (-2, (1, 0)), (-2, (1, 1))),
    2: ((None, ()), (-1, (1,))),
    0: ((None, ()), (-1, (1,)), (-2, (1, 1))),
}


def basis_words(i: int) -> list[tuple[int, tuple[int, ...]]]:
    """[(k, extras)] meaning [x1, k-fold x0, *extras] for quotient depth i."""
    out = []
    for base, extras in _BASIS_WORDS[i % 3]:
        out.append((i if base is None else i + base, extras))
    return out


def eval_basis_word(k: int, extras: tuple[int, ...], level: int):
    from .generators import generator_set

    gens = generator_set(max(level, 6))
    images = (toeplitz.truncate(gens.x0, level), toeplitz.truncate(gens.x1, level))
    acc = iterated_comm(k, level)
    for g in extras:
        acc = toeplitz.commutator(acc, images[g])
    return acc


@dataclass
class QuotientBasisReport:
    i: int
    index: int
    expected_index: int
    lead_subspace: Subspace27
    word_depths: list[int]
    word_leads: list[int]
    words_in_term: bool
    lead_subspace_in_predicted: bool
    match: bool


def verify_gammabases(tower: dict[int, QuotientGroup], imax: int) -> list[QuotientBasisReport]:
    """For each 2 <= i <= imax, compare the depth-i series term inside the
    level-(i+1) quotient with the predicted index and commutator-word basis."""
    consts = constant_table()
    predicted_space = {1: consts.s2, 2: consts.s3, 0: consts.s1}
    reports = []
    for i in range(2, imax + 1):
        kn = tower[i + 1]
        chain = exponent2_series(kn, max_terms=i)
        term = chain.terms[i]
        rows = term.member_rows()
        # elements of the term with the first i diagonals zero
        from .quotient import truncate_rows

        prefix_zero = ~truncate_rows(rows, kn.level, i).any(axis=1)
        inner = rows[prefix_zero]
        lead_vals = sorted(set(_last_diagonals(inner, kn.level)))
        lead_space = span(lead_vals)
        index = term.order // _order_of_all_zero(term, kn, i + 1)
        expected = 8 if i % 3 in (0, 1) else 4

        word_depths, word_leads, in_term = [], [], True
        for k, extras in basis_words(i):
            w = eval_basis_word(k, extras, i + 1)
            word_depths.append(toeplitz.depth(w))
            word_leads.append(w.diags[i] if toeplitz.depth(w) == i else 0)
            in_term &= int(kn.ordinal_of(w)) in term.member_set()
        words_span = span(word_leads)
        match = (
            index == expected
            and 2**lead_space.dim == index
            and bool(prefix_zero.all())
            and words_span == lead_space
            and len(word_leads) == lead_space.dim
            and all(d == i for d in word_depths)
            and in_term
        )
        reports.append(
            QuotientBasisReport(
                i=i,
                index=index,
                expected_index=expected,
                lead_subspace=lead_space,
                word_depths=word_depths,
                word_leads=word_leads,
                words_in_term=in_term,
                lead_subspace_in_predicted=all(
                    predicted_space[i % 3].contains(v) for v in lead_vals
                ),
                match=match,
            )
        )
    return reports


def _last_diagonals(rows: np.ndarray, level: int) -> list[int]:
    out = []
    for row in rows:
        out.append(toeplitz.from_bytes(row.tobytes()[: toeplitz.num_bytes(level)], level).diags[-1])
    return out


def _order_of_all_zero(term: Subgroup, kn: QuotientGroup, j: int) -> int:
    """Order of the intersection of the term with the level-j kernel."""
    from .quotient import truncate_rows

    rows = term.member_rows()
    return int((~truncate_rows(rows, kn.level, j).any(axis=1)).sum())


@dataclass
class ConjectureReport:
    n: int
    per_i: list[dict]
    widths_log2: list[int]
    all_equal: bool


def check_conjecture(kn: QuotientGroup, imax: int) -> ConjectureReport:
    """Compare each exponent-2 term with the matching truncation kernel in K_n."""
    chain = exponent2_series(kn, max_terms=imax)
    per_i = []
    all_equal = True
    for i in range(1, imax + 1):
        term = chain.terms[i] if i < len(chain.terms) else Subgroup(kn, np.array([0], dtype=np.int64))
        ker = kernel_subgroup(kn, i)
        term_set = term.member_set()
        ker_set = ker.member_set()
        contained = term_set <= ker_set
        equal = term_set == ker_set
        all_equal &= equal
        per_i.append(
            {
                "i": i,
                "series_order": term.order,
                "kernel_order": ker.order,
                "contained": bool(contained),
                "equal": bool(equal),
            }
        )
    widths = [chain.quotient_log2(i) for i in range(2, min(imax, len(chain.terms) - 2) + 1)]
    return ConjectureReport(n=kn.level, per_i=per_i, widths_log2=widths, all_equal=all_equal)


def compare_central_series(kn: QuotientGroup, imax: int) -> list[dict]:
    """Order comparison of exponent-2 vs central quotients, with the
    elementary-abelian sanity check that makes equal orders mean isomorphy."""
    lam = exponent2_series(kn, max_terms=imax + 1)
    gam = central_series(kn, max_terms=imax + 1)
    out = []
    for i in range(2, imax + 1):
        if i + 1 >= len(lam.terms) or i + 1 >= len(gam.terms):
            break
        lam_log = lam.quotient_log2(i)
        # both chains are compared at equal depth: terms[i] of either chain
        # is the term conjecturally equal to the level-i truncation kernel
        gam_log = gam.quotient_log2(i)
        gam_term, gam_next = gam.terms[i], gam.terms[i + 1]
        elem_ab = _quotient_elementary_abelian(kn, gam_term, gam_next)
        out.append(
            {
                "i": i,
                "lambda_quotient_log2": lam_log,
                "gamma_quotient_log2": gam_log,
                "orders_equal": lam_log == gam_log,
                "gamma_quotient_elementary_abelian": elem_ab,
                "isomorphic": lam_log == gam_log and elem_ab,
            }
        )
    return out


def _quotient_elementary_abelian(kn: QuotientGroup, term: Subgroup, nxt: Subgroup) -> bool:
    nxt_set = nxt.member_set()
    elems = [kn.element(g) for g in term.gens]
    for i, g in enumerate(elems):
        if kn.ordinal_of(toeplitz.mul(g, g)) not in nxt_set:
            return False
        for h in elems[i + 1 :]:
            if kn.ordinal_of(toeplitz.commutator(g, h)) not in nxt_set:
                return False
    return True
