"""Linear minions as matrix families over semirings.

Elements are L x d matrices; taking a minor along a map pi multiplies from
the left by the 0/1 aggregation matrix of pi.  Five concrete families are
implemented:

* ``HORN``        Boolean indicator vectors of nonempty subsets (d = 1),
* ``STOCHASTIC``  nonnegative rational vectors summing to one (d = 1),
* ``AFFINE``      integer vectors summing to one (d = 1),
* ``ORTHOGONAL``  real matrices with pairwise orthogonal rows of unit total
  norm (finite effective width; all further columns are zero by convention),
* ``COMBINED``    a stochastic column paired with an affine-integer column
  whose support is nested inside the stochastic one.

``PRODUCT`` tags the general semi-direct product of a conic family with a
linear one; ``COMBINED`` is exactly the stochastic/affine instance of it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .budgets import DEFAULT_BUDGET, Budget
from .errors import (
    ArityMismatch,
    MembershipLost,
    SemiringMismatch,
    SupportViolation,
)
from .rationals import rat, rat_to_str
from .tensors import SemiringTag, Tensor, semiring_add, semiring_zero

ORTHO_TOLERANCE = 1e-8


class MinionTag(str, Enum):
    HORN = "horn"
    STOCHASTIC = "stochastic"
    AFFINE = "affine"
    ORTHOGONAL = "orthogonal"
    COMBINED = "combined"
    PRODUCT = "product"


CONIC_TAGS = {
    MinionTag.HORN,
    MinionTag.STOCHASTIC,
    MinionTag.ORTHOGONAL,
    MinionTag.COMBINED,
    MinionTag.PRODUCT,
}

_SIMPLE_SEMIRING = {
    MinionTag.HORN: SemiringTag.BOOL,
    MinionTag.STOCHASTIC: SemiringTag.RAT,
    MinionTag.AFFINE: SemiringTag.INT,
    MinionTag.ORTHOGONAL: SemiringTag.REAL,
}


@dataclass(frozen=True)
class MinorMap:
    """A total map pi from [source_arity] to [target_arity], 1-based."""

    source_arity: int
    target_arity: int
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source_arity:
            raise ArityMismatch("minor map must assign every source coordinate")
        for v in self.mapping:
            if not 1 <= v <= self.target_arity:
                raise ArityMismatch(f"minor map value {v} outside 1..{self.target_arity}")

    @staticmethod
    def of(values: Sequence[int], target_arity: int) -> "MinorMap":
        return MinorMap(len(values), target_arity, tuple(values))

    def compose(self, later: "MinorMap") -> "MinorMap":
        """The map 'later after self'."""
        if later.source_arity != self.target_arity:
            raise ArityMismatch("minor maps do not compose")
        return MinorMap(
            self.source_arity, later.target_arity,
            tuple(later.mapping[v - 1] for v in self.mapping),
        )


@dataclass(frozen=True)
class MinionElement:
    """A minion element: one matrix block per component family."""

    arity: int
    tag: MinionTag
    blocks: tuple[Tensor, ...]
    block_tags: tuple[MinionTag, ...]

    @property
    def depth(self) -> int:
        return sum(b.shape[1] for b in self.blocks)

    @property
    def matrix(self) -> Tensor:
        if len(self.blocks) != 1:
            raise SemiringMismatch("product elements have no single matrix")
        return self.blocks[0]

    def row(self, i: int) -> tuple:
        """Concatenated 1-based row across blocks."""
        out = []
        for b in self.blocks:
            d = b.shape[1]
            out.extend(b.entries[(i - 1) * d : i * d])
        return tuple(out)

    def block_row_is_zero(self, bi: int, i: int, tol: float = ORTHO_TOLERANCE) -> bool:
        b = self.blocks[bi]
        d = b.shape[1]
        row = b.entries[(i - 1) * d : i * d]
        if b.semiring is SemiringTag.REAL:
            return all(abs(v) <= tol for v in row)
        z = semiring_zero(b.semiring)
        return all(v == z for v in row)

    def row_is_zero(self, i: int, tol: float = ORTHO_TOLERANCE) -> bool:
        return all(self.block_row_is_zero(bi, i, tol) for bi in range(len(self.blocks)))

    def validate(self) -> None:
        if self.tag in _SIMPLE_SEMIRING:
            if not check_membership(self.matrix, self.tag):
                raise MembershipLost(f"matrix is not a valid {self.tag.value} element")
            return
        if len(self.blocks) < 2:
            raise MembershipLost("product elements need at least two blocks")
        for b, t in zip(self.blocks, self.block_tags):
            if not check_membership(b, t):
                raise MembershipLost(f"block is not a valid {t.value} element")
        lead = self.blocks[0]
        if self.block_tags[0] not in CONIC_TAGS:
            raise MembershipLost("leading product block must come from a conic family")
        for i in range(1, self.arity + 1):
            if self.block_row_is_zero(0, i):
                for bi in range(1, len(self.blocks)):
                    if not self.block_row_is_zero(bi, i):
                        raise MembershipLost(f"support of block {bi} leaks outside row {i}")
        del lead

    def to_json(self) -> str:
        def block_entries(b: Tensor):
            if b.semiring is SemiringTag.RAT:
                return [rat_to_str(v) for v in b.entries]
            if b.semiring is SemiringTag.REAL:
                return [float(v) for v in b.entries]
            return [int(v) for v in b.entries]

        doc = {
            "arity": self.arity,
            "depth": self.depth,
            "tag": self.tag.value,
            "matrix": [
                {"semiring": b.semiring.value, "cols": b.shape[1], "entries": block_entries(b)}
                for b in self.blocks
            ],
        }
        return json.dumps(doc, sort_keys=True)


def _simple(tag: MinionTag, matrix: Tensor) -> MinionElement:
    elem = MinionElement(matrix.shape[0], tag, (matrix,), (tag,))
    elem.validate()
    return elem


def stochastic(entries: Iterable) -> MinionElement:
    vals = [rat(v) if not isinstance(v, str) else v for v in entries]
    m = Tensor.build((len(vals), 1), SemiringTag.RAT, vals)
    return _simple(MinionTag.STOCHASTIC, m)


def affine_integer(entries: Iterable[int]) -> MinionElement:
    vals = list(entries)
    m = Tensor.build((len(vals), 1), SemiringTag.INT, vals)
    return _simple(MinionTag.AFFINE, m)


def horn_indicator(arity: int, members: Iterable[int]) -> MinionElement:
    """Indicator vector of a nonempty subset of 1..arity."""
    chosen = set(members)
    m = Tensor.build(
        (arity, 1), SemiringTag.BOOL, [1 if i in chosen else 0 for i in range(1, arity + 1)]
    )
    return _simple(MinionTag.HORN, m)


def orthogonal_rows(rows: Sequence[Sequence[float]]) -> MinionElement:
    width = max(len(r) for r in rows)
    entries = []
    for r in rows:
        entries.extend(list(r) + [0.0] * (width - len(r)))
    m = Tensor.build((len(rows), width), SemiringTag.REAL, entries)
    return _simple(MinionTag.ORTHOGONAL, m)


# -- membership ----------------------------------------------------------------


def check_membership(matrix: Tensor, tag: MinionTag, tol: float = ORTHO_TOLERANCE) -> bool:
    """Does the matrix satisfy the defining predicate of the family ``tag``?"""
    if matrix.order() != 2:
        return False
    L, d = matrix.shape
    if tag is MinionTag.HORN:
        if matrix.semiring is not SemiringTag.BOOL or d != 1:
            raise SemiringMismatch("horn elements are Boolean column vectors")
        return any(v == 1 for v in matrix.entries)
    if tag is MinionTag.STOCHASTIC:
        if matrix.semiring is not SemiringTag.RAT or d != 1:
            raise SemiringMismatch("stochastic elements are rational column vectors")
        return all(v >= 0 for v in matrix.entries) and sum(matrix.entries) == 1
    if tag is MinionTag.AFFINE:
        if matrix.semiring is not SemiringTag.INT or d != 1:
            raise SemiringMismatch("affine elements are integer column vectors")
        return sum(matrix.entries) == 1
    if tag is MinionTag.ORTHOGONAL:
        if matrix.semiring is not SemiringTag.REAL:
            raise SemiringMismatch("orthogonal-row elements are real matrices")
        rows = [matrix.entries[i * d : (i + 1) * d] for i in range(L)]
        trace = 0.0
        for i in range(L):
            for j in range(i, L):
                dot = sum(a * b for a, b in zip(rows[i], rows[j]))
                if i == j:
                    trace += dot
                elif abs(dot) > tol:
                    return False
        return abs(trace - 1.0) <= tol
    if tag is MinionTag.COMBINED:
        if matrix.semiring is not SemiringTag.RAT or d != 2:
            raise SemiringMismatch("combined elements are rational L x 2 matrices")
        col1 = [matrix.entries[2 * i] for i in range(L)]
        col2 = [matrix.entries[2 * i + 1] for i in range(L)]
        if not (all(v >= 0 for v in col1) and sum(col1) == 1):
            return False
        if not (all(v.denominator == 1 for v in col2) and sum(col2) == 1):
            return False
        return all(not (u == 0 and v != 0) for u, v in zip(col1, col2))
    raise SemiringMismatch(f"no membership predicate for tag {tag}")


def combined(col_stochastic: Iterable, col_affine: Iterable[int]) -> MinionElement:
    """A combined stochastic/affine element from its two columns."""
    q = stochastic(col_stochastic)
    z = affine_integer(col_affine)
    return semidirect(q, z)


# -- minors --------------------------------------------------------------------


def minor(M: MinionElement, pi: MinorMap) -> MinionElement:
    """The minor P.M: rows of M aggregated along pi, semiring-wise per block."""
    if pi.source_arity != M.arity:
        raise ArityMismatch(f"minor map has source {pi.source_arity}, element arity {M.arity}")
    new_blocks = []
    for b in M.blocks:
        L, d = b.shape
        z = semiring_zero(b.semiring)
        rows = [[z] * d for _ in range(pi.target_arity)]
        for j in range(L):
            target = pi.mapping[j] - 1
            off = j * d
            for c in range(d):
                rows[target][c] = semiring_add(b.semiring, rows[target][c], b.entries[off + c])
        new_blocks.append(
            Tensor((pi.target_arity, d), b.semiring, tuple(v for row in rows for v in row))
        )
    out = MinionElement(pi.target_arity, M.tag, tuple(new_blocks), M.block_tags)
    out.validate()
    return out


# -- conic check -----------------------------------------------------------------


def is_conic_matrix(M: MinionElement, budget: Budget = DEFAULT_BUDGET) -> bool:
    """Nonzero, and no nonempty row subset cancels to zero without being zero.

    The subset quantifier is exhaustive by definition; only subsets of nonzero
    rows matter (zero rows change neither side of the implication), which is
    what keeps the enumeration honest and affordable.
    """
    budget.check_subset_arity(M.arity)
    nonzero = [i for i in range(1, M.arity + 1) if not M.row_is_zero(i)]
    if not nonzero:
        return False
    for size in range(1, len(nonzero) + 1):
        for subset in itertools.combinations(nonzero, size):
            if _rows_sum_to_zero(M, subset):
                return False
    return True


def _rows_sum_to_zero(M: MinionElement, rows: Sequence[int]) -> bool:
    for b in M.blocks:
        L, d = b.shape
        for c in range(d):
            acc = semiring_zero(b.semiring)
            for i in rows:
                acc = semiring_add(b.semiring, acc, b.entries[(i - 1) * d + c])
            if b.semiring is SemiringTag.REAL:
                if abs(acc) > ORTHO_TOLERANCE:
                    return False
            elif acc != semiring_zero(b.semiring):
                return False
    return True


# -- semi-direct product -----------------------------------------------------------


_COMPATIBLE_SEMIRINGS = {
    (SemiringTag.RAT, SemiringTag.INT),
    (SemiringTag.INT, SemiringTag.RAT),
}


def semidirect(M: MinionElement, N: MinionElement) -> MinionElement:
    """Block concatenation [M N] under the support-nesting condition.

    The left factor must come from a conic family; the semirings must agree
    or be integer/rational (integers embed in the rationals).  Heterogeneous
    pairs such as Boolean with integer are rejected.
    """
    if M.arity != N.arity:
        raise ArityMismatch(f"arities {M.arity} and {N.arity} differ")
    if M.tag not in CONIC_TAGS:
        raise SemiringMismatch(f"left factor tag {M.tag.value} is not conic")
    for mb in M.blocks:
        for nb in N.blocks:
            if mb.semiring != nb.semiring and (mb.semiring, nb.semiring) not in _COMPATIBLE_SEMIRINGS:
                raise SemiringMismatch(
                    f"semirings {mb.semiring.value} and {nb.semiring.value} are incompatible"
                )
    for i in range(1, M.arity + 1):
        if M.row_is_zero(i) and not N.row_is_zero(i):
            raise SupportViolation(f"row {i} vanishes on the left factor but not the right")
    tag = (
        MinionTag.COMBINED
        if (M.tag, N.tag) == (MinionTag.STOCHASTIC, MinionTag.AFFINE)
        else MinionTag.PRODUCT
    )
    out = MinionElement(M.arity, tag, M.blocks + N.blocks, M.block_tags + N.block_tags)
    out.validate()
    return out


# -- enumeration of the Horn family ----------------------------------------------


def enumerate_horn(arity: int, budget: Budget = DEFAULT_BUDGET) -> list[MinionElement]:
    """All 2^L - 1 indicator vectors of nonempty subsets, by ascending bitmask.

    Bit i of the mask (0-based) marks row i + 1.
    """
    budget.check_subset_arity(arity)
    out = []
    for mask in range(1, 1 << arity):
        members = [i + 1 for i in range(arity) if mask >> i & 1]
        out.append(horn_indicator(arity, members))
    return out
