"""Dense semiring-tagged tensors, contraction, and the projection tensors.

Index tuples are 1-based throughout, matching the usual multilinear notation;
storage is row-major.  Four semirings are supported: the Boolean semiring
(or/and on {0,1}), exact integers, exact rationals, and binary64 reals with an
explicit comparison tolerance.  The exact tags never tolerate.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from enum import Enum
from math import prod
from typing import Iterable, Sequence

from .budgets import DEFAULT_BUDGET, Budget
from .errors import (
    EmptyRelation,
    IndexOutOfRange,
    LengthMismatch,
    SemiringMismatch,
    ShapeMismatch,
)
from .rationals import rat, rat_from_str, rat_to_str
from .structures import Structure

REAL_TOLERANCE = 1e-9


class SemiringTag(str, Enum):
    BOOL = "bool"
    INT = "int"
    RAT = "rat"
    REAL = "real"


def semiring_zero(tag: SemiringTag):
    return rat(0) if tag is SemiringTag.RAT else (0.0 if tag is SemiringTag.REAL else 0)


def semiring_one(tag: SemiringTag):
    return rat(1) if tag is SemiringTag.RAT else (1.0 if tag is SemiringTag.REAL else 1)


def semiring_add(tag: SemiringTag, a, b):
    if tag is SemiringTag.BOOL:
        return a | b
    return a + b


def semiring_mul(tag: SemiringTag, a, b):
    if tag is SemiringTag.BOOL:
        return a & b
    return a * b


def semiring_eq(tag: SemiringTag, a, b, tol: float = REAL_TOLERANCE) -> bool:
    if tag is SemiringTag.REAL:
        return abs(a - b) <= tol
    return a == b


def coerce_value(tag: SemiringTag, v):
    if tag is SemiringTag.BOOL:
        iv = int(v)
        if iv not in (0, 1):
            raise SemiringMismatch(f"{v!r} is not a Boolean semiring value")
        return iv
    if tag is SemiringTag.INT:
        if isinstance(v, float) or getattr(v, "denominator", 1) != 1:
            raise SemiringMismatch(f"{v!r} is not an integer")
        return int(v)
    if tag is SemiringTag.RAT:
        if isinstance(v, float):
            raise SemiringMismatch("floats cannot enter the exact rational semiring")
        return rat(v) if not isinstance(v, str) else rat_from_str(v)
    return float(v)


@dataclass(frozen=True)
class Tensor:
    """Dense tensor over a tagged semiring, row-major entries."""

    shape: tuple[int, ...]
    semiring: SemiringTag
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != prod(self.shape):
            raise ShapeMismatch(
                f"{len(self.entries)} entries for shape {self.shape}"
            )

    @staticmethod
    def build(shape: Sequence[int], semiring: SemiringTag, entries: Iterable) -> "Tensor":
        vals = tuple(coerce_value(semiring, v) for v in entries)
        return Tensor(tuple(int(s) for s in shape), semiring, vals)

    @staticmethod
    def zeros(shape: Sequence[int], semiring: SemiringTag) -> "Tensor":
        z = semiring_zero(semiring)
        return Tensor(tuple(int(s) for s in shape), semiring, (z,) * prod(shape))

    def order(self) -> int:
        return len(self.shape)

    def flat_index(self, idx: Sequence[int]) -> int:
        if len(idx) != len(self.shape):
            raise IndexOutOfRange(f"index {tuple(idx)} has wrong length for {self.shape}")
        pos = 0
        for i, n in zip(idx, self.shape):
            if not 1 <= i <= n:
                raise IndexOutOfRange(f"index {tuple(idx)} outside shape {self.shape}")
            pos = pos * n + (i - 1)
        return pos

    def at(self, *idx: int):
        """Entry at a 1-based multi-index."""
        return self.entries[self.flat_index(idx)]

    def indices(self):
        return itertools.product(*(range(1, n + 1) for n in self.shape))

    def support(self) -> set[tuple[int, ...]]:
        z = semiring_zero(self.semiring)
        return {i for i in self.indices() if not semiring_eq(self.semiring, self.at(*i), z)}

    def squeeze(self) -> "Tensor":
        """Drop size-1 modes (tensors are identified across such modes)."""
        shape = tuple(n for n in self.shape if n != 1) or (1,)
        return Tensor(shape, self.semiring, self.entries)

    def scalar(self):
        """The single entry of a fully contracted (order-0 or all-ones) tensor."""
        if prod(self.shape) != 1:
            raise ShapeMismatch(f"tensor of shape {self.shape} is not a scalar")
        return self.entries[0]

    def equal(self, other: "Tensor", tol: float = REAL_TOLERANCE) -> bool:
        if self.shape != other.shape or self.semiring != other.semiring:
            return False
        return all(
            semiring_eq(self.semiring, a, b, tol)
            for a, b in zip(self.entries, other.entries)
        )

    def add(self, other: "Tensor") -> "Tensor":
        if self.semiring != other.semiring:
            raise SemiringMismatch("tensor addition needs matching semirings")
        if self.shape != other.shape:
            raise ShapeMismatch("tensor addition needs matching shapes")
        vals = tuple(
            semiring_add(self.semiring, a, b) for a, b in zip(self.entries, other.entries)
        )
        return Tensor(self.shape, self.semiring, vals)

    def scale(self, c) -> "Tensor":
        c = coerce_value(self.semiring, c)
        return Tensor(
            self.shape,
            self.semiring,
            tuple(semiring_mul(self.semiring, c, v) for v in self.entries),
        )

    def to_json(self) -> str:
        if self.semiring is SemiringTag.RAT:
            entries = [rat_to_str(v) for v in self.entries]
        elif self.semiring is SemiringTag.REAL:
            entries = [float(v) for v in self.entries]
        else:
            entries = [int(v) for v in self.entries]
        return json.dumps(
            {"shape": list(self.shape), "semiring": self.semiring.value, "entries": entries},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "Tensor":
        doc = json.loads(text)
        return Tensor.build(doc["shape"], SemiringTag(doc["semiring"]), doc["entries"])


# -- tuples -------------------------------------------------------------------


def project(s: Sequence, i: Sequence[int]) -> tuple:
    """Projection of the tuple s onto the 1-based index tuple i."""
    out = []
    for pos in i:
        if not 1 <= pos <= len(s):
            raise IndexOutOfRange(f"position {pos} outside 1..{len(s)}")
        out.append(s[pos - 1])
    return tuple(out)


def precedes(s: Sequence, t: Sequence) -> bool:
    """True iff equal positions of s force equal positions of t."""
    if len(s) != len(t):
        raise LengthMismatch(f"tuples of lengths {len(s)} and {len(t)}")
    first_at = {}
    for sv, tv in zip(s, t):
        if sv in first_at:
            if first_at[sv] != tv:
                return False
        else:
            first_at[sv] = tv
    return True


# -- contraction and unit tensors ---------------------------------------------


def contract(T: Tensor, U: Tensor, ell: int) -> Tensor:
    """Contract the last ``ell`` modes of T with the first ``ell`` modes of U.

    Contraction composes left to right; it is not associative in general, but
    contractions over disjoint mode sets commute.
    """
    if T.semiring != U.semiring:
        raise SemiringMismatch(f"{T.semiring} vs {U.semiring}")
    if ell < 0 or ell > T.order() or ell > U.order():
        raise ShapeMismatch(f"cannot contract {ell} modes")
    if T.shape[T.order() - ell :] != U.shape[:ell]:
        raise ShapeMismatch(
            f"trailing modes {T.shape[T.order() - ell:]} != leading modes {U.shape[:ell]}"
        )
    front = T.shape[: T.order() - ell]
    back = U.shape[ell:]
    mid = prod(T.shape[T.order() - ell :])
    nf, nb = prod(front), prod(back)
    tag = T.semiring
    add, mul = semiring_add, semiring_mul
    out = []
    for i in range(nf):
        trow = T.entries[i * mid : (i + 1) * mid]
        for j in range(nb):
            acc = semiring_zero(tag)
            for z in range(mid):
                acc = add(tag, acc, mul(tag, trow[z], U.entries[z * nb + j]))
            out.append(acc)
    return Tensor(front + back, tag, tuple(out))


def unit_tensor(i: Sequence[int], shape: Sequence[int], semiring: SemiringTag = SemiringTag.INT) -> Tensor:
    """The standard unit tensor with a single 1 at the 1-based index i."""
    T = Tensor.zeros(shape, semiring)
    pos = T.flat_index(tuple(i))
    vals = list(T.entries)
    vals[pos] = semiring_one(semiring)
    return Tensor(T.shape, semiring, tuple(vals))


# -- structural projection tensors ---------------------------------------------


def relation_projection_tensor(
    A: Structure,
    symbol: str,
    i: Sequence[int],
    semiring: SemiringTag = SemiringTag.RAT,
    budget: Budget = DEFAULT_BUDGET,
) -> Tensor:
    """Incidence tensor between domain k-tuples and relation tuples.

    Shape is (n, ..., n, m) with k leading domain modes and one mode over the
    relation tuples of ``symbol`` in canonical order; the entry at (a, t) is 1
    exactly when the projection of t onto i equals a.
    """
    tuples = A.tuples(symbol)
    if not tuples:
        raise EmptyRelation(f"relation {symbol!r} is empty")
    r = A.signature.arity(symbol)
    k = len(i)
    for pos in i:
        if not 1 <= pos <= r:
            raise IndexOutOfRange(f"index {pos} outside 1..{r}")
    n = len(A.domain)
    budget.check_tuples(n**k * len(tuples), "projection tensor")
    one, zero = semiring_one(semiring), semiring_zero(semiring)
    entries = []
    for a in itertools.product(A.domain, repeat=k):
        for t in tuples:
            entries.append(one if project(t, i) == a else zero)
    return Tensor((n,) * k + (len(tuples),), semiring, tuple(entries))


def power_projection_tensor(
    A: Structure,
    k: int,
    i: Sequence[int],
    semiring: SemiringTag = SemiringTag.RAT,
    budget: Budget = DEFAULT_BUDGET,
) -> Tensor:
    """Projection tensor over all domain k-tuples (shape n^(2k)).

    Entry at (a, b) is 1 exactly when the projection of b onto i equals a.
    This coincides with :func:`relation_projection_tensor` for the full
    enhancement relation ``R_k``.
    """
    if len(i) != k:
        raise LengthMismatch(f"index tuple {tuple(i)} must have length {k}")
    for pos in i:
        if not 1 <= pos <= k:
            raise IndexOutOfRange(f"index {pos} outside 1..{k}")
    n = len(A.domain)
    budget.check_tuples(n ** (2 * k), "power projection tensor")
    one, zero = semiring_one(semiring), semiring_zero(semiring)
    entries = []
    for a in itertools.product(A.domain, repeat=k):
        for b in itertools.product(A.domain, repeat=k):
            entries.append(one if project(b, i) == a else zero)
    return Tensor((n,) * (2 * k), semiring, tuple(entries))
