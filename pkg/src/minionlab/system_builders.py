"""Equality-system builder with sound presolve.

The relaxation systems are huge but massively redundant: most rows are
pairwise variable identifications or force variables to zero outright.  The
builder applies only equivalence-preserving reductions before the exact
solvers run:

* two-term rows ``c x - c y = 0`` merge x and y (union-find),
* single-term rows ``c x = 0`` pin x to zero (any variable domain),
* rows with all coefficients of one sign and zero right-hand side pin all
  their variables (nonnegative domain only),
* duplicate rows (equal up to a nonzero rational factor, hence the same
  hyperplane) collapse to one.

Inconsistent rows such as ``0 = 1`` are kept so that the downstream solver
rejects and its certificate verifies against the emitted system.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Optional

from .exact_solvers import DomainTag, LinearSystem
from .rationals import R0, rat


@dataclass
class PresolvedSystem:
    system: LinearSystem
    key_order: tuple[Hashable, ...]
    root_of: dict
    pinned: set
    column_of: dict

    def expand(self, point: dict) -> dict:
        """Lift a solution over representative columns back to every key.

        Pinned keys take zero; merged keys take their representative's value;
        keys whose every row was discharged by the presolve are free and take
        zero as well.
        """
        out = {}
        for key in self.key_order:
            root = self.root_of[key]
            if root in self.pinned:
                out[key] = R0
            else:
                col = self.column_of.get(root)
                out[key] = point.get(col, R0) if col is not None else R0
        return out

    def expand_support(self, cols: set[int]) -> set:
        reps = {root for root, col in self.column_of.items() if col in cols}
        return {
            key
            for key in self.key_order
            if self.root_of[key] not in self.pinned and self.root_of[key] in reps
        }


class EqualitySystemBuilder:
    """Collects sparse equality rows over hashable variable keys."""

    def __init__(self, domain: DomainTag):
        self.domain = domain
        self._keys: list = []
        self._key_set: set = set()
        self._parent: dict = {}
        self._rows: list[tuple[dict, object]] = []

    def ensure_var(self, key: Hashable) -> None:
        if key not in self._key_set:
            self._key_set.add(key)
            self._keys.append(key)
            self._parent[key] = key

    def has_var(self, key: Hashable) -> bool:
        return key in self._key_set

    def add_row(self, coeffs: dict, rhs) -> None:
        row = {}
        for key, c in coeffs.items():
            self.ensure_var(key)
            c = rat(c)
            if c != 0:
                row[key] = row.get(key, R0) + c
        self._rows.append(({k: c for k, c in row.items() if c != 0}, rat(rhs)))

    def build(self) -> PresolvedSystem:
        order = {k: i for i, k in enumerate(self._keys)}

        def find(key):
            root = key
            while self._parent[root] != root:
                root = self._parent[root]
            while self._parent[key] != root:
                self._parent[key], key = root, self._parent[key]
            return root

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra == rb:
                return
            if order[ra] <= order[rb]:
                self._parent[rb] = ra
            else:
                self._parent[ra] = rb

        pinned: set = set()
        pending = list(self._rows)
        while True:
            changed = False
            survivors = []
            for coeffs, rhs in pending:
                canon: dict = {}
                for key, c in coeffs.items():
                    root = find(key)
                    if root in pinned:
                        continue
                    canon[root] = canon.get(root, R0) + c
                canon = {k: c for k, c in canon.items() if c != 0}
                if not canon:
                    if rhs == 0:
                        continue  # tautology
                    survivors.append((canon, rhs))  # inconsistent, keep for the solver
                    continue
                if rhs == 0:
                    if len(canon) == 1:
                        (root,) = canon
                        pinned.add(root)
                        changed = True
                        continue
                    if len(canon) == 2:
                        (k1, c1), (k2, c2) = sorted(canon.items(), key=lambda t: order[t[0]])
                        if c1 == -c2:
                            union(k1, k2)
                            changed = True
                            continue
                    if self.domain is DomainTag.NONNEG_RAT:
                        signs = {c > 0 for c in canon.values()}
                        if len(signs) == 1:
                            pinned.update(canon)
                            changed = True
                            continue
                survivors.append((canon, rhs))
            pending = survivors
            if not changed:
                break

        # dedup rows equal up to a nonzero factor (same hyperplane)
        seen: dict = {}
        final_rows: list[tuple[dict, object]] = []
        for canon, rhs in pending:
            if canon:
                items = sorted(canon.items(), key=lambda t: order[t[0]])
                scale = items[0][1]
                key = (
                    tuple((order[k], c / scale) for k, c in items),
                    rhs / scale,
                )
            else:
                key = ((), rat(1))  # all inconsistent empty rows are equivalent
            if key in seen:
                continue
            seen[key] = True
            final_rows.append((canon, rhs))

        roots_in_rows: list = []
        root_seen: set = set()
        for canon, _rhs in final_rows:
            for root in sorted(canon, key=lambda k: order[k]):
                if root not in root_seen:
                    root_seen.add(root)
                    roots_in_rows.append(root)
        roots_in_rows.sort(key=lambda k: order[k])
        column_of = {root: i for i, root in enumerate(roots_in_rows)}

        rows = tuple(
            {column_of[root]: c for root, c in canon.items()} for canon, _ in final_rows
        )
        rhs = tuple(b for _, b in final_rows)
        system = LinearSystem(tuple(roots_in_rows), rows, rhs, self.domain)
        root_of = {k: find(k) for k in self._keys}
        return PresolvedSystem(system, tuple(self._keys), root_of, pinned, column_of)
