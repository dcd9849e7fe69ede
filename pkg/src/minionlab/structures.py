"""Relational signatures and structures, homomorphisms, powers and tensor powers.

Atoms are strings at the base level; powered structures use tuples of atoms,
so a tensor power is an ordinary structure whose atoms are length-k tuples.
All internal indexing goes through dense integer ids in domain order, which
keeps every search and every emitted witness deterministic.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .budgets import DEFAULT_BUDGET, Budget
from .errors import (
    ArityMismatch,
    EmptySubset,
    MalformedInput,
    SignatureMismatch,
    SymbolClash,
    UnknownAtom,
)

Atom = Union[str, tuple]

_ENHANCE_NAME = re.compile(r"^R_([1-9])$")


@dataclass(frozen=True)
class Signature:
    """Ordered map from relation symbol to arity."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.symbols:
            if name in seen:
                raise MalformedInput(f"duplicate relation symbol {name!r}")
            seen.add(name)
            if arity < 1:
                raise ArityMismatch(f"symbol {name!r} has arity {arity} < 1")

    @staticmethod
    def of(mapping: Mapping[str, int] | Iterable[tuple[str, int]]) -> "Signature":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return Signature(tuple((str(k), int(v)) for k, v in items))

    def arity(self, symbol: str) -> int:
        for name, arity in self.symbols:
            if name == symbol:
                return arity
        raise MalformedInput(f"unknown relation symbol {symbol!r}")

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def max_arity(self) -> int:
        return max(arity for _, arity in self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return any(name == symbol for name, _ in self.symbols)


def enhancement_level(symbol: str) -> Optional[int]:
    """The k of a reserved enhancement symbol ``R_k``, else None."""
    m = _ENHANCE_NAME.match(symbol)
    return int(m.group(1)) if m else None


class Structure:
    """A finite relational structure over an ordered domain of atoms."""

    __slots__ = ("signature", "domain", "relations", "_atom_id", "_rel_sets", "name")

    def __init__(
        self,
        signature: Signature,
        domain: Sequence[Atom],
        relations: Mapping[str, Iterable[tuple]],
        name: str = "",
    ):
        if not domain:
            raise MalformedInput("domain must be nonempty")
        self.signature = signature
        self.domain: tuple[Atom, ...] = tuple(domain)
        self._atom_id = {a: i for i, a in enumerate(self.domain)}
        if len(self._atom_id) != len(self.domain):
            raise MalformedInput("domain atoms must be distinct")
        self.name = name

        rels: dict[str, tuple[tuple, ...]] = {}
        for sym, arity in signature.symbols:
            tuples = [tuple(t) for t in relations.get(sym, ())]
            for t in tuples:
                if len(t) != arity:
                    raise ArityMismatch(
                        f"tuple {t!r} has length {len(t)}, symbol {sym!r} has arity {arity}"
                    )
                for a in t:
                    if a not in self._atom_id:
                        raise UnknownAtom(f"atom {a!r} of {sym!r} tuple is not in the domain")
            # Canonical order: lexicographic by atom ids.  Witness indices
            # elsewhere in the package refer to this order.
            uniq = sorted(set(tuples), key=lambda t: tuple(self._atom_id[a] for a in t))
            rels[sym] = tuple(uniq)
        extra = set(relations) - set(signature.names())
        if extra:
            raise MalformedInput(f"relations {sorted(extra)} missing from the signature")
        self.relations = rels
        self._rel_sets = {sym: frozenset(ts) for sym, ts in rels.items()}

    # -- basic queries ------------------------------------------------------

    def atom_id(self, atom: Atom) -> int:
        try:
            return self._atom_id[atom]
        except KeyError:
            raise UnknownAtom(f"atom {atom!r} is not in the domain") from None

    def has_tuple(self, symbol: str, t: tuple) -> bool:
        return t in self._rel_sets[symbol]

    def tuples(self, symbol: str) -> tuple[tuple, ...]:
        return self.relations[symbol]

    def size(self) -> int:
        return len(self.domain)

    def same_signature(self, other: "Structure") -> bool:
        return self.signature.symbols == other.signature.symbols

    def require_same_signature(self, other: "Structure") -> None:
        if not self.same_signature(other):
            raise SignatureMismatch(
                f"signatures differ: {self.signature.symbols} vs {other.signature.symbols}"
            )

    def __repr__(self) -> str:
        rel = ", ".join(f"{s}:{len(t)}" for s, t in self.relations.items())
        label = f" {self.name}" if self.name else ""
        return f"<Structure{label} |A|={len(self.domain)} {rel}>"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Structure)
            and self.signature.symbols == other.signature.symbols
            and self.domain == other.domain
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        return hash((self.signature.symbols, self.domain,
                     tuple(sorted(self.relations.items()))))


@dataclass(frozen=True)
class Assignment:
    """A (partial) map between structure domains."""

    mapping: tuple[tuple[Atom, Atom], ...]
    total: bool = False

    @staticmethod
    def of(mapping: Mapping[Atom, Atom], total: bool = False) -> "Assignment":
        return Assignment(tuple(sorted(mapping.items(), key=repr)), total)

    def as_dict(self) -> dict:
        return dict(self.mapping)

    def domain_set(self) -> frozenset:
        return frozenset(a for a, _ in self.mapping)

    def __call__(self, atom: Atom) -> Atom:
        for a, b in self.mapping:
            if a == atom:
                return b
        raise KeyError(atom)

    def restrict(self, atoms: Iterable[Atom]) -> "Assignment":
        keep = set(atoms)
        return Assignment(tuple((a, b) for a, b in self.mapping if a in keep), False)

    def __len__(self) -> int:
        return len(self.mapping)


# -- parsing and serialization ----------------------------------------------


def _atom_from_json(value) -> Atom:
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return tuple(_atom_from_json(v) for v in value)
    raise MalformedInput(f"atom must be a string or array, got {value!r}")


def _atom_to_json(atom: Atom):
    if isinstance(atom, tuple):
        return [_atom_to_json(a) for a in atom]
    return atom


def parse_structure(text: str, name: str = "") -> Structure:
    """Parse the JSON structure format.

    ``{"domain": [atom, ...], "relations": {name: {"arity": n, "tuples": [...]}}}``
    where atoms are strings (arrays encode tuple atoms of powered structures).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"bad JSON: {exc}") from exc
    if not isinstance(doc, dict) or "domain" not in doc or "relations" not in doc:
        raise MalformedInput("document needs 'domain' and 'relations' keys")
    domain = [_atom_from_json(a) for a in doc["domain"]]
    rel_doc = doc["relations"]
    if not isinstance(rel_doc, dict):
        raise MalformedInput("'relations' must be an object")
    sig_items = []
    relations = {}
    for sym, body in rel_doc.items():
        if not isinstance(body, dict) or "arity" not in body or "tuples" not in body:
            raise MalformedInput(f"relation {sym!r} needs 'arity' and 'tuples'")
        arity = int(body["arity"])
        sig_items.append((sym, arity))
        relations[sym] = [tuple(_atom_from_json(a) for a in t) for t in body["tuples"]]
    return Structure(Signature.of(sig_items), domain, relations, name=name or doc.get("name", ""))


def structure_to_json(A: Structure) -> str:
    doc = {
        "domain": [_atom_to_json(a) for a in A.domain],
        "relations": {
            sym: {
                "arity": A.signature.arity(sym),
                "tuples": [[_atom_to_json(a) for a in t] for t in A.tuples(sym)],
            }
            for sym in A.signature.names()
        },
    }
    if A.name:
        doc["name"] = A.name
    return json.dumps(doc, sort_keys=True)


# -- homomorphisms -----------------------------------------------------------


def is_homomorphism(f: Assignment, X: Structure, A: Structure) -> bool:
    """True iff ``f`` is total on X and maps every relation tuple into A."""
    X.require_same_signature(A)
    fmap = f.as_dict()
    if set(fmap) != set(X.domain):
        return False
    for b in fmap.values():
        if b not in A._atom_id:
            return False
    for sym in X.signature.names():
        for t in X.tuples(sym):
            if not A.has_tuple(sym, tuple(fmap[a] for a in t)):
                return False
    return True


def _search_order(X: Structure) -> list[int]:
    """Variables by descending constraint degree, ties in domain order."""
    degree = [0] * len(X.domain)
    for sym in X.signature.names():
        for t in X.tuples(sym):
            for a in t:
                degree[X.atom_id(a)] += 1
    return sorted(range(len(X.domain)), key=lambda i: (-degree[i], i))


def _iter_homomorphisms(X: Structure, A: Structure) -> Iterator[dict]:
    """Backtracking enumeration of all homomorphisms X -> A.

    Constraints are checked as soon as any scope variable is assigned, by
    scanning the target relation for a tuple matching the assigned positions.
    """
    X.require_same_signature(A)
    n = len(X.domain)
    order = _search_order(X)
    rank = {v: i for i, v in enumerate(order)}

    # constraints[v] lists (symbol, scope var ids) with v in scope
    scopes: list[tuple[str, tuple[int, ...]]] = []
    for sym in X.signature.names():
        for t in X.tuples(sym):
            scopes.append((sym, tuple(X.atom_id(a) for a in t)))
    by_var: list[list[int]] = [[] for _ in range(n)]
    for ci, (_, scope) in enumerate(scopes):
        for v in set(scope):
            by_var[v].append(ci)

    target_tuples = {sym: [tuple(A.atom_id(a) for a in t) for t in A.tuples(sym)]
                     for sym in A.signature.names()}
    assign: list[Optional[int]] = [None] * n

    def consistent(ci: int) -> bool:
        sym, scope = scopes[ci]
        pattern = [assign[v] for v in scope]
        if None not in pattern:
            return tuple(pattern) in _target_sets[sym]
        for cand in target_tuples[sym]:
            if all(p is None or p == c for p, c in zip(pattern, cand)):
                return True
        return False

    _target_sets = {sym: set(ts) for sym, ts in target_tuples.items()}

    def extend(pos: int) -> Iterator[dict]:
        if pos == n:
            yield {X.domain[v]: A.domain[assign[v]] for v in range(n)}
            return
        v = order[pos]
        for val in range(len(A.domain)):
            assign[v] = val
            if all(consistent(ci) for ci in by_var[v]):
                yield from extend(pos + 1)
        assign[v] = None

    yield from extend(0)


def find_homomorphism(X: Structure, A: Structure) -> Optional[Assignment]:
    """First homomorphism X -> A in deterministic search order, if any."""
    for fmap in _iter_homomorphisms(X, A):
        return Assignment.of(fmap, total=True)
    return None


def enumerate_homomorphisms(X: Structure, A: Structure) -> list[Assignment]:
    return [Assignment.of(f, total=True) for f in _iter_homomorphisms(X, A)]


def count_homomorphisms(X: Structure, A: Structure) -> int:
    return sum(1 for _ in _iter_homomorphisms(X, A))


# -- powers and enhancement --------------------------------------------------


def k_enhance(A: Structure, k: int, budget: Budget = DEFAULT_BUDGET) -> Structure:
    """Add the k-ary symbol ``R_k`` holding every k-tuple of the domain."""
    if not 1 <= k <= 9:
        raise SymbolClash(f"enhancement level {k} outside the reserved range 1..9")
    sym = f"R_{k}"
    n = len(A.domain)
    budget.check_tuples(n**k, f"enhancement {sym}")
    full = [t for t in itertools.product(A.domain, repeat=k)]
    if sym in A.signature:
        if set(A.tuples(sym)) == set(full):
            return A
        raise SymbolClash(f"{sym} already exists and is not the full {k}-th power")
    sig = Signature(A.signature.symbols + ((sym, k),))
    rels = dict(A.relations)
    rels[sym] = full
    return Structure(sig, A.domain, rels, name=A.name)


def power(A: Structure, L: int, budget: Budget = DEFAULT_BUDGET) -> Structure:
    """The L-th power: domain A^L, tuples are columns of row matrices over R^A."""
    if L < 1:
        raise ArityMismatch("power exponent must be >= 1")
    n = len(A.domain)
    budget.check_atoms(n**L, "power domain")
    domain = [t for t in itertools.product(A.domain, repeat=L)]
    rels: dict[str, list[tuple]] = {}
    for sym, arity in A.signature.symbols:
        base = A.tuples(sym)
        budget.check_tuples(len(base) ** L, f"power relation {sym}")
        out = []
        for rows in itertools.product(base, repeat=L):
            # rows is an L x arity matrix over R^A; its columns form the tuple
            out.append(tuple(tuple(rows[l][j] for l in range(L)) for j in range(arity)))
        rels[sym] = out
    return Structure(A.signature, domain, rels)


def tensor_power(A: Structure, k: int, budget: Budget = DEFAULT_BUDGET) -> Structure:
    """The k-th tensor power.

    The domain is A^k.  Each tuple a of a relation with arity r contributes a
    single tuple of arity r^k whose cell at position (i_1, ..., i_k), in
    lexicographic cell order, is the atom (a_{i_1}, ..., a_{i_k}).
    """
    if k < 1:
        raise ArityMismatch("tensor power level must be >= 1")
    if k == 1:
        return A
    n = len(A.domain)
    budget.check_atoms(n**k, "tensor power domain")
    domain = [t for t in itertools.product(A.domain, repeat=k)]
    sig_items = []
    rels: dict[str, list[tuple]] = {}
    for sym, arity in A.signature.symbols:
        budget.check_tuples(arity**k * max(1, len(A.tuples(sym))), f"tensor power {sym}")
        sig_items.append((sym, arity**k))
        cells = list(itertools.product(range(arity), repeat=k))
        out = []
        for a in A.tuples(sym):
            out.append(tuple(tuple(a[i] for i in cell) for cell in cells))
        rels[sym] = out
    return Structure(Signature(tuple(sig_items)), domain, rels, name=A.name)


def tensor_cell_index(arity: int, k: int, idx: tuple[int, ...]) -> int:
    """Flat position of the 1-based cell (i_1, ..., i_k) inside a tensor-power tuple."""
    pos = 0
    for i in idx:
        if not 1 <= i <= arity:
            raise ArityMismatch(f"cell index {idx} outside [{arity}]^{k}")
        pos = pos * arity + (i - 1)
    return pos


def induced_substructure(A: Structure, atoms: Iterable[Atom]) -> Structure:
    """Substructure induced by a nonempty subset of the domain."""
    keep = set(atoms)
    if not keep:
        raise EmptySubset("induced substructure needs a nonempty subset")
    for a in keep:
        A.atom_id(a)
    domain = [a for a in A.domain if a in keep]
    rels = {
        sym: [t for t in A.tuples(sym) if all(a in keep for a in t)]
        for sym in A.signature.names()
    }
    return Structure(A.signature, domain, rels)


# -- partial homomorphisms and polymorphisms ---------------------------------


def enumerate_partial_homomorphisms(
    X: Structure, A: Structure, k: int, budget: Budget = DEFAULT_BUDGET
) -> list[Assignment]:
    """All partial homomorphisms with at most k-element domain, empty map included."""
    X.require_same_signature(A)
    nX, nA = len(X.domain), len(A.domain)
    total = sum(
        _binomial(nX, j) * nA**j for j in range(0, min(k, nX) + 1)
    )
    budget.check_tuples(total, "partial homomorphism enumeration")
    out = [Assignment((), total=False)]
    for j in range(1, min(k, nX) + 1):
        for subset in itertools.combinations(X.domain, j):
            sub = induced_substructure(X, subset)
            for image in itertools.product(A.domain, repeat=j):
                f = dict(zip(subset, image))
                if _maps_relations(sub, A, f):
                    out.append(Assignment.of(f, total=(j == nX)))
    return out


def _maps_relations(sub: Structure, A: Structure, fmap: dict) -> bool:
    for sym in sub.signature.names():
        for t in sub.tuples(sym):
            if not A.has_tuple(sym, tuple(fmap[a] for a in t)):
                return False
    return True


def is_partial_homomorphism(f: Assignment, X: Structure, A: Structure) -> bool:
    dom = f.domain_set()
    if not dom:
        return True
    fmap = f.as_dict()
    if any(a not in X._atom_id for a in dom):
        return False
    if any(b not in A._atom_id for b in fmap.values()):
        return False
    return _maps_relations(induced_substructure(X, dom), A, fmap)


def polymorphisms(
    A: Structure, B: Structure, L: int, budget: Budget = DEFAULT_BUDGET
) -> list[Assignment]:
    """The L-ary polymorphisms, i.e. all homomorphisms from the L-th power of A to B."""
    A.require_same_signature(B)
    return enumerate_homomorphisms(power(A, L, budget), B)


def _binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out
