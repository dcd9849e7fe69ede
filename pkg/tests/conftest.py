"""Shared instance builders for the test suite."""

from __future__ import annotations

import itertools
import random

import pytest

from minionlab import Signature, Structure


def clique(n: int, atoms=None) -> Structure:
    atoms = atoms or [str(i) for i in range(n)]
    edges = [(a, b) for a in atoms for b in atoms if a != b]
    return Structure(Signature.of({"R": 2}), atoms, {"R": edges}, name=f"K{n}")


def cycle(n: int) -> Structure:
    atoms = [str(i) for i in range(n)]
    edges = []
    for i in range(n):
        edges.append((atoms[i], atoms[(i + 1) % n]))
        edges.append((atoms[(i + 1) % n], atoms[i]))
    return Structure(Signature.of({"R": 2}), atoms, {"R": edges}, name=f"C{n}")


def one_in_three() -> Structure:
    atoms = ["0", "1"]
    tuples = [("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")]
    return Structure(Signature.of({"R": 3}), atoms, {"R": tuples}, name="1in3")


def not_all_equal() -> Structure:
    atoms = ["0", "1"]
    tuples = [t for t in itertools.product(atoms, repeat=3) if len(set(t)) == 2]
    return Structure(Signature.of({"R": 3}), atoms, {"R": tuples}, name="NAE")


def boolean_unary() -> Structure:
    return Structure(
        Signature.of({"R_1": 1}), ["0", "1"], {"R_1": [("0",), ("1",)]}, name="bool1"
    )


def single_vertex() -> Structure:
    return Structure(Signature.of({"R": 2}), ["v"], {"R": []})


def digraph_from_mask(n: int, mask: int) -> Structure:
    """The digraph on n named vertices whose edge set is encoded by a bitmask."""
    atoms = [str(i) for i in range(n)]
    pairs = list(itertools.product(atoms, repeat=2))
    edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
    return Structure(Signature.of({"R": 2}), atoms, {"R": edges})


def all_digraphs(n: int):
    """Every digraph on n vertices (including the edgeless one)."""
    return [digraph_from_mask(n, m) for m in range(1 << (n * n))]


def digraphs_up_to_renaming(n: int):
    """One representative digraph per vertex-permutation class."""
    atoms = [str(i) for i in range(n)]
    pairs = list(itertools.product(range(n), repeat=2))
    pair_index = {p: i for i, p in enumerate(pairs)}
    seen = set()
    out = []
    for mask in range(1 << (n * n)):
        canon = mask
        for perm in itertools.permutations(range(n)):
            pm = 0
            for i, (u, v) in enumerate(pairs):
                if mask >> i & 1:
                    pm |= 1 << pair_index[(perm[u], perm[v])]
            canon = min(canon, pm)
        if canon not in seen:
            seen.add(canon)
            out.append(digraph_from_mask(n, mask))
    del atoms
    return out


def random_structure(rng: random.Random, n_atoms: int, n_tuples: int) -> Structure:
    atoms = [str(i) for i in range(n_atoms)]
    tuples = set()
    for _ in range(n_tuples):
        tuples.add((rng.choice(atoms), rng.choice(atoms)))
    return Structure(Signature.of({"R": 2}), atoms, {"R": sorted(tuples)})


@pytest.fixture
def k2():
    return clique(2)


@pytest.fixture
def k3():
    return clique(3, atoms=["1", "2", "3"])


@pytest.fixture
def c5():
    return cycle(5)
