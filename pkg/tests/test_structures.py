"""Structures, homomorphisms, powers, tensor powers, partial homomorphisms."""

import itertools
import json

import pytest

from minionlab import Assignment, Signature, Structure
from minionlab.errors import (
    ArityMismatch,
    BudgetExceeded,
    EmptySubset,
    MalformedInput,
    SymbolClash,
    UnknownAtom,
)
from minionlab.structures import (
    count_homomorphisms,
    enumerate_homomorphisms,
    enumerate_partial_homomorphisms,
    find_homomorphism,
    induced_substructure,
    is_homomorphism,
    k_enhance,
    parse_structure,
    polymorphisms,
    power,
    structure_to_json,
    tensor_power,
    tensor_cell_index,
)
from minionlab.budgets import Budget

from conftest import all_digraphs, clique, cycle, digraphs_up_to_renaming, single_vertex


# -- parsing ------------------------------------------------------------------


def test_parse_k2_document():
    text = json.dumps(
        {"domain": ["0", "1"],
         "relations": {"R": {"arity": 2, "tuples": [["0", "1"], ["1", "0"]]}}}
    )
    A = parse_structure(text)
    assert len(A.domain) == 2
    assert len(A.tuples("R")) == 2


def test_parse_one_in_three():
    text = json.dumps(
        {"domain": ["0", "1"],
         "relations": {"R": {"arity": 3,
                             "tuples": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]}}}
    )
    A = parse_structure(text)
    assert len(A.tuples("R")) == 3


def test_parse_arity_mismatch():
    text = json.dumps(
        {"domain": ["0", "1", "2"],
         "relations": {"R": {"arity": 2, "tuples": [["0", "1", "2"]]}}}
    )
    with pytest.raises(ArityMismatch):
        parse_structure(text)


def test_parse_unknown_atom():
    text = json.dumps(
        {"domain": ["0"], "relations": {"R": {"arity": 1, "tuples": [["9"]]}}}
    )
    with pytest.raises(UnknownAtom):
        parse_structure(text)


def test_parse_bad_json():
    with pytest.raises(MalformedInput):
        parse_structure("{nope")


def test_json_round_trip(k3):
    again = parse_structure(structure_to_json(k3))
    assert again.domain == k3.domain
    assert again.relations == k3.relations


# -- homomorphisms --------------------------------------------------------------


def test_identity_is_homomorphism(k3):
    ident = Assignment.of({a: a for a in k3.domain}, total=True)
    assert is_homomorphism(ident, k3, k3)


def test_constant_map_on_clique_fails(k3):
    const = Assignment.of({a: "1" for a in k3.domain}, total=True)
    assert not is_homomorphism(const, k3, k3)


def test_c5_to_k3_explicit_map(c5, k3):
    # walk the 5-cycle as 1,2,1,2,3; every edge image is checked explicitly
    f = Assignment.of({"0": "1", "1": "2", "2": "1", "3": "2", "4": "3"}, total=True)
    for u, v in c5.tuples("R"):
        assert f(u) != f(v)
    assert is_homomorphism(f, c5, k3)


def test_find_homomorphism_k2_in_k3(k2, k3):
    f = find_homomorphism(k2, k3)
    assert f is not None and is_homomorphism(f, k2, k3)


def test_no_homomorphism_k3_to_k2_matches_exhaustion(k3, k2):
    # independent oracle: try all 2^3 maps directly
    count = 0
    for image in itertools.product(k2.domain, repeat=3):
        f = Assignment.of(dict(zip(k3.domain, image)), total=True)
        if is_homomorphism(f, k3, k2):
            count += 1
    assert count == 0
    assert find_homomorphism(k3, k2) is None


def test_isolated_vertex_maps_anywhere(k3):
    assert find_homomorphism(single_vertex(), k3) is not None


def test_enumeration_matches_brute_force_on_small_digraphs():
    for X in all_digraphs(2):
        for A in all_digraphs(2):
            brute = 0
            for image in itertools.product(A.domain, repeat=len(X.domain)):
                f = Assignment.of(dict(zip(X.domain, image)), total=True)
                if is_homomorphism(f, X, A):
                    brute += 1
            assert count_homomorphisms(X, A) == brute


# -- enhancement ------------------------------------------------------------------


def test_k_enhance_adds_full_relation(k2):
    enhanced = k_enhance(k2, 2)
    assert len(enhanced.tuples("R_2")) == 4
    assert k_enhance(enhanced, 2) == enhanced  # idempotent


def test_k_enhance_level_one(k2):
    enhanced = k_enhance(k2, 1)
    assert set(enhanced.tuples("R_1")) == {("0",), ("1",)}


def test_k_enhance_symbol_clash():
    A = Structure(Signature.of({"R_2": 2}), ["0", "1"], {"R_2": [("0", "1")]})
    with pytest.raises(SymbolClash):
        k_enhance(A, 2)


def test_k_enhance_budget():
    with pytest.raises(BudgetExceeded):
        k_enhance(clique(4), 3, Budget(max_atoms=10, max_tuples=10))


# -- powers ----------------------------------------------------------------------


def test_power_one_is_isomorphic_copy(k2):
    P = power(k2, 1)
    assert len(P.domain) == 2
    assert len(P.tuples("R")) == len(k2.tuples("R"))


def test_power_two_of_k2():
    P = power(clique(2), 2)
    assert len(P.domain) == 4
    tuples = set(P.tuples("R"))
    assert len(tuples) == 4
    assert ((("0", "0"), ("1", "1"))) in {(t[0], t[1]) for t in tuples}
    assert ((("0", "1"), ("1", "0"))) in {(t[0], t[1]) for t in tuples}


def test_power_counts_are_exponential():
    for A in [clique(2), clique(3), cycle(3)]:
        for L in (1, 2):
            P = power(A, L)
            assert len(P.tuples("R")) == len(A.tuples("R")) ** L


# -- tensor powers ------------------------------------------------------------------


def test_tensor_power_of_k3_level_3(k3):
    T = tensor_power(k3, 3)
    assert T.signature.arity("R") == 8
    assert len(T.tuples("R")) == 6


def test_tensor_power_cells_of_paper_edge(k3):
    # the tuple on atoms (2, 3): cell (i1, i2, i3) holds (a_i1, a_i2, a_i3)
    T = tensor_power(k3, 3)
    target = None
    for t in T.tuples("R"):
        if t[0] == ("2", "2", "2"):
            target = t
    assert target is not None
    a = ("2", "3")
    for idx in itertools.product((1, 2), repeat=3):
        pos = tensor_cell_index(2, 3, idx)
        assert target[pos] == tuple(a[i - 1] for i in idx)
    # the displayed layer layout: layer 1 then layer 2, rows inside layers
    assert target == (
        ("2", "2", "2"), ("2", "2", "3"), ("2", "3", "2"), ("2", "3", "3"),
        ("3", "2", "2"), ("3", "2", "3"), ("3", "3", "2"), ("3", "3", "3"),
    )


def test_tensor_power_level_one_is_identity():
    for A in [clique(2), clique(3), cycle(5), single_vertex()]:
        assert tensor_power(A, 1) == A


def test_tensor_power_preserves_tuple_count():
    for A in all_digraphs(2):
        T = tensor_power(A, 2)
        for sym in A.signature.names():
            assert len(T.tuples(sym)) == len(A.tuples(sym))


def test_tensor_power_cell_law():
    A = cycle(3)
    T = tensor_power(A, 2)
    cells = list(itertools.product((1, 2), repeat=2))
    for a, t in zip(A.tuples("R"), T.tuples("R")):
        for idx in cells:
            assert t[tensor_cell_index(2, 2, idx)] == tuple(a[i - 1] for i in idx)


def test_hom_transfer_exhaustive_two_vertices():
    # homomorphism existence is invariant under tensorisation
    graphs = all_digraphs(2)
    for X in graphs:
        for A in graphs:
            direct = find_homomorphism(X, A) is not None
            lifted = find_homomorphism(tensor_power(X, 2), tensor_power(A, 2)) is not None
            assert direct == lifted


def test_hom_transfer_sampled_three_vertices():
    graphs = digraphs_up_to_renaming(3)[::7]
    targets = digraphs_up_to_renaming(2)
    for X in graphs:
        for A in targets:
            direct = find_homomorphism(X, A) is not None
            lifted = find_homomorphism(tensor_power(X, 2), tensor_power(A, 2)) is not None
            assert direct == lifted


def test_unenhanced_tensorisation_inflates_hom_count():
    # a unary full relation is 1-enhanced but not 2-enhanced: the squared
    # structure gains many new self-maps
    from conftest import boolean_unary

    A = boolean_unary()
    assert count_homomorphisms(A, A) == 4
    T = tensor_power(A, 2)
    assert count_homomorphisms(T, T) == 64


# -- induced substructures ------------------------------------------------------------


def test_induced_k3_gives_k2(k3):
    sub = induced_substructure(k3, ["1", "2"])
    assert len(sub.domain) == 2
    assert len(sub.tuples("R")) == 2


def test_induced_identity(k3):
    assert induced_substructure(k3, k3.domain) == k3


def test_induced_adjacent_pair_of_c5(c5):
    sub = induced_substructure(c5, ["0", "1"])
    assert set(sub.tuples("R")) == {("0", "1"), ("1", "0")}


def test_induced_empty_subset_rejected(k3):
    with pytest.raises(EmptySubset):
        induced_substructure(k3, [])


# -- partial homomorphisms --------------------------------------------------------------


def brute_partial_homs(X, A, k):
    out = [Assignment(())]
    atoms = list(X.domain)
    for j in range(1, min(k, len(atoms)) + 1):
        for subset in itertools.combinations(atoms, j):
            sub = induced_substructure(X, subset)
            for image in itertools.product(A.domain, repeat=j):
                f = Assignment.of(dict(zip(subset, image)))
                if is_homomorphism(
                    Assignment.of(dict(zip(subset, image)), total=True), sub,
                    A,
                ):
                    out.append(f)
    return out


def test_partial_homs_k3_k2_level_1(k3, k2):
    # no unary constraints: the empty map plus every singleton assignment
    assert len(enumerate_partial_homomorphisms(k3, k2, 1)) == 7


def test_partial_homs_k3_k2_level_2(k3, k2):
    # each of the 3 vertex pairs admits exactly the 2 proper colorings
    assert len(enumerate_partial_homomorphisms(k3, k2, 2)) == 13


def test_partial_homs_match_brute_force(c5, k3):
    ours = enumerate_partial_homomorphisms(c5, k3, 2)
    brute = brute_partial_homs(c5, k3, 2)
    assert {f.mapping for f in ours} == {f.mapping for f in brute}


def test_total_hom_appears_in_partial_enumeration(k2, k3):
    h = find_homomorphism(k2, k3)
    fams = enumerate_partial_homomorphisms(k2, k3, len(k2.domain))
    assert h.mapping in {f.mapping for f in fams}


# -- polymorphisms -----------------------------------------------------------------------


def test_unary_polymorphisms_of_k2_are_automorphisms(k2):
    polys = polymorphisms(k2, k2, 1)
    assert len(polys) == 2


def test_binary_polymorphisms_contain_projections(k2):
    polys = polymorphisms(k2, k2, 2)
    images = {p.mapping for p in polys}
    proj1 = Assignment.of({t: t[0] for t in itertools.product(k2.domain, repeat=2)}, total=True)
    proj2 = Assignment.of({t: t[1] for t in itertools.product(k2.domain, repeat=2)}, total=True)
    assert proj1.mapping in images and proj2.mapping in images


def test_unary_polymorphism_count_is_hom_count(k2, k3):
    assert len(polymorphisms(k2, k3, 1)) == count_homomorphisms(k2, k3)
