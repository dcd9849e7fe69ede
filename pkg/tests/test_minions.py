"""Matrix minions: membership, minors, conic checks, products, enumeration."""

import itertools
import random

import pytest

from minionlab import (
    MinionTag,
    MinorMap,
    SemiringTag,
    Tensor,
    check_membership,
    combined,
    enumerate_horn,
    is_conic_matrix,
    minor,
    semidirect,
)
from minionlab.errors import ArityMismatch, SemiringMismatch, SupportViolation
from minionlab.minions import affine_integer, horn_indicator, orthogonal_rows, stochastic
from minionlab.rationals import rat


# -- membership -------------------------------------------------------------------


def test_stochastic_membership():
    m = Tensor.build((2, 1), SemiringTag.RAT, ["1/3", "2/3"])
    assert check_membership(m, MinionTag.STOCHASTIC)
    bad = Tensor.build((2, 1), SemiringTag.RAT, ["2/3", "2/3"])
    assert not check_membership(bad, MinionTag.STOCHASTIC)
    negative = Tensor.build((2, 1), SemiringTag.RAT, ["-1/3", "4/3"])
    assert not check_membership(negative, MinionTag.STOCHASTIC)


def test_affine_membership_allows_negatives():
    m = Tensor.build((3, 1), SemiringTag.INT, [1, -1, 1])
    assert check_membership(m, MinionTag.AFFINE)
    assert not check_membership(Tensor.build((2, 1), SemiringTag.INT, [1, 1]), MinionTag.AFFINE)


def test_orthogonal_membership():
    r = 2 ** -0.5
    m = Tensor.build((2, 2), SemiringTag.REAL, [r, 0.0, 0.0, r])
    # rows orthogonal, squared norms 1/2 + 1/2 = 1
    assert check_membership(m, MinionTag.ORTHOGONAL)
    bad = Tensor.build((2, 2), SemiringTag.REAL, [1.0, 0.0, 1.0, 0.0])
    assert not check_membership(bad, MinionTag.ORTHOGONAL)


def test_combined_membership_matrix_form():
    good = Tensor.build((3, 2), SemiringTag.RAT, ["1/2", "2", "1/2", "-1", "0", "0"])
    assert check_membership(good, MinionTag.COMBINED)
    leaking = Tensor.build((2, 2), SemiringTag.RAT, ["1", "0", "0", "1"])
    assert not check_membership(leaking, MinionTag.COMBINED)


def test_horn_membership_rejects_zero():
    zero = Tensor.build((2, 1), SemiringTag.BOOL, [0, 0])
    assert not check_membership(zero, MinionTag.HORN)


# -- minors -----------------------------------------------------------------------


def test_identity_minor_preserves_element():
    q = stochastic(["1/2", "1/2"])
    out = minor(q, MinorMap.of([1, 2], 2))
    assert out.matrix.entries == q.matrix.entries


def test_merging_minor_on_stochastic():
    q = stochastic(["1/2", "1/2"])
    out = minor(q, MinorMap.of([1, 1], 1))
    assert out.matrix.entries == (rat(1),)


def test_minor_composition_random():
    rng = random.Random(5)
    for _ in range(40):
        L = rng.randint(1, 4)
        weights = [rng.randint(0, 4) for _ in range(L)]
        while sum(weights) == 0:
            weights = [rng.randint(0, 4) for _ in range(L)]
        total = sum(weights)
        q = stochastic([rat(w, total) for w in weights])
        L2, L3 = rng.randint(1, 4), rng.randint(1, 4)
        pi = MinorMap.of([rng.randint(1, L2) for _ in range(L)], L2)
        pi2 = MinorMap.of([rng.randint(1, L3) for _ in range(L2)], L3)
        assert minor(minor(q, pi), pi2).matrix.entries == minor(q, pi.compose(pi2)).matrix.entries


def test_minor_arity_mismatch():
    with pytest.raises(ArityMismatch):
        minor(stochastic(["1"]), MinorMap.of([1, 1], 1))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_minor_preserves_membership_sampled(seed):
    rng = random.Random(seed)
    for _ in range(25):
        L = rng.randint(1, 5)
        pi = MinorMap.of([rng.randint(1, 3) for _ in range(L)], 3)
        # stochastic
        weights = [rng.randint(0, 3) for _ in range(L)] or [1]
        if sum(weights) == 0:
            weights[0] = 1
        q = stochastic([rat(w, sum(weights)) for w in weights])
        minor(q, pi).validate()
        # affine
        vals = [rng.randint(-3, 3) for _ in range(L - 1)]
        vals.append(1 - sum(vals))
        minor(affine_integer(vals), pi).validate()
        # combined: nest the affine support inside the stochastic support
        zvals = [v if w > 0 else 0 for v, w in zip(vals, weights)]
        fix = 1 - sum(zvals)
        support_rows = [i for i, w in enumerate(weights) if w > 0]
        zvals[support_rows[0]] += fix
        m = combined([rat(w, sum(weights)) for w in weights], zvals)
        minor(m, pi).validate()


def test_minor_preserves_membership_horn_exhaustive():
    for L in (1, 2, 3, 4):
        elems = enumerate_horn(L)
        masks = {tuple(e.matrix.entries) for e in elems}
        for L2 in (1, 2, 3, 4):
            for pi_values in itertools.product(range(1, L2 + 1), repeat=L):
                pi = MinorMap.of(list(pi_values), L2)
                for e in elems:
                    out = minor(e, pi)
                    assert tuple(out.matrix.entries) in {
                        tuple(x.matrix.entries) for x in enumerate_horn(L2)
                    }
                    # the minor is the indicator of the image subset
                    members = {i + 1 for i in range(L) if e.matrix.entries[i]}
                    image = {pi_values[i - 1] for i in members}
                    expect = horn_indicator(L2, image)
                    assert out.matrix.entries == expect.matrix.entries
        del masks


def test_orthogonal_minor_trace_invariance():
    m = orthogonal_rows([[0.6, 0.0], [0.0, 0.8]])
    for pi_values in itertools.product((1, 2), repeat=2):
        out = minor(m, MinorMap.of(list(pi_values), 2))
        rows = [out.matrix.entries[i * 2:(i + 1) * 2] for i in range(2)]
        trace = sum(sum(v * v for v in row) for row in rows)
        assert abs(trace - 1.0) <= 1e-9


# -- conic checks -----------------------------------------------------------------------


def test_stochastic_elements_are_conic():
    assert is_conic_matrix(stochastic(["1/4", "0", "3/4"]))


def test_affine_with_cancellation_is_not_conic():
    assert not is_conic_matrix(affine_integer([1, -1, 1]))


def test_horn_elements_are_conic():
    for e in enumerate_horn(3):
        assert is_conic_matrix(e)


def test_orthogonal_elements_behave_conically():
    m = orthogonal_rows([[0.6, 0.0], [0.0, 0.8], [0.0, 0.0]])
    assert is_conic_matrix(m)


# -- semi-direct products ------------------------------------------------------------------


def test_semidirect_combined_example():
    m = semidirect(stochastic(["1/2", "1/2", "0"]), affine_integer([2, -1, 0]))
    assert m.tag is MinionTag.COMBINED
    m.validate()


def test_semidirect_support_violation():
    with pytest.raises(SupportViolation):
        semidirect(stochastic(["1", "0"]), affine_integer([0, 1]))


def test_semidirect_rejects_left_affine():
    with pytest.raises(SemiringMismatch):
        semidirect(affine_integer([1, 0]), stochastic(["1", "0"]))


def test_semidirect_rejects_heterogeneous_boolean_integer():
    with pytest.raises(SemiringMismatch):
        semidirect(horn_indicator(2, [1]), affine_integer([1, 0]))


def test_combined_equals_product_membership_sampled():
    rng = random.Random(9)
    for _ in range(30):
        L = rng.randint(1, 4)
        weights = [rng.randint(0, 3) for _ in range(L)]
        if sum(weights) == 0:
            weights[0] = 1
        col1 = [rat(w, sum(weights)) for w in weights]
        col2 = [rng.randint(-2, 2) if w > 0 else 0 for w in weights]
        support_rows = [i for i, w in enumerate(weights) if w > 0]
        col2[support_rows[0]] += 1 - sum(col2)
        as_matrix = Tensor.build(
            (L, 2), SemiringTag.RAT,
            [v for pair in zip(col1, [rat(z) for z in col2]) for v in pair],
        )
        elem = combined(col1, col2)
        elem.validate()
        assert check_membership(as_matrix, MinionTag.COMBINED)
        assert is_conic_matrix(elem)


# -- enumeration ---------------------------------------------------------------------------


def test_enumerate_horn_small():
    assert [tuple(e.matrix.entries) for e in enumerate_horn(1)] == [(1,)]
    assert [tuple(e.matrix.entries) for e in enumerate_horn(2)] == [(1, 0), (0, 1), (1, 1)]


def test_enumerate_horn_count():
    assert len(enumerate_horn(5)) == 31
