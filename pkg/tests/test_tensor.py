import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from onionclass import (
    BadCut,
    BadDimension,
    FormatMismatch,
    NotBipartite,
    SizeMismatch,
    ZeroState,
    apply_local,
    cut_rank,
    exact_state,
    flatten,
    float_state,
    from_terms,
    local_operators,
    new_state,
    product_vector,
    random_state,
    schmidt_coefficients,
    separability_pattern,
    states_proportional,
    to_float,
)
from onionclass.scalars import GaussianRational as GR
from onionclass.selftest import rand_invertible, rand_singular
from onionclass.oracle import random_rational_state


def test_new_state_validation():
    with pytest.raises(ZeroState):
        exact_state((2, 2), [0, 0, 0, 0])
    with pytest.raises(FormatMismatch):
        exact_state((2, 2, 2), [1] * 7)
    with pytest.raises(BadDimension):
        exact_state((1, 2), [1, 2])


def test_amplitude_order_last_index_fastest():
    state = exact_state((2, 2, 2), range(1, 9))
    assert state.amplitude((0, 0, 0)) == GR(1)
    assert state.amplitude((0, 0, 1)) == GR(2)
    assert state.amplitude((0, 1, 0)) == GR(3)
    assert state.amplitude((1, 0, 0)) == GR(5)


def test_flatten_ghz_and_w(ghz, w_state):
    assert flatten(ghz, [0]) == [
        [GR(1), GR(0), GR(0), GR(0)],
        [GR(0), GR(0), GR(0), GR(1)],
    ]
    assert flatten(w_state, [0]) == [
        [GR(0), GR(1), GR(1), GR(0)],
        [GR(1), GR(0), GR(0), GR(0)],
    ]


def test_flatten_322_boundary_rows():
    state = from_terms((3, 2, 2), {(0, 0, 0): 1, (1, 0, 1): 1, (1, 1, 0): 1, (2, 1, 1): 1})
    assert flatten(state, [0]) == [
        [GR(1), GR(0), GR(0), GR(0)],
        [GR(0), GR(1), GR(1), GR(0)],
        [GR(0), GR(0), GR(0), GR(1)],
    ]


def test_flatten_bad_cut(ghz):
    with pytest.raises(BadCut):
        flatten(ghz, [])
    with pytest.raises(BadCut):
        flatten(ghz, [0, 1, 2])


def test_cut_rank_examples(ghz):
    assert cut_rank(ghz, [0]) == 2
    assert cut_rank(from_terms((2, 2, 2), {(0, 0, 0): 1}), [1]) == 1
    state = from_terms((3, 2, 2), {(0, 0, 0): 1, (1, 0, 1): 1, (2, 1, 1): 1})
    assert cut_rank(state, [0]) == 3


def test_cut_rank_complement_symmetry(rng):
    for fmt in [(2, 2, 2), (3, 2, 2), (2, 2, 2, 2)]:
        state = random_rational_state(fmt, int(rng.integers(1 << 30)))
        n = len(fmt)
        for r in range(1, n):
            for cut in itertools.combinations(range(n), r):
                comp = tuple(p for p in range(n) if p not in cut)
                assert cut_rank(state, cut) == cut_rank(state, comp)


def test_rank_invariant_under_invertible_and_monotone_under_singular(rng):
    for _ in range(20):
        state = random_rational_state((2, 2, 2), int(rng.integers(1 << 30)))
        inv = local_operators([rand_invertible(rng, 2) for _ in range(3)])
        moved = apply_local(state, inv)
        for p in range(3):
            assert cut_rank(moved, [p]) == cut_rank(state, [p])
        sing = local_operators(
            [rand_singular(rng, 2), rand_invertible(rng, 2), rand_invertible(rng, 2)]
        )
        try:
            degraded = apply_local(state, sing)
        except ZeroState:
            continue
        for p in range(3):
            assert cut_rank(degraded, [p]) <= cut_rank(state, [p])


def test_rank_invariance_float_mode(rng):
    for _ in range(15):
        state = random_state((2, 2, 2), int(rng.integers(1 << 30)))
        mats = [
            (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))).tolist()
            for _ in range(3)
        ]
        ops = local_operators(mats)
        if not ops.all_invertible:
            continue
        moved = apply_local(state, ops)
        for p in range(3):
            assert cut_rank(moved, [p]) == cut_rank(state, [p])
        projector = local_operators([[[1, 0], [0, 0]], mats[1], mats[2]])
        degraded = apply_local(state, projector)
        for p in range(3):
            assert cut_rank(degraded, [p]) <= cut_rank(state, [p])


def test_exact_and_float_ranks_agree(rng):
    for _ in range(25):
        state = random_rational_state((2, 2, 2), int(rng.integers(1 << 30)))
        floated = to_float(state)
        for p in range(3):
            assert cut_rank(state, [p]) == cut_rank(floated, [p])


def test_flatten_unflatten_roundtrip(rng):
    state = random_rational_state((2, 2, 2, 2), 99)
    n = len(state.format)
    for cut in [(0,), (1,), (0, 2), (1, 3)]:
        rows = flatten(state, cut)
        rest = tuple(p for p in range(n) if p not in cut)
        rebuilt = {}
        row_dims = [state.format[p] for p in cut]
        col_dims = [state.format[p] for p in rest]
        for ri, row_idx in enumerate(itertools.product(*(range(d) for d in row_dims))):
            for ci, col_idx in enumerate(itertools.product(*(range(d) for d in col_dims))):
                multi = [0] * n
                for p, i in zip(cut, row_idx):
                    multi[p] = i
                for p, i in zip(rest, col_idx):
                    multi[p] = i
                rebuilt[tuple(multi)] = rows[ri][ci]
        for multi in itertools.product(*(range(d) for d in state.format)):
            assert rebuilt[multi] == state.amplitude(multi)


def test_schmidt_float_bell_and_product():
    bell = float_state((2, 2), [2**-0.5, 0, 0, 2**-0.5])
    np.testing.assert_allclose(schmidt_coefficients(bell), [2**-0.5, 2**-0.5])
    prod = float_state((2, 2), [1, 0, 0, 0])
    np.testing.assert_allclose(schmidt_coefficients(prod), [1.0, 0.0])


def test_schmidt_exact_modes():
    # irrational spectrum comes back as floats from the exact gram matrix
    squared = schmidt_coefficients(exact_state((2, 2), [1, 2, 3, 4]))
    np.testing.assert_allclose(squared, [15 + math.sqrt(221), 15 - math.sqrt(221)])
    # rational spectrum stays exact
    squared = schmidt_coefficients(exact_state((2, 2), [1, 0, 0, 2]))
    assert squared == (Fraction(4), Fraction(1))
    with pytest.raises(NotBipartite):
        schmidt_coefficients(exact_state((2, 2, 2), [1] + [0] * 7))


def test_schmidt_count_matches_rank(rng):
    for _ in range(10):
        state = random_state((3, 3), int(rng.integers(1 << 30)))
        values = schmidt_coefficients(state)
        above = sum(1 for v in values if v > 1e-9 * values[0])
        assert above == cut_rank(state, [0])


def test_apply_local_examples(ghz):
    ident = [[1, 0], [0, 1]]
    same = apply_local(ghz, local_operators([ident] * 3))
    assert same.amplitudes == ghz.amplitudes
    mixed = apply_local(ghz, local_operators([[[1, 1], [1, -1]], ident, ident]))
    expect = from_terms((2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 0): 1, (1, 1, 1): -1})
    assert mixed.amplitudes == expect.amplitudes
    projected = apply_local(ghz, local_operators([[[1, 0], [0, 0]], ident, ident]))
    assert projected.amplitudes == from_terms((2, 2, 2), {(0, 0, 0): 1}).amplitudes


def test_apply_local_zero_state(ghz):
    kill = [[0, 0], [0, 0]]
    ident = [[1, 0], [0, 1]]
    with pytest.raises(ZeroState):
        apply_local(ghz, local_operators([kill, ident, ident]))
    with pytest.raises(SizeMismatch):
        apply_local(ghz, local_operators([ident, ident]))


def test_separability_pattern_examples(ghz):
    assert separability_pattern(from_terms((2, 2, 2), {(0, 0, 0): 1})) == ((0,), (1,), (2,))
    b1 = from_terms((2, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1})
    assert separability_pattern(b1) == ((0,), (1, 2))
    assert separability_pattern(ghz) == ((0, 1, 2),)


def test_separability_invariant_under_invertible(rng):
    b2 = from_terms((2, 2, 2), {(0, 0, 1): 1, (1, 0, 0): 1})
    for _ in range(10):
        ops = local_operators([rand_invertible(rng, 2) for _ in range(3)])
        assert separability_pattern(apply_local(b2, ops)) == separability_pattern(b2)


def test_random_state_determinism():
    a = random_state((2, 2, 2), 7)
    b = random_state((2, 2, 2), 7)
    assert a.amplitudes == b.amplitudes
    assert random_state((2, 2, 2), 8).amplitudes != a.amplitudes
    with pytest.raises(BadDimension):
        random_state((1, 2), 7)
    assert abs(sum(abs(x) ** 2 for x in a.amplitudes) - 1) < 1e-12


def test_product_vector_projective_equality():
    a = product_vector([(GR(1), GR(2)), (GR(0), GR(1))])
    b = product_vector([(GR(2), GR(4)), (GR(0), GR(-3))])
    assert a == b
    c = product_vector([(GR(1), GR(3)), (GR(0), GR(1))])
    assert a != c
    with pytest.raises(SizeMismatch):
        product_vector([(GR(0), GR(0)), (GR(1), GR(0))])


def test_states_proportional(ghz):
    doubled = new_state((2, 2, 2), [a * GR(0, 2) for a in ghz.amplitudes])
    assert states_proportional(doubled, ghz)
    assert not states_proportional(ghz, from_terms((2, 2, 2), {(0, 0, 0): 1}))
