import cmath

import numpy as np
import pytest

from onionclass import (
    SizeMismatch,
    critical_point_search,
    critical_residual,
    det2,
    det3,
    from_terms,
    identity_check,
    product_vector,
    random_rational_state,
    to_float,
)


def test_residual_examples(ghz):
    prod = from_terms((2, 2, 2), {(0, 0, 0): 1})
    x = product_vector([(0, 1), (0, 1), (0, 1)])
    assert critical_residual(prod, x) == 0.0
    e0 = (1, 0)
    assert critical_residual(ghz, product_vector([e0, e0, e0])) == pytest.approx(3.0)
    with pytest.raises(SizeMismatch):
        critical_residual(ghz, product_vector([e0, e0]))


def test_residual_phase_invariance(ghz, w_state, rng):
    x = product_vector([(0.3 + 0.1j, 0.7), (0.2, -0.5j), (1.0, 0.25j)])
    base = critical_residual(w_state, x)
    phases = [cmath.exp(1j * t) for t in rng.uniform(0, 2 * np.pi, 3)]
    rotated = product_vector(
        [tuple(p * v for v in f) for p, f in zip(phases, x.factors)]
    )
    assert critical_residual(w_state, rotated) == pytest.approx(base, rel=1e-12)


def test_search_verdicts(ghz, w_state):
    missing = critical_point_search(ghz, restarts=64, tol=1e-8, seed=11)
    assert not missing.found
    assert missing.residual > 1e-3
    assert missing.witness is None
    hit = critical_point_search(w_state, restarts=64, tol=1e-8, seed=11)
    assert hit.found
    assert hit.residual <= 1e-8
    assert hit.witness is not None
    for factor in hit.witness.factors:
        assert sum(abs(v) ** 2 for v in factor) == pytest.approx(1.0)
    # the witness certifies: its residual matches the reported one
    assert critical_residual(to_float(w_state), hit.witness) == pytest.approx(
        hit.residual, abs=1e-12
    )


def test_search_determinism(w_state):
    a = critical_point_search(w_state, restarts=16, tol=1e-8, seed=5)
    b = critical_point_search(w_state, restarts=16, tol=1e-8, seed=5)
    assert a.residual == b.residual
    assert a.found == b.found
    assert a.witness.factors == b.witness.factors
    c = critical_point_search(w_state, restarts=16, tol=1e-8, seed=6)
    assert c.found


def test_search_agrees_with_formula_sample(rng):
    for i in range(6):
        state = random_rational_state((2, 2, 2), 3300 + i, bound=4)
        value = det3(state)
        result = critical_point_search(to_float(state), restarts=32, tol=1e-8, seed=2)
        assert result.found == (not value)


def test_generic_family_zeros_have_critical_points():
    from onionclass import generic4_state

    degenerate = generic4_state(2, 1, 1, 0, field_tag="float")
    result = critical_point_search(degenerate, restarts=32, tol=1e-8, seed=7)
    assert result.found
    generic = generic4_state(2, 1, 1, 1, field_tag="float")
    result = critical_point_search(generic, restarts=32, tol=1e-8, seed=7)
    assert not result.found


def test_identity_check_examples():
    assert identity_check(det2, det2, (2, 2), trials=20, seed=1)
    flipped = lambda s: -det3(s)
    assert not identity_check(det3, flipped, (2, 2, 2), trials=20, seed=1)


def test_random_rational_state_determinism():
    a = random_rational_state((2, 2, 2), 4)
    b = random_rational_state((2, 2, 2), 4)
    assert a.amplitudes == b.amplitudes
    assert a.field_tag == "exact"
