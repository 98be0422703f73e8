"""Hyperdeterminant evaluation for the supported formats.

Explicit polynomials cover the 2x2, 2x2x2, and 3x2x2 formats; the 2x2x2x2
value is produced by the Schlafli lift, the discriminant of the binary
quartic obtained by pairing the first party with an auxiliary 2-vector.
Calibration constants pin the lift to the explicit ground-truth formulas,
removing any sign or scale ambiguity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import (
    AllLeadingZero,
    InterpolationInconsistent,
    SizeMismatch,
    UnsupportedFormat,
    WrongFormat,
)
from .scalars import (
    DEFAULT_TOL,
    EXACT,
    GaussianRational,
    approx_zero,
    as_exact,
    as_float,
    is_exact,
)
from .tensor import (
    LocalOperatorTuple,
    ProductVector,
    StateTensor,
    apply_local,
    local_operators,
    new_state,
)

#: Degree of homogeneity of the hyperdeterminant per supported format.
DEGREES = {(2, 2): 2, (2, 2, 2): 4, (3, 2, 2): 6, (2, 2, 2, 2): 24}

_RETRY_SEED = 0x51CA
_RETRY_LIMIT = 8


def _require_format(state: StateTensor, fmt: tuple[int, ...]):
    if state.format != fmt:
        raise WrongFormat(f"expected format {fmt}, got {state.format}")


def pairing(state: StateTensor, x: ProductVector):
    """Contraction F(A, x) = sum a_i x1[i1] ... xn[in]; multilinear in x."""
    if len(x.factors) != state.n_parties:
        raise SizeMismatch("product vector party count does not match the state")
    for p, f in enumerate(x.factors):
        if len(f) != state.format[p]:
            raise SizeMismatch(f"factor {p} has length {len(f)}, expected {state.format[p]}")
    acc = None
    for multi in itertools.product(*(range(d) for d in state.format)):
        term = state.amplitudes[state.offset(multi)]
        if not term:
            continue
        for p, i in enumerate(multi):
            term = term * x.factors[p][i]
        acc = term if acc is None else acc + term
    return state.amplitudes[0] * 0 if acc is None else acc


def det2(state: StateTensor):
    """Ordinary 2x2 determinant a00 a11 - a01 a10."""
    _require_format(state, (2, 2))
    a = state.amplitudes
    return a[0] * a[3] - a[1] * a[2]


def det3(state: StateTensor):
    """Cayley's 2x2x2 hyperdeterminant, the explicit degree-4 polynomial."""
    _require_format(state, (2, 2, 2))
    a = state.amplitudes
    quads = a[0] * a[0] * a[7] * a[7] + a[1] * a[1] * a[6] * a[6] \
        + a[2] * a[2] * a[5] * a[5] + a[4] * a[4] * a[3] * a[3]
    cross = a[0] * a[1] * a[6] * a[7] + a[0] * a[2] * a[5] * a[7] \
        + a[0] * a[4] * a[3] * a[7] + a[1] * a[2] * a[5] * a[6] \
        + a[1] * a[4] * a[3] * a[6] + a[2] * a[4] * a[3] * a[5]
    diag = a[0] * a[3] * a[5] * a[6] + a[1] * a[2] * a[4] * a[7]
    return quads - 2 * cross + 4 * diag


def _minor3(rows, drop_col: int):
    keep = [c for c in range(4) if c != drop_col]
    sub = [[rows[r][c] for c in keep] for r in range(3)]
    return linalg.exact_det(sub) if is_exact(sub[0][0]) else _det3x3_float(sub)


def _det3x3_float(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def det322(state: StateTensor):
    """Boundary-format 3x2x2 hyperdeterminant m1 m4 - m2 m3 (degree 6).

    The m_j are the 3x3 minors of the party-0 flattening with column j
    removed.
    """
    _require_format(state, (3, 2, 2))
    a = state.amplitudes
    rows = [[a[4 * r + c] for c in range(4)] for r in range(3)]
    m1, m2, m3, m4 = (_minor3(rows, j) for j in range(4))
    return m1 * m4 - m2 * m3


def minors322(state: StateTensor):
    """The four 3x3 minors entering the 3x2x2 hyperdeterminant."""
    _require_format(state, (3, 2, 2))
    a = state.amplitudes
    rows = [[a[4 * r + c] for c in range(4)] for r in range(3)]
    return tuple(_minor3(rows, j) for j in range(4))


def concurrence(state: StateTensor):
    """Two-qubit concurrence 2|det2|.

    Float mode returns the measure itself; exact mode returns the squared
    measure 4 |det2|^2, which stays rational.
    """
    value = det2(state)
    if state.field_tag == EXACT:
        return 4 * value.abs_squared()
    return 2.0 * abs(value)


def three_tangle(state: StateTensor):
    """Three-qubit tangle 4|det3| (float) or its square 16|det3|^2 (exact)."""
    value = det3(state)
    if state.field_tag == EXACT:
        return 16 * value.abs_squared()
    return 4.0 * abs(value)


@dataclass(frozen=True)
class BinaryFormCoefficients:
    """Coefficients c0..cl of the slice pencil determinant.

    c_j is the coefficient of x0^(l-j) x1^j in base_det(x0 A0 + x1 A1),
    where A0, A1 are the two party-0 slices.  The source state and base
    determinant are kept so a degenerate leading coefficient can be
    repaired by re-deriving from a twisted tensor.
    """

    degree: int
    coeffs: tuple
    source: StateTensor | None = None
    base_det: Callable | None = None


def _slice_state(state: StateTensor, index: int) -> StateTensor:
    block = state.size // state.format[0]
    return StateTensor(
        state.format[1:],
        state.amplitudes[index * block : (index + 1) * block],
        state.field_tag,
    )


def binary_form_coeffs(state: StateTensor, base_det: Callable, tol: float = DEFAULT_TOL) -> BinaryFormCoefficients:
    """Recover the pencil coefficients by interpolation at integer nodes.

    The dehomogenized pencil value base_det(A0 + t A1) is sampled at
    t = 0..l and the Vandermonde system solved; the leading coefficient is
    then read directly from base_det(A1) (exactly equal in exact mode,
    checked against the interpolation in float mode).
    """
    if state.format[0] != 2:
        raise WrongFormat("the pencil party must have dimension 2")
    slice_fmt = state.format[1:]
    degree = DEGREES.get(slice_fmt)
    if degree is None:
        raise WrongFormat(f"no base determinant degree known for slice format {slice_fmt}")
    a0 = _slice_state(state, 0)
    a1 = _slice_state(state, 1)
    exact = state.field_tag == EXACT
    values = []
    for t in range(degree + 1):
        scalar_t = GaussianRational(t) if exact else complex(t)
        combo = tuple(x + scalar_t * y for x, y in zip(a0.amplitudes, a1.amplitudes))
        values.append(base_det(StateTensor(slice_fmt, combo, state.field_tag)))
    direct = base_det(a1)
    if exact:
        vmat = [
            [GaussianRational(t**k) for k in range(degree + 1)]
            for t in range(degree + 1)
        ]
        coeffs = linalg.exact_solve(vmat, values)
        assert coeffs[-1] == direct
        coeffs[-1] = direct
    else:
        vmat = np.vander(np.arange(degree + 1, dtype=float), increasing=True)
        solved = np.linalg.solve(vmat.astype(complex), np.array(values, dtype=complex))
        coeffs = [complex(c) for c in solved]
        scale = max(max(abs(c) for c in coeffs), abs(direct), 1e-300)
        if abs(coeffs[-1] - direct) > math.sqrt(tol) * scale:
            raise InterpolationInconsistent(
                f"leading coefficient mismatch: {coeffs[-1]} vs direct {direct}"
            )
        coeffs[-1] = direct
    return BinaryFormCoefficients(degree, tuple(coeffs), state, base_det)


def sylvester_matrix(coeffs: Sequence):
    """The order 2l-1 resultant-style matrix of the form and its derivative.

    l-1 shifted rows of (c0 .. cl) sit above l shifted rows of
    (1 c1, 2 c2, .., l cl).
    """
    cs = list(coeffs)
    l = len(cs) - 1
    if l < 2:
        raise ValueError("need degree at least 2")
    n = 2 * l - 1
    zero = cs[0] * 0
    m = [[zero] * n for _ in range(n)]
    for r in range(l - 1):
        for j in range(l + 1):
            m[r][r + j] = cs[j]
    for r in range(l):
        for j in range(1, l + 1):
            m[l - 1 + r][r + j - 1] = cs[j] * j
    return m


@dataclass(frozen=True)
class LiftResult:
    """Value of the Schlafli lift with degeneracy diagnostics."""

    value: object
    degenerate_pencil: bool
    retries_used: int


def _det1_twist(rng) -> list:
    """Random integer 2x2 matrix of determinant exactly 1, entries in -3..3."""
    for _ in range(500):
        a, b, c, d = (int(v) for v in rng.integers(-3, 4, size=4))
        if a * d - b * c == 1:
            return [[a, b], [c, d]]
    raise RuntimeError("failed to draw a determinant-1 twist")


def _identity_ops_with_party0(twist, fmt) -> LocalOperatorTuple:
    mats = [twist]
    for d in fmt[1:]:
        mats.append([[1 if i == j else 0 for j in range(d)] for i in range(d)])
    return local_operators(mats)


def schlafli_lift(
    coeffs: BinaryFormCoefficients,
    calibration,
    max_retries: int = _RETRY_LIMIT,
    tol: float = DEFAULT_TOL,
) -> LiftResult:
    """Discriminant of the binary form, scaled by the calibration constant.

    Computed as calibration * det(sylvester) / c_l.  A zero leading
    coefficient is repaired by acting on the pencil party of the source
    tensor with a random determinant-1 integer matrix (which leaves the
    lifted value exactly invariant) and re-deriving the coefficients;
    AllLeadingZero is raised once the retry budget is exhausted.  An
    identically zero pencil short-circuits to value 0 with the
    degenerate_pencil flag set.
    """
    current = coeffs
    exact = all(is_exact(c) for c in current.coeffs)
    zero = current.coeffs[0] * 0

    def leading_is_zero(cs):
        if exact:
            return not cs[-1]
        scale = max((abs(c) for c in cs), default=0.0)
        return approx_zero(cs[-1], scale, tol) if scale else True

    def pencil_is_zero(cs):
        if exact:
            return not any(cs)
        scale = max((abs(c) for c in cs), default=0.0)
        return scale == 0.0

    if pencil_is_zero(current.coeffs):
        return LiftResult(calibration * zero, True, 0)
    retries = 0
    while leading_is_zero(current.coeffs):
        if current.source is None or current.base_det is None:
            raise AllLeadingZero("leading coefficient is zero and no source tensor to retry from")
        if retries >= max_retries:
            raise AllLeadingZero(f"leading coefficient still zero after {retries} retries")
        rng = np.random.default_rng(_RETRY_SEED + retries)
        ops = _identity_ops_with_party0(_det1_twist(rng), current.source.format)
        twisted = apply_local(current.source, ops)
        current = binary_form_coeffs(twisted, current.base_det, tol)
        retries += 1
    m = sylvester_matrix(current.coeffs)
    if exact:
        det = linalg.exact_det(m)
    else:
        det = complex(np.linalg.det(linalg.float_matrix(m)))
    return LiftResult(calibration * (det / current.coeffs[-1]), False, retries)


#: Calibration pinning the degree-2 lift to the explicit 2x2x2 polynomial.
K3 = GaussianRational(-1)

#: Calibration pinning the degree-4 lift to the generic-family ground truth,
#: fixed once from the exact evaluation at (2, 1, 1, 1).
K4 = GaussianRational(Fraction(1, 256))


def generic4_state(alpha, beta, gamma, delta, field_tag: str = EXACT) -> StateTensor:
    """The generic four-qubit family state with coefficients (a, b, g, d).

    Places a on |0000>+|1111>, b on |0011>+|1100>, g on |0101>+|1010>,
    and d on |0110>+|1001>.
    """
    coerce = as_exact if field_tag == EXACT else as_float
    a, b, g, d = (coerce(v) for v in (alpha, beta, gamma, delta))
    zero = a * 0
    amps = [zero] * 16
    pairs = {(0, 15): a, (3, 12): b, (5, 10): g, (6, 9): d}
    for (i, j), v in pairs.items():
        amps[i] = v
        amps[j] = v
    return new_state((2, 2, 2, 2), amps, field_tag)


def generic4_product(alpha, beta, gamma, delta, field_tag: str = EXACT):
    """Closed-form hyperdeterminant of the generic four-qubit family.

    The product of the twelve squared factors: the four coefficients and
    the eight signed sums a +- b +- g +- d.
    """
    coerce = as_exact if field_tag == EXACT else as_float
    a, b, g, d = (coerce(v) for v in (alpha, beta, gamma, delta))
    result = (a * b * g * d) ** 2
    for s1, s2, s3 in itertools.product((1, -1), repeat=3):
        factor = a + s1 * b + s2 * g + s3 * d
        result = result * factor * factor
    return result


def det4(state: StateTensor, tol: float = DEFAULT_TOL):
    """Four-qubit hyperdeterminant of degree 24 via the Schlafli lift."""
    _require_format(state, (2, 2, 2, 2))
    calibration = K4 if state.field_tag == EXACT else complex(K4)
    return schlafli_lift(binary_form_coeffs(state, det3, tol), calibration, tol=tol).value


@dataclass(frozen=True)
class HyperdetResult:
    """Dispatch result; defined is False when the dual variety has codimension > 1."""

    defined: bool
    value: object
    degree: int
    format: tuple[int, ...]


def hyperdet(state: StateTensor, tol: float = DEFAULT_TOL) -> HyperdetResult:
    """Evaluate the hyperdeterminant of any supported format.

    Formats violating the polygon inequality (largest party dimension
    exceeding the sum of the rest) have no hypersurface dual, so the value
    is fixed at unit with defined=False.  Hypersurface formats without an
    implemented formula raise UnsupportedFormat.
    """
    fmt = state.format
    if fmt == (2, 2):
        return HyperdetResult(True, det2(state), 2, fmt)
    if fmt == (2, 2, 2):
        return HyperdetResult(True, det3(state), 4, fmt)
    if fmt == (3, 2, 2):
        return HyperdetResult(True, det322(state), 6, fmt)
    if fmt == (2, 2, 2, 2):
        return HyperdetResult(True, det4(state, tol), 24, fmt)
    ks = sorted((d - 1 for d in fmt), reverse=True)
    if len(ks) >= 2 and ks[0] > sum(ks[1:]):
        unit = GaussianRational(1) if state.field_tag == EXACT else 1.0 + 0j
        return HyperdetResult(False, unit, 0, fmt)
    raise UnsupportedFormat(f"no hyperdeterminant rule implemented for format {fmt}")
