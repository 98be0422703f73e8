"""Dense state tensors, flattenings, ranks, and the local group action.

States are rays: amplitudes are stored unnormalized and nothing here ever
normalizes implicitly.  Amplitude order is row-major with the last party
index fastest, so a (2, 2, 2) tensor lists a000, a001, a010, a011, a100,
and so on.  Party indices in the API are 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .errors import (
    BadCut,
    BadDimension,
    FormatMismatch,
    NotBipartite,
    SizeMismatch,
    ZeroState,
)
from .scalars import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    GaussianRational,
    approx_zero,
    as_exact,
    as_float,
    is_exact,
)


@dataclass(frozen=True)
class StateTensor:
    """Unnormalized amplitude tensor with its format and numeric field."""

    format: tuple[int, ...]
    amplitudes: tuple
    field_tag: str

    @property
    def n_parties(self) -> int:
        return len(self.format)

    @property
    def size(self) -> int:
        return math.prod(self.format)

    def offset(self, multi_index: Sequence[int]) -> int:
        off = 0
        for dim, idx in zip(self.format, multi_index):
            off = off * dim + idx
        return off

    def amplitude(self, multi_index: Sequence[int]):
        return self.amplitudes[self.offset(multi_index)]

    def scale(self) -> float:
        """Largest amplitude magnitude; the reference for float zero tests."""
        return max(abs(as_float(a)) for a in self.amplitudes)


@dataclass(eq=False, frozen=True)
class ProductVector:
    """Tuple of per-party coefficient vectors; equality is projective."""

    factors: tuple

    __hash__ = None

    def __eq__(self, other):
        if not isinstance(other, ProductVector):
            return NotImplemented
        return self.projectively_equal(other)

    def projectively_equal(self, other: "ProductVector", tol: float = DEFAULT_TOL) -> bool:
        if len(self.factors) != len(other.factors):
            return False
        for mine, theirs in zip(self.factors, other.factors):
            if len(mine) != len(theirs):
                return False
            if is_exact(mine[0]) and is_exact(theirs[0]):
                pivot = next(i for i, x in enumerate(mine) if x)
                if not theirs[pivot]:
                    return False
                ratio = mine[pivot] / theirs[pivot]
                if any(mine[i] != theirs[i] * ratio for i in range(len(mine))):
                    return False
            else:
                a = np.array([as_float(x) for x in mine])
                b = np.array([as_float(x) for x in theirs])
                pivot = int(np.argmax(np.abs(a)))
                if approx_zero(b[pivot], float(np.abs(b).max()), tol):
                    return False
                ratio = a[pivot] / b[pivot]
                if not np.allclose(a, b * ratio, rtol=10 * tol, atol=10 * tol * np.abs(a).max()):
                    return False
        return True


@dataclass(frozen=True)
class LocalOperatorTuple:
    """One square matrix per party, with cached determinants."""

    operators: tuple
    determinants: tuple
    invertible: tuple

    @property
    def all_invertible(self) -> bool:
        return all(self.invertible)


def product_vector(factors: Sequence[Sequence]) -> ProductVector:
    """Validate per-party coefficient vectors (each must be nonzero)."""
    packed = tuple(tuple(f) for f in factors)
    for f in packed:
        if not f or not any(bool(x) if is_exact(x) else as_float(x) != 0 for x in f):
            raise SizeMismatch("every product-vector factor must be a nonzero vector")
    return ProductVector(packed)


def _infer_field(amplitudes) -> str:
    return EXACT if all(is_exact(a) for a in amplitudes) else FLOAT


def new_state(format: Sequence[int], amplitudes: Sequence, field_tag: str | None = None) -> StateTensor:
    """Validate and build a state tensor.

    Raises BadDimension for party dimensions below 2, FormatMismatch when
    the amplitude count is off, and ZeroState for the all-zero tensor.
    """
    fmt = tuple(int(d) for d in format)
    if any(d < 2 for d in fmt):
        raise BadDimension(f"party dimensions must be at least 2, got {fmt}")
    amps = tuple(amplitudes)
    if len(amps) != math.prod(fmt):
        raise FormatMismatch(
            f"expected {math.prod(fmt)} amplitudes for format {fmt}, got {len(amps)}"
        )
    if field_tag is None:
        field_tag = _infer_field(amps)
    if field_tag == EXACT:
        amps = tuple(as_exact(a) for a in amps)
        if not any(amps):
            raise ZeroState("all amplitudes are zero")
    elif field_tag == FLOAT:
        amps = tuple(as_float(a) for a in amps)
        if not any(a != 0 for a in amps):
            raise ZeroState("all amplitudes are zero")
    else:
        raise ValueError(f"unknown field tag {field_tag!r}")
    return StateTensor(fmt, amps, field_tag)


def exact_state(format: Sequence[int], amplitudes: Sequence) -> StateTensor:
    """Build an exact-mode state from ints, Fractions, strings, or pairs."""
    return new_state(format, [as_exact(a) for a in amplitudes], EXACT)


def float_state(format: Sequence[int], amplitudes: Sequence) -> StateTensor:
    return new_state(format, [as_float(a) for a in amplitudes], FLOAT)


def from_terms(format: Sequence[int], terms: dict, field_tag: str = EXACT) -> StateTensor:
    """Build a state from a {multi-index: coefficient} mapping."""
    fmt = tuple(int(d) for d in format)
    coerce = as_exact if field_tag == EXACT else as_float
    zero = GaussianRational(0) if field_tag == EXACT else 0j
    amps = [zero] * math.prod(fmt)
    for multi, coeff in terms.items():
        off = 0
        for dim, idx in zip(fmt, multi):
            if not 0 <= idx < dim:
                raise FormatMismatch(f"index {multi} outside format {fmt}")
            off = off * dim + idx
        amps[off] = coerce(coeff)
    return new_state(fmt, amps, field_tag)


def to_float(state: StateTensor) -> StateTensor:
    if state.field_tag == FLOAT:
        return state
    return StateTensor(state.format, tuple(as_float(a) for a in state.amplitudes), FLOAT)


def _check_cut(state: StateTensor, parties: Sequence[int]) -> tuple[int, ...]:
    cut = tuple(sorted(set(int(p) for p in parties)))
    if not cut or len(cut) == state.n_parties:
        raise BadCut("cut must be a nonempty proper subset of the parties")
    if any(p < 0 or p >= state.n_parties for p in cut):
        raise BadCut(f"party indices {cut} outside 0..{state.n_parties - 1}")
    return cut


def flatten(state: StateTensor, parties: Sequence[int]):
    """Bipartite-cut matrix: rows indexed by the cut parties, row-major.

    Returns a list of rows holding the original amplitude scalars.
    """
    cut = _check_cut(state, parties)
    rest = tuple(p for p in range(state.n_parties) if p not in cut)
    row_dims = [state.format[p] for p in cut]
    col_dims = [state.format[p] for p in rest]
    rows = []
    for row_idx in itertools.product(*(range(d) for d in row_dims)):
        row = []
        for col_idx in itertools.product(*(range(d) for d in col_dims)):
            multi = [0] * state.n_parties
            for p, i in zip(cut, row_idx):
                multi[p] = i
            for p, i in zip(rest, col_idx):
                multi[p] = i
            row.append(state.amplitudes[state.offset(multi)])
        rows.append(row)
    return rows


def cut_rank(state: StateTensor, parties: Sequence[int], tol: float = DEFAULT_TOL) -> int:
    """Rank of the bipartite-cut flattening (the local rank for singletons)."""
    rows = flatten(state, parties)
    if state.field_tag == EXACT:
        return linalg.exact_rank(rows)
    return linalg.float_rank(linalg.float_matrix(rows), tol)


def local_ranks(state: StateTensor, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    return tuple(cut_rank(state, [p], tol) for p in range(state.n_parties))


def schmidt_coefficients(state: StateTensor, tol: float = DEFAULT_TOL):
    """Bipartite Schmidt data.

    Float mode returns the singular values of the 1|2 flattening in
    descending order.  Exact mode returns the squared coefficients (the
    Gram-matrix eigenvalues) instead: exact Fractions whenever the
    characteristic polynomial splits over the rationals, floats otherwise.
    """
    if state.n_parties != 2:
        raise NotBipartite(f"format {state.format} is not bipartite")
    rows = flatten(state, [0])
    if state.field_tag == FLOAT:
        sv = np.linalg.svd(linalg.float_matrix(rows), compute_uv=False)
        return tuple(float(s) for s in sv)
    gram = [
        [
            sum(
                (rows[i][k] * rows[j][k].conjugate() for k in range(len(rows[0]))),
                GaussianRational(0),
            )
            for j in range(len(rows))
        ]
        for i in range(len(rows))
    ]
    poly = linalg.char_poly(gram)
    assert all(c.im == 0 for c in poly)
    roots = linalg.rational_roots_if_split([c.re for c in poly])
    if roots is not None and len(roots) == len(gram):
        return tuple(sorted(roots, reverse=True))
    eigs = np.linalg.eigvalsh(linalg.float_matrix(gram))
    return tuple(float(e) for e in eigs[::-1])


def _coerce_entry(x):
    if is_exact(x):
        return x
    if isinstance(x, (int, Fraction, str)):
        return as_exact(x)
    return as_float(x)


def local_operators(matrices: Sequence, tol: float = DEFAULT_TOL) -> LocalOperatorTuple:
    """Wrap per-party square matrices, caching determinants and flags.

    Integer and Fraction entries are promoted to the exact field; float or
    complex entries make the operator a float-mode operator.
    """
    ops = []
    dets = []
    flags = []
    for mat in matrices:
        rows = tuple(tuple(_coerce_entry(x) for x in r) for r in mat)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise SizeMismatch("local operators must be square")
        ops.append(rows)
        if all(is_exact(x) for r in rows for x in r):
            det = linalg.exact_det([list(r) for r in rows])
            dets.append(det)
            flags.append(bool(det))
        else:
            arr = linalg.float_matrix(rows)
            det = complex(np.linalg.det(arr))
            dets.append(det)
            row_norms = np.linalg.norm(arr, axis=1)
            scale = float(np.prod(np.maximum(row_norms, 1e-300)))
            flags.append(not approx_zero(det, scale, tol))
    return LocalOperatorTuple(tuple(ops), tuple(dets), tuple(flags))


def apply_local(state: StateTensor, ops: LocalOperatorTuple, tol: float = DEFAULT_TOL) -> StateTensor:
    """Act with one operator per party: a'_i = sum_j g1[i1,j1]...gn[in,jn] a_j.

    Raises ZeroState when a singular operator annihilates the state.
    """
    if len(ops.operators) != state.n_parties:
        raise SizeMismatch("operator count does not match party count")
    for p, mat in enumerate(ops.operators):
        if len(mat) != state.format[p]:
            raise SizeMismatch(
                f"operator for party {p} is {len(mat)}x{len(mat)}, expected {state.format[p]}"
            )
    ops_exact = all(is_exact(x) for mat in ops.operators for r in mat for x in r)
    if state.field_tag == EXACT and not ops_exact:
        state = to_float(state)
    if state.field_tag == FLOAT and ops_exact:
        matrices = tuple(
            tuple(tuple(as_float(x) for x in row) for row in mat) for mat in ops.operators
        )
    else:
        matrices = ops.operators
    fmt = state.format
    index_sets = [range(d) for d in fmt]
    out = []
    for i_multi in itertools.product(*index_sets):
        acc = None
        for j_multi in itertools.product(*index_sets):
            term = state.amplitudes[state.offset(j_multi)]
            if not term:
                continue
            for p in range(len(fmt)):
                term = matrices[p][i_multi[p]][j_multi[p]] * term
            acc = term if acc is None else acc + term
        if acc is None:
            acc = state.amplitudes[0] * 0
        out.append(acc)
    if state.field_tag == EXACT:
        if not any(out):
            raise ZeroState("state annihilated by a singular local operator")
        return StateTensor(fmt, tuple(out), EXACT)
    floats = tuple(as_float(a) for a in out)
    op_scale = 1.0
    for mat in ops.operators:
        op_scale *= max(abs(as_float(x)) for r in mat for x in r) or 1.0
    if all(approx_zero(a, state.scale() * op_scale, tol) for a in floats):
        raise ZeroState("state annihilated by a singular local operator")
    return StateTensor(fmt, floats, FLOAT)


def separability_pattern(state: StateTensor, tol: float = DEFAULT_TOL) -> tuple[tuple[int, ...], ...]:
    """Finest partition of the parties across which the state factors.

    Blocks are the equivalence classes of "never separated by a rank-1
    cut"; for pure states a cut has rank 1 exactly when the state factors
    across it.
    """
    n = state.n_parties
    rank_one_cuts = []
    others = list(range(1, n))
    for r in range(0, n - 1):
        for combo in itertools.combinations(others, r):
            cut = (0,) + combo
            if cut_rank(state, cut, tol) == 1:
                rank_one_cuts.append(set(cut))
    blocks: list[set[int]] = []
    for p in range(n):
        placed = False
        for block in blocks:
            q = next(iter(block))
            if all((p in cut) == (q in cut) for cut in rank_one_cuts):
                block.add(p)
                placed = True
                break
        if not placed:
            blocks.append({p})
    return tuple(tuple(sorted(b)) for b in sorted(blocks, key=min))


def identity_operator(dim: int):
    return [[GaussianRational(1) if i == j else GaussianRational(0) for j in range(dim)] for i in range(dim)]


def operators_at_party(matrix, party: int, format: Sequence[int]) -> LocalOperatorTuple:
    """Operator tuple acting with `matrix` on one party and identity elsewhere."""
    mats = [identity_operator(d) for d in format]
    mats[party] = matrix
    return local_operators(mats)


def compress_party(state: StateTensor, party: int, tol: float = DEFAULT_TOL):
    """Rotate one party so its support occupies the leading basis vectors.

    Returns (reduced, rank, transform): `transform` is an invertible basis
    change on the party, and `reduced` is the state restricted to the
    party's row space.  When the rank is 1 the party is dropped entirely
    from the format; otherwise its dimension shrinks to the rank.
    """
    rows = flatten(state, [party])
    if state.field_tag == EXACT:
        transform, rank = linalg.exact_elimination_transform(rows)
    else:
        mat = linalg.float_matrix(rows)
        u, _, _ = np.linalg.svd(mat)
        rank = linalg.float_rank(mat, tol)
        transform = [[complex(x) for x in row] for row in u.conj().T]
    rotated = apply_local(state, operators_at_party(transform, party, state.format), tol)
    dim = state.format[party]
    if rank == dim:
        return rotated, rank, transform
    if rank == 1:
        new_fmt = tuple(d for p, d in enumerate(state.format) if p != party)
        amps = []
        for multi in itertools.product(*(range(d) for d in new_fmt)):
            full = list(multi)
            full.insert(party, 0)
            amps.append(rotated.amplitudes[rotated.offset(full)])
        return StateTensor(new_fmt, tuple(amps), state.field_tag), rank, transform
    new_fmt = tuple(rank if p == party else d for p, d in enumerate(state.format))
    amps = []
    for multi in itertools.product(*(range(d) for d in new_fmt)):
        amps.append(rotated.amplitudes[rotated.offset(multi)])
    return StateTensor(new_fmt, tuple(amps), state.field_tag), rank, transform


def random_state(format: Sequence[int], seed: int, distribution: str = "unit-gaussian-complex") -> StateTensor:
    """Seeded random float state: iid standard complex gaussian, unit norm."""
    if distribution != "unit-gaussian-complex":
        raise ValueError(f"unsupported distribution {distribution!r}")
    fmt = tuple(int(d) for d in format)
    if any(d < 2 for d in fmt):
        raise BadDimension(f"party dimensions must be at least 2, got {fmt}")
    rng = np.random.default_rng(seed)
    size = math.prod(fmt)
    vec = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    vec /= np.linalg.norm(vec)
    return StateTensor(fmt, tuple(complex(v) for v in vec), FLOAT)


def states_proportional(a: StateTensor, b: StateTensor, tol: float = DEFAULT_TOL) -> bool:
    """Whether two states are equal as rays (proportional amplitudes)."""
    if a.format != b.format:
        return False
    if a.field_tag == EXACT and b.field_tag == EXACT:
        pivot = next(i for i, x in enumerate(b.amplitudes) if x)
        if not a.amplitudes[pivot]:
            return False
        ratio = a.amplitudes[pivot] / b.amplitudes[pivot]
        return all(a.amplitudes[i] == b.amplitudes[i] * ratio for i in range(a.size))
    va = np.array([as_float(x) for x in a.amplitudes])
    vb = np.array([as_float(x) for x in b.amplitudes])
    pivot = int(np.argmax(np.abs(vb)))
    if va[pivot] == 0:
        return False
    ratio = va[pivot] / vb[pivot]
    return bool(np.allclose(va, vb * ratio, rtol=10 * tol, atol=10 * tol * np.abs(va).max()))


def norm_squared(state: StateTensor):
    """Sum of squared amplitude magnitudes; exact in exact mode."""
    if state.field_tag == EXACT:
        return sum((a.abs_squared() for a in state.amplitudes), Fraction(0))
    return float(sum(abs(a) ** 2 for a in state.amplitudes))
