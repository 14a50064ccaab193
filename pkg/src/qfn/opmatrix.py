"""Dense complex block matrices with labeled row/column index sets.

A :class:`BlockMatrix` is a rectangular array of operator blocks, each block a
``d x d`` complex matrix acting on the initial space.  Storage is a single
dense row-major complex array; the block view is pure bookkeeping computed
from the label lists.  Every value is immutable after construction and every
operation is a pure function, so the module is safe to use from multiple
threads.

Conventions used throughout the package:

* an "Op" is a plain ``d x d`` ``numpy`` array of complex numbers;
* ``norm_inf`` is the maximum absolute scalar entry;
* ``approx_eq(a, b, tol)`` means ``norm_inf(a - b) <= tol * scale`` with
  ``scale = max(1, norm_inf(a), norm_inf(b))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import AlgebraicLoop, DimensionMismatch

Label = Hashable

# Reciprocal-condition floor below which an inverse is treated as singular.
RCOND_FLOOR = 1e-12


def _as_complex(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class BlockMatrix:
    """Rectangular array of d x d operator blocks with labeled indices.

    Attributes:
        data: scalar storage of shape ``(len(row_labels)*d, len(col_labels)*d)``.
        row_labels: ordered, distinct block-row labels.
        col_labels: ordered, distinct block-column labels.
        d: initial-space dimension shared by all blocks.
    """

    data: np.ndarray
    row_labels: tuple
    col_labels: tuple
    d: int

    def __post_init__(self):
        rows = tuple(self.row_labels)
        cols = tuple(self.col_labels)
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)
        if self.d < 1:
            raise DimensionMismatch(f"initial dimension must be >= 1, got {self.d}")
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise DimensionMismatch("block labels must be distinct within each axis")
        arr = _as_complex(self.data)
        want = (len(rows) * self.d, len(cols) * self.d)
        if arr.shape != want:
            raise DimensionMismatch(f"data shape {arr.shape} != {want} implied by labels")
        if not np.isfinite(arr).all():
            raise ValueError("block matrix entries must be finite")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    # -- label bookkeeping ---------------------------------------------------

    @cached_property
    def _row_pos(self) -> dict:
        return {lab: k for k, lab in enumerate(self.row_labels)}

    @cached_property
    def _col_pos(self) -> dict:
        return {lab: k for k, lab in enumerate(self.col_labels)}

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_labels), len(self.col_labels))

    def block(self, row: Label, col: Label) -> np.ndarray:
        """Return the d x d block at the given (row label, column label)."""
        d = self.d
        try:
            r = self._row_pos[row]
            c = self._col_pos[col]
        except KeyError as exc:
            raise DimensionMismatch(f"unknown block label {exc.args[0]!r}") from None
        return self.data[r * d:(r + 1) * d, c * d:(c + 1) * d]

    def _rows_ix(self, labels: Sequence[Label]) -> np.ndarray:
        d = self.d
        try:
            pos = [self._row_pos[lab] for lab in labels]
        except KeyError as exc:
            raise DimensionMismatch(f"unknown row label {exc.args[0]!r}") from None
        return np.concatenate([np.arange(p * d, (p + 1) * d) for p in pos])

    def _cols_ix(self, labels: Sequence[Label]) -> np.ndarray:
        d = self.d
        try:
            pos = [self._col_pos[lab] for lab in labels]
        except KeyError as exc:
            raise DimensionMismatch(f"unknown column label {exc.args[0]!r}") from None
        return np.concatenate([np.arange(p * d, (p + 1) * d) for p in pos])

    def take(self, rows: Sequence[Label], cols: Sequence[Label]) -> "BlockMatrix":
        """Sub-matrix addressed by label lists (order follows the arguments)."""
        sub = self.data[np.ix_(self._rows_ix(rows), self._cols_ix(cols))]
        return BlockMatrix(sub, tuple(rows), tuple(cols), self.d)

    def with_labels(self, row_labels: Sequence[Label], col_labels: Sequence[Label]) -> "BlockMatrix":
        """Same data under new labels."""
        return BlockMatrix(self.data, tuple(row_labels), tuple(col_labels), self.d)

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zeros(row_labels: Sequence[Label], col_labels: Sequence[Label], d: int) -> "BlockMatrix":
        rows, cols = tuple(row_labels), tuple(col_labels)
        return BlockMatrix(np.zeros((len(rows) * d, len(cols) * d), np.complex128), rows, cols, d)

    @staticmethod
    def identity(labels: Sequence[Label], d: int) -> "BlockMatrix":
        labs = tuple(labels)
        return BlockMatrix(np.eye(len(labs) * d, dtype=np.complex128), labs, labs, d)

    @staticmethod
    def from_blocks(
        row_labels: Sequence[Label],
        col_labels: Sequence[Label],
        d: int,
        blocks: Mapping[tuple, np.ndarray],
    ) -> "BlockMatrix":
        """Assemble from a {(row label, col label): d x d array} mapping.

        Absent blocks are zero.  Scalars are accepted and mean a multiple of
        the d x d identity.
        """
        rows, cols = tuple(row_labels), tuple(col_labels)
        rpos = {lab: k for k, lab in enumerate(rows)}
        cpos = {lab: k for k, lab in enumerate(cols)}
        data = np.zeros((len(rows) * d, len(cols) * d), np.complex128)
        for (r, c), blk in blocks.items():
            if r not in rpos or c not in cpos:
                raise DimensionMismatch(f"block address ({r!r}, {c!r}) outside the label sets")
            b = np.asarray(blk, dtype=np.complex128)
            if b.ndim == 0:
                b = complex(b) * np.eye(d)
            if b.shape != (d, d):
                raise DimensionMismatch(f"block at ({r!r}, {c!r}) has shape {b.shape}, want ({d}, {d})")
            i, j = rpos[r], cpos[c]
            data[i * d:(i + 1) * d, j * d:(j + 1) * d] = b
        return BlockMatrix(data, rows, cols, d)

    # -- arithmetic ------------------------------------------------------------

    def __matmul__(self, other: "BlockMatrix") -> "BlockMatrix":
        return mul(self, other)

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._require_same_shape(other)
        return BlockMatrix(self.data + other.data, self.row_labels, self.col_labels, self.d)

    def __sub__(self, other: "BlockMatrix") -> "BlockMatrix":
        self._require_same_shape(other)
        return BlockMatrix(self.data - other.data, self.row_labels, self.col_labels, self.d)

    def __neg__(self) -> "BlockMatrix":
        return BlockMatrix(-self.data, self.row_labels, self.col_labels, self.d)

    def __mul__(self, scalar: complex) -> "BlockMatrix":
        return BlockMatrix(self.data * complex(scalar), self.row_labels, self.col_labels, self.d)

    __rmul__ = __mul__

    def _require_same_shape(self, other: "BlockMatrix"):
        if not isinstance(other, BlockMatrix):
            raise DimensionMismatch(f"expected BlockMatrix, got {type(other).__name__}")
        if self.d != other.d:
            raise DimensionMismatch(f"initial dimensions differ: {self.d} != {other.d}")
        if self.row_labels != other.row_labels or self.col_labels != other.col_labels:
            raise DimensionMismatch("label sets differ")

    @property
    def h(self) -> "BlockMatrix":
        """Conjugate transpose (labels swap axes)."""
        return adjoint(self)


def mul(a: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    """Block-matrix product; requires ``a.col_labels == b.row_labels``."""
    if a.d != b.d:
        raise DimensionMismatch(f"initial dimensions differ: {a.d} != {b.d}")
    if a.col_labels != b.row_labels:
        raise DimensionMismatch("inner label lists do not match")
    return BlockMatrix(a.data @ b.data, a.row_labels, b.col_labels, a.d)


def adjoint(a: BlockMatrix) -> BlockMatrix:
    """Scalar-level conjugate transpose; row and column labels swap."""
    return BlockMatrix(a.data.conj().T, a.col_labels, a.row_labels, a.d)


def inverse_with_rcond(a: np.ndarray) -> tuple[np.ndarray, float]:
    """Invert a square scalar matrix and report a 1-norm reciprocal condition.

    The estimate is ``1 / (norm1(a) * norm1(inv(a)))`` computed from the
    actual inverse, so it is deterministic across runs.  A singular input
    reports ``rcond = 0`` and returns ``None`` for the inverse.
    """
    a = _as_complex(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"cannot invert a non-square matrix of shape {a.shape}")
    if a.size == 0:
        raise DimensionMismatch("cannot invert an empty matrix")
    try:
        ainv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        return None, 0.0
    if not np.isfinite(ainv).all():
        return None, 0.0
    denom = np.linalg.norm(a, 1) * np.linalg.norm(ainv, 1)
    rcond = 1.0 / denom if denom > 0 else 0.0
    return ainv, rcond


def inv(a: BlockMatrix) -> tuple[BlockMatrix, float]:
    """Scalar-level inverse plus its reciprocal-condition estimate.

    Raises:
        AlgebraicLoop: if the reciprocal condition falls below 1e-12.
    """
    if len(a.row_labels) != len(a.col_labels):
        raise DimensionMismatch("cannot invert a non-square block matrix")
    ainv, rcond = inverse_with_rcond(a.data)
    if rcond < RCOND_FLOOR or ainv is None:
        raise AlgebraicLoop(f"matrix is singular to working precision (rcond={rcond:.3g})", rcond=rcond)
    return BlockMatrix(ainv, a.col_labels, a.row_labels, a.d), rcond


def embed_scalar(
    x,
    d: int,
    row_labels: Sequence[Label] | None = None,
    col_labels: Sequence[Label] | None = None,
) -> BlockMatrix:
    """Lift a scalar channel matrix to operator blocks: block (j, k) is
    ``x[j, k]`` times the d x d identity.

    Default labels are ``1..m`` on each axis.
    """
    xarr = _as_complex(x)
    if not np.isfinite(xarr).all():
        raise ValueError("scalar matrix entries must be finite")
    m, k = xarr.shape
    rows = tuple(row_labels) if row_labels is not None else tuple(range(1, m + 1))
    cols = tuple(col_labels) if col_labels is not None else tuple(range(1, k + 1))
    if len(rows) != m or len(cols) != k:
        raise DimensionMismatch("label lists do not match the scalar matrix shape")
    return BlockMatrix(np.kron(xarr, np.eye(d)), rows, cols, d)


def norm_inf(a) -> float:
    """Maximum absolute scalar entry; accepts BlockMatrix or ndarray."""
    arr = a.data if isinstance(a, BlockMatrix) else np.asarray(a)
    if arr.size == 0:
        return 0.0
    return float(np.abs(arr).max())


def defect_scale(*operands) -> float:
    """Reference scale for defect comparisons: max(1, largest entry of the inputs)."""
    return max(1.0, *(norm_inf(op) for op in operands)) if operands else 1.0


def approx_eq(a, b, tol: float = 1e-9) -> bool:
    """True when the two matrices agree entrywise to ``tol`` relative to scale."""
    arr_a = a.data if isinstance(a, BlockMatrix) else np.asarray(a)
    arr_b = b.data if isinstance(b, BlockMatrix) else np.asarray(b)
    if isinstance(a, BlockMatrix) and isinstance(b, BlockMatrix):
        if a.row_labels != b.row_labels or a.col_labels != b.col_labels or a.d != b.d:
            return False
    if arr_a.shape != arr_b.shape:
        return False
    return norm_inf(arr_a - arr_b) <= tol * defect_scale(arr_a, arr_b)
