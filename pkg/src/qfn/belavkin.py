"""Bordered coefficient matrices for quantum stochastic models.

An Ito matrix collects the constant operator coefficients ``x[a, b]``
multiplying the fundamental differentials of an n-channel quantum stochastic
integral (``a, b`` range over the time slot ``0`` and the channels ``1..n``).
Its bordered embedding, here called the Belavkin matrix, is the
``(1+n+1) x (1+n+1)`` array

    [ 0   x_0c  x_00 ]
    [ 0   x_cc  x_c0 ]
    [ 0   0     0    ]

indexed by ``(0, channels, 0')``.  In this representation the Ito correction
of the product of two integrals becomes the ordinary matrix product, the
adjoint of a process corresponds to the star involution ``X* = J X^dag J``
(``J`` swaps the two border slots), and the coefficient matrix ``V`` of a
unitary cocycle is exactly a star-unitary: ``V V* = V* V = identity``.

The most general star-unitary with the unitary-evolution block pattern is
parametrized by a Hudson-Parthasarathy triple ``(S, L, H)``:

    [ 1   -L^dag S   -L^dag L / 2 - iH ]
    [ 0    S          L                ]
    [ 0    0          1                ]

with ``S`` unitary, ``L`` an arbitrary coupling column, ``H`` self-adjoint.
`from_slh` / `to_slh` convert between the two descriptions.

Only constant coefficients are represented: all identities checked here are
pointwise-algebraic in the coefficients, so adapted processes add nothing at
this level.  Everything is pure and immutable; the border projectors and
swaps are built per call, never cached globally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    MalformedStructure,
    NotHermitian,
    NotStarUnitary,
    NotUnitaryScattering,
)
from .opmatrix import BlockMatrix, Label, defect_scale, norm_inf

# Border labels of the bordered (Belavkin) index set {0, channels..., 0'}.
ZERO = "0"
ZERO_PRIME = "0'"

# Type conventions: an ItoMatrix is a BlockMatrix labeled (0, channels...) on
# both axes; a BelavkinMatrix is a BlockMatrix labeled (0, channels..., 0').
ItoMatrix = BlockMatrix
BelavkinMatrix = BlockMatrix


def default_channels(n: int) -> tuple:
    return tuple(range(1, n + 1))


def ito_labels(channels: Sequence[Label]) -> tuple:
    return (ZERO, *channels)


def bel_labels(channels: Sequence[Label]) -> tuple:
    return (ZERO, *channels, ZERO_PRIME)


def _channels_of(labels: tuple, kind: str) -> tuple:
    """Channel labels of a bordered axis; raises if the border is malformed."""
    if len(labels) < 3 or labels[0] != ZERO or labels[-1] != ZERO_PRIME:
        raise DimensionMismatch(
            f"{kind} labels {labels!r} are not of the bordered form (0, channels..., 0')"
        )
    return labels[1:-1]


def ito_matrix(data, channels: Sequence[Label] | None = None, d: int = 1, n: int | None = None) -> ItoMatrix:
    """Wrap a ``(1+n)d x (1+n)d`` scalar array as an Ito matrix."""
    arr = np.asarray(data, dtype=np.complex128)
    if channels is None:
        if n is None:
            if arr.shape[0] % d != 0:
                raise DimensionMismatch("array size is not a multiple of d")
            n = arr.shape[0] // d - 1
        channels = default_channels(n)
    labels = ito_labels(channels)
    return BlockMatrix(arr, labels, labels, d)


def belavkin_matrix(data, channels: Sequence[Label], d: int) -> BelavkinMatrix:
    """Wrap a ``(2+n)d x (2+n)d`` scalar array as a bordered matrix."""
    labels = bel_labels(channels)
    return BlockMatrix(np.asarray(data, dtype=np.complex128), labels, labels, d)


def bel_identity(channels: Sequence[Label], d: int) -> BelavkinMatrix:
    """The bordered identity (unit for the star-unitary product)."""
    return BlockMatrix.identity(bel_labels(channels), d)


def bel_swap(channels: Sequence[Label], d: int) -> BelavkinMatrix:
    """The border swap J: exchanges the 0 and 0' slots, fixes the channels."""
    n = len(channels)
    perm = np.eye(2 + n)
    perm[[0, n + 1]] = perm[[n + 1, 0]]
    labels = bel_labels(channels)
    return BlockMatrix(np.kron(perm, np.eye(d)), labels, labels, d)


def ito_projector(channels: Sequence[Label], d: int) -> ItoMatrix:
    """The (1+n) projector with zero time block and identity channel block.

    This is the matrix contracting two Ito matrices in the Ito correction.
    """
    n = len(channels)
    labels = ito_labels(channels)
    return BlockMatrix(np.kron(np.diag([0.0] + [1.0] * n), np.eye(d)), labels, labels, d)


def belavkin_embed(x: ItoMatrix) -> BelavkinMatrix:
    """Embed an Ito matrix into its bordered form (linear in the input).

    Block placement for rows/cols ``(0, channels, 0')``: the time-time block
    moves to ``(0, 0')``, the time row to ``(0, channels)``, the time column
    to ``(channels, 0')``, the scattering block stays at
    ``(channels, channels)``; the first block column and last block row are
    zero.
    """
    if x.row_labels != x.col_labels:
        raise DimensionMismatch("an Ito matrix must have identical row and column labels")
    if not x.row_labels or x.row_labels[0] != ZERO:
        raise DimensionMismatch("an Ito matrix must be labeled (0, channels...)")
    channels = x.row_labels[1:]
    n, d = len(channels), x.d
    nd = n * d
    out = np.zeros(((2 + n) * d, (2 + n) * d), np.complex128)
    out[:d, d:d + nd] = x.data[:d, d:]          # time row -> (0, channels)
    out[:d, d + nd:] = x.data[:d, :d]           # time-time -> (0, 0')
    out[d:d + nd, d:d + nd] = x.data[d:, d:]    # scattering block
    out[d:d + nd, d + nd:] = x.data[d:, :d]     # time column -> (channels, 0')
    return belavkin_matrix(out, channels, d)


def star(x: BelavkinMatrix) -> BelavkinMatrix:
    """Star involution ``X* = J X^dag J``.

    Entrywise, ``(X*)[a, b]`` is the adjoint of ``X[flip(b), flip(a)]``
    where ``flip`` exchanges 0 and 0' and fixes channel labels.  Rectangular
    inputs are allowed: each axis carries its own border swap and the row and
    column families exchange places.
    """
    rch = _channels_of(x.row_labels, "row")
    cch = _channels_of(x.col_labels, "column")
    left = bel_swap(cch, x.d)
    right = bel_swap(rch, x.d)
    return BlockMatrix(left.data @ x.data.conj().T @ right.data, x.col_labels, x.row_labels, x.d)


@dataclass(frozen=True)
class StarUnitarityReport:
    """Defects of ``V V* = identity = V* V`` and the pass verdict."""

    left_defect: float
    right_defect: float
    scale: float
    tol: float

    @property
    def passed(self) -> bool:
        bound = self.tol * self.scale
        return self.left_defect <= bound and self.right_defect <= bound


def is_star_unitary(v: BelavkinMatrix, tol: float = 1e-9) -> StarUnitarityReport:
    """Measure how far ``v`` is from star-unitarity.

    ``left_defect`` is the largest entry of ``V V* - identity``, and
    ``right_defect`` of ``V* V - identity``; the check passes when both stay
    below ``tol * max(1, largest entry of V)``.
    """
    if len(v.row_labels) != len(v.col_labels):
        raise DimensionMismatch("star-unitarity requires a square matrix")
    vs = star(v)
    rch = _channels_of(v.row_labels, "row")
    cch = _channels_of(v.col_labels, "column")
    eye_r = np.eye((2 + len(rch)) * v.d)
    eye_c = np.eye((2 + len(cch)) * v.d)
    left = norm_inf(v.data @ vs.data - eye_r)
    right = norm_inf(vs.data @ v.data - eye_c)
    return StarUnitarityReport(left, right, defect_scale(v), tol)


# ---------------------------------------------------------------------------
# Hudson-Parthasarathy triples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SLHTriple:
    """Hudson-Parthasarathy parameters of an open-system component.

    ``S`` is the n x n scattering block matrix (unitary at the scalar level),
    ``L`` the n x 1 coupling column, ``H`` the d x d Hamiltonian.  ``S`` may
    carry different row (output-side) and column (input-side) channel labels;
    a freshly constructed component uses channels ``1..n`` on both sides.
    """

    S: BlockMatrix
    L: BlockMatrix
    H: np.ndarray
    name: str | None = None

    def __post_init__(self):
        h = np.asarray(self.H, dtype=np.complex128)
        d = self.S.d
        if h.shape != (d, d):
            raise DimensionMismatch(f"H has shape {h.shape}, want ({d}, {d})")
        if not np.isfinite(h).all():
            raise ValueError("H entries must be finite")
        if self.L.d != d:
            raise DimensionMismatch("S and L disagree on the initial dimension")
        if len(self.S.row_labels) != len(self.S.col_labels):
            raise DimensionMismatch("S must be square")
        if self.L.row_labels != self.S.row_labels or len(self.L.col_labels) != 1:
            raise DimensionMismatch("L must be a column over the output channels of S")
        h = np.ascontiguousarray(h)
        h.setflags(write=False)
        object.__setattr__(self, "H", h)

    @property
    def d(self) -> int:
        return self.S.d

    @property
    def n(self) -> int:
        return len(self.S.row_labels)

    @property
    def out_channels(self) -> tuple:
        return self.S.row_labels

    @property
    def in_channels(self) -> tuple:
        return self.S.col_labels

    @property
    def channels(self) -> tuple:
        """Channel labels when the output and input sides agree."""
        if self.S.row_labels != self.S.col_labels:
            raise DimensionMismatch("output and input channel labels differ; use out_channels/in_channels")
        return self.S.row_labels

    def validate(self, tol: float = 1e-9) -> "SLHDiagnostics":
        return validate_slh(self.S.data, self.L.data, self.H, self.d, tol=tol)

    def relabeled(self, out_channels: Sequence[Label], in_channels: Sequence[Label] | None = None) -> "SLHTriple":
        """Same component with renamed channel labels."""
        outs = tuple(out_channels)
        ins = tuple(in_channels) if in_channels is not None else outs
        return SLHTriple(
            self.S.with_labels(outs, ins),
            self.L.with_labels(outs, self.L.col_labels),
            self.H,
            self.name,
        )


@dataclass(frozen=True)
class SLHDiagnostics:
    """Defect report of the triple invariants: S unitary, H self-adjoint."""

    s_left_defect: float      # largest entry of S^dag S - identity
    s_right_defect: float     # largest entry of S S^dag - identity
    h_defect: float           # largest entry of H - H^dag
    scale: float
    tol: float

    @property
    def s_unitary(self) -> bool:
        bound = self.tol * self.scale
        return self.s_left_defect <= bound and self.s_right_defect <= bound

    @property
    def h_hermitian(self) -> bool:
        return self.h_defect <= self.tol * self.scale

    @property
    def passed(self) -> bool:
        return self.s_unitary and self.h_hermitian


def validate_slh(S, L, H, d: int, tol: float = 1e-9) -> SLHDiagnostics:
    """Check the triple invariants on raw arrays and report the defects."""
    S = np.asarray(S, dtype=np.complex128)
    L = np.asarray(L, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % d != 0:
        raise DimensionMismatch(f"S has shape {S.shape}; want square with size a multiple of d={d}")
    nd = S.shape[0]
    if L.ndim != 2 or L.shape != (nd, d):
        raise DimensionMismatch(f"L has shape {L.shape}, want ({nd}, {d})")
    if H.shape != (d, d):
        raise DimensionMismatch(f"H has shape {H.shape}, want ({d}, {d})")
    eye = np.eye(nd)
    return SLHDiagnostics(
        s_left_defect=norm_inf(S.conj().T @ S - eye),
        s_right_defect=norm_inf(S @ S.conj().T - eye),
        h_defect=norm_inf(H - H.conj().T),
        scale=defect_scale(S, H),
        tol=tol,
    )


def make_slh(
    S,
    L,
    H,
    d: int | None = None,
    channels: Sequence[Label] | None = None,
    name: str | None = None,
    tol: float = 1e-9,
    validate: bool = True,
) -> SLHTriple:
    """Build a triple from raw arrays, validating the invariants by default.

    ``d`` defaults to the size of ``H``; channel labels default to ``1..n``.
    """
    S = np.atleast_2d(np.asarray(S, dtype=np.complex128))
    H = np.atleast_2d(np.asarray(H, dtype=np.complex128))
    L = np.asarray(L, dtype=np.complex128)
    if d is None:
        d = H.shape[0]
    if L.ndim < 2:
        L = L.reshape(-1, d)
    if S.shape[0] % d != 0:
        raise DimensionMismatch(f"S size {S.shape[0]} is not a multiple of d={d}")
    n = S.shape[0] // d
    labels = tuple(channels) if channels is not None else default_channels(n)
    if len(labels) != n:
        raise DimensionMismatch(f"got {len(labels)} channel labels for {n} channels")
    if validate:
        diag = validate_slh(S, L, H, d, tol=tol)
        if not diag.s_unitary:
            raise NotUnitaryScattering(
                f"S is not unitary: defects {diag.s_left_defect:.3g}/{diag.s_right_defect:.3g}"
            )
        if not diag.h_hermitian:
            raise NotHermitian(f"H is not self-adjoint: defect {diag.h_defect:.3g}")
    return SLHTriple(
        BlockMatrix(S, labels, labels, d),
        BlockMatrix(L, labels, (ZERO_PRIME,), d),
        H,
        name,
    )


def from_slh(g: SLHTriple, tol: float = 1e-9, validate: bool = True) -> BelavkinMatrix:
    """Coefficient matrix of the unitary evolution driven by the triple."""
    if validate:
        diag = g.validate(tol)
        if not diag.s_unitary:
            raise NotUnitaryScattering(
                f"S is not unitary: defects {diag.s_left_defect:.3g}/{diag.s_right_defect:.3g}"
            )
        if not diag.h_hermitian:
            raise NotHermitian(f"H is not self-adjoint: defect {diag.h_defect:.3g}")
    n, d = g.n, g.d
    nd = n * d
    ldag = g.L.data.conj().T
    out = np.zeros(((2 + n) * d, (2 + n) * d), np.complex128)
    out[:d, :d] = np.eye(d)
    out[:d, d:d + nd] = -ldag @ g.S.data
    out[:d, d + nd:] = -0.5 * (ldag @ g.L.data) - 1j * g.H
    out[d:d + nd, d:d + nd] = g.S.data
    out[d:d + nd, d + nd:] = g.L.data
    out[d + nd:, d + nd:] = np.eye(d)
    rows = bel_labels(g.out_channels)
    cols = bel_labels(g.in_channels)
    return BlockMatrix(out, rows, cols, d)


def to_slh(v: BelavkinMatrix, tol: float = 1e-9) -> SLHTriple:
    """Recover the Hudson-Parthasarathy triple from a star-unitary.

    The input must carry the unitary-evolution block pattern: zero first
    block column and last block row apart from identity corners.  The
    extracted Hamiltonian is checked for self-adjointness and then
    symmetrized, so downstream consumers always receive an exactly Hermitian
    ``H``.
    """
    rch = _channels_of(v.row_labels, "row")
    cch = _channels_of(v.col_labels, "column")
    if len(rch) != len(cch):
        raise DimensionMismatch("row and column channel counts differ")
    n, d = len(rch), v.d
    nd = n * d
    scale = defect_scale(v)
    bound = tol * scale
    low = v.data[d:, :d]
    last = v.data[d + nd:, d:d + nd]
    if norm_inf(low) > bound or norm_inf(last) > bound:
        raise MalformedStructure("first block column / last block row are not zero")
    rep = is_star_unitary(v, tol)
    if not rep.passed:
        raise NotStarUnitary(
            f"star-unitarity defects {rep.left_defect:.3g}/{rep.right_defect:.3g} exceed {bound:.3g}"
        )
    eye = np.eye(d)
    if norm_inf(v.data[:d, :d] - eye) > bound or norm_inf(v.data[d + nd:, d + nd:] - eye) > bound:
        raise MalformedStructure("corner blocks are not the identity")
    S = v.data[d:d + nd, d:d + nd]
    L = v.data[d:d + nd, d + nd:]
    K = v.data[:d, d + nd:]
    H = 1j * (K + 0.5 * (L.conj().T @ L))
    h_defect = norm_inf(H - H.conj().T)
    if h_defect > bound:
        raise NotHermitian(f"extracted H has self-adjointness defect {h_defect:.3g}")
    H = 0.5 * (H + H.conj().T)
    return SLHTriple(
        BlockMatrix(S, rch, cch, d),
        BlockMatrix(L, rch, (ZERO_PRIME,), d),
        H,
    )


# ---------------------------------------------------------------------------
# The embedding dictionary and polynomial differentials
# ---------------------------------------------------------------------------


def ito_correspondence_defects(x: ItoMatrix, y: ItoMatrix) -> tuple[float, float, float]:
    """Defects of the three identities tying Ito and bordered products.

    With ``E`` the embedding and ``P`` the channel projector:

    * ``E(X P Y) = E(X) E(Y)`` (the Ito correction as a plain product),
    * ``E(X Y)   = E(X) J E(Y)`` (the plain array product),
    * ``E(X^dag) = E(X)*`` (adjoint becomes the star involution).

    Returns the three largest-entry defects in that order.
    """
    if x.row_labels != y.row_labels or x.col_labels != y.col_labels or x.d != y.d:
        raise DimensionMismatch("Ito matrices must share labels and initial dimension")
    channels = x.row_labels[1:]
    d = x.d
    ex, ey = belavkin_embed(x), belavkin_embed(y)
    proj = ito_projector(channels, d)
    jswap = bel_swap(channels, d)
    d1 = norm_inf(belavkin_embed(ito_matrix(x.data @ proj.data @ y.data, channels, d)).data - ex.data @ ey.data)
    d2 = norm_inf(belavkin_embed(ito_matrix(x.data @ y.data, channels, d)).data - ex.data @ jswap.data @ ey.data)
    d3 = norm_inf(belavkin_embed(ito_matrix(x.data.conj().T, channels, d)).data - star(ex).data)
    return (d1, d2, d3)


def _check_embed_pattern(x: BelavkinMatrix, tol: float = 1e-12):
    n = len(x.row_labels) - 2
    d = x.d
    bound = tol * defect_scale(x)
    if norm_inf(x.data[:, :d]) > bound or norm_inf(x.data[(1 + n) * d:, :]) > bound:
        raise MalformedStructure("matrix lacks the embedding zero pattern (first column / last row)")


def polynomial_ito_matrix(x0: np.ndarray, x: BelavkinMatrix, coeffs: Sequence[complex]) -> BelavkinMatrix:
    """Bordered coefficient matrix of ``f`` applied to a process.

    For a polynomial ``f`` (``coeffs`` ordered from the constant term up) and
    a process with scalar part ``x0`` and embedded coefficient matrix ``x``,
    the differential of ``f`` of the process has coefficients

        ``f(x0 * identity + x) - f(x0) * identity``

    evaluated as a matrix polynomial on the full bordered square matrix,
    where the identity carries ``x0`` in every diagonal block.
    """
    if x.row_labels != x.col_labels:
        raise DimensionMismatch("expected a square bordered matrix")
    _channels_of(x.row_labels, "row")
    _check_embed_pattern(x)
    d = x.d
    x0 = np.asarray(x0, dtype=np.complex128)
    if x0.shape != (d, d):
        raise DimensionMismatch(f"scalar part has shape {x0.shape}, want ({d}, {d})")
    m = len(x.row_labels)
    big = np.kron(np.eye(m), x0) + x.data
    cs = [complex(c) for c in coeffs] or [0j]

    def horner(mat: np.ndarray) -> np.ndarray:
        eye = np.eye(mat.shape[0])
        acc = cs[-1] * eye
        for c in reversed(cs[:-1]):
            acc = acc @ mat + c * eye
        return acc

    result = horner(big) - np.kron(np.eye(m), horner(x0))
    return BlockMatrix(result, x.row_labels, x.col_labels, d)
