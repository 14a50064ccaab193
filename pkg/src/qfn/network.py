"""Network composition and internal-edge elimination.

Components are assembled side by side (`concatenate`), cascaded
(`series` / `series_slh`), or closed into feedback loops by connecting
internal output channels back into internal input channels
(`feedback_reduce`).  Eliminating the internal channels maps the open-loop
coefficient matrix ``V`` through the linear fractional (Moebius)
transformation

    F(V, X)[a, b] = V[a, b] + V[a, i_in] X (1 - V[i_out, i_in] X)^(-1) V[i_out, b]

over the retained (external) row/column labels, where ``X`` is the
channel-level gain matrix of the wiring lifted to operator blocks.  For
unitary ``X`` the result is again star-unitary and therefore describes a
reduced open system with its own ``(S, L, H)`` parameters.  Two structural
facts about ``F`` are exposed as numeric defect calculators:

* the involution identity  ``F(V, X)* = F(V*, X^dag)``;
* the Siegel-type factorizations of ``F(X)* F(Y) - identity`` and
  ``F(X) F(Y)* - identity`` through the middle factors ``X^dag Y - 1`` and
  ``X Y^dag - 1``, which in particular show that unitary gains map to
  star-unitary reductions.

Multi-edge eliminations are performed in one step over the whole internal
set (a single inverse); sequential elimination of disjoint edge sets is
algebraically equivalent and exercised as a test property.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .belavkin import (
    BelavkinMatrix,
    SLHTriple,
    StarUnitarityReport,
    ZERO,
    ZERO_PRIME,
    _channels_of,
    bel_swap,
    from_slh,
    is_star_unitary,
    star,
    to_slh,
)
from .errors import (
    AlgebraicLoop,
    DimensionMismatch,
    InvalidPartition,
    NotStarUnitary,
)
from .opmatrix import BlockMatrix, RCOND_FLOOR, inverse_with_rcond, norm_inf


@dataclass(frozen=True)
class Wiring:
    """Which internal outputs feed which internal inputs, and with what gain.

    ``x[p, q]`` is the gain from output channel ``internal_out[q]`` into
    input channel ``internal_in[p]``; for a plain connection list the matrix
    is diagonal (one gain per edge).  Unitary ``x`` (e.g. a permutation)
    preserves star-unitarity of the reduced model; any invertible ``x``
    inside the transformation domain is accepted and the loss of
    star-unitarity is reported, not enforced.
    """

    internal_out: tuple
    internal_in: tuple
    x: np.ndarray

    def __post_init__(self):
        outs = tuple(self.internal_out)
        ins = tuple(self.internal_in)
        object.__setattr__(self, "internal_out", outs)
        object.__setattr__(self, "internal_in", ins)
        if len(outs) == 0:
            raise InvalidPartition("wiring must name at least one internal edge")
        if len(set(outs)) != len(outs) or len(set(ins)) != len(ins):
            raise InvalidPartition("internal channel labels must be distinct")
        if len(outs) != len(ins):
            raise InvalidPartition(
                f"internal output/input counts differ: {len(outs)} != {len(ins)}"
            )
        x = np.asarray(self.x, dtype=np.complex128)
        if x.shape != (len(ins), len(outs)):
            raise InvalidPartition(f"gain matrix has shape {x.shape}, want {(len(ins), len(outs))}")
        if not np.isfinite(x).all():
            raise InvalidPartition("gain matrix entries must be finite")
        x = np.ascontiguousarray(x)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def n_internal(self) -> int:
        return len(self.internal_out)

    @property
    def symmetric(self) -> bool:
        return self.internal_out == self.internal_in

    @property
    def x_unitary(self) -> bool:
        eye = np.eye(self.n_internal)
        return (
            norm_inf(self.x.conj().T @ self.x - eye) <= 1e-10
            and norm_inf(self.x @ self.x.conj().T - eye) <= 1e-10
        )


@dataclass(frozen=True)
class ReductionReport:
    """Diagnostics of one feedback elimination."""

    rcond: float
    star_unitarity: StarUnitarityReport
    involution_defect: float | None
    x_unitary: bool
    output_pairs: tuple  # ((external out label, external in label), ...) in reduced channel order


@dataclass(frozen=True)
class ReducedModel:
    """Result of eliminating the internal channels of a network."""

    v_red: BelavkinMatrix
    slh_red: SLHTriple | None
    report: ReductionReport


# ---------------------------------------------------------------------------
# open-loop assembly and cascades
# ---------------------------------------------------------------------------


def concatenate(components: Sequence[SLHTriple]) -> SLHTriple:
    """Side-by-side assembly: block-diagonal S, stacked L, summed H.

    Channel labels of the result are ``(component name, local label)`` where
    an unnamed component contributes its 1-based position as the name.
    """
    comps = list(components)
    if not comps:
        raise DimensionMismatch("cannot concatenate zero components")
    d = comps[0].d
    names = []
    for k, g in enumerate(comps):
        if g.d != d:
            raise DimensionMismatch("components disagree on the initial dimension")
        names.append(g.name if g.name is not None else k + 1)
    if len(set(names)) != len(names):
        raise DimensionMismatch(f"duplicate component names in {names!r}")
    out_labels = tuple((nm, c) for nm, g in zip(names, comps) for c in g.out_channels)
    in_labels = tuple((nm, c) for nm, g in zip(names, comps) for c in g.in_channels)
    nd = sum(g.n for g in comps) * d
    S = np.zeros((nd, nd), np.complex128)
    L = np.zeros((nd, d), np.complex128)
    H = np.zeros((d, d), np.complex128)
    at = 0
    for g in comps:
        w = g.n * d
        S[at:at + w, at:at + w] = g.S.data
        L[at:at + w, :] = g.L.data
        H = H + g.H
        at += w
    return SLHTriple(
        BlockMatrix(S, out_labels, in_labels, d),
        BlockMatrix(L, out_labels, (ZERO_PRIME,), d),
        H,
    )


def series(v2: BelavkinMatrix, v1: BelavkinMatrix, tol: float = 1e-9) -> BelavkinMatrix:
    """Cascade in coefficient form: the plain product ``v2 @ v1``.

    ``v1`` feeds ``v2``; channels are matched positionally, so the factors
    only need equal channel counts.  The result carries ``v2``'s output
    labels and ``v1``'s input labels.
    """
    n2 = _channels_of(v2.col_labels, "column")
    n1 = _channels_of(v1.row_labels, "row")
    if len(n2) != len(n1) or v2.d != v1.d:
        raise DimensionMismatch("cascaded factors disagree on channel count or initial dimension")
    for v, which in ((v2, "downstream"), (v1, "upstream")):
        rep = is_star_unitary(v, tol)
        if not rep.passed:
            raise NotStarUnitary(
                f"{which} factor is not star-unitary "
                f"(defects {rep.left_defect:.3g}/{rep.right_defect:.3g})"
            )
    return BlockMatrix(v2.data @ v1.data, v2.row_labels, v1.col_labels, v2.d)


def series_slh(g2: SLHTriple, g1: SLHTriple) -> SLHTriple:
    """Cascade at the parameter level.

    Feeding ``g1``'s output into ``g2`` gives ``S = S2 S1``,
    ``L = L2 + S2 L1`` and ``H = H1 + H2 + Im(L2^dag S2 L1)`` with
    ``Im(M) = (M - M^dag) / 2i``.
    """
    if g1.n != g2.n or g1.d != g2.d:
        raise DimensionMismatch("cascaded triples disagree on channel count or initial dimension")
    S = g2.S.data @ g1.S.data
    L = g2.L.data + g2.S.data @ g1.L.data
    cross = g2.L.data.conj().T @ g2.S.data @ g1.L.data
    H = g1.H + g2.H + (cross - cross.conj().T) / 2j
    return SLHTriple(
        BlockMatrix(S, g2.out_channels, g1.in_channels, g1.d),
        BlockMatrix(L, g2.out_channels, (ZERO_PRIME,), g1.d),
        H,
    )


# ---------------------------------------------------------------------------
# feedback elimination
# ---------------------------------------------------------------------------


def _partition(v: BelavkinMatrix, w: Wiring):
    """Split the bordered labels into retained and eliminated families."""
    row_ch = _channels_of(v.row_labels, "row")
    col_ch = _channels_of(v.col_labels, "column")
    if len(row_ch) != len(col_ch):
        raise DimensionMismatch("row and column channel counts differ")
    n = len(row_ch)
    n_i = w.n_internal
    if n_i >= n:
        raise InvalidPartition(f"cannot eliminate all {n} channels (n_internal={n_i})")
    missing_out = [c for c in w.internal_out if c not in row_ch]
    missing_in = [c for c in w.internal_in if c not in col_ch]
    if missing_out or missing_in:
        raise InvalidPartition(
            f"wiring names unknown channels: outputs {missing_out!r}, inputs {missing_in!r}"
        )
    ext_out = tuple(c for c in row_ch if c not in set(w.internal_out))
    ext_in = tuple(c for c in col_ch if c not in set(w.internal_in))
    erows = (ZERO, *ext_out, ZERO_PRIME)
    ecols = (ZERO, *ext_in, ZERO_PRIME)
    return ext_out, ext_in, erows, ecols


def _loop_matrix(v: BelavkinMatrix, w: Wiring) -> tuple[np.ndarray, np.ndarray]:
    """The lifted gain and the loop matrix ``1 - V[i_out, i_in] X``."""
    xh = np.kron(w.x, np.eye(v.d))
    vii = v.take(w.internal_out, w.internal_in).data
    loop = np.eye(vii.shape[0]) - vii @ xh
    return xh, loop


@dataclass(frozen=True)
class DomainReport:
    """Conditioning of the loop inverse behind a proposed elimination.

    ``rcond`` is the reciprocal 1-norm of the loop inverse, normalized by the
    natural scale ``1 + norm1(V_ii X)`` of the loop matrix, so an identity
    wiring of a decoupled network scores exactly 1 and a singular loop scores
    exactly 0.
    """

    rcond: float
    in_domain: bool


def domain_check(v: BelavkinMatrix, w: Wiring) -> DomainReport:
    """Report whether the wiring's gain lies in the transformation domain.

    Never raises on singularity; a singular loop reports ``rcond = 0`` and
    ``in_domain = False``.
    """
    xh, loop = _loop_matrix(v, w)
    vii = v.take(w.internal_out, w.internal_in).data
    inv_loop, _ = inverse_with_rcond(loop)
    if inv_loop is None:
        return DomainReport(0.0, False)
    margin = 1.0 / np.linalg.norm(inv_loop, 1)
    rcond = float(margin / (1.0 + np.linalg.norm(vii @ xh, 1)))
    return DomainReport(rcond, rcond >= RCOND_FLOOR)


def _reduce_core(v: BelavkinMatrix, w: Wiring) -> tuple[BelavkinMatrix, float]:
    """Apply the fractional transformation; no input checking beyond labels."""
    ext_out, ext_in, erows, ecols = _partition(v, w)
    xh, loop = _loop_matrix(v, w)
    report = domain_check(v, w)
    if not report.in_domain:
        raise AlgebraicLoop(
            f"loop matrix 1 - V_ii X is singular to working precision (rcond={report.rcond:.3g})",
            rcond=report.rcond,
        )
    inv_loop, _ = inverse_with_rcond(loop)
    correction = (
        v.take(erows, w.internal_in).data
        @ xh
        @ inv_loop
        @ v.take(w.internal_out, ecols).data
    )
    f = BlockMatrix(v.take(erows, ecols).data + correction, erows, ecols, v.d)
    return f, report.rcond


def feedback_reduce(v: BelavkinMatrix, w: Wiring, tol: float = 1e-9) -> ReducedModel:
    """Eliminate the wired internal channels of a star-unitary network.

    Output channel ``k`` of the reduced model pairs the k-th retained output
    label with the k-th retained input label, both in original declaration
    order (see ``report.output_pairs``).  The reduced triple is extracted
    whenever the reduced matrix passes the star-unitarity check (guaranteed
    for unitary gains inside the domain); otherwise ``slh_red`` is None and
    the defects are reported.

    Raises:
        NotStarUnitary: the input matrix fails its star-unitarity precheck.
        InvalidPartition: the wiring labels do not split the channels.
        AlgebraicLoop: the loop matrix is singular (gain outside the domain).
    """
    rep_in = is_star_unitary(v, tol)
    if not rep_in.passed:
        raise NotStarUnitary(
            f"input is not star-unitary (defects {rep_in.left_defect:.3g}/{rep_in.right_defect:.3g})"
        )
    ext_out, ext_in, _, _ = _partition(v, w)
    f, rcond = _reduce_core(v, w)
    star_rep = is_star_unitary(f, tol)
    involution = None
    if w.symmetric:
        w_dag = Wiring(w.internal_out, w.internal_in, w.x.conj().T)
        f_dag, _ = _reduce_core(star(v), w_dag)
        involution = norm_inf(star(f).data - f_dag.data)
    slh_red = to_slh(f, tol) if star_rep.passed else None
    report = ReductionReport(
        rcond=rcond,
        star_unitarity=star_rep,
        involution_defect=involution,
        x_unitary=w.x_unitary,
        output_pairs=tuple(zip(ext_out, ext_in)),
    )
    return ReducedModel(f, slh_red, report)


def reduced_slh(v: BelavkinMatrix, w: Wiring, tol: float = 1e-9) -> SLHTriple:
    """Hudson-Parthasarathy parameters of the reduced network."""
    model = feedback_reduce(v, w, tol)
    if model.slh_red is None:
        rep = model.report.star_unitarity
        raise NotStarUnitary(
            f"reduced matrix is not star-unitary "
            f"(defects {rep.left_defect:.3g}/{rep.right_defect:.3g}); no triple exists"
        )
    return model.slh_red


def cascade_via_feedback(g1: SLHTriple, g2: SLHTriple, tol: float = 1e-9) -> SLHTriple:
    """Cascade two m-channel components as a one-edge feedback network.

    Concatenates the pair, wires every output of ``g1`` to the matching
    input of ``g2`` with unit gain, and eliminates the internal edges.  The
    result must agree with ``series_slh(g2, g1)``.
    """
    if g1.n != g2.n or g1.d != g2.d:
        raise DimensionMismatch("cascade factors disagree on channel count or initial dimension")
    m = g1.n
    net = concatenate([g1, g2])
    internal_out = net.out_channels[:m]
    internal_in = net.in_channels[m:]
    wiring = Wiring(internal_out, internal_in, np.eye(m, dtype=np.complex128))
    return reduced_slh(from_slh(net), wiring, tol)


# ---------------------------------------------------------------------------
# structural identities as numeric defects
# ---------------------------------------------------------------------------


def _require_symmetric(v: BelavkinMatrix, w: Wiring):
    if not w.symmetric:
        raise InvalidPartition(
            "this identity needs a symmetric partition (internal_out == internal_in)"
        )
    if v.row_labels != v.col_labels:
        raise InvalidPartition("this identity needs identical row and column labels")


def involution_identity_defect(v: BelavkinMatrix, w: Wiring) -> float:
    """Largest-entry defect of ``F(V, X)* = F(V*, X^dag)``.

    Holds for any gain inside the domain, unitary or not; the star on the
    reduced side acts on the retained channels only.
    """
    _require_symmetric(v, w)
    f, _ = _reduce_core(v, w)
    f_dag, _ = _reduce_core(star(v), Wiring(w.internal_out, w.internal_in, w.x.conj().T))
    return norm_inf(star(f).data - f_dag.data)


def _inv_or_loop(m: np.ndarray, what: str) -> np.ndarray:
    inv_m, rcond = inverse_with_rcond(m)
    if inv_m is None or rcond < RCOND_FLOOR:
        raise AlgebraicLoop(f"{what} is singular to working precision (rcond={rcond:.3g})", rcond=rcond)
    return inv_m


def siegel_defects(
    v: BelavkinMatrix,
    w: Wiring,
    x: np.ndarray,
    y: np.ndarray,
) -> tuple[float, float]:
    """Defects of the two Siegel-type factorizations of the reduction map.

    With ``Phi`` the fractional transformation of ``v`` over the wiring's
    internal set, ``R`` the internal block row, ``C`` the internal block
    column, and star on the reduced side:

        Phi(X)* Phi(Y) - 1 = R* (1 - X^dag Vii^dag)^(-1) (X^dag Y - 1) (1 - Vii Y)^(-1) R
        Phi(X) Phi(Y)* - 1 = C (1 - X Vii)^(-1) (X Y^dag - 1) (1 - Vii^dag Y^dag)^(-1) C*

    Both gains must lie in the transformation domain.  Taking ``Y = X``
    unitary collapses the middle factor, which is exactly the statement that
    unitary gains map to star-unitary reductions.
    """
    _require_symmetric(v, w)
    ext_out, ext_in, erows, ecols = _partition(v, w)
    d = v.d
    n_i = w.n_internal
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != (n_i, n_i) or y.shape != (n_i, n_i):
        raise DimensionMismatch(f"gains must be {n_i} x {n_i} scalar matrices")
    phi_x, _ = _reduce_core(v, Wiring(w.internal_out, w.internal_in, x))
    phi_y, _ = _reduce_core(v, Wiring(w.internal_out, w.internal_in, y))

    xh, yh = np.kron(x, np.eye(d)), np.kron(y, np.eye(d))
    vii = v.take(w.internal_out, w.internal_in).data
    r_row = v.take(w.internal_out, ecols).data
    c_col = v.take(erows, w.internal_in).data
    je = bel_swap(ext_out, d).data
    eye_e = np.eye(je.shape[0])
    eye_i = np.eye(n_i * d)

    left = (
        star(phi_x).data @ phi_y.data
        - eye_e
        - (je @ r_row.conj().T)
        @ _inv_or_loop(eye_i - xh.conj().T @ vii.conj().T, "1 - X^dag Vii^dag")
        @ (xh.conj().T @ yh - eye_i)
        @ _inv_or_loop(eye_i - vii @ yh, "1 - Vii Y")
        @ r_row
    )
    right = (
        phi_x.data @ star(phi_y).data
        - eye_e
        - c_col
        @ _inv_or_loop(eye_i - xh @ vii, "1 - X Vii")
        @ (xh @ yh.conj().T - eye_i)
        @ _inv_or_loop(eye_i - vii.conj().T @ yh.conj().T, "1 - Vii^dag Y^dag")
        @ c_col.conj().T
        @ je
    )
    return norm_inf(left), norm_inf(right)
