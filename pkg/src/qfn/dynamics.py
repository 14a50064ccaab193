"""Markovian master-equation witness for physical equivalence.

Two algebraically different network constructions (say a cascade built by
feedback elimination versus the direct series product) describe the same
physics exactly when they induce the same master-equation generator

    rho' = -i [H, rho] + sum_j ( L_j rho L_j^dag - {L_j^dag L_j, rho} / 2 ).

This module assembles that generator in column-stacking convention
(``vec`` stacks columns, so ``A rho B -> (B^T kron A) vec(rho)``) and
propagates small density matrices with a fixed-step classical Runge-Kutta
integrator.  The scattering matrix never enters the generator, which is why
this is an equivalence *witness* and not a full model comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .belavkin import SLHTriple
from .errors import DimensionMismatch, InvalidState, NotHermitian
from .opmatrix import norm_inf


@dataclass(frozen=True)
class Superoperator:
    """A d^2 x d^2 matrix acting on column-stacked d x d density matrices."""

    matrix: np.ndarray
    d: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.d ** 2, self.d ** 2):
            raise DimensionMismatch(f"superoperator shape {m.shape} != ({self.d ** 2}, {self.d ** 2})")
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        return (self.matrix @ rho.reshape(-1, order="F")).reshape(self.d, self.d, order="F")

    def trace_defect(self) -> float:
        """Largest entry of the row-vectorized identity applied from the left.

        Zero for any trace-preserving generator.
        """
        id_vec = np.eye(self.d).reshape(-1, order="F")
        return norm_inf(id_vec @ self.matrix)


def lindblad_generator(g: SLHTriple, tol: float = 1e-9) -> Superoperator:
    """Master-equation generator of a triple (independent of its S)."""
    d = g.d
    H = g.H
    h_defect = norm_inf(H - H.conj().T)
    if h_defect > tol * max(1.0, norm_inf(H)):
        raise NotHermitian(f"H has self-adjointness defect {h_defect:.3g}")
    eye = np.eye(d)
    gen = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for j in range(g.n):
        lj = g.L.data[j * d:(j + 1) * d, :]
        ldl = lj.conj().T @ lj
        gen = gen + np.kron(lj.conj(), lj)
        gen = gen - 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye))
    return Superoperator(gen, d)


@dataclass(frozen=True)
class EvolveResult:
    rho: np.ndarray            # final state
    trace_drift: float         # max |tr(rho) - 1| seen along the trajectory
    min_eigenvalue: float      # smallest eigenvalue of the Hermitized final state
    steps: int


def _check_state(rho: np.ndarray, tol: float = 1e-10):
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidState(f"density matrix must be square, got shape {rho.shape}")
    if not np.isfinite(rho).all():
        raise InvalidState("density matrix entries must be finite")
    herm = norm_inf(rho - rho.conj().T)
    if herm > tol:
        raise InvalidState(f"density matrix is not Hermitian (defect {herm:.3g})")
    tr = abs(np.trace(rho) - 1.0)
    if tr > tol:
        raise InvalidState(f"density matrix trace differs from 1 by {tr:.3g}")
    lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    if lo < -tol:
        raise InvalidState(f"density matrix has negative eigenvalue {lo:.3g}")


def evolve(rho0: np.ndarray, gen: Superoperator, t: float, dt: float) -> EvolveResult:
    """Propagate ``rho0`` for duration ``t`` with fixed-step classical RK4.

    The step count is ``ceil(t / dt)`` with the final step shortened to land
    exactly on ``t``; no adaptivity, so trajectories are bit-reproducible.
    Positivity of the final state is reported (smallest eigenvalue), never
    enforced.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t < 0:
        raise ValueError(f"duration must be nonnegative, got {t}")
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (gen.d, gen.d):
        raise InvalidState(f"state shape {rho0.shape} does not match generator dimension {gen.d}")
    _check_state(rho0)
    m = gen.matrix
    y = rho0.reshape(-1, order="F").copy()
    n_full = int(np.floor(t / dt + 1e-12))
    tail = t - n_full * dt
    step_sizes = [dt] * n_full + ([tail] if tail > dt * 1e-9 else [])
    drift = abs(_vec_trace(y, gen.d) - 1.0)
    steps = 0
    for h in step_sizes:
        k1 = m @ y
        k2 = m @ (y + 0.5 * h * k1)
        k3 = m @ (y + 0.5 * h * k2)
        k4 = m @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        steps += 1
        drift = max(drift, abs(_vec_trace(y, gen.d) - 1.0))
    rho = y.reshape(gen.d, gen.d, order="F")
    herm = 0.5 * (rho + rho.conj().T)
    lo = float(np.linalg.eigvalsh(herm).min())
    return EvolveResult(rho=rho, trace_drift=float(drift), min_eigenvalue=lo, steps=steps)


def _vec_trace(y: np.ndarray, d: int) -> complex:
    return y.reshape(d, d, order="F").trace()


def generator_equivalence(g1: SLHTriple, g2: SLHTriple) -> float:
    """Largest entry of the difference of the two generators.

    Vanishes exactly when the triples induce the same master equation;
    symmetric and zero on equals, so it behaves as a pseudometric.
    """
    if g1.d != g2.d:
        raise DimensionMismatch("triples disagree on the initial dimension")
    return norm_inf(lindblad_generator(g1).matrix - lindblad_generator(g2).matrix)
