"""Seeded random instances for identity checks and property tests.

A single 64-bit seed keys a counter-based Philox generator; every draw then
happens in the documented order of the calling routine, so a given seed
reproduces the exact same instances on any machine running the same numpy.
Random unitaries come from QR orthonormalization of complex Gaussian
matrices with the usual phase fix, which makes them Haar distributed.
"""

from __future__ import annotations

import numpy as np

from .belavkin import BelavkinMatrix, ItoMatrix, SLHTriple, default_channels, from_slh, ito_matrix, make_slh
from .network import Wiring


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox 4x64) keyed by the seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def complex_gaussian(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Standard complex normal entries (unit total variance per entry)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar-distributed m x m unitary (QR of a Gaussian, phases normalized)."""
    q, r = np.linalg.qr(complex_gaussian(rng, m, m))
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_hermitian(rng: np.random.Generator, m: int) -> np.ndarray:
    a = complex_gaussian(rng, m, m)
    return 0.5 * (a + a.conj().T)


def random_contraction(
    rng: np.random.Generator,
    m: int,
    smin: float = 0.2,
    smax: float = 0.9,
) -> np.ndarray:
    """Invertible strict contraction: U diag(s) W with singular values in [smin, smax].

    Strict contractivity guarantees membership in the transformation domain
    against any scattering sub-block, with a conditioning margin of at least
    ``1 - smax``.
    """
    u = random_unitary(rng, m)
    w = random_unitary(rng, m)
    s = rng.uniform(smin, smax, size=m)
    return u @ np.diag(s) @ w


def random_slh(rng: np.random.Generator, n: int, d: int, name: str | None = None) -> SLHTriple:
    """Random valid triple: Haar S at the scalar level, Gaussian L, Hermitian H."""
    return make_slh(
        random_unitary(rng, n * d),
        complex_gaussian(rng, n * d, d),
        random_hermitian(rng, d),
        d=d,
        name=name,
        validate=False,
    )


def random_star_unitary(rng: np.random.Generator, n: int, d: int) -> BelavkinMatrix:
    return from_slh(random_slh(rng, n, d), validate=False)


def random_ito(rng: np.random.Generator, n: int, d: int) -> ItoMatrix:
    return ito_matrix(complex_gaussian(rng, (1 + n) * d, (1 + n) * d), default_channels(n), d)


def random_symmetric_wiring(
    rng: np.random.Generator,
    channels: tuple,
    n_internal: int,
    unitary: bool = True,
) -> Wiring:
    """Random internal subset of the channels with a unitary or contractive gain."""
    if not 1 <= n_internal < len(channels):
        raise ValueError(f"need 1 <= n_internal < {len(channels)}, got {n_internal}")
    picks = rng.choice(len(channels), size=n_internal, replace=False)
    internal = tuple(channels[int(k)] for k in sorted(picks))
    gain = random_unitary(rng, n_internal) if unitary else random_contraction(rng, n_internal)
    return Wiring(internal, internal, gain)
