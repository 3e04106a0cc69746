"""Dense complex-matrix primitives: tensor products, partial traces,
Hermitian eigendecompositions and PSD square roots.

Everything here is a pure function of immutable ndarray inputs, so the
module is safe to call from any number of workers.  All matrices are
plain ``numpy`` arrays of dtype complex; no sparse or structured paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NotHermitian",
    "NotPSD",
    "ConvergenceFailure",
    "DimensionMismatch",
    "EigenSystem",
    "TOL_HERM_SCALE",
    "TOL_PSD",
    "kron",
    "hermitian_eig",
    "partial_trace",
    "psd_sqrt",
    "haar_unitary",
    "haar_isometry",
]

# Hermiticity tolerance scales with dimension: products of n site matrices
# accumulate roundoff roughly linearly in the block dimension.
TOL_HERM_SCALE = 1e-9
# Eigenvalues of a nominally PSD matrix may undershoot zero by this much
# (relative to the trace) before we refuse to treat the matrix as PSD.
TOL_PSD = 1e-9


class NotHermitian(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class NotPSD(ValueError):
    """Input matrix has an eigenvalue below the negativity tolerance."""


class ConvergenceFailure(RuntimeError):
    """The iterative eigensolver did not converge."""


class DimensionMismatch(ValueError):
    """Operands have incompatible dimensions."""


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a Hermitian matrix, sorted by decreasing eigenvalue.

    Attributes
    ----------
    values : np.ndarray
        Real eigenvalues, non-increasing.
    vectors : np.ndarray
        Orthonormal eigenvectors as columns, in the same order as ``values``.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Reassemble the original matrix from the eigenpairs."""
        return (self.vectors * self.values) @ self.vectors.conj().T


def _as_square(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product with the row-major block convention.

    Entry ``(i*p + k, j*p + l)`` of the result is ``a[i, j] * b[k, l]``
    where ``p`` is the dimension of ``b``.
    """
    return np.kron(_as_square(a), _as_square(b))


def hermitian_eig(h, check: bool = True) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Ties between equal eigenvalues keep the solver's original (ascending)
    output order, which makes the decomposition reproducible even for
    degenerate spectra.

    Parameters
    ----------
    h : array_like
        Square matrix, Hermitian within ``TOL_HERM_SCALE * dim``.
    check : bool
        Skip the Hermiticity test when False (callers that construct
        manifestly Hermitian input).

    Raises
    ------
    NotHermitian
        If the max-norm deviation from the adjoint exceeds tolerance.
    ConvergenceFailure
        If the underlying LAPACK solver fails to converge.
    """
    m = _as_square(h)
    if check:
        herm_res = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm_res > TOL_HERM_SCALE * m.shape[0]:
            raise NotHermitian(
                f"matrix deviates from Hermitian by {herm_res:.3e} "
                f"(tolerance {TOL_HERM_SCALE * m.shape[0]:.3e})"
            )
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.argsort(-values, kind="stable")
    return EigenSystem(values=values[order], vectors=vectors[:, order])


def partial_trace(d, site_dim: int, side: str = "last") -> np.ndarray:
    """Trace out one factor of dimension ``site_dim`` from a bipartite block.

    ``side='last'`` traces the rightmost tensor factor, ``side='first'``
    the leftmost.  The trace of the output equals the trace of the input.

    Raises
    ------
    DimensionMismatch
        If the matrix dimension is not divisible by ``site_dim``.
    """
    m = _as_square(d)
    dim = m.shape[0]
    if site_dim < 1 or dim % site_dim:
        raise DimensionMismatch(
            f"dimension {dim} is not divisible by site dimension {site_dim}"
        )
    rest = dim // site_dim
    if side == "last":
        return np.einsum("isjs->ij", m.reshape(rest, site_dim, rest, site_dim))
    if side == "first":
        return np.einsum("sisj->ij", m.reshape(site_dim, rest, site_dim, rest))
    raise ValueError(f"side must be 'first' or 'last', got {side!r}")


def psd_sqrt(d) -> np.ndarray:
    """Positive-semidefinite square root via eigendecomposition.

    Eigenvalues in the roundoff band around zero are clipped to exact zero
    before taking the root (the square root amplifies noise of size u to
    sqrt(u)); anything below ``-TOL_PSD * max(trace, 1)`` raises ``NotPSD``.
    """
    m = _as_square(d)
    eig = hermitian_eig(m)
    scale = max(abs(np.trace(m).real), 1.0)
    floor = -TOL_PSD * scale
    if eig.values.size and eig.values[-1] < floor:
        raise NotPSD(
            f"eigenvalue {eig.values[-1]:.3e} below PSD tolerance {floor:.3e}"
        )
    vals = np.where(eig.values > 1e-12 * scale, eig.values, 0.0)
    return (eig.vectors * np.sqrt(vals)) @ eig.vectors.conj().T


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary matrix (QR of a complex Ginibre matrix)."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry with ``cols`` orthonormal columns in ``rows`` dims."""
    if cols > rows:
        raise DimensionMismatch(f"isometry needs cols <= rows, got {rows}x{cols}")
    z = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))
