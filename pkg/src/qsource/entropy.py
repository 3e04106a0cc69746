"""Entropy functionals: von Neumann entropy, per-site entropy traces with
mean-entropy estimators, the Holevo bound, and classical mutual information
induced by generalized measurements.

All entropies are in nats (natural logarithm); divide by ln 2 for bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatch, EigenSystem, hermitian_eig
from .sources import DEFAULT_SIZE_CAP, DensityMatrix, SourceModel

__all__ = [
    "InvalidPOVM",
    "EIG_FLOOR",
    "EntropyTrace",
    "ClassicalJoint",
    "POVM",
    "von_neumann_entropy",
    "shannon_entropy",
    "mean_entropy_trace",
    "holevo_chi",
    "measurement_joint",
    "mutual_information",
    "to_bits",
]

# Eigenvalues at or below this are treated as exact zeros in entropy sums
# (the 0 * log 0 = 0 convention); roundoff noise dominates below it.
EIG_FLOOR = 1e-15

LN2 = float(np.log(2.0))


class InvalidPOVM(ValueError):
    """Measurement elements are not positive or do not sum to the identity."""


def to_bits(nats: float) -> float:
    """Convert an entropy or information value from nats to bits."""
    return nats / LN2


def _matrix_of(d) -> np.ndarray:
    if isinstance(d, DensityMatrix):
        return d.matrix
    return np.asarray(d, dtype=complex)


def von_neumann_entropy(d) -> float:
    """Von Neumann entropy -sum(lam * ln(lam)) over the eigenvalues of a
    density matrix, in nats.

    Eigenvalues at or below ``EIG_FLOOR`` contribute zero.  The result is
    clamped at zero from below (a valid density cannot have negative
    entropy; roundoff can produce values like -1e-16).
    """
    vals = np.linalg.eigvalsh(_matrix_of(d))
    vals = vals[vals > EIG_FLOOR]
    return max(0.0, float(-(vals * np.log(vals)).sum()))


def shannon_entropy(p) -> float:
    """Shannon entropy of a probability vector, in nats."""
    arr = np.asarray(p, dtype=float).ravel()
    arr = arr[arr > EIG_FLOOR]
    return max(0.0, float(-(arr * np.log(arr)).sum()))


@dataclass(frozen=True)
class EntropyTrace:
    """Block entropies of one source for n = 1..n_max with two finite-n
    estimators of the mean entropy.

    ``h_hat_ratio`` is min over n of S_n / n (the infimum characterization)
    and ``h_hat_increment`` is the last increment S_n - S_{n-1}.  Their gap
    is an uncertainty proxy; no finite-n error bound is available.
    """

    n: np.ndarray
    entropy: np.ndarray
    per_site: np.ndarray
    increment: np.ndarray

    @property
    def h_hat_ratio(self) -> float:
        return float(np.min(self.per_site))

    @property
    def h_hat_increment(self) -> float:
        return float(self.increment[-1])

    @property
    def estimator_gap(self) -> float:
        return abs(self.h_hat_ratio - self.h_hat_increment)

    def to_csv(self) -> str:
        lines = ["n,S,S_over_n,increment"]
        for i in range(len(self.n)):
            lines.append(
                f"{int(self.n[i])},{self.entropy[i]:.17g},"
                f"{self.per_site[i]:.17g},{self.increment[i]:.17g}"
            )
        return "\n".join(lines) + "\n"


def mean_entropy_trace(
    source: SourceModel,
    n_max: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    eig_fn=None,
) -> EntropyTrace:
    """Block entropies S_n for n = 1..n_max with mean-entropy estimators.

    ``eig_fn(n, matrix) -> EigenSystem`` may be supplied to reuse cached
    eigendecompositions; it defaults to a direct dense solve.

    Raises
    ------
    SizeCapExceeded
        If the largest block exceeds the size cap.
    """
    if n_max < 1:
        raise ValueError(f"need n_max >= 1, got {n_max}")
    if eig_fn is None:
        eig_fn = lambda n, m: hermitian_eig(m, check=False)  # noqa: E731
    ns = np.arange(1, n_max + 1)
    entropies = np.empty(n_max)
    for n in ns:
        eig = eig_fn(int(n), source.density(int(n), size_cap=size_cap).matrix)
        vals = eig.values[eig.values > EIG_FLOOR]
        entropies[n - 1] = max(0.0, float(-(vals * np.log(vals)).sum()))
    increments = np.diff(entropies, prepend=0.0)
    return EntropyTrace(
        n=ns,
        entropy=entropies,
        per_site=entropies / ns,
        increment=increments,
    )


@dataclass(frozen=True)
class POVM:
    """Generalized measurement: positive elements summing to the identity."""

    elements: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "elements", np.asarray(self.elements, dtype=complex))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def validate(self, tol_sum: float = 1e-10, tol_psd: float = 1e-9):
        """Raise InvalidPOVM unless all elements are Hermitian PSD and the
        family resolves the identity."""
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for idx, a in enumerate(self.elements):
            if np.max(np.abs(a - a.conj().T)) > tol_sum * self.dim:
                raise InvalidPOVM(f"element {idx} is not Hermitian")
            if np.linalg.eigvalsh((a + a.conj().T) / 2.0)[0] < -tol_psd:
                raise InvalidPOVM(f"element {idx} is not positive semidefinite")
            total += a
        if np.max(np.abs(total - np.eye(self.dim))) > tol_sum:
            raise InvalidPOVM("elements do not sum to the identity")


@dataclass(frozen=True)
class ClassicalJoint:
    """Joint distribution over (output j, input i) induced by measuring an
    ensemble; row j, column i holds p(j, i)."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))

    @property
    def input_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    @property
    def output_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)


def _ensemble_arrays(weights, states):
    p = np.asarray(weights, dtype=float).ravel()
    mats = [_matrix_of(s) for s in states]
    if len(mats) != len(p):
        raise DimensionMismatch(
            f"{len(p)} weights for {len(mats)} states"
        )
    dim = mats[0].shape[0]
    for m in mats:
        if m.shape != (dim, dim):
            raise DimensionMismatch("ensemble states have mixed dimensions")
    return p, np.stack(mats), dim


def holevo_chi(weights, states) -> float:
    """Holevo quantity S(sum_i p_i D_i) - sum_i p_i S(D_i) in nats.

    Upper-bounds the classical information extractable from the ensemble
    by any measurement.  Nonnegative by concavity of the entropy.
    """
    p, mats, _ = _ensemble_arrays(weights, states)
    mixture = np.einsum("i,iab->ab", p, mats)
    return von_neumann_entropy(mixture) - float(
        sum(pi * von_neumann_entropy(m) for pi, m in zip(p, mats))
    )


def measurement_joint(weights, states, povm: POVM) -> ClassicalJoint:
    """Joint input/output distribution p(j, i) = p_i Tr(D_i A_j).

    Raises
    ------
    InvalidPOVM
        If the measurement fails its validity checks.
    DimensionMismatch
        If states and measurement act on different dimensions.
    """
    povm.validate()
    p, mats, dim = _ensemble_arrays(weights, states)
    if povm.dim != dim:
        raise DimensionMismatch(
            f"measurement dimension {povm.dim} != state dimension {dim}"
        )
    joint = np.einsum("i,iab,jba->ji", p, mats, povm.elements).real
    # Tr(D A) can undershoot zero by roundoff for near-singular operators.
    joint = np.clip(joint, 0.0, None)
    return ClassicalJoint(matrix=joint)


def mutual_information(joint: ClassicalJoint) -> float:
    """Mutual information of a joint distribution in nats; cells with zero
    probability contribute zero."""
    m = joint.matrix
    p_in = joint.input_marginal
    q_out = joint.output_marginal
    mask = m > EIG_FLOOR
    ratio = m[mask] / np.outer(q_out, p_in)[mask]
    return max(0.0, float((m[mask] * np.log(ratio)).sum()))
