"""Stationary quantum source models and their block density matrices.

Two families are supported:

* memoryless product sources, where the n-site block state is the n-fold
  tensor power of a single-site density, and
* finitely correlated sources, where a family of operators ``V_1..V_d``
  acting on a k-dimensional auxiliary (memory) space, together with a
  stationary auxiliary density ``rho``, generates the block states via

      block[J, I] = Tr( rho * V[i1]' .. V[in]' V[jn] .. V[j1] )

  with multi-indices I = (i1..in), J = (j1..jn) in lexicographic order.

The matrix-element convention is frozen as: for the matrix unit E_IJ the
source functional takes the value ``block[J, I]``.  Hermiticity and the
unit trace of the construction are checked by the test suite; both are
automatic because the block is assembled as a Gram matrix.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DimensionMismatch,
    hermitian_eig,
    kron,
    haar_isometry,
    partial_trace,
)

__all__ = [
    "SizeCapExceeded",
    "InvalidSource",
    "FixedPointNotUnique",
    "DEFAULT_SIZE_CAP",
    "DensityMatrix",
    "KrausSource",
    "SourceModel",
    "ValidationReport",
    "ConsistencyReport",
    "example1_source",
    "validate_source",
    "fcs_density",
    "product_density",
    "product_source",
    "correlated_source",
    "maximally_mixed_source",
    "marginal_consistency",
    "random_source",
    "source_to_json",
    "source_from_json",
    "source_fingerprint",
]

# Dense eigensolves dominate the cost downstream; refuse blocks beyond this
# dimension unless the caller raises the cap explicitly.
DEFAULT_SIZE_CAP = 4096

_COMPLETENESS_TOL = 1e-10
_STATIONARITY_TOL = 1e-10
_DENSITY_TRACE_TOL = 1e-9


class SizeCapExceeded(ValueError):
    """Requested block dimension exceeds the configured size cap."""


class InvalidSource(ValueError):
    """Source fails its validity checks."""


class FixedPointNotUnique(RuntimeError):
    """Stationary auxiliary density could not be determined uniquely."""


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix of an n-site block of a source with site dimension d."""

    site_dim: int
    n_sites: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        expected = self.site_dim ** self.n_sites
        if m.ndim != 2 or m.shape != (expected, expected):
            raise DimensionMismatch(
                f"block of {self.n_sites} sites of dim {self.site_dim} needs shape "
                f"({expected}, {expected}), got {m.shape}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def residuals(self) -> dict:
        """Deviations from Hermiticity, positivity and unit trace."""
        m = self.matrix
        herm = float(np.max(np.abs(m - m.conj().T)))
        eigvals = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        return {
            "hermiticity": herm,
            "min_eigenvalue": float(eigvals[0]),
            "trace_error": float(abs(np.trace(m) - 1.0)),
        }


@dataclass(frozen=True)
class KrausSource:
    """Finitely correlated source: d memory operators on k dims plus a
    stationary auxiliary density."""

    d: int
    k: int
    V: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V, dtype=complex)
        rho = np.asarray(self.rho, dtype=complex)
        if V.shape != (self.d, self.k, self.k):
            raise DimensionMismatch(
                f"V must have shape ({self.d}, {self.k}, {self.k}), got {V.shape}"
            )
        if rho.shape != (self.k, self.k):
            raise DimensionMismatch(
                f"rho must have shape ({self.k}, {self.k}), got {rho.shape}"
            )
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class SourceModel:
    """A stationary source: either a memoryless product or a finitely
    correlated model."""

    kind: str  # "product" | "finitely_correlated"
    payload: object  # single-site density (ndarray) or KrausSource

    def __post_init__(self):
        if self.kind not in ("product", "finitely_correlated"):
            raise InvalidSource(f"unknown source kind {self.kind!r}")
        if self.kind == "product":
            object.__setattr__(self, "payload", np.asarray(self.payload, dtype=complex))

    @property
    def site_dim(self) -> int:
        if self.kind == "product":
            return self.payload.shape[0]
        return self.payload.d

    def density(self, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> DensityMatrix:
        """Block density matrix on n sites."""
        if self.kind == "product":
            return product_density(self.payload, n, size_cap=size_cap)
        return fcs_density(self.payload, n, size_cap=size_cap)


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostics for a finitely correlated source; never raises."""

    completeness_residual: float
    stationarity_residual: float
    rho_hermiticity_residual: float
    rho_min_eigenvalue: float
    rho_trace_error: float
    transfer_moduli: tuple = field(default=())

    @property
    def completeness_ok(self) -> bool:
        return self.completeness_residual <= _COMPLETENESS_TOL

    @property
    def stationarity_ok(self) -> bool:
        return self.stationarity_residual <= _STATIONARITY_TOL

    @property
    def rho_ok(self) -> bool:
        return (
            self.rho_hermiticity_residual <= _COMPLETENESS_TOL
            and self.rho_min_eigenvalue >= -1e-10
            and self.rho_trace_error <= _DENSITY_TRACE_TOL
        )

    @property
    def all_ok(self) -> bool:
        return self.completeness_ok and self.stationarity_ok and self.rho_ok

    @property
    def spectral_gap(self) -> float:
        """1 minus the second-largest transfer-operator modulus.

        Informational only: a positive gap is consistent with (but does not
        certify) good mixing of the memory process.
        """
        if len(self.transfer_moduli) < 2:
            return 1.0
        return 1.0 - self.transfer_moduli[1]

    def lines(self) -> list:
        ok = {True: "pass", False: "FAIL"}
        return [
            f"completeness   {ok[self.completeness_ok]}  residual {self.completeness_residual:.3e}",
            f"stationarity   {ok[self.stationarity_ok]}  residual {self.stationarity_residual:.3e}",
            f"memory density {ok[self.rho_ok]}  herm {self.rho_hermiticity_residual:.3e}  "
            f"min eig {self.rho_min_eigenvalue:.3e}  trace err {self.rho_trace_error:.3e}",
            f"transfer gap   info  1 - |lambda_2| = {self.spectral_gap:.6f}",
        ]


@dataclass(frozen=True)
class ConsistencyReport:
    """Max-norm residuals between the n-site block and the two one-site
    marginals of the (n+1)-site block."""

    n: int
    drop_last_residual: float
    drop_first_residual: float


def example1_source() -> KrausSource:
    """The built-in correlated source: three symbols driven by a single
    two-level memory.

    The three memory operators are

        V1 = [[1/sqrt(2), 0], [0, 0]]
        V2 = [[0, 0], [1/sqrt(2), 0]]
        V3 = [[0, 1], [0, 0]]

    with stationary memory density diag(2/3, 1/3).  The one-site block is
    maximally mixed, but the source is not a product state.
    """
    s = 1.0 / np.sqrt(2.0)
    V = np.zeros((3, 2, 2), dtype=complex)
    V[0, 0, 0] = s
    V[1, 1, 0] = s
    V[2, 0, 1] = 1.0
    rho = np.diag([2.0 / 3.0, 1.0 / 3.0]).astype(complex)
    return KrausSource(d=3, k=2, V=V, rho=rho)


def _transfer_moduli(source: KrausSource) -> tuple:
    """Sorted moduli of the memory transfer operator sum_i V_i (.) V_i'."""
    T = np.zeros((source.k ** 2, source.k ** 2), dtype=complex)
    for v in source.V:
        T += np.kron(v, v.conj())
    moduli = np.sort(np.abs(np.linalg.eigvals(T)))[::-1]
    return tuple(float(x) for x in moduli)


def validate_source(source: KrausSource) -> ValidationReport:
    """Check completeness, stationarity and memory-density validity.

    Completeness is ``sum_i V_i' V_i = I`` and stationarity is
    ``sum_i V_i rho V_i' = rho`` (the trace-dual form of invariance of the
    auxiliary state).  Returns residual norms; diagnostics never raise.
    """
    V, rho, k = source.V, source.rho, source.k
    comp = np.einsum("iab,iac->bc", V.conj(), V)
    completeness_residual = float(np.max(np.abs(comp - np.eye(k))))
    stat = np.einsum("iab,bc,idc->ad", V, rho, V.conj())
    stationarity_residual = float(np.max(np.abs(stat - rho)))
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    eigvals = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    return ValidationReport(
        completeness_residual=completeness_residual,
        stationarity_residual=stationarity_residual,
        rho_hermiticity_residual=herm,
        rho_min_eigenvalue=float(eigvals[0]),
        rho_trace_error=float(abs(np.trace(rho) - 1.0)),
        transfer_moduli=_transfer_moduli(source),
    )


def _check_cap(d: int, n: int, size_cap: int) -> int:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    dim = d ** n
    if dim > size_cap:
        raise SizeCapExceeded(
            f"block dimension {d}^{n} = {dim} exceeds the size cap {size_cap}"
        )
    return dim


def fcs_density(
    source: KrausSource, n: int, size_cap: int = DEFAULT_SIZE_CAP
) -> DensityMatrix:
    """Block density of a finitely correlated source on n sites.

    The entry at (row J, column I) is
    ``Tr( rho * V[i1]'..V[in]' V[jn]..V[j1] )``.  Internally the block is
    assembled as a Gram matrix: with ``W(J) = V[jn]..V[j1]`` memoized over
    string prefixes, the rows ``vec(W(J) rho^{1/2})`` satisfy

        block = rows @ rows'

    which makes Hermiticity, positivity and (via completeness) unit trace
    automatic.  Cost is O(d^n k^3) for the prefix products plus
    O(d^{2n} k^2) for the Gram product.

    Raises
    ------
    SizeCapExceeded
        If d^n exceeds ``size_cap``.
    InvalidSource
        If the source fails completeness or stationarity checks.
    """
    dim = _check_cap(source.d, n, size_cap)
    report = validate_source(source)
    if not report.all_ok:
        raise InvalidSource(
            "source fails validation: "
            f"completeness {report.completeness_residual:.3e}, "
            f"stationarity {report.stationarity_residual:.3e}"
        )
    k = source.k
    eig = hermitian_eig(source.rho)
    rho_sqrt = (eig.vectors * np.sqrt(np.clip(eig.values, 0.0, None))) @ eig.vectors.conj().T

    # W holds V[jm]..V[j1] for every length-m prefix; appending a site adds
    # the new, least significant digit and multiplies on the left.
    W = np.eye(k, dtype=complex)[None, :, :]
    for _ in range(n):
        W = np.einsum("jab,Jbc->Jjac", source.V, W).reshape(-1, k, k)
    rows = (W @ rho_sqrt).reshape(dim, k * k)
    block = rows @ rows.conj().T
    return DensityMatrix(site_dim=source.d, n_sites=n, matrix=block)


def product_density(rho1, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> DensityMatrix:
    """n-fold tensor power of a single-site density (memoryless source)."""
    r = np.asarray(rho1, dtype=complex)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise DimensionMismatch(f"single-site density must be square, got {r.shape}")
    d = r.shape[0]
    _check_cap(d, n, size_cap)
    block = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        block = kron(block, r)
    return DensityMatrix(site_dim=d, n_sites=n, matrix=block)


def product_source(rho1) -> SourceModel:
    """Memoryless source emitting the given single-site density."""
    return SourceModel(kind="product", payload=rho1)


def correlated_source(source: KrausSource) -> SourceModel:
    """Wrap a finitely correlated model as a SourceModel."""
    return SourceModel(kind="finitely_correlated", payload=source)


def maximally_mixed_source(d: int) -> SourceModel:
    """Memoryless source with the maximally mixed single-site state."""
    return product_source(np.eye(d, dtype=complex) / d)


def marginal_consistency(
    source: SourceModel, n: int, size_cap: int = DEFAULT_SIZE_CAP
) -> ConsistencyReport:
    """Compare the n-site block with both one-site marginals of the
    (n+1)-site block.

    For a stationary source both residuals vanish up to roundoff; this is
    the finite-block expression of shift invariance.
    """
    d = source.site_dim
    big = source.density(n + 1, size_cap=size_cap).matrix
    small = source.density(n, size_cap=size_cap).matrix
    drop_last = partial_trace(big, d, side="last")
    drop_first = partial_trace(big, d, side="first")
    return ConsistencyReport(
        n=n,
        drop_last_residual=float(np.max(np.abs(drop_last - small))),
        drop_first_residual=float(np.max(np.abs(drop_first - small))),
    )


def random_source(
    d: int,
    k: int,
    seed: int,
    max_iterations: int = 100_000,
    tol: float = 1e-12,
) -> KrausSource:
    """Deterministic random finitely correlated source.

    The memory operators are the k-column blocks of a Haar-random isometry
    from k to d*k dimensions, so completeness holds exactly up to QR
    roundoff.  The stationary memory density is found by power iteration
    on ``rho -> sum_i V_i rho V_i'``; uniqueness is probed by restarting
    from a second initial point.

    Raises
    ------
    FixedPointNotUnique
        If the iteration does not converge or the two starting points
        disagree (reducible memory process; reseed and retry).
    """
    if d < 2 or k < 1:
        raise ValueError(f"need d >= 2 and k >= 1, got d={d}, k={k}")
    rng = np.random.default_rng(seed)
    iso = haar_isometry(d * k, k, rng)
    V = iso.reshape(d, k, k)

    def evolve(rho):
        return np.einsum("iab,bc,idc->ad", V, rho, V.conj())

    def iterate(rho):
        for _ in range(max_iterations):
            nxt = evolve(rho)
            nxt = (nxt + nxt.conj().T) / 2.0
            nxt = nxt / np.trace(nxt).real
            if np.max(np.abs(nxt - rho)) <= tol:
                return nxt
            rho = nxt
        raise FixedPointNotUnique(
            f"power iteration did not converge within {max_iterations} steps"
        )

    rho = iterate(np.eye(k, dtype=complex) / k)
    probe_vec = rng.normal(size=k) + 1j * rng.normal(size=k)
    probe = np.outer(probe_vec, probe_vec.conj())
    probe = probe / np.trace(probe).real
    rho_probe = iterate(probe)
    if np.max(np.abs(rho - rho_probe)) > 1e-8:
        raise FixedPointNotUnique(
            "two starting points converged to different stationary densities"
        )
    return KrausSource(d=d, k=k, V=V, rho=rho)


# --- serialization ---------------------------------------------------------
#
# A KrausSource is stored as a JSON object with fields d, k, V and rho,
# complex entries encoded as [re, im] pairs.  Floats are written with
# repr(), i.e. the shortest string that round-trips to the same IEEE double
# (at most 17 significant digits), so store-then-load is bit exact.


def _encode_complex_array(a: np.ndarray):
    stacked = np.stack([a.real, a.imag], axis=-1)
    return stacked.tolist()


def _decode_complex_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def source_to_json(source) -> str:
    """Serialize a KrausSource or SourceModel to a JSON document."""
    if isinstance(source, SourceModel):
        if source.kind == "product":
            payload = {
                "kind": "product",
                "rho1": _encode_complex_array(source.payload),
            }
            return json.dumps(payload, sort_keys=True)
        source = source.payload
    if not isinstance(source, KrausSource):
        raise TypeError(f"cannot serialize {type(source).__name__}")
    payload = {
        "d": source.d,
        "k": source.k,
        "V": _encode_complex_array(source.V),
        "rho": _encode_complex_array(source.rho),
    }
    return json.dumps(payload, sort_keys=True)


def source_from_json(text: str) -> SourceModel:
    """Load a SourceModel from its JSON document.

    Documents with a ``V`` field are finitely correlated sources; documents
    with ``kind: product`` hold a single-site density under ``rho1``.
    """
    data = json.loads(text)
    if isinstance(data, dict) and data.get("kind") == "product":
        return product_source(_decode_complex_array(data["rho1"]))
    if not isinstance(data, dict) or "V" not in data:
        raise InvalidSource("source document lacks the required fields")
    source = KrausSource(
        d=int(data["d"]),
        k=int(data["k"]),
        V=_decode_complex_array(data["V"]),
        rho=_decode_complex_array(data["rho"]),
    )
    return correlated_source(source)


def source_fingerprint(source) -> str:
    """Content hash of the canonical serialized source (cache key)."""
    if isinstance(source, KrausSource):
        source = correlated_source(source)
    return hashlib.sha256(source_to_json(source).encode("ascii")).hexdigest()
