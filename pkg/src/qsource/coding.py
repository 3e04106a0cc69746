"""High-probability subspaces and block-coding fidelity experiments.

The central objects:

* the high-probability subspace of a block density at level eps: the span
  of the fewest top eigenvectors capturing weight >= 1 - eps;
* pure (extremal) decompositions of a block density, parameterized by a
  mixing isometry;
* the projection encoder, which maps a pure ensemble member x onto a
  supporting subspace as a2 |qx/|qx|><..| + b2 |anchor><anchor|;
* the direct compression experiment, which codes at level eps/2 and checks
  the exact finite-n chain  F >= 2 phi(q) - 1 >= 1 - eps;
* the converse experiment, which forces the code space below the entropy
  rate and checks the exact chain  F <= F' <= sqrt(phi(q)).

Both chains hold with machine accuracy at every block length; they are the
finite-size content of the positive and negative source coding theorems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DimensionMismatch,
    EigenSystem,
    haar_isometry,
    haar_unitary,
    hermitian_eig,
    psd_sqrt,
)
from .sources import (
    DEFAULT_SIZE_CAP,
    DensityMatrix,
    SourceModel,
    source_fingerprint,
)
from .entropy import mean_entropy_trace

__all__ = [
    "BadMixer",
    "LengthMismatch",
    "RankUnderflow",
    "RANK_TOL",
    "CHAIN_TOL",
    "HighProbSubspace",
    "PureEnsemble",
    "MixedEnsemble",
    "CodingScheme",
    "TrialResult",
    "TheoremReport",
    "high_prob_subspace",
    "min_log_dim",
    "extremal_ensemble",
    "coarse_grain",
    "encode_pure",
    "encode_ensemble",
    "optimal_encoder",
    "fidelity",
    "fidelity_sqrt",
    "direct_coding_experiment",
    "converse_coding_experiment",
]

# Eigenvalues below this count as zero when determining the rank of a block
# density (ensemble sizes, code-space ranks).
RANK_TOL = 1e-12
# Slack allowed when asserting the exact inequality chains.
CHAIN_TOL = 1e-10


class BadMixer(ValueError):
    """Mixing matrix does not have orthonormal columns."""


class LengthMismatch(ValueError):
    """Ensemble and coding scheme have different lengths."""


class RankUnderflow(ValueError):
    """Requested code space would have rank below one."""


def _matrix_of(d) -> np.ndarray:
    if isinstance(d, DensityMatrix):
        return d.matrix
    return np.asarray(d, dtype=complex)


@dataclass(frozen=True)
class HighProbSubspace:
    """Smallest top-eigenvector subspace capturing weight >= 1 - level.

    ``dim`` is minimal: the first dim - 1 eigenvalues sum to less than
    1 - level.  Ties in the spectrum are broken by the canonical eigenvalue
    ordering, which makes the projector reproducible even though a
    degenerate spectrum does not single out the subspace mathematically.
    """

    level: float
    dim: int
    eigen: EigenSystem
    projector: np.ndarray
    captured_weight: float

    @property
    def log_dim(self) -> float:
        return math.log(self.dim)

    @property
    def top_vector(self) -> np.ndarray:
        return self.eigen.vectors[:, 0]


def high_prob_subspace(d, eps: float, eigen: EigenSystem | None = None) -> HighProbSubspace:
    """High-probability subspace of a density matrix at level eps.

    Parameters
    ----------
    d : DensityMatrix or array_like
        The block density.
    eps : float
        Level in (0, 1); the subspace captures weight >= 1 - eps.
    eigen : EigenSystem, optional
        Reuse a precomputed eigendecomposition of ``d``.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"level must be in (0, 1), got {eps}")
    if eigen is None:
        eigen = hermitian_eig(_matrix_of(d), check=False)
    cumulative = np.cumsum(eigen.values)
    reached = cumulative >= 1.0 - eps
    dim = int(np.argmax(reached)) + 1 if reached.any() else len(cumulative)
    basis = eigen.vectors[:, :dim]
    return HighProbSubspace(
        level=float(eps),
        dim=dim,
        eigen=eigen,
        projector=basis @ basis.conj().T,
        captured_weight=float(cumulative[dim - 1]),
    )


def min_log_dim(d, eps: float, eigen: EigenSystem | None = None) -> float:
    """Log of the smallest projector dimension capturing weight >= 1 - eps.

    Among rank-r projectors, Tr(D q) is maximized by the top-r
    eigenprojector, so the minimum over all admissible projectors is
    attained on the high-probability subspace.
    """
    return high_prob_subspace(d, eps, eigen=eigen).log_dim


@dataclass(frozen=True)
class PureEnsemble:
    """Pure-state decomposition sum_i p_i |x_i><x_i| of a block density."""

    probs: np.ndarray
    vectors: np.ndarray  # shape (m, dim), unit rows

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def mixture(self) -> np.ndarray:
        return np.einsum("i,ia,ib->ab", self.probs, self.vectors, self.vectors.conj())

    def densities(self) -> np.ndarray:
        return np.einsum("ia,ib->iab", self.vectors, self.vectors.conj())


@dataclass(frozen=True)
class MixedEnsemble:
    """General decomposition sum_i p_i D_i of a block density."""

    probs: np.ndarray
    states: np.ndarray  # shape (m, dim, dim)

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def mixture(self) -> np.ndarray:
        return np.einsum("i,iab->ab", self.probs, self.states)

    def densities(self) -> np.ndarray:
        return self.states


@dataclass(frozen=True)
class CodingScheme:
    """Code densities assigned to ensemble members, all supported in the
    range of ``projector``.

    ``alpha_sq`` and ``beta_sq`` (kept-weight and lost-weight per member)
    are populated by the projection encoder and ``None`` for other
    encoders.
    """

    projector: np.ndarray
    anchor: np.ndarray | None
    codes: np.ndarray  # shape (m, dim, dim)
    alpha_sq: np.ndarray | None = None
    beta_sq: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.codes)


def extremal_ensemble(d, mixer="eigen", eigen: EigenSystem | None = None) -> PureEnsemble:
    """Pure-state decomposition of a density from a mixing isometry.

    With eigenpairs (lam_k, f_k) of the density and a matrix ``mixer`` of
    orthonormal columns (one column per nonzero eigenvalue), the members
    are defined by sqrt(p_i) x_i = sum_k mixer[i, k] sqrt(lam_k) f_k.  Any
    such choice reproduces the density exactly; ``mixer='eigen'`` selects
    the eigenpairs themselves.

    Raises
    ------
    BadMixer
        If the mixer columns are not orthonormal or the column count does
        not match the rank.
    """
    mat = _matrix_of(d)
    if eigen is None:
        eigen = hermitian_eig(mat, check=False)
    rank = int(np.sum(eigen.values > RANK_TOL))
    basis = eigen.vectors[:, :rank] * np.sqrt(eigen.values[:rank])
    if isinstance(mixer, str):
        if mixer != "eigen":
            raise BadMixer(f"unknown mixer preset {mixer!r}")
        mix = np.eye(rank, dtype=complex)
    else:
        mix = np.asarray(mixer, dtype=complex)
        if mix.ndim != 2 or mix.shape[1] != rank:
            raise BadMixer(
                f"mixer needs one column per nonzero eigenvalue "
                f"({rank}), got shape {mix.shape}"
            )
        gram = mix.conj().T @ mix
        if np.max(np.abs(gram - np.eye(rank))) > 1e-10:
            raise BadMixer("mixer columns are not orthonormal")
    amplitudes = mix @ basis.T  # rows are sqrt(p_i) x_i
    probs = np.einsum("ia,ia->i", amplitudes, amplitudes.conj()).real
    keep = probs > 1e-14
    probs = probs[keep]
    vectors = amplitudes[keep] / np.sqrt(probs)[:, None]
    return PureEnsemble(probs=probs, vectors=vectors)


def coarse_grain(ensemble: PureEnsemble, n_groups: int, rng: np.random.Generator) -> MixedEnsemble:
    """Mix a pure ensemble into a coarser decomposition by random grouping.

    The result is a decomposition of the same density into mixed states;
    useful for exercising statements that quantify over arbitrary (not
    just extremal) decompositions.
    """
    m = len(ensemble)
    n_groups = max(1, min(n_groups, m))
    groups = np.array_split(rng.permutation(m), n_groups)
    probs = np.empty(n_groups)
    states = np.empty((n_groups, ensemble.dim, ensemble.dim), dtype=complex)
    for g, idx in enumerate(groups):
        w = float(ensemble.probs[idx].sum())
        probs[g] = w
        states[g] = (
            np.einsum(
                "i,ia,ib->ab",
                ensemble.probs[idx],
                ensemble.vectors[idx],
                ensemble.vectors[idx].conj(),
            )
            / w
        )
    return MixedEnsemble(probs=probs, states=states)


def encode_pure(x, q, anchor):
    """Project a unit vector onto a code subspace, routing lost weight to a
    fixed anchor state.

    Returns ``(code, alpha_sq, beta_sq)`` where ``alpha_sq = |qx|^2`` is
    the kept weight, ``beta_sq = 1 - alpha_sq`` the lost weight, and

        code = alpha_sq |qx/|qx|><qx/|qx|| + beta_sq |anchor><anchor|.

    When x is orthogonal to the subspace the code degenerates to the
    anchor state.  The anchor must lie in the range of ``q``.
    """
    x = np.asarray(x, dtype=complex)
    anchor = np.asarray(anchor, dtype=complex)
    if np.max(np.abs(q @ anchor - anchor)) > 1e-9:
        raise ValueError("anchor vector is not supported in the code subspace")
    qx = q @ x
    alpha_sq = float(np.vdot(qx, qx).real)
    anchor_term = np.outer(anchor, anchor.conj())
    if alpha_sq <= 1e-14:
        return anchor_term, 0.0, 1.0
    beta_sq = max(1.0 - alpha_sq, 0.0)
    kept = qx / math.sqrt(alpha_sq)
    code = alpha_sq * np.outer(kept, kept.conj()) + beta_sq * anchor_term
    return code, alpha_sq, beta_sq


def encode_ensemble(ensemble: PureEnsemble, q, anchor) -> CodingScheme:
    """Apply the projection encoder to every member of a pure ensemble."""
    q = np.asarray(q, dtype=complex)
    m = len(ensemble)
    codes = np.empty((m, ensemble.dim, ensemble.dim), dtype=complex)
    alpha_sq = np.empty(m)
    beta_sq = np.empty(m)
    for i in range(m):
        codes[i], alpha_sq[i], beta_sq[i] = encode_pure(ensemble.vectors[i], q, anchor)
    return CodingScheme(
        projector=q,
        anchor=np.asarray(anchor, dtype=complex),
        codes=codes,
        alpha_sq=alpha_sq,
        beta_sq=beta_sq,
    )


def optimal_encoder(ensemble, q) -> CodingScheme:
    """Best rank-one code in the subspace for each ensemble member.

    Over densities supported in the range of ``q``, Tr(D_i code) is
    maximized by the top eigenprojector of q D_i q, so this encoder
    dominates the projection encoder for the same subspace.
    """
    q = np.asarray(q, dtype=complex)
    states = ensemble.densities()
    m = len(ensemble)
    codes = np.empty((m, q.shape[0], q.shape[0]), dtype=complex)
    fallback = None
    for i in range(m):
        compressed = q @ states[i] @ q
        eig = hermitian_eig(compressed, check=False)
        if eig.values[0] > 1e-14:
            top = eig.vectors[:, 0]
        else:
            if fallback is None:
                fallback = hermitian_eig(q, check=False).vectors[:, 0]
            top = fallback
        codes[i] = np.outer(top, top.conj())
    return CodingScheme(projector=q, anchor=None, codes=codes)


def _check_lengths(ensemble, scheme: CodingScheme):
    if len(ensemble) != len(scheme):
        raise LengthMismatch(
            f"{len(ensemble)} ensemble members vs {len(scheme)} codes"
        )
    if ensemble.dim != scheme.codes.shape[1]:
        raise DimensionMismatch(
            f"ensemble dim {ensemble.dim} vs code dim {scheme.codes.shape[1]}"
        )


def fidelity(ensemble, scheme: CodingScheme) -> float:
    """Ensemble fidelity sum_i p_i Tr(D_i code_i), between 0 and 1.

    Equals 1 exactly when every member is pure and coded by itself.
    """
    _check_lengths(ensemble, scheme)
    if isinstance(ensemble, PureEnsemble):
        overlaps = np.einsum(
            "ia,iab,ib->i", ensemble.vectors.conj(), scheme.codes, ensemble.vectors
        ).real
    else:
        overlaps = np.einsum("iab,iba->i", ensemble.states, scheme.codes).real
    return float(np.dot(ensemble.probs, overlaps))


def fidelity_sqrt(ensemble, scheme: CodingScheme) -> float:
    """Square-root fidelity sum_i p_i Tr(sqrt(D_i) sqrt(code_i)).

    Never below the plain fidelity, and equal to 1 whenever the codes
    reproduce the ensemble members exactly (pure or mixed).
    """
    _check_lengths(ensemble, scheme)
    total = 0.0
    if isinstance(ensemble, PureEnsemble):
        for i in range(len(ensemble)):
            root = psd_sqrt(scheme.codes[i])
            x = ensemble.vectors[i]
            total += ensemble.probs[i] * float(np.vdot(x, root @ x).real)
    else:
        for i in range(len(ensemble)):
            root_state = psd_sqrt(ensemble.states[i])
            root_code = psd_sqrt(scheme.codes[i])
            total += ensemble.probs[i] * float(
                np.einsum("ab,ba->", root_state, root_code).real
            )
    return total


@dataclass(frozen=True)
class TrialResult:
    """One (subspace, ensemble, encoder) evaluation in the converse
    experiment."""

    index: int
    subspace: str  # "top" | "random"
    ensemble: str  # "extremal" | "coarse"
    encoder: str  # "optimal" | "projection"
    phi_q: float
    fidelity: float
    fidelity_sqrt: float
    bound: float
    chain_ok: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "subspace": self.subspace,
            "ensemble": self.ensemble,
            "encoder": self.encoder,
            "phi_q": self.phi_q,
            "fidelity": self.fidelity,
            "fidelity_sqrt": self.fidelity_sqrt,
            "bound": self.bound,
            "chain_ok": self.chain_ok,
        }


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one coding experiment, with its exact-inequality verdicts.

    ``lower_bound`` is 2 phi(q) - 1 and ``upper_bound`` is sqrt(phi(q)) for
    the reported subspace; both are valid for any coding supported there.
    ``h_hat`` is the finite-n increment estimate S_n - S_{n-1} of the mean
    entropy (the labelled estimator), not the true asymptotic rate.
    """

    kind: str  # "direct" | "converse"
    n: int
    eps: float | None
    delta: float
    seed: int
    source_fingerprint: str
    h_hat: float
    h_hat_estimator: str
    hp_dim: int
    log_dim: float
    rate: float
    fidelity: float
    fidelity_sqrt: float
    phi_q: float
    lower_bound: float
    upper_bound: float
    eta: float | None
    verdicts: dict
    all_exact_ok: bool
    trials: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "eps": self.eps,
            "delta": self.delta,
            "seed": self.seed,
            "source_fingerprint": self.source_fingerprint,
            "h_hat": self.h_hat,
            "h_hat_estimator": self.h_hat_estimator,
            "hp_dim": self.hp_dim,
            "log_dim": self.log_dim,
            "rate": self.rate,
            "fidelity": self.fidelity,
            "fidelity_sqrt": self.fidelity_sqrt,
            "phi_q": self.phi_q,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "eta": self.eta,
            "verdicts": dict(self.verdicts),
            "all_exact_ok": self.all_exact_ok,
            "trials": [t.to_dict() for t in self.trials],
        }

    CSV_HEADER = (
        "kind,n,eps,delta,seed,h_hat,hp_dim,log_dim,rate,"
        "fidelity,fidelity_sqrt,phi_q,lower_bound,upper_bound,eta,all_exact_ok"
    )

    def csv_row(self) -> str:
        def num(x):
            return "" if x is None else f"{x:.17g}"

        return ",".join(
            [
                self.kind,
                str(self.n),
                num(self.eps),
                num(self.delta),
                str(self.seed),
                num(self.h_hat),
                str(self.hp_dim),
                num(self.log_dim),
                num(self.rate),
                num(self.fidelity),
                num(self.fidelity_sqrt),
                num(self.phi_q),
                num(self.lower_bound),
                num(self.upper_bound),
                num(self.eta),
                str(int(self.all_exact_ok)),
            ]
        )


def direct_coding_experiment(
    source: SourceModel,
    n: int,
    eps: float,
    delta: float,
    mixer_seed: int = 0,
    size_cap: int = DEFAULT_SIZE_CAP,
    eig_fn=None,
) -> TheoremReport:
    """Code an n-site block on its level-eps/2 high-probability subspace
    and verify the exact fidelity chain.

    A seeded random mixing unitary picks the pure decomposition, the
    anchor is the top subspace eigenvector, and the projection encoder
    produces the codes.  The report records the chain

        F >= 2 phi(q) - 1 >= 1 - eps      (machine-exact)

    together with the rate log(dim q)/n, compared against h_hat + delta
    (informational at finite n: the rate claim is asymptotic).
    """
    trace = mean_entropy_trace(source, n, size_cap=size_cap, eig_fn=eig_fn)
    h_hat = trace.h_hat_increment
    block = source.density(n, size_cap=size_cap)
    if eig_fn is not None:
        eigen = eig_fn(n, block.matrix)
    else:
        eigen = hermitian_eig(block.matrix, check=False)
    hp = high_prob_subspace(block, eps / 2.0, eigen=eigen)
    rng = np.random.default_rng(mixer_seed)
    rank = int(np.sum(eigen.values > RANK_TOL))
    mixer = haar_unitary(rank, rng)
    ensemble = extremal_ensemble(block, mixer=mixer, eigen=eigen)
    scheme = encode_ensemble(ensemble, hp.projector, hp.top_vector)
    f_val = fidelity(ensemble, scheme)
    f_sqrt = fidelity_sqrt(ensemble, scheme)
    phi_q = float(np.einsum("ab,ba->", block.matrix, hp.projector).real)
    lower = 2.0 * phi_q - 1.0
    upper = math.sqrt(phi_q)
    rate = hp.log_dim / n
    chain_ok = (
        f_val >= lower - CHAIN_TOL
        and lower >= (1.0 - eps) - CHAIN_TOL
        and f_val <= f_sqrt + CHAIN_TOL
    )
    verdicts = {
        "chain_ok": bool(chain_ok),
        "fidelity_exceeds_target": bool(f_val >= 1.0 - eps - CHAIN_TOL),
        "rate_within_target": bool(rate < h_hat + delta),
    }
    return TheoremReport(
        kind="direct",
        n=n,
        eps=float(eps),
        delta=float(delta),
        seed=int(mixer_seed),
        source_fingerprint=source_fingerprint(source),
        h_hat=float(h_hat),
        h_hat_estimator="increment",
        hp_dim=hp.dim,
        log_dim=hp.log_dim,
        rate=rate,
        fidelity=f_val,
        fidelity_sqrt=f_sqrt,
        phi_q=phi_q,
        lower_bound=lower,
        upper_bound=upper,
        eta=None,
        verdicts=verdicts,
        all_exact_ok=verdicts["chain_ok"] and verdicts["fidelity_exceeds_target"],
    )


def converse_coding_experiment(
    source: SourceModel,
    n: int,
    delta: float,
    trials: int = 8,
    seed: int = 0,
    size_cap: int = DEFAULT_SIZE_CAP,
    eig_fn=None,
) -> TheoremReport:
    """Force the code space below the entropy rate and verify that no
    decomposition or encoder escapes the fidelity ceiling.

    The code rank is r = floor(exp(n (h_hat - delta))).  Trial 0 uses the
    top-r eigenprojector (the best possible subspace); later trials use
    random rank-r subspaces.  Trials alternate between extremal and
    coarse-grained mixed decompositions; every trial evaluates the
    best-rank-one encoder and, for pure decompositions, the projection
    encoder as well.  Each evaluation checks the exact chain

        F <= F' <= sqrt(phi(q))            (machine-exact)

    and eta is the largest phi(q) over trials, attained on the top-r
    subspace, so sqrt(eta) caps the fidelity of every trial.

    Raises
    ------
    RankUnderflow
        If r < 1, i.e. h_hat - delta < 0 at this block length.
    """
    trace = mean_entropy_trace(source, n, size_cap=size_cap, eig_fn=eig_fn)
    h_hat = trace.h_hat_increment
    block = source.density(n, size_cap=size_cap)
    if eig_fn is not None:
        eigen = eig_fn(n, block.matrix)
    else:
        eigen = hermitian_eig(block.matrix, check=False)
    dim = block.dim
    r = math.floor(math.exp(n * (h_hat - delta)))
    if r < 1:
        raise RankUnderflow(
            f"code rank floor(exp({n} * ({h_hat:.6f} - {delta}))) < 1; "
            "reduce delta or increase the block length"
        )
    r = min(r, dim)
    rank = int(np.sum(eigen.values > RANK_TOL))

    results = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        if t == 0:
            basis = eigen.vectors[:, :r]
            subspace_kind = "top"
        else:
            basis = haar_isometry(dim, r, rng)
            subspace_kind = "random"
        q = basis @ basis.conj().T
        phi_q = float(np.einsum("ab,ba->", block.matrix, q).real)
        bound = math.sqrt(max(phi_q, 0.0))

        mixer = haar_unitary(rank, rng)
        pure = extremal_ensemble(block, mixer=mixer, eigen=eigen)
        if t % 2 == 0:
            ensemble = pure
            ensemble_kind = "extremal"
        else:
            ensemble = coarse_grain(pure, n_groups=min(4, len(pure)), rng=rng)
            ensemble_kind = "coarse"

        evaluations = [("optimal", optimal_encoder(ensemble, q))]
        if isinstance(ensemble, PureEnsemble):
            anchor = basis[:, 0]
            evaluations.append(("projection", encode_ensemble(ensemble, q, anchor)))
        for encoder_name, scheme in evaluations:
            f_val = fidelity(ensemble, scheme)
            f_sqrt = fidelity_sqrt(ensemble, scheme)
            ok = f_val <= f_sqrt + CHAIN_TOL and f_sqrt <= bound + CHAIN_TOL
            results.append(
                TrialResult(
                    index=t,
                    subspace=subspace_kind,
                    ensemble=ensemble_kind,
                    encoder=encoder_name,
                    phi_q=phi_q,
                    fidelity=f_val,
                    fidelity_sqrt=f_sqrt,
                    bound=bound,
                    chain_ok=bool(ok),
                )
            )

    eta = max(t.phi_q for t in results)
    best_f = max(t.fidelity for t in results)
    best_f_sqrt = max(t.fidelity_sqrt for t in results)
    chain_ok = all(t.chain_ok for t in results)
    bounded_by_eta = best_f_sqrt <= math.sqrt(eta) + CHAIN_TOL
    verdicts = {
        "chain_ok": bool(chain_ok),
        "bounded_by_eta": bool(bounded_by_eta),
    }
    log_dim = math.log(r)
    return TheoremReport(
        kind="converse",
        n=n,
        eps=None,
        delta=float(delta),
        seed=int(seed),
        source_fingerprint=source_fingerprint(source),
        h_hat=float(h_hat),
        h_hat_estimator="increment",
        hp_dim=r,
        log_dim=log_dim,
        rate=log_dim / n,
        fidelity=best_f,
        fidelity_sqrt=best_f_sqrt,
        phi_q=eta,
        lower_bound=2.0 * eta - 1.0,
        upper_bound=math.sqrt(eta),
        eta=eta,
        verdicts=verdicts,
        all_exact_ok=verdicts["chain_ok"] and verdicts["bounded_by_eta"],
        trials=tuple(results),
    )
