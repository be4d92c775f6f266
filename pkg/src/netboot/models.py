"""Edge-probability model families and their estimators.

Families: degree-propensity product models (one community), degree-corrected
block models (and the plain block model as the theta == 1 special case), and
truncated spectral approximations of the adjacency matrix.  Estimated models
materialize to an :class:`EdgeProbMatrix` with out-of-range entries clipped
into [0, 1] and the number of clipped pairs recorded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from . import _kernels
from .errors import DegenerateModelError, EigenSolverError, EstimationError
from .graphs import AdjacencyMatrix, EdgeProbMatrix

__all__ = [
    "ChungLuParams",
    "DcsbmParams",
    "SpectralEstimate",
    "EstimatorSpec",
    "estimate_chung_lu",
    "estimate_dcsbm",
    "estimate_sbm",
    "estimate_spectral",
    "spectral_cluster",
    "materialize",
    "model_to_json",
    "model_from_json",
]

_DENSE_EIG_CUTOFF = 512
_CLUSTER_DENSE_CUTOFF = 128
_KMEANS_RESTARTS = 20


@dataclass(frozen=True)
class ChungLuParams:
    """Product model P_ij = p * theta_i * theta_j (i != j).

    ``p`` is the global density, ``theta`` the per-node degree propensities.
    A generating (true) model keeps mean(theta) = 1; estimated instances are
    exempt from that normalization.
    """

    p: float
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "theta", theta)
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")
        if theta.ndim != 1 or theta.size < 2:
            raise ValueError("theta must be a vector of length >= 2")
        if np.any(theta < 0.0):
            raise ValueError("theta must be nonnegative")

    @property
    def n(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class DcsbmParams:
    """Degree-corrected block model P_ij = rho * B[g_i, g_j] * theta_i * theta_j."""

    labels: np.ndarray
    B: np.ndarray
    theta: np.ndarray
    rho: float = 1.0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        B = np.asarray(self.B, dtype=np.float64)
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "theta", theta)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("B must be square")
        if not np.array_equal(B, B.T):
            raise ValueError("B must be symmetric")
        if np.any(B < 0.0):
            raise ValueError("B must be nonnegative")
        K = B.shape[0]
        if labels.min(initial=0) < 0 or labels.max(initial=0) >= K:
            raise ValueError("labels out of range for B")
        if theta.shape != labels.shape:
            raise ValueError("theta and labels must have equal length")
        if np.any(theta < 0.0):
            raise ValueError("theta must be nonnegative")
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def K(self) -> int:
        return self.B.shape[0]


@dataclass(frozen=True)
class SpectralEstimate:
    """Truncated eigendecomposition of A: P_hat = sum_k lambda_k v_k v_k^T."""

    K: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clip_count: int

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]


def _clip_counted(raw: np.ndarray) -> EdgeProbMatrix:
    n = raw.shape[0]
    np.fill_diagonal(raw, 0.0)
    iu = np.triu_indices(n, 1)
    upper = raw[iu]
    clip_count = int(((upper < 0.0) | (upper > 1.0)).sum())
    if clip_count:
        raw = np.clip(raw, 0.0, 1.0)
    return EdgeProbMatrix(raw, clip_count=clip_count)


def materialize(model) -> EdgeProbMatrix:
    """Edge-probability matrix of a model: zero diagonal, entries clipped to
    [0, 1] with the number of clipped pairs recorded on the result."""
    if isinstance(model, EdgeProbMatrix):
        return model
    if isinstance(model, ChungLuParams):
        raw = model.p * np.outer(model.theta, model.theta)
        return _clip_counted(raw)
    if isinstance(model, DcsbmParams):
        blocks = model.B[np.ix_(model.labels, model.labels)]
        raw = model.rho * blocks * np.outer(model.theta, model.theta)
        return _clip_counted(raw)
    if isinstance(model, SpectralEstimate):
        raw = (model.eigenvectors * model.eigenvalues) @ model.eigenvectors.T
        return _clip_counted(raw)
    raise TypeError(f"cannot materialize {type(model).__name__}")


def estimate_chung_lu(A: AdjacencyMatrix, p="estimate") -> ChungLuParams:
    """Degree-based MLE: theta_i = d_i / ((n - 1) p).

    With ``p="estimate"`` the density is first estimated as
    2m / (n (n - 1)).
    """
    if A.n < 2:
        raise DegenerateModelError("need at least 2 nodes")
    if p == "estimate":
        if A.m == 0:
            raise DegenerateModelError("cannot estimate density of an empty graph")
        p = 2.0 * A.m / (A.n * (A.n - 1))
    else:
        p = float(p)
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie in (0, 1)")
    theta = A.degrees() / ((A.n - 1) * p)
    return ChungLuParams(p=p, theta=theta)


def _block_counts(A: AdjacencyMatrix, labels: np.ndarray, K: int):
    """(sizes, ordered edge-endpoint counts O) with O_aa = 2 * within edges."""
    sizes = np.bincount(labels, minlength=K)
    gi = labels[A.ei]
    gj = labels[A.ej]
    flat = np.concatenate([gi * K + gj, gj * K + gi])
    O = np.bincount(flat, minlength=K * K).reshape(K, K)
    return sizes, O


def _check_labels(A, labels, K):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (A.n,):
        raise ValueError("labels must assign every node")
    if labels.min(initial=0) < 0:
        raise ValueError("labels must be nonnegative")
    K = max(K, int(labels.max(initial=0)) + 1)
    sizes = np.bincount(labels, minlength=K)
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        raise EstimationError(f"community {int(empty[0])} is empty")
    return labels, K


def estimate_dcsbm(A: AdjacencyMatrix, labels) -> DcsbmParams:
    """Profile MLE given labels (Poisson likelihood, block/propensity form).

    theta is normalized so each community's propensities sum to its size;
    rho is absorbed into B.
    """
    labels, K = _check_labels(A, labels, 1)
    sizes, O = _block_counts(A, labels, K)
    kappa = np.zeros(K)
    deg = A.degrees().astype(np.float64)
    np.add.at(kappa, labels, deg)
    dead = np.flatnonzero(kappa == 0.0)
    if dead.size:
        raise EstimationError(
            f"community {int(dead[0])} has total degree 0; theta undefined"
        )
    theta = sizes[labels] * deg / kappa[labels]
    denom = np.outer(sizes, sizes).astype(np.float64)
    np.fill_diagonal(denom, sizes * (sizes - 1.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        B = np.where(denom > 0.0, O / denom, 0.0)
    return DcsbmParams(labels=labels, B=B, theta=theta, rho=1.0)


def estimate_sbm(A: AdjacencyMatrix, labels) -> DcsbmParams:
    """Block-mean MLE without degree correction (theta == 1)."""
    labels, K = _check_labels(A, labels, 1)
    sizes, O = _block_counts(A, labels, K)
    denom = np.outer(sizes, sizes).astype(np.float64)
    np.fill_diagonal(denom, sizes * (sizes - 1.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        B = np.where(denom > 0.0, O / denom, 0.0)
    return DcsbmParams(labels=labels, B=B, theta=np.ones(A.n), rho=1.0)


def _dense_top_eigs(M: np.ndarray, K: int):
    w, V = np.linalg.eigh(M)
    idx = np.argsort(-np.abs(w), kind="stable")[:K]
    return w[idx], V[:, idx]


def estimate_spectral(A: AdjacencyMatrix, K: int) -> SpectralEstimate:
    """Top-K eigenpairs of A by absolute eigenvalue.

    Dense decomposition up to n = 512; Lanczos (ARPACK, full
    reorthogonalization) with residual tolerance 1e-10 and an iteration cap of
    10n above that.
    """
    n = A.n
    if not 1 <= K < n:
        raise ValueError("need 1 <= K < n")
    if n <= _DENSE_EIG_CUTOFF or K >= n - 1:
        w, V = _dense_top_eigs(A.to_dense().astype(np.float64), K)
    else:
        v0 = np.random.Generator(np.random.PCG64(0x5EED)).standard_normal(n)
        try:
            w, V = spla.eigsh(
                A.to_scipy(), k=K, which="LM", tol=1e-10, maxiter=10 * n, v0=v0
            )
        except spla.ArpackNoConvergence as exc:
            residual = float("inf")
            if exc.eigenvalues is not None and len(exc.eigenvalues):
                lam = exc.eigenvalues[0]
                vec = exc.eigenvectors[:, 0]
                residual = float(np.linalg.norm(A.to_scipy() @ vec - lam * vec))
            raise EigenSolverError("eigensolver did not converge", residual) from exc
        idx = np.argsort(-np.abs(w), kind="stable")
        w, V = w[idx], V[:, idx]
    raw = (V * w) @ V.T
    n_pairs = 0
    iu = np.triu_indices(n, 1)
    upper = raw[iu]
    n_pairs = int(((upper < 0.0) | (upper > 1.0)).sum())
    return SpectralEstimate(K=K, eigenvalues=w, eigenvectors=V, clip_count=n_pairs)


def _spherical_kmeans(X: np.ndarray, K: int, rng: np.random.Generator):
    """Best-of-restarts spherical k-means; ties go to the lowest index."""
    n = X.shape[0]
    best_labels = None
    best_inertia = np.inf
    for _ in range(_KMEANS_RESTARTS):
        C = X[rng.choice(n, size=K, replace=False)].copy()
        labels = np.full(n, -1)
        for _ in range(100):
            sims = X @ C.T
            new = np.argmax(sims, axis=1)  # first max wins ties
            if np.array_equal(new, labels):
                break
            labels = new
            for k in range(K):
                members = X[labels == k]
                if members.shape[0] == 0:
                    # re-seed an empty cluster with the worst-represented row
                    C[k] = X[int(np.argmin(np.max(sims, axis=1)))]
                    continue
                c = members.sum(axis=0)
                norm = np.linalg.norm(c)
                C[k] = c / norm if norm > 0 else c
        inertia = float((1.0 - (X @ C.T)[np.arange(n), labels]).sum())
        if inertia < best_inertia - 1e-12:
            best_inertia = inertia
            best_labels = labels
    return best_labels


def spectral_cluster(A: AdjacencyMatrix, K: int, tau="auto", rng=None) -> np.ndarray:
    """Community labels from spherical k-means on the row-normalized top-K
    eigenvectors of the regularized Laplacian D_tau^{-1/2} A D_tau^{-1/2}.

    ``tau="auto"`` uses the average degree.  ``rng`` drives the fixed
    k-means restarts (and the Lanczos start vector for large n); pass a
    seeded generator for reproducible labels.
    """
    n = A.n
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > n:
        raise ValueError("more clusters than nodes")
    if K == 1:
        return np.zeros(n, dtype=np.int64)
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(0))
    deg = A.degrees().astype(np.float64)
    tau = float(2.0 * A.m / n) if tau == "auto" else float(tau)
    d_tau = deg + tau
    if np.any(d_tau <= 0.0):
        raise EstimationError("tau = 0 with isolated nodes: Laplacian undefined")
    s = 1.0 / np.sqrt(d_tau)
    if n <= _CLUSTER_DENSE_CUTOFF or K >= n - 1:
        L = A.to_dense().astype(np.float64) * np.outer(s, s)
        w, V = np.linalg.eigh(L)
        U = V[:, np.argsort(-w, kind="stable")[:K]]
    else:
        Asp = A.to_scipy()
        rows = np.repeat(np.arange(n), np.diff(Asp.indptr))
        Lsp = Asp.copy()
        Lsp.data = Lsp.data * s[rows] * s[Asp.indices]
        v0 = rng.standard_normal(n)
        try:
            w, U = spla.eigsh(Lsp, k=K, which="LA", tol=1e-8, maxiter=10 * n, v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise EigenSolverError("spectral clustering eigensolver stalled",
                                   float("inf")) from exc
        U = U[:, np.argsort(-w, kind="stable")]
    norms = np.linalg.norm(U, axis=1)
    norms[norms == 0.0] = 1.0  # isolated nodes keep a zero embedding
    X = U / norms[:, None]
    return _spherical_kmeans(X, K, rng).astype(np.int64)


@dataclass(frozen=True)
class EstimatorSpec:
    """Recipe for fitting an edge-probability model to a network.

    family:
      - "chung_lu": degree MLE; ``p`` fixes the density, None estimates it.
      - "dcsbm" / "sbm": block estimators; ``labels`` fixes known communities,
        otherwise they are re-estimated by regularized spectral clustering
        with ``K`` communities on every fit.
      - "svd": rank-``K`` truncated eigendecomposition.
    """

    family: str
    p: float | None = None
    K: int | None = None
    labels: tuple | None = None
    tau: float | str = "auto"

    def __post_init__(self):
        if self.family not in ("chung_lu", "dcsbm", "sbm", "svd"):
            raise ValueError(f"unknown estimator family {self.family!r}")
        if self.family in ("dcsbm", "sbm") and self.labels is None and self.K is None:
            raise ValueError(f"{self.family} needs labels or K")
        if self.family == "svd" and self.K is None:
            raise ValueError("svd needs K")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))

    def fit(self, A: AdjacencyMatrix, rng: np.random.Generator):
        if self.family == "chung_lu":
            return estimate_chung_lu(A, "estimate" if self.p is None else self.p)
        if self.family == "svd":
            return estimate_spectral(A, self.K)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
        else:
            labels = spectral_cluster(A, self.K, tau=self.tau, rng=rng)
        if self.family == "dcsbm":
            return estimate_dcsbm(A, labels)
        return estimate_sbm(A, labels)

    def to_dict(self) -> dict:
        d = {"family": self.family}
        if self.p is not None:
            d["p"] = self.p
        if self.K is not None:
            d["K"] = self.K
        if self.labels is not None:
            d["labels"] = list(self.labels)
        if self.tau != "auto":
            d["tau"] = self.tau
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EstimatorSpec":
        return cls(
            family=d["family"],
            p=d.get("p"),
            K=d.get("K"),
            labels=tuple(d["labels"]) if d.get("labels") is not None else None,
            tau=d.get("tau", "auto"),
        )


def model_to_json(model) -> str:
    """Serialize model parameters (family tag + fields) for reproducibility."""
    if isinstance(model, ChungLuParams):
        doc = {"family": "chung_lu", "p": model.p, "theta": model.theta.tolist()}
    elif isinstance(model, DcsbmParams):
        doc = {
            "family": "dcsbm",
            "labels": model.labels.tolist(),
            "B": model.B.tolist(),
            "theta": model.theta.tolist(),
            "rho": model.rho,
        }
    elif isinstance(model, SpectralEstimate):
        doc = {
            "family": "svd",
            "K": model.K,
            "eigenvalues": model.eigenvalues.tolist(),
            "eigenvectors": model.eigenvectors.tolist(),
            "clip_count": model.clip_count,
        }
    elif isinstance(model, EdgeProbMatrix):
        doc = {"family": "matrix", "entries": model.entries.tolist()}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str):
    doc = json.loads(text)
    family = doc["family"]
    if family == "chung_lu":
        return ChungLuParams(p=doc["p"], theta=np.array(doc["theta"]))
    if family == "dcsbm":
        return DcsbmParams(
            labels=np.array(doc["labels"]),
            B=np.array(doc["B"]),
            theta=np.array(doc["theta"]),
            rho=doc["rho"],
        )
    if family == "svd":
        return SpectralEstimate(
            K=doc["K"],
            eigenvalues=np.array(doc["eigenvalues"]),
            eigenvectors=np.array(doc["eigenvectors"]),
            clip_count=doc["clip_count"],
        )
    if family == "matrix":
        return EdgeProbMatrix(np.array(doc["entries"]))
    raise ValueError(f"unknown model family {family!r}")
