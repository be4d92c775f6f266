"""Graph and edge-probability-matrix types, Bernoulli sampling, RNG streams, I/O.

The two central types are :class:`EdgeProbMatrix` (a fixed symmetric matrix of
edge probabilities with zero diagonal) and :class:`AdjacencyMatrix` (one binary
realization).  Sampling takes an explicit RNG stream derived from a
:class:`SeedSpec`, so concurrent replicate sampling is reproducible independent
of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import EdgeListParseError

__all__ = [
    "SeedSpec",
    "EdgeProbMatrix",
    "AdjacencyMatrix",
    "sample_network",
    "expected_degree",
    "read_edge_list",
    "write_edge_list",
]

# Stream levels used by the bootstrap engine.  Anything may derive further
# levels; these constants just keep the derivations from colliding.
LEVEL_FIT = 0  # estimator randomness for the observed network
LEVEL_MU = 1  # inner Monte Carlo for mu(P_hat)
LEVEL_ONE = 2  # first-level bootstrap replicates
LEVEL_TWO = 3  # second-level inner Monte Carlo, keyed by replicate
LEVEL_MODEL = 4  # model construction (theta draws)
LEVEL_TRUTH = 5  # reference Monte Carlo for the true mu(P)


@dataclass(frozen=True)
class SeedSpec:
    """Root seed plus a pure derivation of independent child streams.

    Streams are derived with numpy's ``SeedSequence`` spawning mechanism: the
    pair ``(level, index)`` (plus optional further indices) becomes the spawn
    key, so distinct keys yield independent, reproducible generators no matter
    which thread or process asks for them.
    """

    root_seed: int

    def __post_init__(self):
        if not 0 <= int(self.root_seed) < 2**64:
            raise ValueError("root_seed must be an unsigned 64-bit integer")

    def stream(self, level: int, *index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.root_seed), spawn_key=(int(level), *map(int, index))
        )
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *index: int) -> "SeedSpec":
        """A derived SeedSpec whose own streams are independent of this one's."""
        ss = np.random.SeedSequence(
            entropy=int(self.root_seed), spawn_key=tuple(map(int, index))
        )
        return SeedSpec(int(ss.generate_state(1, np.uint64)[0]))


@lru_cache(maxsize=8)
def _triu_indices(n: int):
    iu, ju = np.triu_indices(n, 1)
    return iu.astype(np.int32), ju.astype(np.int32)


class EdgeProbMatrix:
    """Symmetric n x n matrix of edge probabilities, zero diagonal.

    Parameters
    ----------
    entries : array_like
        Symmetric matrix with values in [0, 1] and zero diagonal.
    clip_count : int
        Number of unordered pairs that were clipped into [0, 1] when this
        matrix was materialized from a model (0 for directly constructed
        matrices).
    """

    __slots__ = ("entries", "n", "clip_count", "_upper", "_p_max")

    def __init__(self, entries, clip_count: int = 0):
        P = np.asarray(entries, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("entries must be a square matrix")
        if not np.array_equal(P, P.T):
            raise ValueError("entries must be symmetric")
        if np.any(np.diagonal(P) != 0.0):
            raise ValueError("diagonal must be zero")
        if P.size and (P.min() < 0.0 or P.max() > 1.0):
            raise ValueError("entries must lie in [0, 1]")
        self.entries = P
        self.entries.setflags(write=False)
        self.n = P.shape[0]
        self.clip_count = int(clip_count)
        self._upper = None
        self._p_max = None

    def upper(self) -> np.ndarray:
        """Upper-triangle entries in row-major (lexicographic) pair order."""
        if self._upper is None:
            iu, ju = _triu_indices(self.n)
            self._upper = self.entries[iu, ju]
            self._p_max = float(self._upper.max()) if self._upper.size else 0.0
        return self._upper

    @property
    def p_max(self) -> float:
        self.upper()
        return self._p_max

    def __eq__(self, other):
        return isinstance(other, EdgeProbMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __repr__(self):
        return f"EdgeProbMatrix(n={self.n})"


def expected_degree(P: EdgeProbMatrix) -> float:
    """Average expected degree: (1/n) * sum of all entries."""
    return float(P.entries.sum() / P.n)


class AdjacencyMatrix:
    """Symmetric binary graph with no self-loops.

    Stored as the lexicographically sorted edge array (i < j) from which
    sorted adjacency lists (CSR form) are derived on demand; ``m`` is the
    number of edges.  Instances are immutable and safe to share across
    threads.
    """

    __slots__ = ("n", "m", "ei", "ej", "_deg", "_csr")

    def __init__(self, n: int, ei, ej, _sorted: bool = False):
        ei = np.asarray(ei, dtype=np.int32)
        ej = np.asarray(ej, dtype=np.int32)
        if ei.shape != ej.shape or ei.ndim != 1:
            raise ValueError("ei and ej must be 1-d arrays of equal length")
        if ei.size:
            if ei.min() < 0 or max(ei.max(), ej.max()) >= n:
                raise ValueError("node index out of range")
            if np.any(ei == ej):
                raise ValueError("self-loops are not allowed")
        if not _sorted and ei.size:
            lo = np.minimum(ei, ej)
            hi = np.maximum(ei, ej)
            order = np.lexsort((hi, lo))
            ei, ej = lo[order], hi[order]
            keep = np.ones(ei.size, bool)
            keep[1:] = (ei[1:] != ei[:-1]) | (ej[1:] != ej[:-1])
            ei, ej = ei[keep], ej[keep]
        self.n = int(n)
        self.m = int(ei.size)
        self.ei = ei
        self.ej = ej
        self.ei.setflags(write=False)
        self.ej.setflags(write=False)
        self._deg = None
        self._csr = None

    @classmethod
    def from_dense(cls, M) -> "AdjacencyMatrix":
        M = np.asarray(M)
        if not np.array_equal(M, M.T):
            raise ValueError("matrix must be symmetric")
        ei, ej = np.nonzero(np.triu(M, 1))
        return cls(M.shape[0], ei, ej, _sorted=True)

    def degrees(self) -> np.ndarray:
        if self._deg is None:
            self._deg = _kernels.degrees(self.n, self.ei, self.ej)
            self._deg.setflags(write=False)
        return self._deg

    def neighbors(self):
        """(indptr, indices): sorted adjacency lists in CSR layout."""
        if self._csr is None:
            self._csr = _kernels.csr_arrays(self.n, self.ei, self.ej)
        return self._csr

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=np.uint8)
        A[self.ei, self.ej] = 1
        A[self.ej, self.ei] = 1
        return A

    def to_scipy(self):
        import scipy.sparse as sp

        indptr, indices = self.neighbors()
        data = np.ones(indices.shape[0], dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def has_edge(self, i: int, j: int) -> bool:
        indptr, indices = self.neighbors()
        lo, hi = indptr[i], indptr[i + 1]
        k = np.searchsorted(indices[lo:hi], j)
        return k < hi - lo and indices[lo + k] == j

    def __eq__(self, other):
        return (
            isinstance(other, AdjacencyMatrix)
            and self.n == other.n
            and np.array_equal(self.ei, other.ei)
            and np.array_equal(self.ej, other.ej)
        )

    def __repr__(self):
        return f"AdjacencyMatrix(n={self.n}, m={self.m})"


# Above this edge-probability ceiling plain dense scanning beats the
# geometric-skip sampler (which draws ~2*E*p_max uniforms).
_THIN_CUTOFF = 0.25


def sample_network(P: EdgeProbMatrix, rng: np.random.Generator) -> AdjacencyMatrix:
    """Draw one network: each pair {i, j} is an edge with probability P_ij.

    Deterministic given the generator state.  Pairs with p_max below the
    cutoff are sampled by geometric skips over the flattened upper triangle
    followed by acceptance thinning, which is exact and touches O(E * p_max)
    random numbers instead of E.
    """
    n = P.n
    iu, ju = _triu_indices(n)
    probs = P.upper()
    E = probs.shape[0]
    p_max = P.p_max
    if E == 0 or p_max == 0.0:
        idx = np.empty(0, dtype=np.int64)
    elif p_max > _THIN_CUTOFF:
        idx = np.flatnonzero(rng.random(E) < probs)
    else:
        idx = _sample_thinned(rng, probs, p_max, E)
    return AdjacencyMatrix(n, iu.take(idx), ju.take(idx), _sorted=True)


def _sample_thinned(rng, probs, p_max, E):
    # candidate positions = hits of iid Bernoulli(p_max) via geometric gaps
    log1m = math.log1p(-p_max)
    c_est = E * p_max
    batch = int(c_est + 6.0 * math.sqrt(c_est) + 16.0)
    gaps = np.floor(np.log1p(-rng.random(batch)) / log1m).astype(np.int64) + 1
    pos = np.cumsum(gaps) - 1
    k = int(np.searchsorted(pos, E))
    while k == batch:  # slack exhausted; vanishingly rare
        more = np.floor(np.log1p(-rng.random(batch)) / log1m).astype(np.int64) + 1
        pos = np.concatenate([pos, pos[-1] + np.cumsum(more)])
        batch = pos.shape[0]
        k = int(np.searchsorted(pos, E))
    pos = pos[:k]
    accept = rng.random(k) * p_max < probs[pos]
    return pos[accept]


def read_edge_list(text: str):
    """Parse a whitespace-separated edge list.

    Node labels are arbitrary strings, mapped to 0..n-1 in order of first
    appearance.  Duplicate edges and self-loops are tolerated and dropped;
    lines starting with '#' and blank lines are ignored.

    Returns
    -------
    (AdjacencyMatrix, list of str)
        The graph and the label for each node index.

    Raises
    ------
    EdgeListParseError
        If a non-comment line does not contain exactly two tokens.
    """
    labels: dict[str, int] = {}
    ei: list[int] = []
    ej: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, f"expected two labels, got {len(parts)}")
        a = labels.setdefault(parts[0], len(labels))
        b = labels.setdefault(parts[1], len(labels))
        if a == b:
            continue
        ei.append(a)
        ej.append(b)
    n = len(labels)
    A = AdjacencyMatrix(n, np.array(ei, np.int32), np.array(ej, np.int32))
    return A, list(labels)


def write_edge_list(A: AdjacencyMatrix, labels=None) -> str:
    """Serialize edges (i < j, sorted) one per line; inverse of read on
    canonical graphs (deduplicated, loop-free, first-appearance labels)."""
    if labels is None:
        labels = [str(i) for i in range(A.n)]
    lines = [f"{labels[i]} {labels[j]}" for i, j in zip(A.ei, A.ej)]
    return "\n".join(lines) + ("\n" if lines else "")
