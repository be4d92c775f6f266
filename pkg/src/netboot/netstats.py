"""Network statistics T(A) and their closed-form moments under a model.

Three layers live here:

* graph statistics (``evaluate`` over a small fixed menu of global and local
  statistics, including exact motif counts with fast specialized kernels and a
  brute-force enumeration oracle);
* expected motif counts mu_R(P) under a fixed edge-probability matrix,
  specialized for the triangle family and generic up to 4-node motifs;
* the exact variance of the global triangle count and the symbolic
  (n, p)-exponent analysis of motif-count variances via overlap subgraphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, motifs
from .errors import UndefinedStatisticError, UnsupportedMotifError
from .graphs import AdjacencyMatrix, EdgeProbMatrix
from .motifs import Motif

__all__ = [
    "StatisticSpec",
    "evaluate",
    "subgraph_count",
    "rooted_subgraph_count",
    "count_by_enumeration",
    "rooted_count_by_enumeration",
    "expected_subgraph_count",
    "triangle_count_variance",
    "variance_order",
    "VarianceOrder",
    "betweenness_scores",
]

_COUNT_CAP = 5  # exact counting
_MU_CAP = 4  # exact expectation

KINDS = (
    "average_degree",
    "subgraph_count",
    "rooted_subgraph_count",
    "triangle_density",
    "transitivity",
    "local_clustering",
    "assortativity_degree",
    "average_path_length",
    "diameter",
    "betweenness",
    "closeness",
)
_NEEDS_MOTIF = {"subgraph_count", "rooted_subgraph_count"}
_NEEDS_NODE = {"rooted_subgraph_count", "local_clustering", "betweenness", "closeness"}
_ANALYTIC_MU = {
    "average_degree",
    "subgraph_count",
    "rooted_subgraph_count",
    "triangle_density",
}


@dataclass(frozen=True)
class StatisticSpec:
    """A statistic T: graphs -> reals, identified by kind plus parameters."""

    kind: str
    motif: Motif | None = None
    node: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown statistic kind {self.kind!r}")
        if self.kind in _NEEDS_MOTIF and self.motif is None:
            raise ValueError(f"{self.kind} requires a motif")
        if self.kind in _NEEDS_NODE and self.node is None:
            raise ValueError(f"{self.kind} requires a node index")
        if self.kind == "rooted_subgraph_count" and self.motif.root is None:
            raise ValueError("rooted_subgraph_count requires a rooted motif")
        if self.kind == "subgraph_count" and self.motif.root is not None:
            raise ValueError("subgraph_count requires an unrooted motif")

    @property
    def analytic_mu_available(self) -> bool:
        return self.kind in _ANALYTIC_MU

    def label(self) -> str:
        bits = [self.kind]
        if self.motif is not None:
            bits.append(self.motif.name or f"v{self.motif.v}e{self.motif.e}")
        if self.node is not None:
            bits.append(f"@{self.node}")
        return ":".join(bits)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.motif is not None:
            d["motif"] = self.motif.name or self.motif.to_dict()
        if self.node is not None:
            d["node"] = self.node
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StatisticSpec":
        motif = d.get("motif")
        if isinstance(motif, str):
            root = d.get("node") if d["kind"] == "rooted_subgraph_count" else None
            motif = motifs.preset(motif, root=0 if root is not None else None)
        elif isinstance(motif, dict):
            motif = Motif.from_dict(motif)
        return cls(d["kind"], motif=motif, node=d.get("node"))


def _check_node(A, i):
    if not 0 <= i < A.n:
        raise ValueError(f"node {i} out of range for n={A.n}")


def evaluate(stat: StatisticSpec, A: AdjacencyMatrix) -> float:
    """Evaluate the statistic on one graph.

    Raises
    ------
    UndefinedStatisticError
        For statistics undefined on this graph (clustering at a node of
        degree < 2, path statistics on an edgeless graph, degenerate
        assortativity, transitivity with no 2-paths).
    """
    if A.n == 0:
        raise UndefinedStatisticError("empty graph")
    return _EVALUATORS[stat.kind](stat, A)


def _eval_average_degree(stat, A):
    return 2.0 * A.m / A.n


def _eval_subgraph_count(stat, A):
    return float(subgraph_count(A, stat.motif))


def _eval_rooted_count(stat, A):
    _check_node(A, stat.node)
    return float(rooted_subgraph_count(A, stat.motif, stat.node))


def _eval_triangle_density(stat, A):
    if A.n < 3:
        raise UndefinedStatisticError("triangle density needs n >= 3")
    tri = _kernels.triangle_count(A.n, A.ei, A.ej)
    return tri / math.comb(A.n, 3)


def _eval_transitivity(stat, A):
    tri, paths = _kernels.triangles_and_paths(A.n, A.ei, A.ej)
    if paths == 0:
        raise UndefinedStatisticError("no connected 2-paths")
    return 3.0 * tri / paths


def _eval_local_clustering(stat, A):
    i = stat.node
    _check_node(A, i)
    d = int(A.degrees()[i])
    if d < 2:
        raise UndefinedStatisticError(f"local clustering undefined at degree-{d} node {i}")
    tri = _kernels.rooted_triangle_count(A.n, A.ei, A.ej, i)
    return tri / (d * (d - 1) / 2.0)


def _eval_assortativity(stat, A):
    if A.m == 0:
        raise UndefinedStatisticError("assortativity undefined on an edgeless graph")
    deg = A.degrees().astype(np.float64)
    x = np.concatenate([deg[A.ei], deg[A.ej]])
    y = np.concatenate([deg[A.ej], deg[A.ei]])
    sx = x.std()
    if sx == 0.0:
        raise UndefinedStatisticError("assortativity undefined: all endpoint degrees equal")
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * y.std()))


def _largest_component(A):
    import scipy.sparse.csgraph as csgraph

    ncomp, labels = csgraph.connected_components(A.to_scipy(), directed=False)
    if ncomp == 1:
        return np.arange(A.n)
    sizes = np.bincount(labels, minlength=ncomp)
    return np.flatnonzero(labels == int(np.argmax(sizes)))


def _distances_within(A, nodes):
    import scipy.sparse.csgraph as csgraph

    sub = A.to_scipy()[np.ix_(nodes, nodes)].tocsr()
    return csgraph.shortest_path(sub, method="D", directed=False, unweighted=True)


def _eval_average_path_length(stat, A):
    if A.m == 0:
        raise UndefinedStatisticError("path statistics undefined on an edgeless graph")
    nodes = _largest_component(A)
    D = _distances_within(A, nodes)
    k = len(nodes)
    return float(D[np.triu_indices(k, 1)].sum() / (k * (k - 1) / 2))


def _eval_diameter(stat, A):
    if A.m == 0:
        raise UndefinedStatisticError("path statistics undefined on an edgeless graph")
    nodes = _largest_component(A)
    D = _distances_within(A, nodes)
    return float(D.max())


def _eval_betweenness(stat, A):
    _check_node(A, stat.node)
    return float(betweenness_scores(A)[stat.node])


def _eval_closeness(stat, A):
    import scipy.sparse.csgraph as csgraph

    i = stat.node
    _check_node(A, i)
    d = csgraph.shortest_path(
        A.to_scipy(), method="D", directed=False, unweighted=True, indices=[i]
    )[0]
    reach = np.isfinite(d)
    k = int(reach.sum())  # component size including i
    if k <= 1:
        return 0.0
    return (k - 1) / float(d[reach].sum())


_EVALUATORS = {
    "average_degree": _eval_average_degree,
    "subgraph_count": _eval_subgraph_count,
    "rooted_subgraph_count": _eval_rooted_count,
    "triangle_density": _eval_triangle_density,
    "transitivity": _eval_transitivity,
    "local_clustering": _eval_local_clustering,
    "assortativity_degree": _eval_assortativity,
    "average_path_length": _eval_average_path_length,
    "diameter": _eval_diameter,
    "betweenness": _eval_betweenness,
    "closeness": _eval_closeness,
}


def betweenness_scores(A: AdjacencyMatrix) -> np.ndarray:
    """Brandes betweenness for every node (unnormalized, pairs counted once)."""
    n = A.n
    indptr, indices = A.neighbors()
    bc = np.zeros(n)
    dist = np.empty(n, np.int64)
    sigma = np.empty(n, np.float64)
    delta = np.empty(n, np.float64)
    for s in range(n):
        dist.fill(-1)
        sigma.fill(0.0)
        delta.fill(0.0)
        dist[s] = 0
        sigma[s] = 1.0
        order = [s]
        preds: dict[int, list[int]] = {}
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            dv = dist[v]
            for w in indices[indptr[v] : indptr[v + 1]]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds.setdefault(int(w), []).append(v)
        for w in reversed(order[1:]):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds.get(int(w), ()):
                delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc / 2.0


# ---------------------------------------------------------------------------
# exact motif counting


def _canon(motif):
    return motifs.canonical_form(motif)


_EDGE_CANON = _canon(motifs.preset("edge"))
_VSHAPE_CANON = _canon(motifs.preset("vshape"))
_TRIANGLE_CANON = _canon(motifs.preset("triangle"))
_R_TRIANGLE_CANON = motifs.rooted_canonical_form(motifs.preset("triangle", root=0))
_R_EDGE_CANON = motifs.rooted_canonical_form(motifs.preset("edge", root=0))
_R_VCENTER_CANON = motifs.rooted_canonical_form(motifs.preset("vshape", root=0))
_R_VLEAF_CANON = motifs.rooted_canonical_form(motifs.preset("vshape", root=1))


def subgraph_count(A: AdjacencyMatrix, R: Motif) -> int:
    """Exact number of copies of R in A, each copy counted once.

    Edge, V-shape and triangle use specialized kernels; any other motif with
    at most 5 nodes goes through subset enumeration.
    """
    if R.root is not None:
        raise ValueError("use rooted_subgraph_count for rooted motifs")
    c = _canon(R)
    if c == _EDGE_CANON:
        return A.m
    if c == _VSHAPE_CANON:
        deg = A.degrees()
        return int((deg * (deg - 1) // 2).sum())
    if c == _TRIANGLE_CANON:
        return int(_kernels.triangle_count(A.n, A.ei, A.ej))
    return count_by_enumeration(A, R)


def rooted_subgraph_count(A: AdjacencyMatrix, R: Motif, i: int) -> int:
    """Copies of R containing node i under a root-preserving isomorphism."""
    if R.root is None:
        raise ValueError("motif must carry a root")
    _check_node(A, i)
    c = motifs.rooted_canonical_form(R)
    if c == _R_EDGE_CANON:
        return int(A.degrees()[i])
    if c == _R_TRIANGLE_CANON:
        return int(_kernels.rooted_triangle_count(A.n, A.ei, A.ej, i))
    if c == _R_VCENTER_CANON:
        d = int(A.degrees()[i])
        return d * (d - 1) // 2
    return rooted_count_by_enumeration(A, R, i)


def count_by_enumeration(A: AdjacencyMatrix, R: Motif) -> int:
    """Brute-force oracle: scan all v-subsets and match placements."""
    v = R.n_nodes
    if v > _COUNT_CAP:
        raise UnsupportedMotifError(f"exact counting capped at v <= {_COUNT_CAP}")
    labs = motifs.labelings(R.unrooted() if R.root is not None else R)
    edge_set = set(zip(A.ei.tolist(), A.ej.tolist()))
    count = 0
    for J in itertools.combinations(range(A.n), v):
        for lab in labs:
            for a, b in lab:
                if (J[a], J[b]) not in edge_set:
                    break
            else:
                count += 1
    return count


def rooted_count_by_enumeration(A: AdjacencyMatrix, R: Motif, i: int) -> int:
    v = R.n_nodes
    if v > _COUNT_CAP:
        raise UnsupportedMotifError(f"exact counting capped at v <= {_COUNT_CAP}")
    labs = motifs.rooted_labelings(R)
    edge_set = set(zip(A.ei.tolist(), A.ej.tolist()))
    others = [x for x in range(A.n) if x != i]
    count = 0
    for J in itertools.combinations(others, v - 1):
        verts = (i,) + J
        for lab in labs:
            for a, b in lab:
                x, y = verts[a], verts[b]
                if x > y:
                    x, y = y, x
                if (x, y) not in edge_set:
                    break
            else:
                count += 1
    return count


# ---------------------------------------------------------------------------
# expected counts mu_R(P)


def expected_subgraph_count(
    P: EdgeProbMatrix, R: Motif, root_node: int | None = None
) -> float:
    """Exact mu_R(P): sum over all placements of the product of edge probs.

    ``root_node`` selects the rooted variant (requires a rooted motif).
    Triangle-family motifs use O(n^2)/O(n^3) closed forms; other motifs with
    at most 4 nodes go through placement enumeration.
    """
    M = P.entries
    if root_node is None:
        if R.root is not None:
            raise ValueError("rooted motif requires root_node")
        c = _canon(R)
        if c == _EDGE_CANON:
            return float(M.sum() / 2.0)
        if c == _VSHAPE_CANON:
            r = M.sum(axis=1)
            q = (M * M).sum(axis=1)
            return float(((r * r - q) / 2.0).sum())
        if c == _TRIANGLE_CANON:
            return float(((M @ M) * M).sum() / 6.0)
        return _mu_by_enumeration(M, R)
    if R.root is None:
        raise ValueError("root_node given but motif has no root")
    i = int(root_node)
    if not 0 <= i < P.n:
        raise ValueError(f"node {i} out of range")
    c = motifs.rooted_canonical_form(R)
    if c == _R_EDGE_CANON:
        return float(M[i].sum())
    if c == _R_TRIANGLE_CANON:
        return float(M[i] @ M @ M[i] / 2.0)
    if c == _R_VCENTER_CANON:
        r = M[i].sum()
        q = (M[i] * M[i]).sum()
        return float((r * r - q) / 2.0)
    if c == _R_VLEAF_CANON:
        r = M.sum(axis=1)
        return float((M[i] * (r - M[i])).sum())
    return _mu_rooted_by_enumeration(M, R, i)


def _mu_by_enumeration(M, R):
    v = R.n_nodes
    if v > _MU_CAP:
        raise UnsupportedMotifError(f"exact expectation capped at v <= {_MU_CAP}")
    labs = motifs.labelings(R)
    total = 0.0
    for J in itertools.combinations(range(M.shape[0]), v):
        for lab in labs:
            prod = 1.0
            for a, b in lab:
                prod *= M[J[a], J[b]]
                if prod == 0.0:
                    break
            total += prod
    return total


def _mu_rooted_by_enumeration(M, R, i):
    v = R.n_nodes
    if v > _MU_CAP:
        raise UnsupportedMotifError(f"exact expectation capped at v <= {_MU_CAP}")
    labs = motifs.rooted_labelings(R)
    others = [x for x in range(M.shape[0]) if x != i]
    total = 0.0
    for J in itertools.combinations(others, v - 1):
        verts = (i,) + J
        for lab in labs:
            prod = 1.0
            for a, b in lab:
                prod *= M[verts[a], verts[b]]
                if prod == 0.0:
                    break
            total += prod
    return total


# O(n) closed forms for unclipped rank-1 (p * theta_i * theta_j) models; used
# by the bootstrap engine to avoid n^3 work in inner loops.


def _mu_triangle_rank1(p: float, theta: np.ndarray) -> float:
    x = theta * theta
    s1 = x.sum()
    s2 = (x * x).sum()
    s3 = (x * x * x).sum()
    e3 = (s1**3 - 3.0 * s1 * s2 + 2.0 * s3) / 6.0
    return p**3 * float(e3)


def _mu_rooted_triangle_rank1(p: float, theta: np.ndarray, i: int) -> float:
    x = theta * theta
    s1 = x.sum() - x[i]
    s2 = (x * x).sum() - x[i] * x[i]
    e2 = (s1 * s1 - s2) / 2.0
    return p**3 * float(x[i] * e2)


def _mu_edge_rank1(p: float, theta: np.ndarray) -> float:
    s1 = theta.sum()
    s2 = (theta * theta).sum()
    return p * float(s1 * s1 - s2) / 2.0


# ---------------------------------------------------------------------------
# exact triangle-count variance


def triangle_count_variance(P: EdgeProbMatrix) -> float:
    """Exact Var(T_triangle) under independent edges with matrix P.

    Sum of per-triple Bernoulli-product variances plus the covariance of every
    pair of triples sharing one edge (triples sharing no edge are
    independent).
    """
    M = P.entries
    M2 = M * M
    mu = ((M @ M) * M).sum() / 6.0
    mu_sq = ((M2 @ M2) * M2).sum() / 6.0  # sum of squared triple products
    S = M @ M
    Q = M2 @ M2
    iu = np.triu_indices(P.n, 1)
    shared = (M[iu] * (1.0 - M[iu]) * (S[iu] ** 2 - Q[iu])).sum()
    return float(mu - mu_sq + shared)


# ---------------------------------------------------------------------------
# variance order via overlap subgraphs


@dataclass(frozen=True)
class VarianceOrder:
    """Dominant (n, p) exponents of Var(T_R) and the overlap achieving them.

    ``candidates`` lists the exponent pair of every edge-induced overlap
    subgraph (deduplicated).  The reported leading pair maximizes the n
    exponent, breaking ties by the smaller p exponent; other orderings apply
    in specific sparsity regimes and can be recovered from ``candidates``.
    """

    leading_overlap: Motif
    n_exponent: int
    p_exponent: int
    candidates: tuple


def variance_order(R: Motif, rooted: bool = False) -> VarianceOrder:
    if R.n_nodes > 6:
        raise UnsupportedMotifError("variance order capped at v <= 6")
    if rooted and R.root is None:
        raise ValueError("rooted variance order requires a rooted motif")
    v, e = R.n_nodes, R.e
    best = None
    best_sub = None
    pairs = set()
    for r in range(1, e + 1):
        for sub in itertools.combinations(R.edges, r):
            verts = {x for ed in sub for x in ed}
            if rooted:
                verts = verts | {R.root}
                pair = (2 * v - 1 - len(verts), 2 * e - r)
            else:
                pair = (2 * v - len(verts), 2 * e - r)
            pairs.add(pair)
            key = (pair[0], -pair[1])
            if best is None or key > best:
                best = key
                best_sub = (sub, frozenset(verts))
    sub, verts = best_sub
    relabel = {orig: k for k, orig in enumerate(sorted(verts))}
    overlap = Motif(
        len(verts),
        tuple((relabel[a], relabel[b]) for a, b in sub),
        root=relabel[R.root] if rooted else None,
    )
    n_exp = best[0]
    p_exp = -best[1]
    return VarianceOrder(overlap, n_exp, p_exp, tuple(sorted(pairs, reverse=True)))


def plugin_variance_exponents(R: Motif, rooted: bool = False) -> tuple:
    """(n, p) exponents of Var(mu_R(P_hat)) under the degree-propensity MLE."""
    v, e = R.n_nodes, R.e
    if rooted:
        return (2 * v - 3, 2 * e - 1)
    return (2 * v - 2, 2 * e - 1)
