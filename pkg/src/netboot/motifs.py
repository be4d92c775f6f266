"""Small fixed subgraphs (motifs): presets, labelings, densities.

A :class:`Motif` is the pattern whose copies are counted in a network.  The
labeling helpers enumerate the distinct ways a motif can sit on a labeled
vertex set (one entry per non-automorphic placement), which is what both the
counting oracle and the expectation evaluator iterate over.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

__all__ = ["Motif", "preset", "PRESET_NAMES"]

_M_DENSITY_CAP = 6


@dataclass(frozen=True)
class Motif:
    """Simple undirected pattern graph on vertices 0..n_nodes-1.

    ``root`` marks the designated vertex for rooted counts, or None.
    """

    n_nodes: int
    edges: tuple = ()
    root: int | None = None
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        v = self.n_nodes
        norm = []
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError("motif has a self-loop")
            if not (0 <= a < v and 0 <= b < v):
                raise ValueError("motif edge endpoint out of range")
            e = (min(a, b), max(a, b))
            if e in seen:
                raise ValueError(f"duplicate motif edge {e}")
            seen.add(e)
            norm.append(e)
        if v < 2 or not norm:
            raise ValueError("a motif needs at least 2 nodes and 1 edge")
        if self.root is not None and not (0 <= self.root < v):
            raise ValueError("root out of range")
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def v(self) -> int:
        return self.n_nodes

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def connected(self) -> bool:
        return _is_connected(self.n_nodes, self.edges)

    @property
    def m_density(self) -> float:
        """max e(H)/v(H) over subgraphs H with at least one edge."""
        if self.n_nodes > _M_DENSITY_CAP:
            raise ValueError(f"m_density supported only for v <= {_M_DENSITY_CAP}")
        best = 0.0
        for r in range(1, self.e + 1):
            for sub in itertools.combinations(self.edges, r):
                verts = {x for ed in sub for x in ed}
                best = max(best, len(sub) / len(verts))
        return best

    def rooted_at(self, root: int) -> "Motif":
        return Motif(self.n_nodes, self.edges, root=root, name=self.name)

    def unrooted(self) -> "Motif":
        return Motif(self.n_nodes, self.edges, root=None, name=self.name)

    def to_dict(self) -> dict:
        d = {"v": self.n_nodes, "edges": [list(e) for e in self.edges]}
        if self.root is not None:
            d["root"] = self.root
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Motif":
        return cls(d["v"], tuple(tuple(e) for e in d["edges"]), root=d.get("root"))

    def __repr__(self):
        tag = self.name or f"v={self.n_nodes},e={self.e}"
        if self.root is not None:
            return f"Motif({tag}, root={self.root})"
        return f"Motif({tag})"


def _is_connected(v, edges):
    if v == 1:
        return True
    adj = {i: set() for i in range(v)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == v


def _edge(root=None):
    return Motif(2, ((0, 1),), root=root, name="edge")


def _vshape(root=None):
    """Path on three nodes; node 0 is the center."""
    return Motif(3, ((0, 1), (0, 2)), root=root, name="vshape")


def _triangle(root=None):
    return Motif(3, ((0, 1), (0, 2), (1, 2)), root=root, name="triangle")


def _cycle4(root=None):
    return Motif(4, ((0, 1), (1, 2), (2, 3), (0, 3)), root=root, name="4-cycle")


def _clique4(root=None):
    return Motif(
        4, tuple(itertools.combinations(range(4), 2)), root=root, name="4-clique"
    )


_PRESETS = {
    "edge": _edge,
    "vshape": _vshape,
    "triangle": _triangle,
    "4-cycle": _cycle4,
    "4-clique": _clique4,
}
PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, root: int | None = None) -> Motif:
    """Named motif: edge, vshape, triangle, 4-cycle, 4-clique."""
    try:
        return _PRESETS[name](root)
    except KeyError:
        raise ValueError(f"unknown motif preset {name!r}") from None


@lru_cache(maxsize=64)
def _labelings_cached(v, edges):
    out = set()
    for perm in itertools.permutations(range(v)):
        out.add(tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b]))
                             for a, b in edges)))
    return tuple(sorted(out))


def labelings(motif: Motif):
    """Distinct edge sets of copies of the motif on positions 0..v-1.

    One entry per non-automorphic placement: |result| = v! / |Aut|.
    """
    return _labelings_cached(motif.n_nodes, motif.edges)


@lru_cache(maxsize=64)
def _rooted_labelings_cached(v, edges, root):
    out = set()
    others = [x for x in range(v) if x != root]
    for perm in itertools.permutations(range(1, v)):
        mapping = {root: 0}
        mapping.update(zip(others, perm))
        out.add(tuple(sorted((min(mapping[a], mapping[b]), max(mapping[a], mapping[b]))
                             for a, b in edges)))
    return tuple(sorted(out))


def rooted_labelings(motif: Motif):
    """Distinct edge sets of root-preserving copies, root at position 0."""
    if motif.root is None:
        raise ValueError("motif has no root")
    return _rooted_labelings_cached(motif.n_nodes, motif.edges, motif.root)


def canonical_form(motif: Motif):
    """Smallest labeling; equal canonical forms = isomorphic motifs."""
    return labelings(motif)[0]


def rooted_canonical_form(motif: Motif):
    return rooted_labelings(motif)[0]
