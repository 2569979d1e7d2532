"""Immutable weighted undirected graphs in compressed adjacency form.

The :class:`Graph` type is the single source of truth for node count,
edge count and edge weights.  Weights are strictly positive conductances;
self-loops are never stored and duplicate edges are merged by summing
their weights (conductances in parallel add).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import CapacityError, DomainError, EdgeListParseError

__all__ = [
    "Graph",
    "load_edge_list",
    "largest_connected_component",
    "laplacian",
    "incidence_and_weights",
    "insert_noise_edges",
]


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph stored as sorted per-node adjacency arrays.

    Attributes
    ----------
    indptr, indices, weights
        CSR-style adjacency: the neighbors of node ``u`` are
        ``indices[indptr[u]:indptr[u+1]]`` with matching ``weights``.
        Every edge appears twice (once per endpoint) with equal weight.
    node_labels
        Original external identifier of each node, preserved across
        id compaction and component extraction.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    node_labels: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.node_labels is None:
            object.__setattr__(self, "node_labels", np.arange(self.n, dtype=np.int64))
        for arr in (self.indptr, self.indices, self.weights, self.node_labels):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def m(self) -> int:
        return self.indices.size // 2

    def degrees(self) -> np.ndarray:
        """Weighted degree of every node (row sums of the adjacency)."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        return np.bincount(src, weights=self.weights, minlength=self.n)

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs, _ = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        return pos < nbrs.size and nbrs[pos] == v

    def edge_array(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edges as (u, v, w) with u < v, sorted by (u, v).

        This is the canonical deterministic edge enumeration used for
        incidence matrices and file output.
        """
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return src[keep], self.indices[keep], self.weights[keep]

    def adjacency_matrix(self) -> sp.csr_matrix:
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        return sp.csr_matrix(
            (self.weights, (src, self.indices)), shape=(self.n, self.n)
        )

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        ncomp, _ = connected_components(self.adjacency_matrix(), directed=False)
        return ncomp == 1

    @staticmethod
    def from_edges(
        u: Sequence[int],
        v: Sequence[int],
        w: Sequence[float] | None = None,
        n: int | None = None,
        node_labels: np.ndarray | None = None,
    ) -> "Graph":
        """Build a graph from parallel endpoint arrays.

        Self-loops are dropped, duplicate undirected edges are merged by
        summing their weights, and the adjacency is symmetrized.  Raises
        :class:`DomainError` on nonpositive weights.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if w is None:
            w = np.ones(u.size)
        else:
            w = np.asarray(w, dtype=np.float64)
        if u.size != v.size or u.size != w.size:
            raise DomainError("endpoint and weight arrays must have equal length")
        if u.size and (np.any(w <= 0) or not np.all(np.isfinite(w))):
            raise DomainError("edge weights must be finite and strictly positive")

        loops = u == v
        if loops.any():
            u, v, w = u[~loops], v[~loops], w[~loops]
        if n is None:
            n = int(max(u.max(initial=-1), v.max(initial=-1)) + 1)
        if u.size and (u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n):
            raise DomainError("node ids out of range")

        # Both directions, then merge duplicates by summing weights.
        au = np.r_[u, v]
        av = np.r_[v, u]
        aw = np.r_[w, w]
        order = np.lexsort((av, au))
        au, av, aw = au[order], av[order], aw[order]
        if au.size:
            new = np.r_[True, (au[1:] != au[:-1]) | (av[1:] != av[:-1])]
            starts = np.nonzero(new)[0]
            aw = np.add.reduceat(aw, starts)
            au, av = au[starts], av[starts]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, au + 1, 1)
        indptr = np.cumsum(indptr)
        return Graph(indptr=indptr, indices=av, weights=aw, node_labels=node_labels)


def load_edge_list(stream: IO[str] | Iterable[str], one_indexed: bool = False) -> Graph:
    """Read a whitespace-separated edge list into a :class:`Graph`.

    Each non-comment line is ``u v`` or ``u v w`` with ``w > 0``; a missing
    weight defaults to 1.  Lines starting with ``#`` or ``%`` and blank
    lines are skipped.  Self-loops are dropped, duplicate edges merge by
    weight summation, and edge direction is ignored.  Node ids need not be
    contiguous: they are compacted and the original ids are kept as
    ``node_labels``.

    Raises
    ------
    EdgeListParseError
        for malformed lines (reported with their line number).
    DomainError
        for nonpositive weights.
    """
    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    min_id = 1 if one_indexed else 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(lineno, f"expected 2 or 3 fields, got {len(parts)}")
        try:
            u = int(parts[0])
            v = int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"invalid node id in {line!r}") from None
        if u < min_id or v < min_id:
            raise EdgeListParseError(lineno, f"node id below {min_id} in {line!r}")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise EdgeListParseError(lineno, f"invalid weight in {line!r}") from None
            if not np.isfinite(w):
                raise EdgeListParseError(lineno, f"non-finite weight in {line!r}")
            if w <= 0:
                raise DomainError(f"line {lineno}: weight must be positive, got {w}")
        else:
            w = 1.0
        if u == v:
            continue  # self-loops are ignored
        us.append(u)
        vs.append(v)
        ws.append(w)

    if not us:
        empty = np.zeros(0, dtype=np.int64)
        return Graph(
            indptr=np.zeros(1, dtype=np.int64),
            indices=empty,
            weights=np.zeros(0),
            node_labels=empty,
        )

    labels = np.unique(np.r_[np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)])
    cu = np.searchsorted(labels, us)
    cv = np.searchsorted(labels, vs)
    return Graph.from_edges(cu, cv, ws, n=labels.size, node_labels=labels)


def largest_connected_component(g: Graph) -> tuple[Graph, dict[int, int]]:
    """Extract the largest connected component of ``g``.

    Returns the induced subgraph together with the mapping from old node
    ids to new ids.  Ties between equal-size components are broken in
    favor of the component containing the smallest original node label.
    """
    if g.n == 0:
        raise DomainError("cannot extract a component of an empty graph")
    ncomp, comp = connected_components(g.adjacency_matrix(), directed=False)
    if ncomp == 1:
        return g, {i: i for i in range(g.n)}
    sizes = np.bincount(comp, minlength=ncomp)
    best_size = sizes.max()
    candidates = np.nonzero(sizes == best_size)[0]
    if candidates.size == 1:
        chosen = candidates[0]
    else:
        min_label = [g.node_labels[comp == c].min() for c in candidates]
        chosen = candidates[int(np.argmin(min_label))]

    keep = np.nonzero(comp == chosen)[0]
    remap = -np.ones(g.n, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    eu, ev, ew = g.edge_array()
    mask = remap[eu] >= 0
    sub = Graph.from_edges(
        remap[eu[mask]],
        remap[ev[mask]],
        ew[mask],
        n=keep.size,
        node_labels=g.node_labels[keep].copy(),
    )
    return sub, {int(old): int(new) for old, new in zip(keep, remap[keep])}


def laplacian(g: Graph) -> sp.csr_matrix:
    """Weighted graph Laplacian: degrees on the diagonal, minus adjacency."""
    a = g.adjacency_matrix()
    deg = np.asarray(a.sum(axis=1)).ravel()
    lap = sp.diags(deg, format="csr") - a
    return lap.tocsr()


def incidence_and_weights(g: Graph) -> tuple[sp.csr_matrix, np.ndarray]:
    """Edge-node incidence matrix and the matching edge-weight vector.

    Edges are enumerated sorted by (smaller endpoint, larger endpoint);
    each row carries +1 at the smaller-id endpoint and -1 at the larger.
    The identity ``B.T @ diag(w) @ B == laplacian(g)`` holds.
    """
    eu, ev, ew = g.edge_array()
    m = eu.size
    rows = np.repeat(np.arange(m, dtype=np.int64), 2)
    cols = np.empty(2 * m, dtype=np.int64)
    cols[0::2] = eu
    cols[1::2] = ev
    vals = np.tile(np.array([1.0, -1.0]), m)
    b = sp.csr_matrix((vals, (rows, cols)), shape=(m, g.n))
    return b, ew.copy()


def insert_noise_edges(
    g: Graph, fraction: float, anchors: Sequence[int], seed: int
) -> Graph:
    """Add ``ceil(fraction * m)`` unit-weight edges anchored at given nodes.

    Each new edge connects a uniform anchor to a uniform node of the
    graph; draws producing self-loops or already-present edges are
    rejected and resampled.  Deterministic for a fixed seed (anchor order
    does not matter).

    Raises :class:`CapacityError` when the requested number of edges
    cannot be placed within a bounded number of attempts.
    """
    if not 0 < fraction <= 0.5:
        raise DomainError(f"fraction must be in (0, 0.5], got {fraction}")
    anchors = np.unique(np.asarray(anchors, dtype=np.int64))
    if anchors.size == 0:
        raise DomainError("anchors must be nonempty")
    if anchors.min() < 0 or anchors.max() >= g.n:
        raise DomainError("anchor ids out of range")
    if g.m == 0:
        raise DomainError("graph has no edges")

    target = int(np.ceil(fraction * g.m))
    existing = set(zip(*map(np.ndarray.tolist, g.edge_array()[:2])))
    rng = np.random.default_rng(seed)
    new_u: list[int] = []
    new_v: list[int] = []
    placed = 0
    attempts = 0
    max_attempts = 200 * target + 1000
    while placed < target:
        if attempts >= max_attempts:
            raise CapacityError(
                f"placed only {placed} of {target} edges after {attempts} attempts"
            )
        attempts += 1
        a = int(anchors[rng.integers(anchors.size)])
        b = int(rng.integers(g.n))
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key in existing:
            continue
        existing.add(key)
        new_u.append(key[0])
        new_v.append(key[1])
        placed += 1

    eu, ev, ew = g.edge_array()
    return Graph.from_edges(
        np.r_[eu, np.asarray(new_u, dtype=np.int64)],
        np.r_[ev, np.asarray(new_v, dtype=np.int64)],
        np.r_[ew, np.ones(len(new_u))],
        n=g.n,
        node_labels=g.node_labels.copy(),
    )


def check_connected(g: Graph) -> None:
    """Raise :class:`DomainError` unless ``g`` is connected (BFS check)."""
    if g.n == 0:
        raise DomainError("empty graph")
    if g.n == 1:
        return
    order = breadth_first_order(
        g.adjacency_matrix(), 0, directed=False, return_predecessors=False
    )
    if order.size != g.n:
        raise DomainError("graph is not connected; extract the LCC first")
