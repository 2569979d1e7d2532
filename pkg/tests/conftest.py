import numpy as np
import pytest

from cfcent import Graph, largest_connected_component


def random_connected_graph(n, rng, extra_edge_prob=0.15, weighted=False):
    """Random connected graph: spanning tree plus extra random edges."""
    us, vs = [], []
    for v in range(1, n):
        us.append(int(rng.integers(v)))
        vs.append(v)
    pairs = rng.random((n, n)) < extra_edge_prob
    iu, iv = np.nonzero(np.triu(pairs, 1))
    us.extend(iu.tolist())
    vs.extend(iv.tolist())
    if weighted:
        w = rng.uniform(0.2, 3.0, size=len(us))
    else:
        w = np.ones(len(us))
    return Graph.from_edges(np.asarray(us), np.asarray(vs), w, n=n)


def dense_laplacian(g):
    lap = np.zeros((g.n, g.n))
    eu, ev, ew = g.edge_array()
    for u, v, w in zip(eu, ev, ew):
        lap[u, u] += w
        lap[v, v] += w
        lap[u, v] -= w
        lap[v, u] -= w
    return lap


def resistance_matrix_oracle(g):
    """All-pairs effective resistances from the dense pseudoinverse."""
    pinv = np.linalg.pinv(dense_laplacian(g))
    d = np.diag(pinv)
    return d[:, None] + d[None, :] - 2.0 * pinv


def cf_scores_oracle(g):
    """Current-flow closeness of every node from the pseudoinverse."""
    r = resistance_matrix_oracle(g)
    return (g.n - 1) / r.sum(axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
