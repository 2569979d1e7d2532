import numpy as np
import pytest

from cfcent import DomainError
from cfcent.generators import (
    barabasi_albert_graph,
    complete_graph,
    erdos_renyi_graph,
    grid_graph,
    path_graph,
    star_graph,
)


def test_path():
    g = path_graph(5)
    assert g.n == 5 and g.m == 4
    assert g.is_connected()


def test_grid():
    g = grid_graph(4)
    assert g.n == 16 and g.m == 2 * 4 * 3
    assert g.is_connected()
    degs = g.degrees()
    assert sorted(np.unique(degs).tolist()) == [2.0, 3.0, 4.0]


def test_star():
    g = star_graph(6)
    assert g.n == 6 and g.m == 5
    assert g.degrees()[0] == 5.0


def test_clique():
    g = complete_graph(5)
    assert g.m == 10
    assert np.all(g.degrees() == 4.0)


def test_erdos_renyi_deterministic_and_plausible():
    a = erdos_renyi_graph(300, 0.02, seed=5)
    b = erdos_renyi_graph(300, 0.02, seed=5)
    assert np.array_equal(a.indices, b.indices)
    expected = 0.02 * 300 * 299 / 2
    assert 0.6 * expected < a.m < 1.4 * expected
    assert a.m != erdos_renyi_graph(300, 0.02, seed=6).m


def test_barabasi_albert_structure():
    g = barabasi_albert_graph(500, 3, seed=2)
    assert g.n == 500
    assert g.is_connected()
    # complete seed on m0+1 nodes, then m0 edges per added node
    assert g.m == 6 + 3 * (500 - 4)
    assert np.array_equal(
        g.indices, barabasi_albert_graph(500, 3, seed=2).indices
    )


def test_generator_argument_validation():
    with pytest.raises(DomainError):
        path_graph(0)
    with pytest.raises(DomainError):
        erdos_renyi_graph(10, 1.5, seed=0)
    with pytest.raises(DomainError):
        barabasi_albert_graph(3, 3, seed=0)
