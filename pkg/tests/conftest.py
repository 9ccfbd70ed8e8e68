import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from subsetflow import (
    EuclideanSpace,
    HyperboloidSpace,
    TreeEdge,
    TreeSpace,
    TreeTopology,
)


@pytest.fixture(scope="session")
def line():
    return EuclideanSpace(1)


@pytest.fixture(scope="session")
def plane():
    return EuclideanSpace(2)


@pytest.fixture(scope="session")
def hyper():
    return HyperboloidSpace(2)


@pytest.fixture(scope="session")
def star_tree():
    # three edges hanging off node 0; lengths cover the worked examples
    return TreeSpace(TreeTopology((
        TreeEdge(0, 0, 1, 1.0),
        TreeEdge(1, 0, 2, 1.0),
        TreeEdge(2, 0, 3, 1.5),
    )))


@pytest.fixture(scope="session")
def path_tree():
    # a three-edge path with unequal lengths, no branching
    return TreeSpace(TreeTopology((
        TreeEdge(0, 0, 1, 2.0),
        TreeEdge(1, 1, 2, 0.5),
        TreeEdge(2, 2, 3, 1.0),
    )))


@pytest.fixture(scope="session")
def all_spaces(line, plane, hyper, star_tree, path_tree):
    return {
        "euclidean-1": line,
        "euclidean-2": plane,
        "hyperboloid-2": hyper,
        "star-tree": star_tree,
        "path-tree": path_tree,
    }
