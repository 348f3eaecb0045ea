import os
import tempfile

os.environ.setdefault(
    "CUBECOCYCLE_LOG_DIR", tempfile.mkdtemp(prefix="cubecocycle-logs-")
)

import pytest  # noqa: E402

from cubecocycle.complex_core import CubeComplex  # noqa: E402
from cubecocycle.families import generate, parse_family  # noqa: E402


def build(text: str) -> CubeComplex:
    return generate(parse_family(text))


@pytest.fixture(scope="session")
def segment3():
    return build("segment:3")


@pytest.fixture(scope="session")
def segment2():
    return build("segment:2")


@pytest.fixture(scope="session")
def square():
    return build("square")


@pytest.fixture(scope="session")
def grid23():
    return build("grid:2x3")


@pytest.fixture(scope="session")
def grid33():
    return build("grid:3x3")


@pytest.fixture(scope="session")
def cube3():
    return build("hypercube:3")


@pytest.fixture(scope="session")
def tree23():
    return build("tree(2,3)")


@pytest.fixture(scope="session")
def tree_product():
    return build("product:tree(2,1)*tree(2,1)")


@pytest.fixture
def unfilled_square():
    return CubeComplex.from_cubes(4, [[0, 1], [1, 3], [3, 2], [2, 0]])


@pytest.fixture
def k23():
    # two hubs joined to three leaves
    edges = [[h, leaf] for h in (0, 1) for leaf in (2, 3, 4)]
    return CubeComplex.from_cubes(5, edges)


@pytest.fixture(scope="session")
def grid443():
    return generate(parse_family("grid:4x4x3"), validate=False)


@pytest.fixture(scope="session")
def tree22_product():
    return build("product:tree(2,2)*tree(2,2)")
