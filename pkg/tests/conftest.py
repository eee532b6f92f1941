import numpy as np
import pytest

from zrpevo import _backend
from zrpevo.topology import TopologyParams, generate_random_network, load_network
from zrpevo.zrp import build_overlay, build_zone_table

LINE5_TEXT = "5\n0 1 1\n1 2 1\n2 3 1\n3 4 1"
K4_TEXT = "4\n0 1 3\n0 2 5\n0 3 2\n1 2 4\n1 3 6\n2 3 1"


def available_backends():
    names = ["python"]
    try:
        _backend.load_backend("cython")
        names.append("cython")
    except ImportError:
        pass
    return names


@pytest.fixture
def line5():
    return load_network(LINE5_TEXT)


@pytest.fixture
def k4():
    return load_network(K4_TEXT)


@pytest.fixture
def line5_overlay(line5):
    return build_overlay(build_zone_table(line5, 2), line5, 4)


@pytest.fixture(params=available_backends())
def backend(request, monkeypatch):
    """Run the test body with every module bound to one kernel backend."""
    mod = _backend.load_backend(request.param)
    import zrpevo.experiment
    import zrpevo.routes
    import zrpevo.topology
    import zrpevo.zrp
    for m in (zrpevo.topology, zrpevo.zrp, zrpevo.routes, zrpevo.experiment):
        monkeypatch.setattr(m, "kernels", mod)
    return request.param


def random_net(n, degree, seed, cost_max=10):
    return generate_random_network(TopologyParams(n, degree, 1, cost_max, seed))


def small_nets(count, seed=0, n_range=(3, 8), degree_range=(1.0, 3.5)):
    """Seeded random geometric graphs with n in n_range (inclusive)."""
    rng = np.random.default_rng(seed)
    nets = []
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        deg = float(rng.uniform(degree_range[0], min(degree_range[1], n - 0.5)))
        nets.append(generate_random_network(TopologyParams(n, deg, 1, 5, seed * 100_003 + i)))
    return nets
