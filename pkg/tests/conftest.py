import numpy as np
import pytest

from varmms import MetricMeasureSpace
from varmms.generators import cantor_space, grid2d, line_space, two_zone_glued


def unit_grid(n):
    """n x n grid with unit spacing and unit weights."""
    coords = np.array([(i, j) for i in range(n) for j in range(n)], dtype=float)
    return MetricMeasureSpace.from_points(coords, np.ones(n * n))


def random_cloud(n, seed, dim=3, box=2.0):
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0, box, (n, dim))
    return MetricMeasureSpace.from_points(coords, rng.uniform(0.2, 1.5, n))


@pytest.fixture(scope="session")
def battery():
    """Geometry test battery: small spaces with varied structure."""
    return {
        "single": MetricMeasureSpace.from_matrix([[0.0]], [1.0]),
        "pair": line_space(2),
        "line4": line_space(4),
        "line10": line_space(10),
        "unit_grid8": unit_grid(8),
        "grid8": grid2d(8),
        "cantor3": cantor_space(3),
        "cloud12": random_cloud(12, seed=7),
        "glued": two_zone_glued(6, 3),
    }
