import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from arczeros.config import load_config  # noqa: E402
from arczeros.weights import compute_moments, dps_for_degree  # noqa: E402
from arczeros.zeros import zero_pipeline  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")

QUARTER = (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)
ASYM = (0.6, 1.8, 3.5, 2 * math.pi - 0.6)


class Setup:
    def __init__(self, name):
        self.run = load_config(os.path.join(CONFIGS, f"{name}.json"))
        self.cfg, self.frame, self.spec = self.run.build()
        self._moments = {}

    def moments(self, N):
        """Extended-precision moments through N, cached per setup."""
        for have, mt in self._moments.items():
            if have >= N:
                return mt
        mt = compute_moments(self.spec, N, nodes=128, dps=dps_for_degree(N))
        self._moments[N] = mt
        return mt

    def records(self, lo=5, hi=60):
        """Zero pipeline over degrees lo..hi, computed once per setup."""
        if not hasattr(self, "_records"):
            recs = zero_pipeline(self.frame, self.spec, range(5, 61), moments=self.moments(61))
            self._records = {r.n: r for r in recs}
        return [self._records[n] for n in range(lo, hi + 1)]


@pytest.fixture(scope="session")
def sym():
    return Setup("symmetric")


@pytest.fixture(scope="session")
def asym():
    return Setup("asymmetric")


@pytest.fixture(scope="session", params=["symmetric", "asymmetric"])
def both(request, sym, asym):
    return sym if request.param == "symmetric" else asym
