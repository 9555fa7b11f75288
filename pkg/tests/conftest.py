import numpy as np
import pytest

from l0path import Instance


def make_instance(a, c, entries, offset=0.0, meta=None):
    """Build an Instance from upper-triangle (i, j, v) entries."""
    a = np.asarray(a, dtype=np.float64)
    return Instance(
        n=len(a),
        a=a,
        c=np.asarray(c, dtype=np.float64),
        qi=np.array([e[0] for e in entries], dtype=np.int64),
        qj=np.array([e[1] for e in entries], dtype=np.int64),
        qv=np.array([e[2] for e in entries], dtype=np.float64),
        offset=offset,
        meta=meta or {},
    )


# 4-variable running example: star coupling around variable 1 plus a
# (1, 2) chain link; optimum -14.7366... on support {2, 3}.
EXAMPLE_A = [2.0, 2.0, 2.0, 2.0]
EXAMPLE_C = [-1.3, -2.5, 4.6, -7.8]
EXAMPLE_Q = [
    (0, 0, 3.0),
    (0, 1, -1.5),
    (1, 1, 6.0),
    (1, 2, -1.0),
    (1, 3, -0.8),
    (2, 2, 3.0),
    (3, 3, 2.0),
]


@pytest.fixture
def example_instance():
    return make_instance(EXAMPLE_A, EXAMPLE_C, EXAMPLE_Q)


def random_dd_instance(rng, n, density=0.4):
    """Random sparse diagonally-dominant instance with a strict margin."""
    offdiag = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform() < density:
                v = float(rng.uniform(-2.0, 2.0))
                if v != 0.0:
                    offdiag[(i, j)] = v
    rowsum = np.zeros(n)
    for (i, j), v in offdiag.items():
        rowsum[i] += abs(v)
        rowsum[j] += abs(v)
    entries = [(i, i, rowsum[i] + rng.uniform(0.5, 3.0)) for i in range(n)]
    entries += [(i, j, v) for (i, j), v in sorted(offdiag.items())]
    return make_instance(
        rng.uniform(0.0, 2.0, n), rng.uniform(-10.0, 5.0, n), entries
    )


def rng_for(tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=tag))
