import numpy as np
import pytest

from l0path import (
    SingularSupport,
    TooLarge,
    enumerate_supports,
    fixed_z_qp,
    gen_tridiagonal,
    permute,
    to_tridiagonal,
    solve,
)
from l0path._kernels import HAVE_NUMBA, _enumerate_py

from conftest import make_instance, random_dd_instance, rng_for


def test_example_optimum(example_instance):
    res = enumerate_supports(example_instance)
    assert abs(res.value - (-14.736666666666665)) <= 1e-9
    assert res.z.tolist() == [0, 0, 1, 1]
    assert np.allclose(res.x, [0.0, 0.0, -4.6 / 3.0, 3.9])
    assert res.supports_enumerated == 16


def test_single_variable():
    inst = make_instance([1.0], [-4.0], [(0, 0, 2.0)])
    res = enumerate_supports(inst)
    assert res.value == -3.0
    assert res.z.tolist() == [1]


def test_fixed_z_empty_support(example_instance):
    x, value = fixed_z_qp(example_instance, np.zeros(4))
    assert value == 0.0
    assert not x.any()


def test_fixed_z_example_support(example_instance):
    x, value = fixed_z_qp(example_instance, np.array([0, 0, 1, 1]))
    assert np.allclose(x, [0.0, 0.0, -4.6 / 3.0, 3.9])
    assert abs(value - (-14.736666666666665)) <= 1e-9


def test_fixed_z_singular_support():
    # zero diagonal block is singular once selected
    inst = make_instance(
        [0.0, 0.0], [1.0, 1.0], [(0, 0, 0.0), (1, 1, 1.0)]
    )
    with pytest.raises(SingularSupport):
        fixed_z_qp(inst, np.array([1, 0]))


def test_size_cap():
    rng = rng_for(20)
    inst = random_dd_instance(rng, 21)
    with pytest.raises(TooLarge):
        enumerate_supports(inst)


def test_matches_path_solver():
    for seed in range(25):
        inst = gen_tridiagonal(int(rng_for(seed).integers(1, 13)), seed)
        sp = solve(to_tridiagonal(inst))
        res = enumerate_supports(inst)
        scale = max(1.0, abs(res.value))
        assert abs(sp.objective - res.value) <= 1e-8 * scale


def test_value_permutation_invariant():
    rng = rng_for(21)
    inst = random_dd_instance(rng, 8)
    base = enumerate_supports(inst).value
    for _ in range(4):
        pi = rng.permutation(8)
        assert abs(enumerate_supports(permute(inst, pi)).value - base) <= 1e-9


@pytest.mark.skipif(not HAVE_NUMBA, reason="compiled kernel unavailable")
def test_kernel_matches_python_fallback():
    rng = rng_for(22)
    for _ in range(5):
        inst = random_dd_instance(rng, 7)
        res = enumerate_supports(inst)
        value, mask, _ = _enumerate_py(
            inst.a, inst.c, np.ascontiguousarray(inst.dense_q())
        )
        assert abs(res.value - min(value, 0.0)) <= 1e-12
        if value < 0.0:
            bits = [(mask >> (inst.n - 1 - i)) & 1 for i in range(inst.n)]
            assert res.z.tolist() == bits
