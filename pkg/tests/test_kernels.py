import numpy as np
import pytest

from simulbell import _pykernels, kernels
from simulbell.search_opt import SearchConfig, minimize_score
from simulbell.spin_ops import HALF, generic_direction

BACKENDS = sorted(kernels.BACKENDS)


def random_unitaries(r, n, d):
    m = r.standard_normal((n, d, d)) + 1j * r.standard_normal((n, d, d))
    return np.linalg.qr(m)[0]


def test_compiled_backend_built():
    # the editable install compiles the extension; the fallback must still exist
    assert "python" in kernels.BACKENDS
    assert "cython" in kernels.BACKENDS


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (4, 2), (9, 2), (3, 3), (6, 3), (2, 5), (3, 9)])
def test_transform_matches_dense(backend, n, d, rng):
    mod = kernels.BACKENDS[backend]
    amps = rng.standard_normal(d**n) + 1j * rng.standard_normal(d**n)
    us = random_unitaries(rng, n, d)
    full = us[0]
    for k in range(1, n):
        full = np.kron(full, us[k])
    np.testing.assert_allclose(mod.transform_amplitudes(amps, us), full.conj().T @ amps, atol=1e-12)


@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (4, 2), (3, 3), (6, 3), (2, 5)])
def test_tables_agree(n, d, rng):
    p = rng.random(d**n)
    p /= p.sum()
    ref = _pykernels.uniqueness_tables(p, n, d)
    for name in BACKENDS:
        got = kernels.BACKENDS[name].uniqueness_tables(p, n, d)
        np.testing.assert_allclose(got[0], ref[0], atol=1e-14)
        np.testing.assert_array_equal(got[1], ref[1])


def test_tables_marginals_sum_to_one(rng):
    p = rng.random(81)
    p /= p.sum()
    for name in BACKENDS:
        marg, best = kernels.BACKENDS[name].uniqueness_tables(p, 4, 3)
        np.testing.assert_allclose(marg.sum(axis=1), 1.0, atol=1e-14)
        assert np.all(best <= marg + 1e-16)


def test_length_mismatch_rejected():
    if "cython" not in kernels.BACKENDS:
        pytest.skip("compiled backend not built")
    with pytest.raises(ValueError):
        kernels.BACKENDS["cython"].uniqueness_tables(np.ones(5), 2, 2)


def test_search_identical_across_backends():
    r = np.random.default_rng(3)
    cfg = SearchConfig(3, HALF, tuple(generic_direction(r) for _ in range(2)), restricted=False, restarts=2, seed=1)
    before = kernels.backend_name()
    results = {}
    try:
        for name in BACKENDS:
            kernels.use_backend(name)
            results[name] = minimize_score(cfg)
    finally:
        kernels.use_backend(before)
    scores = [res.best_score for res in results.values()]
    assert max(scores) - min(scores) < 1e-9


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")
