import importlib

import numpy as np
import pytest

from artifact.kernels import _pykernels as py

from oracles import transport_lp

try:
    cy = importlib.import_module("artifact.kernels._ckernels")
except ImportError:
    cy = None

BACKENDS = [py] + ([cy] if cy is not None else [])


def _instance(rng, m, n, degenerate=False):
    if degenerate:
        a = rng.integers(1, 4, m).astype(float)
        b = rng.integers(1, 4, n).astype(float)
        b *= a.sum() / b.sum()
        C = rng.integers(0, 3, (m, n)).astype(float)
    else:
        a, b = rng.random(m) + 0.01, rng.random(n) + 0.01
        b *= a.sum() / b.sum()
        C = rng.random((m, n))
    return a, b, C


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.BACKEND)
@pytest.mark.parametrize("degenerate", [False, True])
def test_simplex_matches_lp(mod, degenerate, rng):
    for _ in range(15):
        m, n = rng.integers(1, 12, 2)
        a, b, C = _instance(rng, m, n, degenerate)
        bi, bj, x, u, v, it = mod.transport_simplex(a, b, C)
        assert it >= 0
        cost = float(C[bi, bj] @ x)
        assert cost == pytest.approx(transport_lp(a, b, C), abs=1e-9)
        q = np.zeros((m, n))
        np.add.at(q, (bi, bj), x)
        np.testing.assert_allclose(q.sum(1), a, atol=1e-12)
        np.testing.assert_allclose(q.sum(0), b, atol=1e-12)
        # dual feasibility and strong duality
        assert np.all(C - u[:, None] - v[None, :] >= -1e-9)
        assert u @ a + v @ b == pytest.approx(cost, abs=1e-9)


@pytest.mark.skipif(cy is None, reason="compiled kernels not built")
def test_backends_agree(rng):
    for _ in range(10):
        a, b, C = _instance(rng, 30, 25)
        r1, r2 = py.transport_simplex(a, b, C), cy.transport_simplex(a, b, C)
        assert float(C[r1[0], r1[1]] @ r1[2]) == pytest.approx(float(C[r2[0], r2[1]] @ r2[2]), abs=1e-12)
    D = rng.random((20, 20))
    Z = np.array([0, 3, 7], dtype=np.int64)
    np.testing.assert_allclose(py.min_plus_through(D, Z), cy.min_plus_through(D, Z))
    u, v = rng.random(20), rng.random(20)
    rp = py.negative_reduced_costs(D, u, v, -1e-12, 3)
    rc = cy.negative_reduced_costs(D, u, v, -1e-12, 3)
    assert sorted(zip(*map(list, rp))) == sorted(zip(*map(list, rc)))


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.BACKEND)
def test_min_plus_through(mod, rng):
    D = rng.random((9, 9))
    Z = np.array([1, 4], dtype=np.int64)
    ref = np.minimum.reduce([D[:, [z]] + D[[z], :] for z in Z])
    np.testing.assert_allclose(mod.min_plus_through(D, Z), ref)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.BACKEND)
def test_negative_reduced_costs(mod):
    C = np.array([[0.0, 5.0, 1.0], [2.0, 0.0, 3.0]])
    u, v = np.array([1.0, 0.0]), np.array([0.0, 0.0, 2.0])
    rows, cols = mod.negative_reduced_costs(C, u, v, 0.0, 5)
    got = sorted(zip(map(int, rows), map(int, cols)))
    assert got == [(0, 0), (0, 2)]
    rows, cols = mod.negative_reduced_costs(C, u, v, 0.0, 1)
    assert sorted(zip(map(int, rows), map(int, cols))) == [(0, 2)]


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.BACKEND)
def test_triangle_violations(mod):
    D = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    out = mod.triangle_violations(D, 1e-12, 10)
    assert (0, 1, 2) in [tuple(map(int, t)) for t in out]
    ok = np.abs(np.subtract.outer(np.arange(5.0), np.arange(5.0)))
    assert len(mod.triangle_violations(ok, 1e-12, 10)) == 0


def test_pivot_cap_reported():
    rng = np.random.default_rng(0)
    a, b, C = _instance(rng, 40, 40)
    assert py.transport_simplex(a, b, C, 1)[-1] < 0


def test_pure_python_switch(monkeypatch):
    import artifact.kernels as k

    monkeypatch.setenv("ARTIFACT_PURE_PYTHON", "1")
    try:
        mod = importlib.reload(k)
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("ARTIFACT_PURE_PYTHON")
        importlib.reload(k)
