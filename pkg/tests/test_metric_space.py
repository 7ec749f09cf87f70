import numpy as np
import pytest

from artifact.errors import ConfigurationError
from artifact.metric_space import (
    MetricSpace,
    boundary_distance,
    conjugate,
    cycle,
    dagger_metric,
    from_points,
    glue,
    interval,
    mirror,
    shortcut_metric,
    star_metric,
    validate_metric,
)


def brute_star(D, Z):
    n = len(D)
    return np.array([[min(D[i, z] + D[z, j] for z in Z) for j in range(n)] for i in range(n)])


def test_interval_basics():
    X = interval(-1.0, 1.0, 5)
    assert X.n == 5
    assert X.boundary == (0, 4)
    np.testing.assert_allclose(X.coords, [-1, -0.5, 0, 0.5, 1])
    np.testing.assert_allclose(X.weights, [0.25, 0.5, 0.5, 0.5, 0.25])
    assert validate_metric(X).ok


def test_star_matches_brute_force(rng):
    pts = rng.random((12, 2))
    X = from_points(pts, boundary=(0, 5, 7))
    np.testing.assert_allclose(X.star_matrix, brute_star(X.dist, [0, 5, 7]), atol=1e-14)


def test_metric_quantities_on_interval():
    X = interval(-3.0, 3.0, 241)
    i, j = X.index_of(-2.0), X.index_of(2.0)
    assert boundary_distance(X, i) == pytest.approx(1.0, abs=1e-12)
    assert star_metric(X, i, j) == pytest.approx(6.0, abs=1e-12)
    assert star_metric(X, i, i) == pytest.approx(2.0, abs=1e-12)
    assert dagger_metric(X, i, j) == pytest.approx(2.0, abs=1e-12)
    assert shortcut_metric(X, i, j) == pytest.approx(2.0, abs=1e-12)
    assert shortcut_metric(X, i, X.index_of(-1.5)) == pytest.approx(0.5, abs=1e-12)


def test_star_is_meta_metric(rng):
    X = from_points(rng.random((10, 2)), boundary=(0, 1))
    S = X.star_matrix
    assert np.all(np.diag(S) > 0) or np.any(np.diag(S) > 0)
    np.testing.assert_allclose(S, S.T)
    # triangle inequality
    assert np.all(S[:, None, :] <= S[:, :, None] + S[None, :, :] + 1e-12)
    # d <= d*
    assert np.all(X.dist <= S + 1e-12)


def test_shortcut_is_metric_on_interior(rng):
    X = from_points(rng.random((10, 2)), boundary=(0, 1))
    D = X.shortcut_matrix
    Y = X.interior
    Dy = D[np.ix_(Y, Y)]
    assert np.all(Dy[:, None, :] <= Dy[:, :, None] + Dy[None, :, :] + 1e-12)
    assert np.all(D <= X.dist + 1e-15)


def test_validate_reports_violations():
    D = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    rep = validate_metric(MetricSpace(D, (0,), np.ones(3)))
    assert not rep.ok
    assert rep.kinds() == {"triangle"}
    D2 = np.array([[0, 1], [2, 0]], dtype=float)
    rep2 = validate_metric(MetricSpace(D2, (0,), np.ones(2)))
    assert "asymmetry" in rep2.kinds()


def test_empty_boundary_is_reported_not_fatal():
    C = cycle(1.0, 8)
    rep = validate_metric(C)
    assert "boundary" in rep.kinds()
    with pytest.raises(ConfigurationError):
        C.star_matrix


def test_cycle_distances():
    C = cycle(2.0, 8, boundary=(0,))
    assert C.dist[0, 4] == pytest.approx(1.0)
    assert C.dist[1, 7] == pytest.approx(0.5)
    assert validate_metric(C).ok


def test_index_of_rejects_off_grid():
    X = interval(-3.0, 3.0, 201)
    with pytest.raises(ConfigurationError):
        X.index_of(-2.0)


def test_glue_structure():
    X = interval(0.0, 1.0, 6)
    g = glue(X, 3)
    nz, ny = 2, 4
    assert g.n == nz + 3 * ny
    assert np.all(g.sheet_of[:nz] == -1)
    assert g.weights.sum() == pytest.approx(X.weights.sum())
    i0, i1 = g.index(0, 2), g.index(1, 2)
    assert g.dist[i0, i1] == pytest.approx(X.star_matrix[2, 2])
    assert g.dist[i0, g.index(0, 3)] == pytest.approx(X.dist[2, 3])
    assert validate_metric(g.as_metric_space()).kinds() <= {"boundary"}


def test_mirror_and_conjugate_are_isometries():
    X = interval(0.0, 1.0, 9)
    g = glue(X, 2)
    perm = np.array([conjugate(g, i) for i in range(g.n)])
    np.testing.assert_allclose(g.dist[np.ix_(perm, perm)], g.dist)
    assert mirror(g, g.index(0, 3), 1) == g.index(1, 3)
    assert conjugate(g, 0) == 0


def test_doubling_is_cached():
    X = interval(0.0, 1.0, 9)
    assert X.doubling is X.doubling
    assert X.doubling.k == 2


def test_glue_rejects_bad_k():
    with pytest.raises(ConfigurationError):
        glue(interval(0.0, 1.0, 5), 0)


def test_arrays_read_only():
    X = interval(0.0, 1.0, 5)
    with pytest.raises(ValueError):
        X.dist[0, 1] = 3.0
