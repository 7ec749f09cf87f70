"""Exact optimal transport under arbitrary costs and the boundary-flavoured distances.

Every distance here is the optimum of a transportation problem, solved
exactly by the transportation simplex in :mod:`artifact.kernels`. The
virtual boundary point ``∂`` is appended as an extra index ``n`` and
never stored in a space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, MassError, SolverError
from .measures import MASS_TOL, DiscreteMeasure, SubProbability, _same_space, as_subprobability

__all__ = [
    "DiscreteMeasure",
    "SubProbability",
    "TransportPlan",
    "wasserstein",
    "solve_transport",
    "w_star",
    "annihilation_cost",
    "w_dagger",
    "w_prime",
    "w_prime_zero",
    "w_doubleprime",
]


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Optimal coupling restricted to the supports.

    ``q[a, b]`` is the mass moved from ``rows[a]`` to ``cols[b]`` and
    ``cost_value`` is ``sum c^p q`` before the ``p``-th root.
    """

    rows: np.ndarray
    cols: np.ndarray
    q: np.ndarray
    cost_value: float
    p: float

    @property
    def value(self) -> float:
        return max(self.cost_value, 0.0) ** (1.0 / self.p)

    def row_marginal(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        np.add.at(out, self.rows, self.q.sum(axis=1))
        return out

    def col_marginal(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        np.add.at(out, self.cols, self.q.sum(axis=0))
        return out

    def dense(self, n_rows: int, n_cols: int | None = None) -> np.ndarray:
        out = np.zeros((n_rows, n_rows if n_cols is None else n_cols))
        out[np.ix_(self.rows, self.cols)] = self.q
        return out

    def triples(self):
        """``(i, j, mass)`` for every cell with positive mass, row-major."""
        a, b = np.nonzero(self.q > 0)
        return [(int(self.rows[i]), int(self.cols[j]), float(self.q[i, j])) for i, j in zip(a, b)]

    def to_csv(self, path_or_file):
        lines = ["i,j,mass"] + [f"{i},{j},{m!r}" for i, j, m in self.triples()]
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w") as fh:
                fh.write(text)

    @classmethod
    def empty(cls, p):
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z.copy(), np.zeros((0, 0)), 0.0, p)


def _check_p(p):
    p = float(p)
    if not p >= 1:
        raise ConfigurationError(f"exponent p must be >= 1, got {p}")
    return p


def solve_transport(a, b, C):
    """Exact balanced transport between positive vectors ``a`` and ``b``.

    Returns ``(cost, q, u, v)`` with ``q`` the dense optimal coupling and
    ``u, v`` optimal dual potentials. ``b`` is rescaled to the mass of ``a``
    if the two differ by round-off.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return 0.0, np.zeros((a.size, b.size)), np.zeros(a.size), np.zeros(b.size)
    sa, sb = a.sum(), b.sum()
    if abs(sa - sb) > MASS_TOL * max(1.0, sa):
        raise MassError(f"unequal masses {sa!r} and {sb!r}")
    b = b * (sa / sb)
    bi, bj, x, u, v, it = kernels.transport_simplex(a, b, C)
    if it < 0:
        raise SolverError("transportation simplex hit its pivot limit")
    q = np.zeros(C.shape)
    np.add.at(q, (bi, bj), np.maximum(x, 0.0))
    cost = float((C * q).sum())
    return cost, q, u, v


def _cost_matrix(cost, n):
    if callable(cost):
        return np.array([[cost(i, j) for j in range(n)] for i in range(n)], dtype=np.float64)
    C = np.asarray(cost, dtype=np.float64)
    if C.shape != (n, n):
        raise ConfigurationError(f"cost matrix must be {n}x{n}")
    if not np.all(np.isfinite(C)):
        raise ConfigurationError("cost matrix has non-finite entries")
    return C


def wasserstein(cost, mu: DiscreteMeasure, nu: DiscreteMeasure, p: float = 1.0):
    """Exact ``L^p`` Kantorovich distance under a ground cost.

    Parameters
    ----------
    cost : ndarray or callable
        ``n x n`` ground cost over the points of the common space, or a
        function ``cost(i, j)``.
    mu, nu : DiscreteMeasure
        Measures of equal mass (to ``1e-10``).
    p : float
        Exponent, ``p >= 1``.

    Returns
    -------
    value : float
        ``(min sum cost^p q)^(1/p)``.
    plan : TransportPlan
        An optimal coupling.
    """
    p = _check_p(p)
    space = _same_space(mu, nu)
    if abs(mu.mass - nu.mass) > MASS_TOL:
        raise MassError(f"unequal masses {mu.mass!r} and {nu.mass!r}")
    rows, cols = mu.support, nu.support
    if rows.size == 0 or cols.size == 0:
        return 0.0, TransportPlan.empty(p)
    C = _cost_matrix(cost, space.n)[np.ix_(rows, cols)] ** p
    val, q, _, _ = solve_transport(mu.weights[rows], nu.weights[cols], C)
    plan = TransportPlan(rows, cols, q, val, p)
    return plan.value, plan


def w_star(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float = 1.0) -> float:
    """Transport distance for the annihilation meta-metric ``d*``."""
    return wasserstein(mu.space.star_matrix, mu, nu, p)[0]


def annihilation_cost(mu: DiscreteMeasure, p: float = 1.0) -> float:
    """``W*_p(mu) = 1/2 W*_p(mu, mu)``; the half is applied after the root."""
    return 0.5 * w_star(mu, mu, p)


def w_dagger(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float = 1.0) -> float:
    """Transport distance for ``d†(x, y) = bd(x) + bd(y)``.

    At ``p = 1`` the cost separates and the value is
    ``sum bd mu + sum bd nu`` for any coupling.
    """
    p = _check_p(p)
    if p == 1.0:
        _same_space(mu, nu)
        if abs(mu.mass - nu.mass) > MASS_TOL:
            raise MassError(f"unequal masses {mu.mass!r} and {nu.mass!r}")
        bd = mu.space.boundary_distances
        return float(bd @ mu.weights + bd @ nu.weights)
    return wasserstein(mu.space.dagger_matrix, mu, nu, p)[0]


def _extended_cost(space):
    """``d'`` on ``Y ∪ {∂}`` as an ``(n+1) x (n+1)`` matrix with ``∂`` last."""
    n = space.n
    C = np.zeros((n + 1, n + 1))
    C[:n, :n] = space.shortcut_matrix
    C[:n, n] = C[n, :n] = space.boundary_distances
    return C


def _with_boundary_atom(w, extra):
    return np.append(w, max(extra, 0.0))


def w_prime(mu: SubProbability, nu: SubProbability, p: float = 1.0, return_plan: bool = False):
    """Transport distance on ``Y ∪ {∂}`` after topping both measures up to mass one.

    The missing mass ``1 - mass`` of each measure is placed on ``∂``;
    the cost is the shortcut metric extended by ``d'(x, ∂) = bd(x)``.
    """
    p = _check_p(p)
    mu, nu = as_subprobability(mu), as_subprobability(nu)
    space = _same_space(mu, nu)
    a = _with_boundary_atom(mu.weights, 1.0 - mu.mass)
    b = _with_boundary_atom(nu.weights, 1.0 - nu.mass)
    rows, cols = np.flatnonzero(a > 0), np.flatnonzero(b > 0)
    C = _extended_cost(space)[np.ix_(rows, cols)] ** p
    val, q, _, _ = solve_transport(a[rows], b[cols], C)
    plan = TransportPlan(rows, cols, q, val, p)
    return (plan.value, plan) if return_plan else plan.value


def w_prime_zero(mu: SubProbability, p: float = 1.0) -> float:
    """``W'_p(mu, 0) = (sum bd^p mu)^(1/p)``."""
    p = _check_p(p)
    mu = as_subprobability(mu)
    return float(mu.space.boundary_distances ** p @ mu.weights) ** (1.0 / p)


def w_doubleprime(mu: SubProbability, nu: SubProbability, p: float = 1.0, return_plan: bool = False):
    """Transport on ``Y ∪ {∂}`` where ``∂`` may carry any mass.

    Equivalent to supplying ``mu + nu(Y) δ_∂`` and demanding
    ``nu + mu(Y) δ_∂`` with free ``∂ → ∂`` transport.
    """
    p = _check_p(p)
    mu, nu = as_subprobability(mu), as_subprobability(nu)
    space = _same_space(mu, nu)
    a = _with_boundary_atom(mu.weights, nu.mass)
    b = _with_boundary_atom(nu.weights, mu.mass)
    rows, cols = np.flatnonzero(a > 0), np.flatnonzero(b > 0)
    C = _extended_cost(space)[np.ix_(rows, cols)] ** p
    val, q, _, _ = solve_transport(a[rows], b[cols], C)
    plan = TransportPlan(rows, cols, q, val, p)
    return (plan.value, plan) if return_plan else plan.value
