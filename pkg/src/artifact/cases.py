"""Built-in reference cases with known closed-form values.

Each case recomputes a documented value on a fixed grid and compares it to
the closed form. The registry backs the ``paper-examples`` CLI command and
the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .annihilation import w0, w0_rep_p1, w_flat_upper, w_sharp_bounds
from .charged import ChargedMeasure, charged_entropy, effective, entropy, lift, phi, psi, tilde_w
from .heat import apply_measure_flow, build_interval_system, charged_flow
from .measures import DiscreteMeasure, SubProbability
from .metric_space import boundary_distance, interval, shortcut_metric, star_metric
from .transport import annihilation_cost, wasserstein, w_doubleprime, w_prime, w_prime_zero


@dataclass(frozen=True)
class Case:
    id: str
    claim: str
    expected: float
    tol: float
    relation: str
    compute: object

    def run(self, tol: float | None = None):
        tol = self.tol if tol is None else tol
        got = float(self.compute())
        ok = {
            "eq": abs(got - self.expected) <= tol,
            "le": got <= self.expected + tol,
            "lt": got < self.expected - tol,
            "ge": got >= self.expected - tol,
        }[self.relation]
        return CaseResult(self, got, tol, bool(ok))


@dataclass(frozen=True)
class CaseResult:
    case: Case
    computed: float
    tol: float
    passed: bool

    def line(self) -> str:
        c = self.case
        sym = {"eq": "==", "le": "<=", "lt": "<", "ge": ">="}[c.relation]
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {c.id:<34} computed={self.computed!r:<24} {sym} expected={c.expected!r}  tol={self.tol:g}"


# grids -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def grid_pm3():
    """``[-3, 3]`` with step 0.025 so that ``±2`` are nodes."""
    return interval(-3.0, 3.0, 241)


@lru_cache(maxsize=None)
def grid_pm1():
    return interval(-1.0, 1.0, 201)


@lru_cache(maxsize=None)
def grid_0_2(n_points: int = 201):
    return interval(0.0, 2.0, n_points)


def zigzag_grid(n: int):
    """``[-2, 2]`` with a step dividing ``1/(2(2n+1))`` (at most 0.025)."""
    m = 2 * (2 * n + 1)
    k = int(np.ceil(1.0 / (0.025 * m)))
    return interval(-2.0, 2.0, 4 * m * k + 1)


@lru_cache(maxsize=None)
def _zigzag_grid_cached(n):
    return zigzag_grid(n)


def zigzag(n: int, space=None):
    """``(μ, ν, σ, τ)`` of the zig-zag family on ``Y = (-2, 2)``."""
    X = _zigzag_grid_cached(n) if space is None else space
    m = 1.0 / (2 * n + 1)
    at = lambda x: X.index_of(x, 1e-9)
    mu = SubProbability.dirac(X, at(-0.5), m)
    nu = SubProbability.dirac(X, at(0.5), m)
    sp_, sm = np.zeros(X.n), np.zeros(X.n)
    tp, tm = np.zeros(X.n), np.zeros(X.n)
    for k in range(n + 1):
        sp_[at(2 * k * m - 0.5)] += m
        tp[at((2 * k + 1) * m - 0.5)] += m
    for k in range(1, n + 1):
        sm[at(2 * k * m - 0.5)] += m
    for k in range(n):
        tm[at((2 * k + 1) * m - 0.5)] += m
    sigma = ChargedMeasure.from_weights(X, sp_, sm)
    tau = ChargedMeasure.from_weights(X, tp, tm)
    return mu, nu, sigma, tau


def opposite_atoms():
    X = grid_pm3()
    return X, SubProbability.dirac(X, X.index_of(-2)), SubProbability.dirac(X, X.index_of(2))


def remark_eps_measure(eps: float):
    """``½(δ_1 + δ_ε)`` on ``Y = (0, 2)`` with a grid containing ``ε``."""
    n_points = max(201, int(round(2.0 / eps)) + 1)
    X = grid_0_2(n_points)
    return X, SubProbability.from_atoms(X, {X.index_of(1.0): 0.5, X.index_of(eps): 0.5})


def _random_pairs(X, count, seed):
    rng = np.random.default_rng(seed)
    Y = X.interior
    out = []
    for _ in range(count):
        pair = []
        for _ in range(2):
            w = np.zeros(X.n)
            idx = rng.choice(Y, size=rng.integers(1, 6), replace=False)
            w[idx] = rng.random(idx.size)
            w *= rng.uniform(0.1, 1.0) / w.sum()
            pair.append(SubProbability(X, w))
        out.append(pair)
    return out


# computations ----------------------------------------------------------------

def _w0_opposite(p):
    X, mu, nu = opposite_atoms()
    return w0(mu, nu, p)[0]


def _w0_to_zero(p):
    X, mu, _ = opposite_atoms()
    return w0(mu, SubProbability.zero(X), p)[0]


def _triangle_excess():
    X, mu, nu = opposite_atoms()
    z = SubProbability.zero(X)
    return w0(mu, nu, 1)[0] - w0(mu, z, 1)[0] - w0(z, nu, 1)[0]


def _pm1_max_error(which):
    X = grid_pm1()
    rng = np.random.default_rng(7)
    Y = X.interior
    err = 0.0
    for _ in range(10):
        i, j = rng.choice(Y, 2, replace=False)
        x, y = X.coords[i], X.coords[j]
        mu, nu = SubProbability.dirac(X, i), SubProbability.dirac(X, j)
        if which == "w0":
            err = max(err, abs(w0(mu, nu, 2)[0] - abs(x - y)))
        elif which == "shortcut":
            err = max(err, abs(shortcut_metric(X, i, j) - min(abs(x - y), 2 - abs(x - y))))
        else:
            err = max(err, abs(wasserstein(X.dist, mu, nu, 2)[0] - abs(x - y)))
    return err


def _doubleprime_p1_gap():
    X = grid_pm1()
    return max(abs(w_doubleprime(a, b, 1) - w_prime(a, b, 1)) for a, b in _random_pairs(X, 10, 3))


def _ratio(eps, p=2.0):
    _, mu = remark_eps_measure(eps)
    return annihilation_cost(mu, p) / w_prime_zero(mu, p)


def _zz(n, what, p=2.0):
    mu, nu, sigma, tau = zigzag(n)
    if what == "w0":
        return w0(mu, nu, p)[0]
    if what == "wprime":
        return w_prime(mu, nu, p)
    if what == "wprime_p":
        return w_prime(mu, nu, p) ** p
    if what == "tilde_p":
        return tilde_w(sigma, tau, p) ** p
    if what == "effective":
        e = effective(sigma).weights
        return float(np.abs(e - mu.weights).max())
    if what == "lower":
        return w_sharp_bounds(mu, nu, p)[0]
    raise ValueError(what)


def _lift_isometry_gap():
    X = grid_pm1()
    rng = np.random.default_rng(11)
    gap = 0.0
    for _ in range(3):
        a = rng.random(X.n) * (rng.random(X.n) < 0.05)
        b = rng.random(X.n) * (rng.random(X.n) < 0.05)
        a[0] += 1e-3
        b[-1] += 1e-3
        mu, nu = DiscreteMeasure(X, a / a.sum()), DiscreteMeasure(X, b / b.sum())
        gap = max(gap, abs(tilde_w(lift(mu), lift(nu), 2) - wasserstein(X.dist, mu, nu, 2)[0]))
    return gap


def _entropy_constant_gap():
    X = grid_pm1()
    g = X.doubling
    rng = np.random.default_rng(5)
    gap = 0.0
    for _ in range(3):
        h = rng.random(g.n) + 0.1
        h = DiscreteMeasure(g, h / h.sum())
        gap = max(gap, abs(charged_entropy(psi(h)) - entropy(h) - np.log(0.5)))
    return gap


def _charged_flow_gap():
    sys_ = build_interval_system(0.0, 1.0, 101)
    rng = np.random.default_rng(9)
    n = sys_.n
    plus, minus = rng.random(n), rng.random(n)
    plus[[0, -1]] = minus[[0, -1]] = 0.05
    s = plus.sum() + minus.sum()
    sigma = ChargedMeasure.from_weights(sys_.space, plus / s, minus / s)
    gap = 0.0
    for t in (0.01, 0.1):
        st = charged_flow(sigma, t, sys_)
        eff = apply_measure_flow(sys_, sigma.plus.weights - sigma.minus.weights, t, "dirichlet")
        tot = apply_measure_flow(sys_, sigma.plus.weights + sigma.minus.weights, t, "neumann")
        gap = max(gap, np.abs(st.plus.weights - st.minus.weights - eff).max())
        gap = max(gap, np.abs(st.plus.weights + st.minus.weights - tot).max())
    return gap


def _flat_opposite():
    X, mu, nu = opposite_atoms()
    return w_flat_upper(mu, nu, 1.0, "boundary", m=4)[0]


def _rep_opposite():
    X, mu, nu = opposite_atoms()
    return w0_rep_p1(mu, nu)


CASES = (
    Case("w0-opposite-atoms-p1", "w0(δ-2, δ2) = 4 on Y=(-3,3), p=1", 4.0, 1e-9, "eq", lambda: _w0_opposite(1)),
    Case("w0-opposite-atoms-p2", "w0(δ-2, δ2) = 4 on Y=(-3,3), p=2", 4.0, 1e-9, "eq", lambda: _w0_opposite(2)),
    Case("w0-atom-to-zero-p1", "w0(δ-2, 0) = 1 on Y=(-3,3), p=1", 1.0, 1e-9, "eq", lambda: _w0_to_zero(1)),
    Case("w0-atom-to-zero-p2", "w0(δ-2, 0) = 1 on Y=(-3,3), p=2", 1.0, 1e-9, "eq", lambda: _w0_to_zero(2)),
    Case("w0-triangle-failure", "w0(μ,ν) - w0(μ,0) - w0(0,ν) = 4 - 2 > 0", 2.0, 1e-9, "eq", _triangle_excess),
    Case("w0-rep-opposite-atoms", "split representation at p=1 gives 4", 4.0, 1e-9, "eq", _rep_opposite),
    Case("boundary-distance-pm3", "bd(-2) = 1 on Y=(-3,3)", 1.0, 1e-12, "eq", lambda: boundary_distance(grid_pm3(), grid_pm3().index_of(-2))),
    Case("shortcut-opposite-atoms", "d'(-2, 2) = 2 on Y=(-3,3)", 2.0, 1e-12, "eq", lambda: shortcut_metric(grid_pm3(), grid_pm3().index_of(-2), grid_pm3().index_of(2))),
    Case("wprime-opposite-atoms-p2", "W'_2(δ-2, δ2) = 2", 2.0, 1e-9, "eq", lambda: w_prime(*opposite_atoms()[1:], 2)),
    Case("wdoubleprime-opposite-atoms-p2", "W''_2(δ-2, δ2)^2 = 2", 2.0, 1e-9, "eq", lambda: w_doubleprime(*opposite_atoms()[1:], 2) ** 2),
    Case("wdoubleprime-equals-wprime-p1", "W''_1 = W'_1 on random pairs (max gap)", 0.0, 1e-9, "eq", _doubleprime_p1_gap),
    Case("interval-w0-is-distance", "Y=(-1,1): w0(δx, δy) = |x-y| (max error)", 0.0, 1e-9, "eq", lambda: _pm1_max_error("w0")),
    Case("interval-wasserstein-is-distance", "Y=(-1,1): W_p(δx, δy) = |x-y| (max error)", 0.0, 1e-9, "eq", lambda: _pm1_max_error("w")),
    Case("interval-shortcut-formula", "Y=(-1,1): d' = min(|x-y|, 2-|x-y|) (max error)", 0.0, 1e-12, "eq", lambda: _pm1_max_error("shortcut")),
    Case("eps-star-metric", "Y=(0,2): d*(1, 0.1) = 1.1", 1.1, 1e-12, "eq", lambda: star_metric(grid_0_2(), grid_0_2().index_of(1.0), grid_0_2().index_of(0.1))),
    Case("eps-boundary-distance", "Y=(0,2): bd(1) = 1", 1.0, 1e-12, "eq", lambda: boundary_distance(grid_0_2(), grid_0_2().index_of(1.0))),
    Case("eps-wprime-zero", "W'_2(μ,0)^2 = (1 + 0.1^2)/2 = 0.505", 0.505, 1e-9, "eq", lambda: w_prime_zero(remark_eps_measure(0.1)[1], 2) ** 2),
    Case("eps-annihilation-cost", "W*_2(μ) = (1 + 0.1)/2 = 0.55", 0.55, 1e-9, "eq", lambda: annihilation_cost(remark_eps_measure(0.1)[1], 2)),
    Case("eps-ratio-sharpness", "W*_2/W'_2(·,0) at ε=0.001 near 2^-1/2", 2 ** -0.5, 1e-3, "eq", lambda: _ratio(0.001)),
    Case("zigzag-effective", "effective(σ) = μ for the zig-zag σ (max error)", 0.0, 1e-15, "eq", lambda: _zz(1, "effective")),
    Case("zigzag-wprime-p", "W'_2(μ,ν)^2 = 1/3", 1 / 3, 1e-9, "eq", lambda: _zz(1, "wprime_p")),
    Case("zigzag-tilde-w", "W~_2(σ,τ)^2 = (1/3)^2", 1 / 9, 1e-9, "eq", lambda: _zz(1, "tilde_p")),
    Case("zigzag-w0-upper", "w0(μ,ν) <= 1/3 at p=2", 1 / 3, 1e-9, "le", lambda: _zz(1, "w0")),
    Case("zigzag-w0-below-wprime", "w0(μ,ν) < W'_2 = (1/3)^1/2", 3 ** -0.5, 1e-9, "lt", lambda: _zz(1, "w0")),
    Case("zigzag-sharp-lower", "lower bound W'_1(μ,ν) = 1/3", 1 / 3, 1e-9, "eq", lambda: _zz(1, "lower")),
    Case("lift-isometry", "W~_2(lift μ, lift ν) = W_2(μ,ν) (max gap)", 0.0, 1e-9, "eq", _lift_isometry_gap),
    Case("entropy-identification", "Ent~(Ψ h) - Ent^(h) = log 1/2 (max gap)", 0.0, 1e-10, "eq", _entropy_constant_gap),
    Case("charged-flow-effective-total", "effective/total of the charged flow (max gap)", 0.0, 1e-10, "eq", _charged_flow_gap),
    Case("flat-chain-opposite-atoms", "boundary chain for δ-2, δ2 at p=1 gives W'_1 = 2", 2.0, 1e-9, "eq", _flat_opposite),
)


def run_cases(only=None, tol=None):
    """Run all cases (or those whose id is in ``only``)."""
    selected = [c for c in CASES if only is None or c.id in only]
    return [c.run(tol) for c in selected]
