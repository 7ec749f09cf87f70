"""Transportation-annihilation distances between subprobabilities on ``Y``.

``w0`` is computed as one linear program on the doubling: a coupling
between ``Φ(μ+ρ, ρ)`` and ``Φ(ν+η, η)`` with the auxiliary measures
``ρ, η`` free on every base point. The mirrored ``ρ`` makes this a
side-constrained LP rather than a network flow; it is solved by column
generation over the coupling arcs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import ConfigurationError, MassError, SolverError
from .lp import solve_lp
from .metric_space import conjugate
from .measures import MASS_TOL, DiscreteMeasure, SubProbability, _same_space, as_subprobability
from .transport import TransportPlan, _check_p, solve_transport, wasserstein, w_prime

__all__ = [
    "W0Witness",
    "ChainSpec",
    "w0",
    "w0_rep_p1",
    "w0_upper_rep",
    "w0_nine_term",
    "NINE_BLOCKS",
    "w_flat_upper",
    "w_sharp_bounds",
    "w0_upper_estimate",
    "vague_convergence_probe",
]


@dataclass(frozen=True, eq=False)
class W0Witness:
    """Auxiliary measures and optimal glued coupling attaining ``w0``."""

    rho: SubProbability
    eta: SubProbability
    plan: TransportPlan
    value: float

    def source_weights(self, mu: DiscreteMeasure) -> np.ndarray:
        """Glued source marginal ``Φ(μ+ρ, ρ)`` (not necessarily of mass one)."""
        return _phi_weights(mu.space.doubling, mu.weights + self.rho.weights, self.rho.weights)

    def target_weights(self, nu: DiscreteMeasure) -> np.ndarray:
        return _phi_weights(nu.space.doubling, nu.weights + self.eta.weights, self.eta.weights)


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Chain ``μ = η_0, ..., η_m = ν`` with its step costs."""

    intermediates: list
    steps: list = field(default_factory=list)
    value: float = 0.0


def _phi_weights(g, plus, minus):
    sheet, base = g.sheet_of, g.base_of
    w = np.where(sheet == 0, plus[base], minus[base])
    on_z = sheet < 0
    w[on_z] = plus[base[on_z]] + minus[base[on_z]]
    return w


def _interior_pair(mu, nu):
    mu, nu = as_subprobability(mu), as_subprobability(nu)
    space = _same_space(mu, nu)
    if not space.boundary:
        raise ConfigurationError("space needs a nonempty boundary")
    mu.require_interior()
    nu.require_interior()
    return space, mu, nu


# w0 -------------------------------------------------------------------------

def _w0_program(g, mu_w, nu_w, p, mass_equality, arcs_init, full, per_row=5, max_rounds=500):
    """Column generation for the glued LP. Returns ``(objective, arcs, q, rho, eta)``.

    ``arcs_init`` must contain a feasible arc set (see :func:`_initial_arcs`).
    """
    n, G = g.base.n, g.n
    sheet, base = g.sheet_of, g.base_of
    C = np.ascontiguousarray(g.dist ** p)
    scale = max(float(C.max()), 1.0)
    coef = np.where(sheet < 0, 2.0, 1.0)
    R = sp.csr_matrix((-coef, (np.arange(G), base)), shape=(G, n))
    zGn = sp.csr_matrix((G, n))
    b_eq = np.concatenate([np.where(sheet == 0, mu_w[base], 0.0), np.where(sheet == 0, nu_w[base], 0.0)])
    budget = np.maximum([1.0 - mu_w.sum(), 1.0 - nu_w.sum()], 0.0)
    side = sp.csr_matrix((np.full(2 * n, 2.0), (np.repeat([0, 1], n), np.arange(2 * n))), shape=(2, 2 * n))

    if full:
        arcs = np.stack(np.divmod(np.arange(G * G), G), axis=1)
    else:
        arcs = np.unique(np.asarray(arcs_init, dtype=np.int64), axis=0)
    for _ in range(max_rounds):
        ai, bj = arcs[:, 0], arcs[:, 1]
        m = len(arcs)
        A1 = sp.csr_matrix((np.ones(m), (ai, np.arange(m))), shape=(G, m))
        A2 = sp.csr_matrix((np.ones(m), (bj, np.arange(m))), shape=(G, m))
        A_eq = sp.vstack([sp.hstack([A1, R, zGn]), sp.hstack([A2, zGn, R])]).tocsr()
        side_full = sp.hstack([sp.csr_matrix((2, m)), side]).tocsr()
        c = np.concatenate([C[ai, bj], np.zeros(2 * n)])
        if mass_equality:
            A_eq = sp.vstack([A_eq, side_full]).tocsr()
            res = solve_lp(c, A_eq=A_eq, b_eq=np.concatenate([b_eq, budget]))
            y = res.eqlin.marginals[: 2 * G]
        else:
            res = solve_lp(c, A_eq=A_eq, b_eq=b_eq, A_ub=side_full, b_ub=budget)
            y = res.eqlin.marginals
        if full:
            break
        rows, cols = kernels.negative_reduced_costs(C, y[:G], y[G:], -1e-10 * scale, per_row)
        if rows.size == 0:
            break
        arcs = np.unique(np.concatenate([arcs, np.stack([rows, cols], axis=1)]), axis=0)
    else:
        raise SolverError("column generation did not converge")
    x = res.x
    q = x[:m]
    rho, eta = x[m : m + n], x[m + n : m + 2 * n]
    objective = float(C[arcs[:, 0], arcs[:, 1]] @ q)
    return objective, arcs, q, rho, eta


def _initial_arcs(space, g, mu, nu, n_neighbors):
    """Nearest-neighbour arcs, all arcs through ``Z``, mirror arcs, and the
    arcs of a feasible split (transport ``μ₁ → ν₁`` on sheet ``+``,
    annihilate ``μ₀`` and create ``ν₀`` at the nearest boundary point)."""
    G = g.n
    k = min(n_neighbors, G)
    near = np.argpartition(g.dist, k - 1, axis=1)[:, :k]
    arcs = [np.stack([np.repeat(np.arange(G), k), near.ravel()], axis=1)]
    all_g = np.arange(G)
    for z in np.flatnonzero(g.sheet_of < 0):
        arcs.append(np.stack([all_g, np.full(G, z)], axis=1))
        arcs.append(np.stack([np.full(G, z), all_g], axis=1))
    arcs.append(np.stack([all_g, [conjugate(g, i) for i in all_g]], axis=1))
    plus = g.sheet_indices(0)
    n = space.n
    _, q, rows, cols = _rep_p1_plan(space, mu, nu)
    a, b = np.nonzero(q > 0)
    inner = (rows[a] < n) & (cols[b] < n)
    arcs.append(np.stack([plus[rows[a][inner]], plus[cols[b][inner]]], axis=1))
    return np.concatenate(arcs)


def w0(mu, nu, p: float = 1.0, *, mass_equality: bool = False, full: bool = False, n_neighbors: int = 8):
    """Transportation-annihilation pre-distance ``W_p^0(μ, ν)``.

    Parameters
    ----------
    mu, nu : SubProbability
        Measures on ``Y`` (vanishing on the boundary) of mass at most one.
    p : float
        Exponent ``p >= 1``.
    mass_equality : bool
        Require ``(μ+2ρ)(X) = (ν+2η)(X) = 1`` instead of the equivalent
        ``<= 1`` form.
    full : bool
        Solve the LP with every coupling arc at once instead of by column
        generation (slow; used to cross-check).
    n_neighbors : int
        Nearest arcs per glued point in the first restricted master.

    Returns
    -------
    value : float
    witness : W0Witness
    """
    p = _check_p(p)
    space, mu, nu = _interior_pair(mu, nu)
    n = space.n
    if mu.mass == 0 and nu.mass == 0:
        zero = SubProbability(space, np.zeros(n))
        return 0.0, W0Witness(zero, zero, TransportPlan.empty(p), 0.0)
    g = space.doubling
    arcs_init = None if full else _initial_arcs(space, g, mu, nu, n_neighbors)
    obj, arcs, q, rho, eta = _w0_program(g, mu.weights, nu.weights, p, mass_equality, arcs_init, full)
    keep = q > 0
    ai, bj, qv = arcs[keep, 0], arcs[keep, 1], q[keep]
    rows, rinv = np.unique(ai, return_inverse=True)
    cols, cinv = np.unique(bj, return_inverse=True)
    Q = np.zeros((rows.size, cols.size))
    np.add.at(Q, (rinv, cinv), qv)
    plan = TransportPlan(rows, cols, Q, obj, p)
    rho = np.maximum(rho, 0.0)
    eta = np.maximum(eta, 0.0)
    witness = W0Witness(SubProbability(space, np.minimum(rho, 1.0)), SubProbability(space, np.minimum(eta, 1.0)), plan, plan.value)
    return plan.value, witness


# representations ------------------------------------------------------------

def _rep_p1_plan(space, mu, nu):
    n = space.n
    C = np.zeros((n + 1, n + 1))
    C[:n, :n] = space.dist
    C[:n, n] = C[n, :n] = space.boundary_distances
    a = np.append(mu.weights, max(1.0 - mu.mass, 0.0))
    b = np.append(nu.weights, max(1.0 - nu.mass, 0.0))
    rows, cols = np.flatnonzero(a > 0), np.flatnonzero(b > 0)
    val, q, _, _ = solve_transport(a[rows], b[cols], C[np.ix_(rows, cols)])
    return val, q, rows, cols


def w0_rep_p1(mu, nu) -> float:
    """``W_1^0`` through the split ``μ = μ₁+μ₀``, ``ν = ν₁+ν₀`` as one transport.

    ``μ₁`` is moved onto ``ν₁`` at cost ``d``; ``μ₀`` is annihilated and
    ``ν₀`` created at ``∂`` at cost ``bd``. The ``∂`` supply ``1-μ(X)`` and
    demand ``1-ν(X)`` encode ``(μ+ν₀)(X) <= 1`` and ``(ν+μ₀)(X) <= 1``.
    """
    space, mu, nu = _interior_pair(mu, nu)
    return _rep_p1_plan(space, mu, nu)[0]


def w0_upper_rep(mu, nu, p: float = 1.0) -> float:
    """Upper bound ``(inf W_p(μ₁,ν₁)^p + W_p*(μ₀)^p + W_p*(ν₀)^p)^(1/p)``.

    The annihilation costs are written as self-couplings ``r`` of ``μ₀``
    and ``s`` of ``ν₀`` under ``2^-p d*^p``, so the whole bound is one LP
    in ``(q, r, s)``.
    """
    p = _check_p(p)
    space, mu, nu = _interior_pair(mu, nu)
    I, J = mu.support, nu.support
    a, b = mu.weights[I], nu.weights[J]
    si, sj = I.size, J.size
    if si == 0 and sj == 0:
        return 0.0
    d, ds = space.dist, space.star_matrix
    Cq = d[np.ix_(I, J)] ** p
    Cr = 2.0 ** -p * ds[np.ix_(I, I)] ** p
    Cs = 2.0 ** -p * ds[np.ix_(J, J)] ** p
    nq, nr, ns = si * sj, si * si, sj * sj
    oq, or_, os_ = 0, nq, nq + nr
    N = nq + nr + ns

    def block(nrows, ncols, which, offset):
        # rows of a coupling matrix (which=0) or its columns (which=1)
        k = np.arange(nrows * ncols)
        r = k // ncols if which == 0 else k % ncols
        return r, offset + k

    rows, cols, vals, rhs = [], [], [], []
    row0 = 0

    def add(r, c, v):
        rows.append(np.asarray(r) + row0)
        cols.append(np.asarray(c))
        vals.append(np.broadcast_to(np.asarray(v, dtype=float), np.shape(c)).copy())

    # rowsum q + rowsum r = μ
    r, c = block(si, sj, 0, oq); add(r, c, 1.0)
    r, c = block(si, si, 0, or_); add(r, c, 1.0)
    rhs.append(a); row0 += si
    # colsum r - rowsum r = 0
    r, c = block(si, si, 1, or_); add(r, c, 1.0)
    r, c = block(si, si, 0, or_); add(r, c, -1.0)
    rhs.append(np.zeros(si)); row0 += si
    # colsum q + rowsum s = ν
    r, c = block(si, sj, 1, oq); add(r, c, 1.0)
    r, c = block(sj, sj, 0, os_); add(r, c, 1.0)
    rhs.append(b); row0 += sj
    # colsum s - rowsum s = 0
    r, c = block(sj, sj, 1, os_); add(r, c, 1.0)
    r, c = block(sj, sj, 0, os_); add(r, c, -1.0)
    rhs.append(np.zeros(sj)); row0 += sj
    A_eq = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(row0, N))
    # μ₀(X) <= 1 - ν(X) and ν₀(X) <= 1 - μ(X)
    A_ub = sp.csr_matrix(
        (np.ones(nr + ns), (np.r_[np.zeros(nr, int), np.ones(ns, int)], np.r_[or_ + np.arange(nr), os_ + np.arange(ns)])),
        shape=(2, N),
    )
    b_ub = np.maximum([1.0 - nu.mass, 1.0 - mu.mass], 0.0)
    c = np.concatenate([Cq.ravel(), Cr.ravel(), Cs.ravel()])
    res = solve_lp(c, A_eq=A_eq, b_eq=np.concatenate(rhs), A_ub=A_ub, b_ub=b_ub)
    return max(res.fun, 0.0) ** (1.0 / p)


NINE_BLOCKS = tuple((r, c) for r in ("mu", "rho+", "rho-") for c in ("nu", "eta+", "eta-"))


def _nine_cost_kind(r, c):
    same = (r in ("mu", "rho+")) == (c in ("nu", "eta+"))
    return "d" if same else "d*"


def w0_nine_term(mu, nu, p: float = 1.0, decomposition=None, *, tol: float = 1e-9) -> float:
    """Nine-block description of ``W_p^0``.

    Row blocks are ``μ``, ``ρ⁺``, ``ρ⁻`` and column blocks ``ν``, ``η⁺``,
    ``η⁻``; blocks with equal charge are coupled under ``d``, blocks of
    opposite charge under ``d*``. ``ρ⁺`` and ``ρ⁻`` both have marginal
    ``ρ`` with ``(μ+2ρ)(X) = 1``, likewise for ``η``.

    With ``decomposition=None`` the minimum over all splits is computed as
    one LP. Otherwise ``decomposition`` maps each pair in
    :data:`NINE_BLOCKS` to ``(source_weights, target_weights)`` and the
    objective is evaluated for that split (each block transported optimally).
    """
    p = _check_p(p)
    space, mu, nu = _interior_pair(mu, nu)
    if decomposition is not None:
        return _nine_evaluate(space, mu, nu, p, decomposition, tol)
    n = space.n
    d_p = space.dist ** p
    ds_p = space.star_matrix ** p
    I, J = mu.support, nu.support
    pts = {"mu": I, "rho+": np.arange(n), "rho-": np.arange(n), "nu": J, "eta+": np.arange(n), "eta-": np.arange(n)}
    offsets, costs = {}, []
    off = 0
    for r, c in NINE_BLOCKS:
        M = (d_p if _nine_cost_kind(r, c) == "d" else ds_p)[np.ix_(pts[r], pts[c])]
        offsets[(r, c)] = (off, M.shape)
        costs.append(M.ravel())
        off += M.size
    n_cpl = off
    i_rho, i_eta = n_cpl, n_cpl + n
    N = n_cpl + 2 * n
    rows, cols, vals, rhs = [], [], [], []
    row0 = 0
    # row-block marginals
    for r in ("mu", "rho+", "rho-"):
        size = len(pts[r])
        for c in ("nu", "eta+", "eta-"):
            o, (h, w) = offsets[(r, c)]
            k = np.arange(h * w)
            rows.append(row0 + k // w); cols.append(o + k); vals.append(np.ones(h * w))
        if r == "mu":
            rhs.append(mu.weights[I])
        else:
            rows.append(row0 + np.arange(n)); cols.append(i_rho + np.arange(n)); vals.append(-np.ones(n))
            rhs.append(np.zeros(n))
        row0 += size
    for c in ("nu", "eta+", "eta-"):
        size = len(pts[c])
        for r in ("mu", "rho+", "rho-"):
            o, (h, w) = offsets[(r, c)]
            k = np.arange(h * w)
            rows.append(row0 + k % w); cols.append(o + k); vals.append(np.ones(h * w))
        if c == "nu":
            rhs.append(nu.weights[J])
        else:
            rows.append(row0 + np.arange(n)); cols.append(i_eta + np.arange(n)); vals.append(-np.ones(n))
            rhs.append(np.zeros(n))
        row0 += size
    # (μ+2ρ)(X) = 1 and (ν+2η)(X) = 1
    rows.append(np.full(n, row0)); cols.append(i_rho + np.arange(n)); vals.append(np.full(n, 2.0))
    rows.append(np.full(n, row0 + 1)); cols.append(i_eta + np.arange(n)); vals.append(np.full(n, 2.0))
    rhs.append([max(1.0 - mu.mass, 0.0), max(1.0 - nu.mass, 0.0)])
    row0 += 2
    A_eq = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(row0, N))
    c = np.concatenate(costs + [np.zeros(2 * n)])
    res = solve_lp(c, A_eq=A_eq, b_eq=np.concatenate([np.ravel(x) for x in rhs]))
    return max(res.fun, 0.0) ** (1.0 / p)


def _nine_evaluate(space, mu, nu, p, decomposition, tol):
    n = space.n
    missing = set(NINE_BLOCKS) - set(decomposition)
    if missing:
        raise ConfigurationError(f"decomposition lacks blocks {sorted(missing)}")
    parts = {k: tuple(np.asarray(w, dtype=float) for w in decomposition[k]) for k in NINE_BLOCKS}
    row_sum = {r: sum(parts[(r, c)][0] for c in ("nu", "eta+", "eta-")) for r in ("mu", "rho+", "rho-")}
    col_sum = {c: sum(parts[(r, c)][1] for r in ("mu", "rho+", "rho-")) for c in ("nu", "eta+", "eta-")}
    checks = [
        (row_sum["mu"], mu.weights, "mu"),
        (col_sum["nu"], nu.weights, "nu"),
        (row_sum["rho+"], row_sum["rho-"], "rho"),
        (col_sum["eta+"], col_sum["eta-"], "eta"),
    ]
    for got, want, name in checks:
        if np.abs(got - want).max() > tol:
            raise MassError(f"decomposition inconsistent with {name}")
    rho, eta = row_sum["rho+"], col_sum["eta+"]
    if abs(mu.mass + 2 * rho.sum() - 1.0) > tol or abs(nu.mass + 2 * eta.sum() - 1.0) > tol:
        raise MassError("decomposition violates (μ+2ρ)(X) = (ν+2η)(X) = 1")
    total_cost = 0.0
    for r, c in NINE_BLOCKS:
        src, dst = parts[(r, c)]
        if src.sum() <= 0 and dst.sum() <= 0:
            continue
        cost = space.dist if _nine_cost_kind(r, c) == "d" else space.star_matrix
        val, _ = wasserstein(cost, DiscreteMeasure(space, src), DiscreteMeasure(space, dst), p)
        total_cost += val ** p
    return total_cost ** (1.0 / p)


# chains and bounds ----------------------------------------------------------

def _split_for_chain(space, mu, nu):
    """Split from an optimal ``W_1'`` plan: transported parts and boundary parts."""
    _, plan = w_prime(mu, nu, 1.0, return_plan=True)
    n = space.n
    mu1, mu0, nu1, nu0 = (np.zeros(n) for _ in range(4))
    bd = space.boundary_distances
    for a, i in enumerate(plan.rows):
        for b, j in enumerate(plan.cols):
            m = plan.q[a, b]
            if m <= 0:
                continue
            if i == n and j == n:
                continue
            if i == n:
                nu0[j] += m
            elif j == n:
                mu0[i] += m
            elif bd[i] + bd[j] < space.dist[i, j]:
                mu0[i] += m
                nu0[j] += m
            else:
                mu1[i] += m
                nu1[j] += m
    return mu1, mu0, nu1, nu0


def w_flat_upper(mu, nu, p: float = 1.0, strategy: str = "boundary", m: int = 16):
    """Upper bound for the chain infimum ``W_p^♭(μ, ν)``.

    Strategies
    ----------
    ``"direct"``
        The one-step chain; the value is ``w0(μ, ν, p)``.
    ``"boundary"``
        Move the transported part linearly while shrinking the annihilated
        part into the boundary over ``m`` steps, then grow the created part
        over ``m`` more steps. The best of this chain and the direct one is
        returned.
    """
    p = _check_p(p)
    space, mu, nu = _interior_pair(mu, nu)
    direct, _ = w0(mu, nu, p)
    best = ChainSpec([mu, nu], [direct], direct)
    if strategy == "direct":
        return direct, best
    if strategy not in ("boundary", "boundary-annihilation"):
        raise ConfigurationError(f"unknown chain strategy {strategy!r}")
    if m < 1:
        raise ConfigurationError("need at least one step per half")
    mu1, mu0, nu1, nu0 = _split_for_chain(space, mu, nu)
    chain = []
    for s in np.linspace(0.0, 1.0, 2 * m + 1):
        w = (1 - s) * mu1 + s * nu1 + max(1 - 2 * s, 0.0) * mu0 + max(2 * s - 1, 0.0) * nu0
        chain.append(w)
    chain[0], chain[-1] = mu.weights, nu.weights
    measures = [SubProbability(space, np.maximum(w, 0.0)) for w in chain]
    steps = [w0(measures[i], measures[i + 1], p)[0] for i in range(2 * m)]
    value = float(sum(steps))
    if value < direct:
        best = ChainSpec(measures, steps, value)
    return best.value, best


def w_sharp_bounds(mu, nu, p: float = 1.0):
    """``(W_1'(μ, ν), W_p'(μ, ν))``, a bracket for ``W_p^♯``; exact at ``p = 1``."""
    p = _check_p(p)
    lower = w_prime(mu, nu, 1.0)
    upper = lower if p == 1.0 else w_prime(mu, nu, p)
    return lower, upper


def w0_upper_estimate(mu, nu, z: int) -> float:
    """``min W_1(μ₁, ν) + Σ d(x, z) μ₀(x)`` over splits ``μ = μ₁ + μ₀``.

    Requires ``μ(X) >= ν(X)`` and ``z`` in the boundary.
    """
    space, mu, nu = _interior_pair(mu, nu)
    z = int(z)
    if z not in space.boundary:
        raise ConfigurationError(f"point {z} is not a boundary point")
    excess = mu.mass - nu.mass
    if excess < -MASS_TOL:
        raise MassError("estimate needs mass(mu) >= mass(nu)")
    n = space.n
    C = np.zeros((n, n + 1))
    C[:, :n] = space.dist
    C[:, n] = space.dist[:, z]
    b = np.append(nu.weights, max(excess, 0.0))
    rows, cols = mu.support, np.flatnonzero(b > 0)
    if rows.size == 0:
        return 0.0
    val, _, _, _ = solve_transport(mu.weights[rows], b[cols], C[np.ix_(rows, cols)])
    return val


@dataclass(frozen=True)
class ProbeRow:
    index: int
    distance: float
    mass_gap: float


@dataclass(frozen=True)
class ProbeReport:
    rows: tuple
    monotone: bool
    to_zero: bool


def vague_convergence_probe(sequence, limit, p: float = 1.0, tol: float = 1e-9) -> ProbeReport:
    """Tabulate ``w0(μ_n, μ)`` and the mass gap along a sequence.

    ``monotone`` flags a nonincreasing distance column (up to ``tol``);
    ``to_zero`` flags that the last distance is below ``tol`` or at most a
    tenth of the first nonzero one.
    """
    rows = []
    for k, mu_k in enumerate(sequence, start=1):
        val, _ = w0(mu_k, limit, p)
        rows.append(ProbeRow(k, val, abs(mu_k.mass - limit.mass)))
    dist = [r.distance for r in rows]
    monotone = all(b <= a + tol for a, b in zip(dist, dist[1:]))
    first = next((x for x in dist if x > tol), 0.0)
    to_zero = bool(dist) and (dist[-1] <= tol or dist[-1] <= 0.1 * first)
    return ProbeReport(tuple(rows), monotone, to_zero)
