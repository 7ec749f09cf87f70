"""Finite Markov heat semigroups: Neumann, Dirichlet and glued flows.

A :class:`HeatSystem` is a weighted graph ``(c, w)`` with generator
``L f(x) = (1/w_x) Σ_y c_xy (f(y) - f(x))``, self-adjoint for the
``w``-weighted inner product. The Dirichlet generator is the ``Y``-block
of ``L`` extended by zero, so its semigroup kills everything at ``Z``.
Semigroups are evaluated exactly through a symmetric eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .charged import ChargedMeasure, charged_entropy, phi, psi, tilde_w
from .errors import ConfigurationError, MassError, SpaceMismatchError
from .measures import DiscreteMeasure, SignedMeasure, SubProbability
from .metric_space import GluedSpace, MetricSpace, glue, interval

FLAVORS = ("neumann", "dirichlet", "glued")


@dataclass(frozen=True, eq=False)
class HeatSystem:
    """Weighted graph with its Neumann and Dirichlet heat semigroups.

    Parameters
    ----------
    space : MetricSpace or GluedSpace
    conductance : ndarray, shape (n, n)
        Symmetric nonnegative edge weights with zero diagonal.
    mesh : float, optional
        Grid spacing, used for mesh-proportional tolerances.
    base : HeatSystem, optional
        For a glued system, the system it was glued from.
    """

    space: object
    conductance: np.ndarray
    mesh: float | None = None
    base: "HeatSystem | None" = None

    def __post_init__(self):
        c = np.array(self.conductance, dtype=np.float64)
        n = self.space.n
        if c.shape != (n, n):
            raise ConfigurationError("conductance matrix has the wrong shape")
        if np.abs(c - c.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(c).max()) or c.min() < 0:
            raise ConfigurationError("conductances must be symmetric and nonnegative")
        np.fill_diagonal(c, 0.0)
        c.setflags(write=False)
        object.__setattr__(self, "conductance", c)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def weights(self) -> np.ndarray:
        return self.space.weights

    @property
    def boundary(self) -> np.ndarray:
        return np.asarray(getattr(self.space, "boundary", ()), dtype=np.int64)

    @cached_property
    def interior(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.boundary] = False
        return np.flatnonzero(mask)

    @cached_property
    def generator(self) -> np.ndarray:
        c = self.conductance
        return (c - np.diag(c.sum(axis=1))) / self.weights[:, None]

    @cached_property
    def generator0(self) -> np.ndarray:
        L0 = np.zeros((self.n, self.n))
        Y = self.interior
        L0[np.ix_(Y, Y)] = self.generator[np.ix_(Y, Y)]
        return L0

    @staticmethod
    def _eig(L, w):
        s = np.sqrt(w)
        S = s[:, None] * L / s[None, :]
        lam, V = np.linalg.eigh((S + S.T) / 2)
        return np.minimum(lam, 0.0), V, s

    @cached_property
    def spectral(self):
        """``(lam, V, sqrt_w)`` with ``L = W^-1/2 V diag(lam) V^T W^1/2``."""
        return self._eig(self.generator, self.weights)

    @cached_property
    def spectral0(self):
        Y = self.interior
        return self._eig(self.generator[np.ix_(Y, Y)], self.weights[Y])

    def _apply(self, f, t, dirichlet):
        f = np.asarray(f, dtype=np.float64)
        if dirichlet:
            if self.boundary.size == 0:
                raise ConfigurationError("Dirichlet flow needs a boundary")
            Y = self.interior
            lam, V, s = self.spectral0
            out = np.zeros_like(f)
            g = f[Y] if f.ndim == 1 else f[Y, :]
            res = (V @ (np.exp(t * lam)[:, None] * (V.T @ (s[:, None] * g.reshape(len(Y), -1))))) / s[:, None]
            if f.ndim == 1:
                out[Y] = res[:, 0]
            else:
                out[Y, :] = res
            return out
        lam, V, s = self.spectral
        g = f.reshape(self.n, -1)
        res = (V @ (np.exp(t * lam)[:, None] * (V.T @ (s[:, None] * g)))) / s[:, None]
        return res.reshape(f.shape)

    def kernel(self, t: float, flavor: str = "neumann") -> np.ndarray:
        """Matrix ``P`` with ``P_t f = P @ f``; ``p_t(x, dy) = P[x, y]``."""
        _check_t(t)
        if flavor == "glued":
            return self._glued_matrix(t)
        return self._apply(np.eye(self.n), t, _dirichlet(flavor))

    def _glued_matrix(self, t):
        if self.base is None:
            raise ConfigurationError("glued flavor needs a glued system")
        return np.stack([glued_semigroup_apply(self.base, e, t, self.space) for e in np.eye(self.n)], axis=1)

    def __repr__(self):
        return f"HeatSystem(n={self.n}, mesh={self.mesh})"


def _check_t(t):
    if not np.isfinite(t) or t < 0:
        raise ConfigurationError(f"time must be >= 0, got {t!r}")


def _dirichlet(flavor):
    if flavor not in FLAVORS:
        raise ConfigurationError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    return flavor == "dirichlet"


# builders --------------------------------------------------------------------

def build_interval_system(a: float, b: float, n_points: int) -> HeatSystem:
    """Uniform grid on ``[a, b]``: conductance ``1/h`` between neighbours,
    weights ``h`` (``h/2`` at the endpoints), ``Z = {a, b}``."""
    space = interval(a, b, n_points)
    h = (b - a) / (n_points - 1)
    c = np.zeros((n_points, n_points))
    i = np.arange(n_points - 1)
    c[i, i + 1] = c[i + 1, i] = 1.0 / h
    return HeatSystem(space, c, mesh=h)


def build_glued_system(base_sys: HeatSystem, k: int = 2) -> HeatSystem:
    """Heat system on the ``k``-gluing of ``base_sys.space``.

    Edges inside a sheet and edges from a sheet to ``Z`` carry ``c/k``;
    edges inside ``Z`` keep ``c``. Together with the glued weights this
    makes sheet-symmetric functions evolve by the Neumann flow and
    sheet-mean-free functions by the Dirichlet flow, exactly.
    """
    space = base_sys.space
    if not isinstance(space, MetricSpace):
        raise ConfigurationError("can only glue a system over a MetricSpace")
    g = space.doubling if k == 2 else glue(space, k)
    c = base_sys.conductance
    base_of, sheet_of = g.base_of, g.sheet_of
    cb = c[np.ix_(base_of, base_of)]
    zs = sheet_of < 0
    same = sheet_of[:, None] == sheet_of[None, :]
    touches_z = zs[:, None] | zs[None, :]
    both_z = zs[:, None] & zs[None, :]
    scale = np.where(both_z, 1.0, np.where(same | touches_z, 1.0 / k, 0.0))
    return HeatSystem(g, cb * scale, mesh=base_sys.mesh, base=base_sys)


# semigroups -------------------------------------------------------------------

def apply_heat(sys: HeatSystem, f, t: float, flavor: str = "neumann") -> np.ndarray:
    """``P_t f`` for the chosen flavor.

    ``"glued"`` requires a system from :func:`build_glued_system` and
    evaluates the sheetwise formula of :func:`glued_semigroup_apply`.
    """
    _check_t(t)
    f = np.asarray(f, dtype=np.float64)
    if f.shape[0] != sys.n:
        raise ConfigurationError(f"function has {f.shape[0]} values, system has {sys.n} points")
    if flavor == "glued":
        if sys.base is None:
            raise ConfigurationError("glued flavor needs a glued system")
        return glued_semigroup_apply(sys.base, f, t, sys.space)
    return sys._apply(f, t, _dirichlet(flavor))


def apply_measure_flow(sys: HeatSystem, mu, t: float, flavor: str = "neumann"):
    """Adjoint flow ``𝒫_t μ = Σ_x μ(x) p_t(x, ·)``.

    Accepts a :class:`DiscreteMeasure`, a :class:`SignedMeasure` or a raw
    weight vector, and returns the same kind.
    """
    w = sys.weights
    raw = np.asarray(getattr(mu, "weights", mu), dtype=np.float64)
    out = w * apply_heat(sys, raw / w, t, flavor)
    if isinstance(mu, SignedMeasure):
        return SignedMeasure(mu.space, out)
    if isinstance(mu, DiscreteMeasure):
        out[(out < 0) & (out > -1e-13)] = 0.0
        return type(mu)(mu.space, out)
    return out


def _sheet_matrix(g: GluedSpace, u):
    """Per-sheet values ``U[i, x]`` of a function on the gluing."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim == 2:
        if u.shape != (g.k, g.base.n):
            raise ConfigurationError(f"expected shape {(g.k, g.base.n)}")
        Z = list(g.base.boundary)
        if np.abs(u[:, Z] - u[0, Z]).max(initial=0.0) > 1e-12:
            raise ConfigurationError("sheet restrictions disagree on the boundary")
        return u.copy()
    if u.shape != (g.n,):
        raise ConfigurationError(f"expected {g.n} values on the gluing")
    return np.stack([u[g.sheet_indices(i)] for i in range(g.k)])


def _to_glued(g: GluedSpace, U) -> np.ndarray:
    out = np.empty(g.n)
    for i in range(g.k):
        out[g.sheet_indices(i)] = U[i]
    return out


def glued_semigroup_apply(base_sys: HeatSystem, u, t: float, g: GluedSpace | None = None) -> np.ndarray:
    """Sheetwise glued semigroup ``P_t ū + P_t^0 ů_i`` on sheet ``i``.

    ``ū`` is the mean over sheets and ``ů_i = u_i - ū`` vanishes on ``Z``.
    ``u`` is a vector on the gluing, or a ``(k, n)`` array of sheet
    functions that agree on ``Z``. Returns a vector on the gluing.
    """
    _check_t(t)
    if g is None:
        g = base_sys.space.doubling
    if g.base is not base_sys.space:
        raise SpaceMismatchError("gluing is not built over this system's space")
    U = _sheet_matrix(g, u)
    mean = U.mean(axis=0)
    free = U - mean
    out = base_sys._apply(mean, t, False)[None, :] + base_sys._apply(free.T, t, True).T
    return _to_glued(g, out)


def glued_direct_apply(glued_sys: HeatSystem, u, t: float) -> np.ndarray:
    """``exp(t L̂) u`` with the generator of the glued graph."""
    return apply_heat(glued_sys, u, t, "neumann")


def approx_dirichlet_form(sys: HeatSystem, u, v, t: float, flavor: str = "neumann") -> float:
    """``ℰ_t(u, v) = -(1/t) ⟨v, P_t u - u⟩_w``."""
    if not t > 0:
        raise ConfigurationError("approximate form needs t > 0")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return float(-(sys.weights * v) @ (apply_heat(sys, u, t, flavor) - u) / t)


def glued_form_split(base_sys: HeatSystem, u, v, t: float, g: GluedSpace | None = None) -> float:
    """Right-hand side ``ℰ_t(ū, v̄) + (1/k) Σ_i ℰ_t^0(ů_i, v̊_i)``."""
    if g is None:
        g = base_sys.space.doubling
    U, V = _sheet_matrix(g, u), _sheet_matrix(g, v)
    ub, vb = U.mean(axis=0), V.mean(axis=0)
    val = approx_dirichlet_form(base_sys, ub, vb, t, "neumann")
    for i in range(g.k):
        val += approx_dirichlet_form(base_sys, U[i] - ub, V[i] - vb, t, "dirichlet") / g.k
    return val


def charged_flow(s: ChargedMeasure, t: float, base_sys: HeatSystem) -> ChargedMeasure:
    """Heat flow of a charged measure.

    The total measure follows the Neumann flow and the effective measure
    the Dirichlet flow; the pair is recombined as
    ``(𝒫_t σ̄/2 + 𝒫_t^0 σ⁰/2, 𝒫_t σ̄/2 - 𝒫_t^0 σ⁰/2)``.
    """
    if s.space is not base_sys.space:
        raise SpaceMismatchError("charged measure and system live on different spaces")
    tot = s.plus.weights + s.minus.weights
    eff = s.plus.weights - s.minus.weights
    a = apply_measure_flow(base_sys, tot / 2, t, "neumann")
    b = apply_measure_flow(base_sys, eff / 2, t, "dirichlet")
    plus, minus = a + b, a - b
    for w in (plus, minus):
        w[(w < 0) & (w > -1e-13)] = 0.0
    return ChargedMeasure.from_weights(s.space, plus, minus)


def charged_flow_via_gluing(s: ChargedMeasure, t: float, glued_sys: HeatSystem) -> ChargedMeasure:
    """``Ψ(𝒫̂_t Φ(σ))``: the same flow computed on the doubling."""
    h = phi(s, glued_sys.space)
    return psi(apply_measure_flow(glued_sys, h, t, "neumann"))


@dataclass(frozen=True)
class FlowState:
    t: float
    values: np.ndarray
    flavor: str


def flow_trajectory(sys: HeatSystem, mu, times, flavor: str = "neumann") -> list:
    """Measure flow sampled at ``times``."""
    out = []
    for t in times:
        m = apply_measure_flow(sys, mu, t, flavor)
        out.append(FlowState(float(t), np.asarray(getattr(m, "weights", m)), flavor))
    return out


# carré du champ ---------------------------------------------------------------

def gamma(sys: HeatSystem, f, g=None) -> np.ndarray:
    """``⟨∇f, ∇g⟩ = ½(L(fg) - f Lg - g Lf)``; ``Γ(f)`` when ``g`` is omitted."""
    L = sys.generator
    f = np.asarray(f, dtype=np.float64)
    g = f if g is None else np.asarray(g, dtype=np.float64)
    return 0.5 * (L @ (f * g) - f * (L @ g) - g * (L @ f))


# experiments ------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentRow:
    t: float
    quantity: float
    bound: float
    violation: float
    claim: str


@dataclass(frozen=True)
class ExperimentTable:
    rows: tuple
    tolerance: float

    @property
    def max_violation(self) -> float:
        return max((r.violation for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_csv(self) -> str:
        lines = ["t,quantity,bound,violation,claim"]
        for r in self.rows:
            lines.append(f"{r.t!r},{r.quantity!r},{r.bound!r},{r.violation!r},{r.claim}")
        return "\n".join(lines) + "\n"


def contraction_experiment(mu0, nu0, p: float, times, base_sys: HeatSystem, K: float = 0.0, tol: float = 1e-6) -> ExperimentTable:
    """Track ``w0(𝒫_t^0 μ₀, 𝒫_t^0 ν₀, p)`` against ``e^{-Kt} w0(μ₀, ν₀, p)``.

    ``violation`` is the excess over the exponential bound or over the
    previous row, whichever is larger.
    """
    from .annihilation import w0

    times = _sorted_times(times)
    rows = []
    start = None
    prev = np.inf
    for t in times:
        mt = apply_measure_flow(base_sys, SubProbability(mu0.space, mu0.weights), t, "dirichlet")
        nt = apply_measure_flow(base_sys, SubProbability(nu0.space, nu0.weights), t, "dirichlet")
        val = w0(mt, nt, p)[0]
        if start is None:
            start = val if t == 0 else w0(mu0, nu0, p)[0]
        bound = float(np.exp(-K * t) * start)
        viol = max(0.0, val - bound, val - prev)
        rows.append(ExperimentRow(float(t), val, bound, viol, "w0-contraction-dirichlet"))
        prev = val
    return ExperimentTable(tuple(rows), tol)


def tilde_contraction_experiment(s0: ChargedMeasure, t0: ChargedMeasure, p: float, times, base_sys: HeatSystem, K: float = 0.0, tol: float = 1e-6) -> ExperimentTable:
    """Same as :func:`contraction_experiment` for ``W̃_p`` of charged flows."""
    times = _sorted_times(times)
    start = tilde_w(s0, t0, p)
    rows, prev = [], np.inf
    for t in times:
        val = tilde_w(charged_flow(s0, t, base_sys), charged_flow(t0, t, base_sys), p)
        bound = float(np.exp(-K * t) * start)
        viol = max(0.0, val - bound, val - prev)
        rows.append(ExperimentRow(float(t), val, bound, viol, "tilde-w-contraction"))
        prev = val
    return ExperimentTable(tuple(rows), tol)


def _sorted_times(times):
    times = [float(t) for t in times]
    for t in times:
        _check_t(t)
    if times != sorted(times):
        raise ConfigurationError("times must be sorted")
    return times


def _require_dirichlet_domain(sys, f):
    f = np.asarray(f, dtype=np.float64)
    Z = sys.boundary
    if Z.size and np.abs(f[Z]).max() > 1e-12:
        raise ConfigurationError("function must vanish on the boundary")
    return f


@dataclass(frozen=True)
class GradientReport:
    t: float
    lhs: np.ndarray
    rhs: np.ndarray
    max_violation: float
    mesh: float | None


def gradient_estimate_check(f, t: float, p: float, K: float, base_sys: HeatSystem) -> GradientReport:
    """Pointwise ``Γ(P_t^0 f)^{p/2} <= e^{-Kpt} P_t(Γ(f)^{p/2})``."""
    _check_t(t)
    f = _require_dirichlet_domain(base_sys, f)
    ft = base_sys._apply(f, t, True)
    lhs = np.maximum(gamma(base_sys, ft), 0.0) ** (p / 2)
    rhs = np.exp(-K * p * t) * base_sys._apply(np.maximum(gamma(base_sys, f), 0.0) ** (p / 2), t, False)
    return GradientReport(float(t), lhs, rhs, float(np.max(lhs - rhs)), base_sys.mesh)


@dataclass(frozen=True)
class BochnerReport:
    lhs: float
    rhs: float
    residual: float
    mesh: float | None


def bochner_check(f, phi_fn, p: float, K: float, base_sys: HeatSystem) -> BochnerReport:
    """Integrated ``p``-Bochner inequality with test function ``φ >= 0``.

    ``residual = (1/p) Σ Lφ Γ(f)^{p/2} w - Σ φ Γ(f)^{(p-2)/2} ⟨∇f, ∇L⁰f⟩ w
    - K Σ φ Γ(f)^{p/2} w``, expected ``>= 0``.
    """
    if not 1 <= p <= 2:
        raise ConfigurationError("Bochner check is stated for p in [1, 2]")
    f = _require_dirichlet_domain(base_sys, f)
    phi_fn = np.asarray(phi_fn, dtype=np.float64)
    if phi_fn.min() < 0:
        raise ConfigurationError("test function must be nonnegative")
    w = base_sys.weights
    L = base_sys.generator
    G = np.maximum(gamma(base_sys, f), 0.0)
    cross = gamma(base_sys, f, base_sys.generator0 @ f)
    nz = G > 0
    Gp = G ** (p / 2)
    term1 = float((L @ phi_fn) * Gp @ w) / p
    term2 = float(np.sum((phi_fn * cross * w)[nz] * G[nz] ** ((p - 2) / 2)))
    lhs = term1 - term2
    rhs = float(K * (phi_fn * Gp) @ w)
    return BochnerReport(lhs, rhs, lhs - rhs, base_sys.mesh)


def evi_residual(sigma0: ChargedMeasure, tau: ChargedMeasure, t_grid, K: float, base_sys: HeatSystem) -> ExperimentTable:
    """Finite-difference EVI residual along the charged heat flow.

    Row at ``t_i``: ``(½W̃₂²(σ_{i+1}, τ) - ½W̃₂²(σ_i, τ))/(t_{i+1} - t_i)
    + (K/2) W̃₂²(σ_i, τ) - (Ẽnt(τ) - Ẽnt(σ_i))``; EVI predicts ``<= 0``
    up to discretization error.
    """
    ts = _sorted_times(t_grid)
    ent_tau = charged_entropy(tau)
    states = [charged_flow(sigma0, t, base_sys) for t in ts]
    half_sq = [0.5 * tilde_w(s, tau, 2.0) ** 2 for s in states]
    rows = []
    for i in range(len(ts) - 1):
        dt = ts[i + 1] - ts[i]
        if dt <= 0:
            raise ConfigurationError("time grid must be strictly increasing")
        deriv = (half_sq[i + 1] - half_sq[i]) / dt
        res = deriv + K * half_sq[i] - (ent_tau - charged_entropy(states[i]))
        rows.append(ExperimentRow(ts[i], res, 0.0, max(res, 0.0), "evi-charged-flow"))
    return ExperimentTable(tuple(rows), base_sys.mesh or 0.0)
