"""Finite metric spaces with a boundary set, derived metrics and gluings.

A space stores the full distance matrix over one index universe ``X``.
The boundary ``Z`` is a subset of indices and ``Y`` is its complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import ConfigurationError

METRIC_TOL = 1e-12


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Violated invariants; empty iff the object is valid."""

    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def lines(self) -> list[str]:
        return [f"{v.kind} at {v.indices}: {v.detail}" for v in self.violations]


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """Finite metric space ``X`` with boundary ``Z`` and reference measure.

    Parameters
    ----------
    dist : ndarray, shape (n, n)
        Symmetric distance matrix.
    boundary : sequence of int
        Indices of ``Z``. May be empty only for spaces that are not used
        with boundary-dependent quantities (e.g. a cycle).
    weights : ndarray, shape (n,)
        Strictly positive reference measure.
    labels, coords : optional
        Point names and embedding coordinates (grid builders set ``coords``).
    """

    dist: np.ndarray
    boundary: tuple
    weights: np.ndarray
    labels: tuple | None = None
    coords: np.ndarray | None = field(default=None)

    def __post_init__(self):
        dist = np.array(self.dist, dtype=np.float64)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ConfigurationError("distance matrix must be square")
        n = dist.shape[0]
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if w.shape != (n,):
            raise ConfigurationError(f"expected {n} weights, got {w.size}")
        bnd = tuple(sorted({int(z) for z in self.boundary}))
        if any(z < 0 or z >= n for z in bnd):
            raise ConfigurationError("boundary index out of range")
        if self.labels is not None and len(self.labels) != n:
            raise ConfigurationError("labels length does not match point count")
        dist.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "boundary", bnd)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if self.coords is not None:
            c = np.array(self.coords, dtype=np.float64)
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.boundary)] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def interior(self) -> np.ndarray:
        """Indices of ``Y``."""
        return np.flatnonzero(~self.boundary_mask)

    def _need_boundary(self):
        if not self.boundary:
            raise ConfigurationError("operation needs a nonempty boundary set")

    @cached_property
    def boundary_distances(self) -> np.ndarray:
        """Vector of ``min_z d(x, z)``."""
        self._need_boundary()
        out = self.dist[:, list(self.boundary)].min(axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def star_matrix(self) -> np.ndarray:
        self._need_boundary()
        out = kernels.min_plus_through(self.dist, np.asarray(self.boundary, dtype=np.int64))
        out.setflags(write=False)
        return out

    @cached_property
    def dagger_matrix(self) -> np.ndarray:
        bd = self.boundary_distances
        out = bd[:, None] + bd[None, :]
        out.setflags(write=False)
        return out

    @cached_property
    def shortcut_matrix(self) -> np.ndarray:
        out = np.minimum(self.dist, self.dagger_matrix)
        out.setflags(write=False)
        return out

    @cached_property
    def doubling(self) -> "GluedSpace":
        """The doubling ``glue(self, 2)``, built on first use."""
        return glue(self, 2)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Index of the grid node at coordinate ``x`` (1-d spaces with coords)."""
        if self.coords is None:
            raise ConfigurationError("space has no coordinates")
        c = self.coords.reshape(self.n, -1)[:, 0]
        i = int(np.argmin(np.abs(c - x)))
        if abs(c[i] - x) > tol:
            raise ConfigurationError(f"no grid node at {x!r} (nearest {float(c[i])!r})")
        return i

    def __repr__(self):
        return f"MetricSpace(n={self.n}, |Z|={len(self.boundary)})"


def validate_metric(space: MetricSpace, tol: float = METRIC_TOL, limit: int = 20) -> ValidationReport:
    """List violated metric-space invariants.

    Checks nonnegativity, zero diagonal, symmetry, separation, the triangle
    inequality (with a witness triple), positive weights and ``0 < |Z| < n``.
    At most ``limit`` violations of each kind are reported.
    """
    d = space.dist
    n = space.n
    out = []

    def add(kind, pairs, fmt):
        for idx in pairs[:limit]:
            out.append(Violation(kind, tuple(int(i) for i in idx), fmt(idx)))

    if not np.all(np.isfinite(d)):
        add("nonfinite", [tuple(ix) for ix in np.argwhere(~np.isfinite(d))], lambda ix: "entry not finite")
        return ValidationReport(tuple(out))
    add("negative", [tuple(ix) for ix in np.argwhere(d < -tol)], lambda ix: f"d={d[ix]:.17g}")
    add("diagonal", [(i,) for i in np.flatnonzero(np.abs(np.diag(d)) > tol)], lambda ix: f"d(i,i)={d[ix[0], ix[0]]:.17g}")
    asym = np.argwhere(np.triu(np.abs(d - d.T) > tol, 1))
    add("asymmetry", [tuple(ix) for ix in asym], lambda ix: f"{d[ix]:.17g} vs {d[ix[::-1]]:.17g}")
    off = ~np.eye(n, dtype=bool)
    sep = np.argwhere(np.triu(off & (d <= tol), 1))
    add("separation", [tuple(ix) for ix in sep], lambda ix: "distinct points at distance 0")
    tri = kernels.triangle_violations(d, tol, limit)
    for i, k, j in tri:
        out.append(Violation("triangle", (i, k, j), f"d({i},{j})={d[i, j]:.17g} > d({i},{k})+d({k},{j})={d[i, k] + d[k, j]:.17g}"))
    bad_w = np.flatnonzero(~(space.weights > 0) | ~np.isfinite(space.weights))
    add("weight", [(i,) for i in bad_w], lambda ix: f"w={space.weights[ix[0]]:.17g}")
    nz = len(space.boundary)
    if not 0 < nz < n:
        out.append(Violation("boundary", (nz,), f"need 0 < |Z| < n, got |Z|={nz}, n={n}"))
    return ValidationReport(tuple(out))


def _point(space, i) -> int:
    i = int(i)
    if not 0 <= i < space.n:
        raise ConfigurationError(f"point {i} out of range")
    return i


def star_metric(space: MetricSpace, i: int, j: int) -> float:
    """``d*(i, j) = min_z d(i, z) + d(z, j)``."""
    return float(space.star_matrix[_point(space, i), _point(space, j)])


def boundary_distance(space: MetricSpace, i: int) -> float:
    return float(space.boundary_distances[_point(space, i)])


def dagger_metric(space: MetricSpace, i: int, j: int) -> float:
    """``d†(i, j) = bd(i) + bd(j)``."""
    return float(space.dagger_matrix[_point(space, i), _point(space, j)])


def shortcut_metric(space: MetricSpace, i: int, j: int) -> float:
    """``d'(i, j) = min(d(i, j), bd(i) + bd(j))``."""
    return float(space.shortcut_matrix[_point(space, i), _point(space, j)])


# builders ------------------------------------------------------------------

def interval(a: float, b: float, n_points: int) -> MetricSpace:
    """Uniform grid on ``[a, b]`` with ``Z = {a, b}`` and trapezoidal weights."""
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise ConfigurationError(f"degenerate interval [{a}, {b}]")
    if n_points < 3:
        raise ConfigurationError("an interval grid needs at least 3 points")
    x = np.linspace(a, b, n_points)
    h = (b - a) / (n_points - 1)
    w = np.full(n_points, h)
    w[0] = w[-1] = h / 2
    return MetricSpace(np.abs(x[:, None] - x[None, :]), (0, n_points - 1), w, coords=x)


def cycle(circumference: float, n_points: int, boundary=()) -> MetricSpace:
    """Uniform cycle with geodesic distance; the boundary is optional."""
    if not circumference > 0 or n_points < 3:
        raise ConfigurationError("cycle needs positive circumference and >= 3 points")
    h = circumference / n_points
    k = np.arange(n_points)
    steps = np.abs(k[:, None] - k[None, :])
    d = np.minimum(steps, n_points - steps) * h
    return MetricSpace(d, tuple(boundary), np.full(n_points, h), coords=k * h)


def from_points(coords, boundary, weights=None, labels=None) -> MetricSpace:
    """Euclidean space on the given points (1-d or n-d coordinates)."""
    c = np.asarray(coords, dtype=np.float64)
    pts = c.reshape(len(c), -1)
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    if weights is None:
        weights = np.ones(len(c))
    return MetricSpace(d, tuple(boundary), weights, labels=labels, coords=c)


# gluing --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GluedSpace:
    """``k`` copies of a base space identified along ``Z``.

    Glued points are ordered as: the shared copy of ``Z`` (in boundary
    order), then ``Y`` of sheet 0, ``Y`` of sheet 1, and so on.
    ``sheet_of`` is ``-1`` on the shared boundary points. For the doubling,
    sheet 0 is the ``+`` sheet and sheet 1 the ``-`` sheet.
    """

    base: MetricSpace
    k: int
    dist: np.ndarray
    weights: np.ndarray
    sheet_of: np.ndarray
    base_of: np.ndarray

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def n_boundary(self) -> int:
        return len(self.base.boundary)

    @cached_property
    def _lookup(self) -> np.ndarray:
        table = np.full((self.k, self.base.n), -1, dtype=np.int64)
        for g in range(self.n):
            if self.sheet_of[g] < 0:
                table[:, self.base_of[g]] = g
            else:
                table[self.sheet_of[g], self.base_of[g]] = g
        return table

    def index(self, sheet: int, base_index: int) -> int:
        """Glued index of ``base_index`` on ``sheet`` (boundary points are shared)."""
        if not 0 <= sheet < self.k:
            raise ConfigurationError(f"invalid sheet {sheet} for k={self.k}")
        return int(self._lookup[sheet, _point(self.base, base_index)])

    def sheet_indices(self, sheet: int) -> np.ndarray:
        """Glued indices of the full sheet ``sheet`` in base order (``Z`` included)."""
        if not 0 <= sheet < self.k:
            raise ConfigurationError(f"invalid sheet {sheet} for k={self.k}")
        return self._lookup[sheet].copy()

    def as_metric_space(self) -> MetricSpace:
        """The glued space as a plain metric space (no boundary)."""
        return MetricSpace(self.dist, (), self.weights)

    def __repr__(self):
        return f"GluedSpace(k={self.k}, n={self.n}, base={self.base!r})"


def glue(space: MetricSpace, k: int = 2) -> GluedSpace:
    """Glue ``k`` copies of ``space`` along its boundary.

    Within a sheet (and from any boundary point) the glued distance is
    ``d``; across sheets it is ``d*``. Sheet points get weight ``w / k``
    and shared boundary points keep their full weight.
    """
    if int(k) != k or k < 2:
        raise ConfigurationError(f"need k >= 2 sheets, got {k}")
    k = int(k)
    space._need_boundary()
    Z = np.asarray(space.boundary, dtype=np.int64)
    Y = space.interior
    base_of = np.concatenate([Z] + [Y] * k)
    sheet_of = np.concatenate([np.full(len(Z), -1)] + [np.full(len(Y), s) for s in range(k)])
    same = (sheet_of[:, None] == sheet_of[None, :]) | (sheet_of[:, None] < 0) | (sheet_of[None, :] < 0)
    ix = np.ix_(base_of, base_of)
    dist = np.where(same, space.dist[ix], space.star_matrix[ix])
    weights = np.where(sheet_of < 0, space.weights[base_of], space.weights[base_of] / k)
    for a in (dist, weights, sheet_of, base_of):
        a.setflags(write=False)
    return GluedSpace(space, k, dist, weights, sheet_of, base_of)


def mirror(g: GluedSpace, i: int, target_sheet: int) -> int:
    """Move glued point ``i`` to ``target_sheet``; shared boundary points are fixed."""
    i = int(i)
    if not 0 <= i < g.n:
        raise ConfigurationError(f"glued point {i} out of range")
    if not 0 <= target_sheet < g.k:
        raise ConfigurationError(f"invalid sheet {target_sheet} for k={g.k}")
    if g.sheet_of[i] < 0:
        return i
    return g.index(target_sheet, int(g.base_of[i]))


def conjugate(g: GluedSpace, i: int) -> int:
    """Swap sheets of the doubling."""
    if g.k != 2:
        raise ConfigurationError("conjugation is defined for the doubling (k=2)")
    s = g.sheet_of[int(i)]
    return int(i) if s < 0 else mirror(g, i, 1 - s)
