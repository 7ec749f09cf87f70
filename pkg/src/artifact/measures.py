"""Measure containers: nonnegative, subprobability and signed weight vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MassError, SpaceMismatchError

MASS_TOL = 1e-10
# entries in [-CLIP_TOL, 0) are treated as round-off and set to zero
CLIP_TOL = 1e-13


def _weights(space, weights, clip=True):
    w = np.array(weights, dtype=np.float64).reshape(-1)
    if w.shape != (space.n,):
        raise MassError(f"expected {space.n} weights, got {w.size}")
    if not np.all(np.isfinite(w)):
        raise MassError("weights must be finite")
    if clip:
        if w.min(initial=0.0) < -CLIP_TOL:
            raise MassError(f"negative weight {w.min()!r}")
        w[w < 0] = 0.0
    w.setflags(write=False)
    return w


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Nonnegative measure on the points of ``space``.

    ``space`` is a :class:`MetricSpace` or :class:`GluedSpace`.
    """

    space: object
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _weights(self.space, self.weights))

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    @classmethod
    def zero(cls, space):
        return cls(space, np.zeros(space.n))

    @classmethod
    def dirac(cls, space, i: int, mass: float = 1.0):
        w = np.zeros(space.n)
        w[int(i)] = mass
        return cls(space, w)

    @classmethod
    def from_atoms(cls, space, atoms: dict):
        """Build from ``{index: mass}``."""
        w = np.zeros(space.n)
        for i, m in atoms.items():
            w[int(i)] += m
        return cls(space, w)

    def scaled(self, c: float):
        return type(self)(self.space, self.weights * c)

    def __add__(self, other):
        _same_space(self, other)
        return DiscreteMeasure(self.space, self.weights + other.weights)

    def __repr__(self):
        return f"{type(self).__name__}(mass={self.mass:.6g}, support={len(self.support)})"


class SubProbability(DiscreteMeasure):
    """Nonnegative measure of mass at most one."""

    def __post_init__(self):
        super().__post_init__()
        if self.mass > 1 + MASS_TOL:
            raise MassError(f"subprobability has mass {self.mass!r} > 1")

    def require_interior(self, tol: float = 0.0):
        """Raise unless the measure vanishes on the boundary of its space."""
        Z = list(getattr(self.space, "boundary", ()))
        if Z and self.weights[Z].max() > tol:
            raise MassError("measure on Y charges a boundary point")
        return self


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    space: object
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _weights(self.space, self.weights, clip=False))

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def positive(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.space, np.maximum(self.weights, 0.0))

    @property
    def negative(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.space, np.maximum(-self.weights, 0.0))


def _same_space(*measures):
    s = measures[0].space
    for m in measures[1:]:
        if m.space is not s:
            raise SpaceMismatchError("measures live on different spaces")
    return s


def as_subprobability(mu) -> SubProbability:
    if isinstance(mu, SubProbability):
        return mu
    return SubProbability(mu.space, mu.weights)


def random_subprobability(space, rng, mass_range=(0.2, 1.0), density: float = 1.0) -> SubProbability:
    """Random measure on ``Y`` with mass drawn uniformly from ``mass_range``.

    ``density`` is the probability that an interior point is charged (at
    least one point always is).
    """
    Y = np.flatnonzero(~space.boundary_mask)
    w = np.zeros(space.n)
    keep = Y[rng.random(Y.size) < density]
    if keep.size == 0:
        keep = rng.choice(Y, 1)
    w[keep] = rng.random(keep.size) + 1e-3
    w *= rng.uniform(*mass_range) / w.sum()
    return SubProbability(space, w)
