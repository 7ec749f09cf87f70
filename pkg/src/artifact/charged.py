"""Charged probability measures and their identification with measures on the doubling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfiniteEntropyError, MassError, SpaceMismatchError
from .measures import MASS_TOL, DiscreteMeasure, SignedMeasure, SubProbability
from .metric_space import GluedSpace, MetricSpace
from .transport import wasserstein

__all__ = [
    "ChargedMeasure",
    "SignedMeasure",
    "SubProbability",
    "effective",
    "total",
    "phi",
    "psi",
    "tilde_w",
    "lift",
    "charged_entropy",
    "entropy",
    "doubling_of",
]

AGREE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ChargedMeasure:
    """Pair ``(plus, minus)`` agreeing on ``Z`` with total mass one.

    Inputs are validated and never renormalized.
    """

    plus: SubProbability
    minus: SubProbability

    def __post_init__(self):
        plus, minus = self.plus, self.minus
        if plus.space is not minus.space:
            raise SpaceMismatchError("plus and minus live on different spaces")
        if not isinstance(plus, SubProbability):
            plus = SubProbability(plus.space, plus.weights)
        if not isinstance(minus, SubProbability):
            minus = SubProbability(minus.space, minus.weights)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        Z = list(self.space.boundary)
        if Z:
            gap = np.abs(plus.weights[Z] - minus.weights[Z]).max()
            if gap > AGREE_TOL:
                raise MassError(f"plus and minus differ on the boundary by {gap!r}")
        tot = plus.mass + minus.mass
        if abs(tot - 1.0) > MASS_TOL:
            raise MassError(f"charged measure has total mass {tot!r}, expected 1")

    @property
    def space(self) -> MetricSpace:
        return self.plus.space

    @classmethod
    def from_weights(cls, space, plus, minus):
        return cls(SubProbability(space, plus), SubProbability(space, minus))

    def __repr__(self):
        return f"ChargedMeasure(plus={self.plus.mass:.6g}, minus={self.minus.mass:.6g})"


def effective(s: ChargedMeasure) -> SignedMeasure:
    """``σ⁺ − σ⁻``; vanishes on ``Z``."""
    return SignedMeasure(s.space, s.plus.weights - s.minus.weights)


def total(s: ChargedMeasure) -> DiscreteMeasure:
    """``σ⁺ + σ⁻``, a probability measure."""
    return DiscreteMeasure(s.space, s.plus.weights + s.minus.weights)


def lift(mu: DiscreteMeasure) -> ChargedMeasure:
    """Embed a probability measure as ``(mu/2, mu/2)``."""
    if abs(mu.mass - 1.0) > MASS_TOL:
        raise MassError(f"lift needs a probability measure, got mass {mu.mass!r}")
    half = mu.weights / 2
    return ChargedMeasure.from_weights(mu.space, half, half)


def doubling_of(space: MetricSpace) -> GluedSpace:
    """Doubling of ``space`` (built once per space)."""
    return space.doubling


def _check_doubling(g, space):
    if not isinstance(g, GluedSpace) or g.k != 2:
        raise SpaceMismatchError("expected the doubling (k=2) of a space")
    if space is not None and g.base is not space:
        raise SpaceMismatchError("glued space is not built over this base space")


def phi(s: ChargedMeasure, g: GluedSpace | None = None) -> DiscreteMeasure:
    """Place ``σ⁺`` on sheet ``+``, ``σ⁻`` on sheet ``−`` and ``σ⁺ + σ⁻`` on shared ``Z``."""
    if g is None:
        g = doubling_of(s.space)
    _check_doubling(g, s.space)
    sheet, base = g.sheet_of, g.base_of
    w = np.where(sheet == 0, s.plus.weights[base], s.minus.weights[base])
    on_z = sheet < 0
    w[on_z] = s.plus.weights[base[on_z]] + s.minus.weights[base[on_z]]
    return DiscreteMeasure(g, w)


def psi(h: DiscreteMeasure) -> ChargedMeasure:
    """Inverse of :func:`phi`: restrict to sheets, split boundary mass in half."""
    g = h.space
    _check_doubling(g, None)
    if abs(h.mass - 1.0) > MASS_TOL:
        raise MassError(f"psi needs a probability measure, got mass {h.mass!r}")
    n = g.base.n
    plus, minus = np.zeros(n), np.zeros(n)
    sheet, base, w = g.sheet_of, g.base_of, h.weights
    plus[base[sheet == 0]] = w[sheet == 0]
    minus[base[sheet == 1]] = w[sheet == 1]
    on_z = sheet < 0
    plus[base[on_z]] = w[on_z] / 2
    minus[base[on_z]] = w[on_z] / 2
    return ChargedMeasure.from_weights(g.base, plus, minus)


def tilde_w(s: ChargedMeasure, t: ChargedMeasure, p: float = 1.0, return_plan: bool = False):
    """Transport distance between charged measures, computed on the doubling."""
    if s.space is not t.space:
        raise SpaceMismatchError("charged measures live on different spaces")
    g = doubling_of(s.space)
    val, plan = wasserstein(g.dist, phi(s, g), phi(t, g), p)
    return (val, plan) if return_plan else val


def entropy(mu: DiscreteMeasure, reference=None) -> float:
    """Relative entropy ``sum u log u w`` with ``u = mu / w`` and ``0 log 0 = 0``.

    ``reference`` defaults to the weights of ``mu``'s space.
    """
    w = mu.space.weights if reference is None else np.asarray(reference, dtype=np.float64)
    m = mu.weights
    pos = m > 0
    if np.any(pos & ~(w > 0)):
        raise InfiniteEntropyError("measure charges a point of zero reference weight")
    u = m[pos] / w[pos]
    return float(np.sum(m[pos] * np.log(u)))


def charged_entropy(s: ChargedMeasure, reference=None) -> float:
    """``Ent(σ⁺) + Ent(σ⁻)`` against the space's reference measure."""
    return entropy(s.plus, reference) + entropy(s.minus, reference)
