"""JSON/CSV formats for spaces, measures and charged measures."""

from __future__ import annotations

import json
import os

import numpy as np

from .charged import ChargedMeasure
from .errors import ConfigurationError
from .measures import SubProbability
from .metric_space import MetricSpace, cycle, interval


def _read_json(spec, base_dir=None):
    """``spec`` is a dict, a JSON string or a path to a JSON file."""
    if isinstance(spec, dict):
        return spec, base_dir
    if isinstance(spec, (str, os.PathLike)):
        s = str(spec)
        if s.lstrip().startswith("{"):
            try:
                return json.loads(s), base_dir
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"invalid inline JSON: {exc}") from None
        path = s if base_dir is None or os.path.isabs(s) else os.path.join(base_dir, s)
        try:
            with open(path) as fh:
                return json.load(fh), os.path.dirname(os.path.abspath(path))
        except FileNotFoundError:
            raise ConfigurationError(f"file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON in {path}: {exc}") from None
    raise ConfigurationError(f"cannot read {spec!r}")


def space_from_dict(d: dict) -> MetricSpace:
    """Build a space from an explicit matrix or a builder description.

    Builders: ``{"builder": "interval", "a", "b", "n_points"}`` and
    ``{"builder": "cycle", "circumference", "n_points", "boundary"?}``.
    ``{"interval": {...}}`` and ``{"cycle": {...}}`` are accepted too.
    """
    try:
        for name in ("interval", "cycle"):
            if name in d and isinstance(d[name], dict):
                d = {"builder": name, **d[name]}
        builder = d.get("builder")
        if builder == "interval":
            return interval(float(d["a"]), float(d["b"]), int(d["n_points"]))
        if builder == "cycle":
            return cycle(float(d["circumference"]), int(d["n_points"]), tuple(d.get("boundary", ())))
        if builder is not None:
            raise ConfigurationError(f"unknown space builder {builder!r}")
        dist = np.asarray(d["dist"], dtype=np.float64)
        n = int(d.get("n", len(dist)))
        if dist.shape != (n, n):
            raise ConfigurationError(f"dist must be {n}x{n}")
        weights = d.get("weights", np.ones(n))
        return MetricSpace(dist, tuple(d.get("boundary", ())), weights, labels=d.get("labels"))
    except KeyError as exc:
        raise ConfigurationError(f"space description lacks field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"bad space description: {exc}") from None


def load_space(spec, base_dir=None) -> MetricSpace:
    d, _ = _read_json(spec, base_dir)
    return space_from_dict(d)


def space_to_dict(space: MetricSpace) -> dict:
    out = {
        "n": space.n,
        "dist": space.dist.tolist(),
        "boundary": list(space.boundary),
        "weights": space.weights.tolist(),
    }
    if space.labels is not None:
        out["labels"] = list(space.labels)
    return out


def _weights_from(d, space, key="weights"):
    if key in d:
        return np.asarray(d[key], dtype=np.float64)
    if "atoms" in d:
        w = np.zeros(space.n)
        for x, m in d["atoms"]:
            w[space.index_of(float(x))] += float(m)
        return w
    raise ConfigurationError(f"measure description needs '{key}' or 'atoms'")


def load_measure(spec, space: MetricSpace | None = None, base_dir=None):
    """Read ``{"space": path-or-inline, "weights": [...]}``.

    ``"atoms": [[x, mass], ...]`` places masses by coordinate instead.
    If the file also has ``"plus"``/``"minus"`` a :class:`ChargedMeasure`
    is returned. ``space`` overrides the embedded space.
    """
    d, where = _read_json(spec, base_dir)
    if space is None:
        if "space" not in d:
            raise ConfigurationError("measure has no space and none was given")
        s = d["space"]
        space = space_from_dict(s) if isinstance(s, dict) else load_space(s, where)
    if "plus" in d or "minus" in d:
        return charged_from_dict(d, space)
    return SubProbability(space, _weights_from(d, space))


def charged_from_dict(d: dict, space: MetricSpace) -> ChargedMeasure:
    try:
        plus = _weights_from({"weights": d["plus"]} if not isinstance(d["plus"], dict) else d["plus"], space)
        minus = _weights_from({"weights": d["minus"]} if not isinstance(d["minus"], dict) else d["minus"], space)
    except KeyError as exc:
        raise ConfigurationError(f"charged measure lacks {exc}") from None
    return ChargedMeasure.from_weights(space, plus, minus)


def measure_to_dict(mu) -> dict:
    if isinstance(mu, ChargedMeasure):
        return {"plus": mu.plus.weights.tolist(), "minus": mu.minus.weights.tolist()}
    return {"weights": mu.weights.tolist()}


def dump_json(obj) -> str:
    """Deterministic JSON (sorted keys, shortest round-trip floats)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
