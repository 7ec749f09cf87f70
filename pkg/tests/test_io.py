import json

import numpy as np
import pytest

from artifact.charged import ChargedMeasure
from artifact.errors import ConfigurationError
from artifact.io import dump_json, load_measure, load_space, measure_to_dict, space_from_dict, space_to_dict
from artifact.measures import SubProbability
from artifact.metric_space import interval


def test_space_roundtrip(tmp_path):
    X = interval(0.0, 1.0, 5)
    path = tmp_path / "space.json"
    path.write_text(json.dumps(space_to_dict(X)))
    Y = load_space(str(path))
    np.testing.assert_allclose(Y.dist, X.dist)
    assert Y.boundary == X.boundary


def test_builders():
    X = space_from_dict({"builder": "interval", "a": -1, "b": 1, "n_points": 5})
    assert X.n == 5 and X.boundary == (0, 4)
    Y = space_from_dict({"interval": {"a": 0, "b": 1, "n_points": 3}})
    assert Y.n == 3
    C = space_from_dict({"builder": "cycle", "circumference": 1.0, "n_points": 4, "boundary": [0]})
    assert C.boundary == (0,)


def test_bad_space():
    with pytest.raises(ConfigurationError):
        space_from_dict({"builder": "torus"})
    with pytest.raises(ConfigurationError):
        space_from_dict({"builder": "interval", "a": 0})
    with pytest.raises(ConfigurationError):
        space_from_dict({"n": 3, "dist": [[0, 1], [1, 0]]})
    with pytest.raises(ConfigurationError):
        load_space("does/not/exist.json")
    with pytest.raises(ConfigurationError):
        load_space("{not json")


def test_measure_with_relative_space(tmp_path):
    (tmp_path / "s.json").write_text(json.dumps({"builder": "interval", "a": 0, "b": 1, "n_points": 5}))
    (tmp_path / "m.json").write_text(json.dumps({"space": "s.json", "atoms": [[0.5, 0.3]]}))
    mu = load_measure(str(tmp_path / "m.json"))
    assert isinstance(mu, SubProbability)
    assert mu.weights[2] == pytest.approx(0.3)


def test_charged_measure():
    X = interval(0.0, 1.0, 3)
    s = load_measure({"plus": [0.1, 0.3, 0.1], "minus": [0.1, 0.3, 0.1]}, X)
    assert isinstance(s, ChargedMeasure)
    assert measure_to_dict(s)["plus"] == [0.1, 0.3, 0.1]


def test_measure_errors():
    X = interval(0.0, 1.0, 3)
    with pytest.raises(ConfigurationError):
        load_measure({"weights": [0, 1, 0]})
    with pytest.raises(ConfigurationError):
        load_measure({"mass": 1}, X)


def test_dump_is_deterministic():
    assert dump_json({"b": 1, "a": [1.0]}) == dump_json({"a": [1.0], "b": 1})
