import math

import pytest

import hoferlab


def test_canonical_roundtrip():
    once = hoferlab.canonical("x^2 + sin(y)*t")
    assert hoferlab.canonical(once) == once


def test_evaluate():
    assert hoferlab.evaluate("x^3 - y", x=2.0, y=1.0) == pytest.approx(7.0)


def test_sphere_length():
    assert hoferlab.length("2*z", surface="sphere", area=4.0) == pytest.approx(4.0, abs=1e-9)


def test_zero_length():
    assert hoferlab.length("0") == 0.0


def test_rotation_flow():
    x = hoferlab.flow_point("0.5*(x^2 + y^2)", [1.0, 0.0], t1=math.pi / 2)
    assert x[0] == pytest.approx(0.0, abs=1e-9)
    assert x[1] == pytest.approx(-1.0, abs=1e-9)


def test_period():
    p = hoferlab.minimal_period("1.5*(x^2 + y^2)", [0.3, 0.1], horizon=3.0, box=[-1, 1, -1, 1])
    assert p == pytest.approx(2 * math.pi / 3, rel=1e-9)


def test_errors_carry_kind():
    with pytest.raises(hoferlab.HoferlabError) as e:
        hoferlab.canonical("1/x")
    assert hoferlab.error_kind(e.value) == "UnguardedDivision"
    with pytest.raises(hoferlab.HoferlabError) as e:
        hoferlab.run_experiment("no-such-experiment")
    assert hoferlab.error_kind(e.value) == "UnknownExperiment"


def test_experiments():
    assert "sphere-loop" in hoferlab.experiment_names()
    r = hoferlab.run_experiment("linear-rigidity")
    assert r["pass"] is True
    assert r["id"] == "linear-rigidity"


def test_scenario():
    assert hoferlab.run_scenario({}) == []
    r = hoferlab.run_scenario({"defs": {"H": "0"}, "steps": [{"op": "length", "path": "H"}]})
    assert len(r) == 1 and r[0]["details"]["value"] == 0.0
    with pytest.raises(hoferlab.HoferlabError):
        hoferlab.run_scenario({"steps": [{"op": "length", "path": "missing"}]})
