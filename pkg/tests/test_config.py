"""Config parsing, validation, and descriptor serialization round trips."""

import math

import pytest

from wavecompact.config import (config_from_dict, dataspec_from_dict,
                                dataspec_to_dict, profile_from_dict,
                                profile_to_dict)
from wavecompact.data import DataSpec, Forcing, Profile, TimeProfile
from wavecompact.errors import ConfigurationError, UnstableMeshError


def test_profile_round_trips():
    X = math.pi
    profiles = [
        Profile.harmonic_mode(3, X),
        Profile.sine_series((0.1, -0.2, 0.0, 0.4), X, decay_exponent=2.0),
        Profile.piecewise_poly((0.0, 1.0, X), ((0.5,), (0.0, 1.0)),
                               node_convention="left"),
    ]
    for p in profiles:
        assert profile_from_dict(profile_to_dict(p), X) == p


def test_dataspec_round_trip():
    X = math.pi
    spec = DataSpec(
        u0=Profile.harmonic_mode(1, X),
        u1=Profile.sine_series((1.0, 2.0), X),
        f=Forcing(space=Profile.piecewise_poly((0.0, X), ((1.0,),)),
                  time=TimeProfile.harmonic_sin(2.0)))
    assert dataspec_from_dict(dataspec_to_dict(spec), X) == spec


def test_callable_profiles_are_not_serializable():
    p = Profile.from_callable(lambda x: x, 1.0)
    with pytest.raises(ConfigurationError):
        profile_to_dict(p)
    with pytest.raises(ConfigurationError):
        profile_from_dict({"form": "callable"}, 1.0)


def test_tau_over_h_derives_m():
    cfg = config_from_dict({
        "kind": "solve",
        "mesh": {"X": math.pi, "T": math.pi, "N": 32, "tau_over_h": 0.5},
        "data": None,
    })
    assert cfg.rungs[0].M == 64
    with pytest.raises(ConfigurationError):
        config_from_dict({
            "kind": "solve",
            "mesh": {"X": math.pi, "T": 1.0, "N": 32, "tau_over_h": 0.317},
            "data": None,
        })


def test_explicit_rungs_and_refinements():
    cfg = config_from_dict({
        "kind": "oracle_check",
        "mesh": {"X": math.pi, "T": math.pi, "rungs": [[16, 64], [64, 256]]},
        "data": {"harmonic": {"j": 0, "k": 1}},
    })
    assert [(r.N, r.M) for r in cfg.rungs] == [(16, 64), (64, 256)]
    cfg2 = config_from_dict({
        "kind": "converge",
        "mesh": {"X": math.pi, "T": math.pi, "N": 8, "M": 16, "refinements": 2},
        "data": {"harmonic": {"j": 0, "k": 1}},
    })
    assert [(r.N, r.M) for r in cfg2.rungs] == [(8, 16), (16, 32), (32, 64)]
    # refinements keep tau/h fixed
    ratios = {r.tau / r.h for r in cfg2.rungs}
    assert len(ratios) == 1


def test_unstable_rung_raises_at_validation():
    with pytest.raises(UnstableMeshError):
        config_from_dict({
            "kind": "solve",
            "mesh": {"X": 1.0, "T": 1.0, "N": 10, "M": 10},
            "data": None,
        })


def test_malformed_configs():
    with pytest.raises(ConfigurationError):
        config_from_dict({"kind": "explode", "mesh": {"X": 1, "T": 1, "N": 4, "M": 8}})
    with pytest.raises(ConfigurationError):
        config_from_dict({"kind": "solve"})
    with pytest.raises(ConfigurationError):
        config_from_dict({"kind": "solve", "mesh": {"X": 1.0, "T": 1.0, "N": 4},
                          "data": None})
    with pytest.raises(ConfigurationError):
        config_from_dict({"kind": "solve", "mesh": {"X": 1.0, "T": 1.0, "N": 4, "M": 16},
                          "data": {"u0": {"form": "warped"}}})
    with pytest.raises(ConfigurationError):
        config_from_dict({"kind": "sharpness",
                          "mesh": {"X": 1.0, "T": 1.0, "N": 8, "M": 32},
                          "data": {"preset": "hat_step"}})


def test_descriptor_tree_parses_to_dataspec():
    cfg = config_from_dict({
        "kind": "solve",
        "mesh": {"X": math.pi, "T": math.pi, "N": 8, "M": 16},
        "data": {
            "u0": {"form": "piecewise", "breakpoints": [0.0, math.pi],
                   "pieces": [[0.0, 1.0]]},
            "u1": {"form": "harmonic", "k": 2},
            "f": {"space": {"form": "sine_series", "coeffs": [1.0]},
                  "time": {"form": "polynomial", "coeffs": [0.0, 1.0]}},
        },
    })
    assert cfg.data.u0.form == "piecewise"
    assert cfg.data.u1.k == 2
    assert cfg.data.f.time.coeffs == (0.0, 1.0)
