"""Smoke tests for the python bindings against the stock3 fixture."""

import os

import reskit

DATA = os.environ.get("RESKIT_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def load_model():
    return reskit.Model.from_file(os.path.join(DATA, "stock3_model.json"))


def test_model_loads_and_validates():
    model = load_model()
    assert model.validate() == []
    assert model.t0 == 0
    assert model.final_time == 3
    assert model.states(0) == ["0", "1", "2", "3"]


def test_step_and_flow():
    model = load_model()
    assert model.step(0, "1", "1", "0") == "2"
    states = reskit.flow(model, 0, 3, "1", ["1", "1", "1"], ["0", "0", "0"])
    assert states == ["1", "2", "3", "3"]
    # An order above the stock level hits the cemetery and absorbs.
    dead = reskit.flow(model, 0, 3, "0", ["1", "0", "0"], ["0", "0", "0"])
    assert dead[0] == "0"
    assert dead[1] == dead[2] == dead[3] != "0"


def test_closed_loop_and_bundle():
    model = load_model()
    policy = reskit.Strategy.from_file(os.path.join(DATA, "stock3_policy_u1.json"), model)
    states, controls = reskit.closed_loop(model, policy, 0, 3, "1", ["1", "1", "1"])
    assert states == ["1", "1", "1", "1"]
    assert controls == ["1", "1", "1"]
    scenarios = reskit.all_scenarios(model, 0, 3)
    assert len(scenarios) == 8
    out = reskit.bundle(model, policy, 0, "2", scenarios)
    assert len(out["entries"]) == 8
    for entry in out["entries"]:
        assert all(state in ("2", "3") for state in entry["states"])


def test_kernels_and_resilience():
    model = load_model()
    regime = reskit.Regime.from_file(os.path.join(DATA, "stock3_regime_robust.json"), model, 0)
    kernel, witness = reskit.robust_viability_kernel(model, regime)
    assert kernel[0] == ["2", "3"]
    recovery, viability, _ = reskit.robust_recovery_sets(model, regime)
    assert recovery[0] == ["2", "3"]
    assert viability == kernel

    result = reskit.resilient_states(model, regime)
    assert result["members"] == ["2", "3"]
    # The witness reloads and stays a member.
    policy = reskit.Strategy.from_json(result["witnesses"]["2"], model)
    assert reskit.regime_membership(model, regime, policy, "2")

    value, _ = reskit.resilience_indicator(model, regime, "2")
    assert value == 0.0


def test_stochastic_values():
    model = load_model()
    regime = reskit.Regime.from_file(
        os.path.join(DATA, "stock3_regime_stochastic.json"), model, 0
    )
    values, _ = reskit.stochastic_viability_values(model, regime)
    assert values[0]["2"] == 1.0
    assert values[0]["1"] == 0.0


def test_risk_measures():
    assert reskit.cvar([1.0, 10.0], [0.9, 0.1], 0.9) == 10.0
    assert abs(reskit.cvar([1.0, 3.0], [0.5, 0.5], 0.0) - 2.0) < 1e-12
    assert reskit.worst_case([1.0, 3.0], [0.5, 0.5]) == 3.0
    try:
        reskit.cvar([1.0], [1.0], 1.0)
        raise AssertionError("expected an error for level 1")
    except reskit.ReskitError:
        pass
