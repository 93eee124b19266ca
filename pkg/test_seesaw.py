"""
Purpose: Test the seesaw module: explicit model checks and the heuristic
lower bounds it finds against the hierarchy's upper bounds.
"""
import json
import os

import numpy as np
import pytest

from cli import DISC_RELAXATION
from custom_exceptions import ConfigurationError, ModelError
from moments import build_relaxation, spec_from_dict
from scenarios import (ComponentBounds, discrimination_optimum,
                       discrimination_scenario, discrimination_witness,
                       rac_approximation, rac_scenario, rac_witness)
from sdpcore import witness_upper_bound
from seesaw import (ExplicitModel, SeesawConfig, evaluate_model,
                    model_from_dict, model_to_dict, seesaw_witness)

DISC2 = discrimination_scenario(2)
KET0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
KET1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def tilted(theta):
    """|psi> = cos(theta)|0> + sin(theta)|1> as a density matrix."""
    vector = np.array([[np.cos(theta)], [np.sin(theta)]], dtype=complex)
    return vector @ vector.conj().T


def qubit_model(theta=0.3):
    states = (tilted(theta), tilted(-theta))
    povm = (tilted(np.pi / 4), tilted(-np.pi / 4))
    return ExplicitModel(2, states, (povm,))


def test_valid_model_passes():
    """Test if a pure-qubit strategy with enough vacuum validates."""
    photon = ComponentBounds.uniform(DISC2, 0.1)
    # cos^2(0.3) = 0.913 >= 0.9
    qubit_model(0.3).validate(DISC2, photon)


def test_photon_violation_is_named():
    """Test if too little vacuum weight names the photon row."""
    photon = ComponentBounds.uniform(DISC2, 0.1)
    with pytest.raises(ModelError) as error:
        qubit_model(0.6).validate(DISC2, photon)
    assert "photon[x=1,n=0]" in str(error.value)


def test_unnormalized_state_rejected():
    """Test if a state of trace 2 is refused."""
    model = ExplicitModel(2, (2 * KET0, KET1), ((KET0, KET1),))
    with pytest.raises(ModelError):
        model.validate(DISC2)


def test_incomplete_povm_rejected():
    """Test if POVM elements not summing to identity are refused."""
    model = ExplicitModel(2, (KET0, KET1), ((KET0, KET0),))
    with pytest.raises(ModelError):
        model.validate(DISC2)


def test_shape_mismatch_rejected():
    """Test if a model with one state is refused for two preparations."""
    model = ExplicitModel(2, (KET0,), ((KET0, KET1),))
    with pytest.raises(ModelError):
        evaluate_model(model, DISC2)


def test_evaluate_orthogonal_model():
    """Test if orthogonal states are perfectly discriminated."""
    model = ExplicitModel(2, (KET0, KET1), ((KET0, KET1),))
    behavior = evaluate_model(model, DISC2)
    assert behavior.p(1, 1, 1) == pytest.approx(1.0)
    assert behavior.p(2, 2, 1) == pytest.approx(1.0)
    assert discrimination_witness(2).value(behavior) == pytest.approx(1.0)


def test_evaluate_tilted_model():
    """Test if p(1|1) = cos^2(theta - pi/4)."""
    behavior = evaluate_model(qubit_model(0.3), DISC2)
    assert behavior.p(1, 1, 1) == pytest.approx(np.cos(0.3 - np.pi / 4) ** 2)
    behavior.check(DISC2, tol=1e-12)


def test_model_dict_round_trip():
    """Test if the JSON form keeps every matrix."""
    model = qubit_model(0.2)
    data = json.loads(json.dumps(model_to_dict(model)))
    again = model_from_dict(data)
    assert again.dimension == 2
    for a, b in zip(model.states, again.states):
        assert np.allclose(a, b)
    assert np.allclose(model.measurements[0][1], again.measurements[0][1])


def test_malformed_model_document():
    """Test if a document without states raises ModelError."""
    with pytest.raises(ModelError):
        model_from_dict({"dimension": 2, "measurements": []})


def test_seesaw_config_checks():
    """Test if zero restarts and dimension zero are refused."""
    with pytest.raises(ConfigurationError):
        SeesawConfig(restarts=0)
    with pytest.raises(ConfigurationError):
        SeesawConfig(dimension=0)


@pytest.mark.slow
def test_seesaw_vacuum_gives_random_guessing(solver_cfg):
    """Test if omega = 0 gives exactly 1 / n_x."""
    scenario = discrimination_scenario(3)
    cfg = SeesawConfig(restarts=2, max_iters=20, solver=solver_cfg)
    value, model = seesaw_witness(scenario,
                                  ComponentBounds.uniform(scenario, 0.0),
                                  discrimination_witness(3), cfg)
    assert value == pytest.approx(1 / 3, abs=1e-6)
    assert model.dimension == 3


@pytest.mark.slow
def test_seesaw_two_states_meets_upper_bound(solver_cfg):
    """Test if the seesaw reaches 0.8 at omega = 0.1 and stays below the SDP."""
    photon = ComponentBounds.uniform(DISC2, 0.1)
    witness = discrimination_witness(2)
    cfg = SeesawConfig(restarts=5, max_iters=100, solver=solver_cfg)
    value, model = seesaw_witness(DISC2, photon, witness, cfg)
    model.validate(DISC2, photon)

    spec = spec_from_dict({"extras": ["r*M", "r*r", "s0*r", "s0*M"],
                           "localizing": ["1", "r", "M"]}, DISC2)
    bound = witness_upper_bound(build_relaxation(spec, DISC2, photon),
                                witness, solver_cfg).objective_value
    assert value == pytest.approx(0.8, abs=1e-5)
    assert value <= bound + 1e-5


@pytest.mark.slow
def test_seesaw_three_states(solver_cfg):
    """Test if three-state discrimination at omega = 0.5 reaches 0.97140."""
    scenario = discrimination_scenario(3)
    cfg = SeesawConfig(dimension=3, restarts=10, max_iters=200,
                       solver=solver_cfg)
    value, _ = seesaw_witness(scenario, ComponentBounds.uniform(scenario, 0.5),
                              discrimination_witness(3), cfg)
    assert value >= discrimination_optimum(3, 0.5) - 1e-4


@pytest.mark.slow
def test_seesaw_is_deterministic(solver_cfg):
    """Test if the same seed gives the same value."""
    photon = ComponentBounds.uniform(DISC2, 0.2)
    cfg = SeesawConfig(restarts=2, max_iters=30, seed=4, solver=solver_cfg)
    first, _ = seesaw_witness(DISC2, photon, discrimination_witness(2), cfg)
    second, _ = seesaw_witness(DISC2, photon, discrimination_witness(2), cfg)
    assert first == pytest.approx(second, abs=1e-9)


@pytest.mark.slow
def test_seesaw_four_states(solver_cfg):
    """Test if four-state discrimination at omega = 0.3 reaches its optimum."""
    scenario = discrimination_scenario(4)
    photon = ComponentBounds.uniform(scenario, 0.3)
    cfg = SeesawConfig(dimension=4, restarts=10, max_iters=200,
                       solver=solver_cfg)
    value, _ = seesaw_witness(scenario, photon, discrimination_witness(4), cfg)
    assert value >= discrimination_optimum(4, 0.3) - 1e-4

    spec = spec_from_dict(DISC_RELAXATION, scenario)
    bound = witness_upper_bound(build_relaxation(spec, scenario, photon),
                                discrimination_witness(4),
                                solver_cfg).objective_value
    assert value <= bound + 1e-5


def rac_relaxation(photon):
    path = os.path.join(os.path.dirname(__file__), "configs", "rac.json")
    with open(path, encoding="utf-8") as handle:
        section = json.load(handle)["relaxation"]
    return build_relaxation(spec_from_dict(section, rac_scenario()),
                            rac_scenario(), photon)


@pytest.mark.slow
@pytest.mark.parametrize("omega", [0.02, 0.06, 0.1])
def test_rac_bound_against_seesaw(solver_cfg, omega):
    """Test if the RAC bound sits near 1/2 + sqrt(omega/2) above the seesaw."""
    scenario = rac_scenario()
    photon = ComponentBounds.uniform(scenario, omega)
    bound = witness_upper_bound(rac_relaxation(photon), rac_witness(),
                                solver_cfg)
    assert bound.optimal
    assert abs(bound.objective_value - rac_approximation(omega)) <= 2e-3

    cfg = SeesawConfig(dimension=2, restarts=20, max_iters=200,
                       solver=solver_cfg)
    value, model = seesaw_witness(scenario, photon, rac_witness(), cfg)
    model.validate(scenario, photon)
    assert value <= bound.objective_value + 1e-5
    assert bound.objective_value - value <= 4e-3
