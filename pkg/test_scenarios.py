"""
Purpose: Test the scenarios module: witnesses, photon models, Poisson
sources, BPSK homodyne statistics and experiment documents.
"""
import json
import math

import numpy as np
import pytest
from scipy.special import erf

from custom_exceptions import ConfigurationError
from oracles import gaussian_bin_probabilities, threshold_balance
from scenarios import (DOCUMENT_SCHEMA, BpskConfig, ComponentBounds,
                       ComponentPins, ObservedBehavior, Scenario,
                       TruncatedMean, bpsk_behavior, bpsk_scenario,
                       bpsk_threshold, check_document, discrimination_optimum,
                       discrimination_scenario, discrimination_witness,
                       document_to_dict, load_document, photon_from_dict,
                       poisson_components, poisson_photon_model,
                       rac_scenario, rac_witness, schema_check)


def test_scenario_validation():
    """Test if degenerate cardinalities are refused."""
    with pytest.raises(ConfigurationError):
        Scenario(0, (2,))
    with pytest.raises(ConfigurationError):
        Scenario(2, (1,))
    with pytest.raises(ConfigurationError):
        Scenario(2, (2,), -1)


@pytest.mark.parametrize("n_x", [2, 3, 4])
def test_discrimination_witness(n_x):
    """Test if the witness puts 1/n_x on every p(x|x,1)."""
    witness = discrimination_witness(n_x)
    assert witness.coefficients == {(x, x, 1): 1.0 / n_x
                                    for x in range(1, n_x + 1)}


def test_discrimination_witness_needs_two_states():
    """Test if n_x = 1 is refused."""
    with pytest.raises(ConfigurationError):
        discrimination_witness(1)


def test_rac_witness():
    """Test if the RAC witness has 8 entries of 1/8 at b = x_y."""
    witness = rac_witness()
    assert len(witness.coefficients) == 8
    assert math.fsum(witness.coefficients.values()) == pytest.approx(1.0)
    # x = 00, y = 1 asks for bit 0
    assert witness.coefficients[(1, 1, 1)] == 1.0 / 8
    # x = 01, y = 2 asks for bit 1
    assert witness.coefficients[(2, 2, 2)] == 1.0 / 8


def test_rac_witness_on_wrong_scenario():
    """Test if the RAC witness rejects three preparations."""
    with pytest.raises(ConfigurationError):
        rac_witness().check(discrimination_scenario(3))


def test_witness_values_in_unit_interval():
    """Test if random behaviors give witness values in [0, 1]."""
    rng = np.random.default_rng(1)
    for scenario, witness in ((discrimination_scenario(3),
                               discrimination_witness(3)),
                              (rac_scenario(), rac_witness())):
        for _ in range(50):
            table = {}
            for y, n_b in enumerate(scenario.outcomes, start=1):
                for x in range(1, scenario.n_x + 1):
                    for b, p in enumerate(rng.dirichlet(np.ones(n_b)), 1):
                        table[(b, x, y)] = float(p)
            behavior = ObservedBehavior(scenario.n_x, scenario.outcomes,
                                        table)
            assert 0.0 <= witness.value(behavior) <= 1.0


def test_poisson_vacuum():
    """Test if alpha2 = 0 is pure vacuum."""
    components = poisson_components(0.0, 2)
    assert components.weights == (1.0, 0.0, 0.0)
    assert components.leakage == 0.0


def test_poisson_single_level():
    """Test if P(0) = exp(-1) at alpha2 = 1."""
    components = poisson_components(1.0, 0)
    assert components.weights[0] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_poisson_leakage():
    """Test if the leakage is the exact Poisson tail."""
    components = poisson_components(0.1, 2)
    expected = 1.0 - math.exp(-0.1) * (1.0 + 0.1 + 0.005)
    assert components.leakage == pytest.approx(expected, abs=1e-14)
    assert sum(components.weights) + components.leakage == \
        pytest.approx(1.0, abs=1e-15)
    assert components.mean_trunc == \
        pytest.approx(math.exp(-0.1) * (0.1 + 2 * 0.005), abs=1e-14)


def test_poisson_photon_model_variants():
    """Test if the Poisson source maps to each photon model."""
    pins = poisson_photon_model(0.2, 2, 1)
    assert isinstance(pins, ComponentPins)
    assert pins.weights[0][0] == pytest.approx(math.exp(-0.2))
    bounds = poisson_photon_model(0.2, 2, 0, "bounds")
    assert isinstance(bounds, ComponentBounds)
    assert bounds.omega[1][0] == pytest.approx(1.0 - math.exp(-0.2))
    mean = poisson_photon_model(0.2, 3, 2, "truncated_mean", "zero")
    assert isinstance(mean, TruncatedMean)
    assert mean.leakage == (0.0, 0.0, 0.0)


def test_component_pins_sum_checked():
    """Test if pinned weights above unit mass are refused."""
    scenario = Scenario(1, (2,), 1)
    with pytest.raises(ConfigurationError):
        ComponentPins(((0.7, 0.5),)).check(scenario)


def test_truncated_mean_checked():
    """Test if a mean above n_trunc is refused."""
    scenario = discrimination_scenario(2, n_trunc=1)
    with pytest.raises(ConfigurationError):
        TruncatedMean((1.5, 0.2), (0.0, 0.0), 1).check(scenario)


def test_omega_table_wider_than_truncation():
    """Test if an omega entry for n > n_trunc is a named error."""
    with pytest.raises(ConfigurationError) as error:
        photon_from_dict({"variant": "bounds",
                          "omega": [[0.1, 0.2], [0.1, 0.2]]},
                         discrimination_scenario(2))
    assert "omega" in str(error.value)


def test_photon_rows_and_mix():
    """Test if mixing bounds mixes the omega tables."""
    first = ComponentBounds(((0.1,), (0.2,)))
    second = ComponentBounds(((0.3,), (0.4,)))
    mixed = first.mix(second, 0.5)
    assert [row[0] for row in mixed.omega] == pytest.approx([0.2, 0.3])
    row, = mixed.rows(1)
    assert (row.tag, row.relation) == ("photon[x=1,n=0]", ">=")
    assert row.rhs == pytest.approx(0.8)


def test_bpsk_threshold_at_zero():
    """Test if x1 = -erfinv(-1/2) at alpha = 0."""
    assert bpsk_threshold(0.0) == pytest.approx(0.476936276204470, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.3, 0.7, 1.5, 2.0])
def test_bpsk_threshold_balance(alpha):
    """Test if the two lowest bins are equally likely for -alpha."""
    x1 = bpsk_threshold(alpha)
    assert math.isfinite(x1) and x1 > 0
    assert threshold_balance(alpha, x1) == pytest.approx(0.0, abs=1e-10)


def test_binary_bpsk_formula():
    """Test if p(1|alpha) = (erf(sqrt(2) alpha) + 1) / 2."""
    behavior = bpsk_behavior(BpskConfig.from_mean_photon(0.1))
    expected = 0.5 * (math.erf(math.sqrt(0.2)) + 1.0)
    assert behavior.p(1, 1, 1) == pytest.approx(expected, abs=1e-12)
    assert behavior.p(1, 2, 1) == pytest.approx(1.0 - expected, abs=1e-12)


def test_binary_bpsk_vacuum():
    """Test if alpha = 0 gives fair coins."""
    behavior = bpsk_behavior(BpskConfig(0.0))
    assert behavior.p(1, 1, 1) == 0.5
    assert behavior.p(1, 2, 1) == 0.5


@pytest.mark.parametrize("bins", [4, 8])
@pytest.mark.parametrize("alpha2", [0.02, 0.1, 0.3])
def test_binned_bpsk_matches_integration(bins, alpha2):
    """Test if binned tables match numerical Gaussian integrals."""
    cfg = BpskConfig.from_mean_photon(alpha2, bins)
    behavior = bpsk_behavior(cfg)
    shift = math.sqrt(2.0) * cfg.alpha
    for x, mean in ((1, shift), (2, -shift)):
        expected = gaussian_bin_probabilities(cfg.edges(), mean)
        for b, p in enumerate(expected, start=1):
            assert behavior.p(b, x, 1) == pytest.approx(p, abs=1e-10)


def test_four_bin_lowest_entry():
    """Test if p(1|-alpha) = (erf(sqrt(2) alpha - x1) + 1) / 2."""
    cfg = BpskConfig.from_mean_photon(0.2, 4)
    x1 = bpsk_threshold(cfg.alpha)
    expected = 0.5 * (float(erf(math.sqrt(2.0) * cfg.alpha - x1)) + 1.0)
    assert bpsk_behavior(cfg).p(1, 2, 1) == pytest.approx(expected,
                                                          abs=1e-12)


@pytest.mark.parametrize("bins", [2, 4, 8])
def test_bpsk_normalized_and_symmetric(bins):
    """Test if tables are normalized and mirror under alpha -> -alpha."""
    behavior = bpsk_behavior(BpskConfig.from_mean_photon(0.25, bins))
    behavior.check(bpsk_scenario(bins))
    for b in range(1, bins + 1):
        assert behavior.p(b, 1, 1) == \
            pytest.approx(behavior.p(bins + 1 - b, 2, 1), abs=1e-14)


def test_bpsk_rejects_bad_bins():
    """Test if 3 bins are refused."""
    with pytest.raises(ConfigurationError):
        BpskConfig(0.3, 3)


def test_behavior_csv_round_trip():
    """Test if the CSV form keeps every probability."""
    scenario = bpsk_scenario(4)
    behavior = bpsk_behavior(BpskConfig.from_mean_photon(0.1, 4))
    text = behavior.to_csv()
    assert text.splitlines()[0] == "b,x,y,p"
    again = ObservedBehavior.from_csv(text, scenario)
    assert again.table == behavior.table


def test_behavior_entropy():
    """Test if a fair coin has one bit."""
    behavior = bpsk_behavior(BpskConfig(0.0))
    assert behavior.entropy(1, 1) == pytest.approx(1.0)


def test_behavior_check_rejects_unnormalized():
    """Test if p summing to 1.1 is refused."""
    behavior = ObservedBehavior(2, (2,), {(1, 1, 1): 0.6, (2, 1, 1): 0.5,
                                          (1, 2, 1): 0.5, (2, 2, 1): 0.5})
    with pytest.raises(ConfigurationError):
        behavior.check(discrimination_scenario(2))


def test_analytic_optima():
    """Test if the closed forms agree at omega = 0.5."""
    assert discrimination_optimum(2, 0.5) == pytest.approx(1.0)
    assert discrimination_optimum(3, 0.5) == \
        pytest.approx(0.5 + 2 * math.sqrt(2) / 3 * 0.5)


def test_document_round_trip(tmp_path, disc2_document):
    """Test if a document survives load and re-export."""
    path = tmp_path / "disc2.json"
    path.write_text(json.dumps(disc2_document))
    doc = load_document(str(path))
    assert doc.scenario == discrimination_scenario(2)
    assert doc.photon == ComponentBounds(((0.1,), (0.1,)))
    again = check_document(document_to_dict(doc))
    assert again.photon == doc.photon
    assert again.witness.coefficients == doc.witness.coefficients
    assert again.witness.name == "2disc"


def test_document_reports_bad_json(tmp_path):
    """Test if malformed JSON names the line and column."""
    path = tmp_path / "broken.json"
    path.write_text('{"scenario": {"n_x": 2,,}}')
    with pytest.raises(ConfigurationError) as error:
        load_document(str(path))
    assert "line 1" in str(error.value)


def test_document_rejects_rac_on_three_states(disc2_document):
    """Test if the RAC witness on a 3-preparation scenario is refused."""
    data = dict(disc2_document, witness={"kind": "rac"},
                scenario={"n_x": 3, "outcomes": [3], "n_trunc": 0})
    with pytest.raises(ConfigurationError) as error:
        check_document(data)
    assert "witness" in str(error.value)


def test_document_witness_value_range(disc2_document):
    """Test if a witness value above 1 is refused."""
    with pytest.raises(ConfigurationError):
        check_document(dict(disc2_document, witness_value=1.5))
    assert check_document(dict(disc2_document, witness_value="optimal")) \
        .witness_value == "optimal"


def test_document_schema_names_field_path(disc2_document):
    """Test if a string n_x is refused with its dotted path."""
    data = dict(disc2_document, scenario={"n_x": "2", "outcomes": [2]})
    with pytest.raises(ConfigurationError) as error:
        check_document(data)
    assert "scenario.n_x" in str(error.value)
    assert error.value.field == "scenario.n_x"


def test_document_schema_rejects_unknown_variant(disc2_document):
    """Test if an unknown photon variant is refused by the schema."""
    data = dict(disc2_document, photon={"variant": "thermal", "omega": 0.1})
    with pytest.raises(ConfigurationError) as error:
        check_document(data)
    assert error.value.field == "photon.variant"


def test_document_schema_requires_photon(disc2_document):
    """Test if a document without a photon section is refused."""
    data = {k: v for k, v in disc2_document.items() if k != "photon"}
    with pytest.raises(ConfigurationError) as error:
        check_document(data)
    assert error.value.field == "photon"


def test_schema_check_items_and_bounds():
    """Test if array items, lengths and minimums are walked."""
    properties = DOCUMENT_SCHEMA["properties"]
    with pytest.raises(ConfigurationError) as error:
        schema_check([[1, 1, 1, 0.5], [2, 1, 1]], properties["behavior"],
                     "behavior")
    assert error.value.field == "behavior[1]"
    with pytest.raises(ConfigurationError) as error:
        schema_check({"level": 0}, properties["relaxation"], "relaxation")
    assert error.value.field == "relaxation.level"
    with pytest.raises(ConfigurationError) as error:
        schema_check({"n_x": True, "outcomes": [2]}, properties["scenario"],
                     "scenario")
    assert error.value.field == "scenario.n_x"


def test_schema_check_accepts_shipped_forms(disc2_document):
    """Test if the conftest document and lenient photon fields pass."""
    schema_check(disc2_document, DOCUMENT_SCHEMA)
    photon = DOCUMENT_SCHEMA["properties"]["photon"]
    schema_check({"variant": "truncated_mean", "mean": [0.1, 0.2],
                  "leakage": 0.0}, photon)
    schema_check({"variant": "poisson", "alpha2": 0.1, "leakage": "zero"},
                 photon)
