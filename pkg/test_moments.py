"""
Purpose: Test the moments module: basis generation, the symbolic moment and
localizing matrices and the constraints emitted for a scenario.
"""
import pytest

from custom_exceptions import ConfigurationError, LevelTooLowError
from moments import (BlockMode, RelaxationSpec, attach_behavior,
                     build_relaxation, generate_basis, localizing_basis,
                     spec_from_dict, witness_objective)
from opalg import ONE, Monomial, aux, measurement, number, state
from scenarios import (ComponentBounds, ObservedBehavior, Scenario,
                       TruncatedMean, discrimination_scenario,
                       discrimination_witness)

DISC2 = discrimination_scenario(2)
R1, R2 = state(1), state(2)
M11, M21 = measurement(1, 1), measurement(2, 1)
S0 = number(0)


def word(*symbols):
    return Monomial(tuple(symbols))


def disc2_spec():
    return spec_from_dict({"extras": ["r*M", "r*r", "s0*r", "s0*M"],
                           "localizing": ["1", "r", "M"]}, DISC2)


def by_tag(rel, prefix):
    return [c for c in rel.constraints if c.tag.startswith(prefix)]


def test_level_one_basis():
    """Test if level 1 lists 1 and every single letter."""
    basis = generate_basis(RelaxationSpec(level=1), DISC2)
    assert basis == [ONE, word(R1), word(R2), word(M11), word(M21),
                     word(S0)]


def test_extras_are_accepted_and_deduplicated():
    """Test if extras join the basis once each."""
    spec = RelaxationSpec(level=1, extra_monomials=(word(R1, R1),
                                                    word(R1, R1)))
    basis = generate_basis(spec, DISC2)
    assert basis.count(word(R1, R1)) == 1
    assert len(basis) == 7


def test_discrimination_extras_verbatim():
    """Test if the two-state list rho M, rho^2, s0 rho, s0 M is added."""
    basis = generate_basis(disc2_spec(), DISC2)
    for extra in (word(R1, M11), word(R2, R2), word(S0, R1), word(S0, M21)):
        assert extra in basis
    assert len(basis) == 6 + 4 + 4 + 2 + 2


def test_non_canonical_extra_rejected():
    """Test if an extra that reduces is refused."""
    spec = RelaxationSpec(extra_monomials=(word(M11, M11),))
    with pytest.raises(ConfigurationError):
        generate_basis(spec, DISC2)


def test_basis_is_deterministic():
    """Test if two builds give the same basis order."""
    assert generate_basis(disc2_spec(), DISC2) == \
        generate_basis(disc2_spec(), DISC2)


def test_gamma_is_symmetric():
    """Test if Gamma entries agree under transposition."""
    rel = build_relaxation(disc2_spec(), DISC2,
                           ComponentBounds.uniform(DISC2, 0.1))
    size = len(rel.basis)
    for i in range(size):
        for j in range(size):
            assert rel.gamma[i][j] == rel.gamma[j][i]


def test_photon_bound_row():
    """Test if omega = 0.2 gives Tr(rho_1 s0) >= 0.8."""
    photon = ComponentBounds(((0.2,), (0.3,)))
    rel = build_relaxation(disc2_spec(), DISC2, photon)
    row, = [c for c in rel.constraints if c.tag == "photon[x=1,n=0]"]
    assert row.relation == ">="
    assert row.rhs == pytest.approx(0.8)
    assert row.coefficients == ((rel.photon(1, 0), 1.0),)


def test_truncated_mean_rows():
    """Test if the truncated-mean model bounds sum n Tr(rho s_n)."""
    scenario = discrimination_scenario(3, n_trunc=2)
    photon = TruncatedMean((0.5, 0.5, 0.5), (0.1, 0.1, 0.1), 2)
    rel = build_relaxation(RelaxationSpec(level=2), scenario, photon)
    mean, = [c for c in rel.constraints if c.tag == "photon_mean[x=2]"]
    assert mean.relation == "<="
    assert mean.rhs == pytest.approx(0.5)
    assert dict(mean.coefficients) == {rel.photon(2, 1): 1.0,
                                       rel.photon(2, 2): 2.0}
    leak, = [c for c in rel.constraints if c.tag == "photon_leak[x=2]"]
    assert leak.relation == ">="
    assert leak.rhs == pytest.approx(0.9)


def test_normalization_and_identity_trace():
    """Test if Tr rho = Tr s = 1 and Tr 1 >= n_trunc + 1 are present."""
    scenario = discrimination_scenario(2, n_trunc=1)
    rel = build_relaxation(RelaxationSpec(), scenario)
    tags = {c.tag: c for c in rel.constraints}
    for tag in ("norm[rho,x=1]", "norm[rho,x=2]", "norm[sigma,n=0]",
                "norm[sigma,n=1]"):
        assert tags[tag].relation == "=="
        assert tags[tag].rhs == 1.0
    assert tags["trace_identity"].relation == ">="
    assert tags["trace_identity"].rhs == 2.0
    assert tags["trace_identity"].coefficients == ((rel.find(ONE), 1.0),)


def test_completeness_rows():
    """Test if sum_b Tr(M_b) = Tr(1) is imposed at level 1."""
    rel = build_relaxation(RelaxationSpec(), DISC2)
    rows = by_tag(rel, "complete[")
    assert rows
    expected = {rel.find(word(M11)): 1.0, rel.find(word(M21)): 1.0,
                rel.find(ONE): -1.0}
    assert any(dict(r.coefficients) == expected for r in rows)
    assert len({r.coefficients for r in rows}) == len(rows)


def test_no_dangling_variables():
    """Test if every id used anywhere exists in the variable table."""
    rel = build_relaxation(disc2_spec(), DISC2,
                           ComponentBounds.uniform(DISC2, 0.1))
    ids = set(rel.var_table.values())
    assert ids == set(range(rel.n_vars))
    for row in rel.gamma:
        assert all(v is None or v in ids for v in row)
    for _, matrix in rel.localizers:
        for row in matrix:
            for entry in row:
                assert all(v in ids for v, _ in entry)
    for constraint in rel.constraints:
        assert all(v in ids for v, _ in constraint.coefficients)


def test_localizers_one_per_preparation():
    """Test if each rho_x gets a localizer over the localizing basis."""
    rel = build_relaxation(disc2_spec(), DISC2)
    assert [x for x, _ in rel.localizers] == [1, 2]
    assert rel.localizing_basis == (ONE, word(R1), word(R2), word(M11),
                                    word(M21))
    assert rel.block_sizes() == [len(rel.basis), 5, 5]


def test_localizer_corner_entry():
    """Test if the (1, 1) entry is Tr(rho) - Tr(rho^2)."""
    rel = build_relaxation(disc2_spec(), DISC2)
    _, matrix = rel.localizers[0]
    assert dict(matrix[0][0]) == {rel.find(word(R1)): 1.0,
                                  rel.find(word(R1, R1)): -1.0}


def test_aux_trace_equalities():
    """Test if Tr[Z rho_1] = Tr[Z rho_2] = Tr[Z s0] for Z = Z1,1."""
    spec = RelaxationSpec(level=1, include_aux=True, aux_nodes=(1,),
                          aux_outcomes=2)
    rel = build_relaxation(spec, DISC2)
    z = aux(1, 1)
    rows = by_tag(rel, "aux_trace[Z1,1,#")
    ids = {rel.find(word(z, R1)), rel.find(word(z, R2)),
           rel.find(word(z, S0))}
    assert None not in ids
    linked = set()
    for row in rows:
        linked.update(v for v, _ in row.coefficients)
    assert ids <= linked
    assert len(rows) == 2


def test_aux_basis_is_degree_one():
    """Test if Z symbols enter only as single left factors."""
    spec = RelaxationSpec(level=1, include_aux=True, aux_nodes=(1,),
                          aux_outcomes=2)
    basis = generate_basis(spec, DISC2)
    assert all(len(w.aux_part) <= 1 for w in basis)
    assert len(basis) == 6 * 3
    assert spec.block_mode is BlockMode.PER_NODE


def test_attach_full_behavior():
    """Test if a behavior adds one equality per (b, x)."""
    rel = build_relaxation(disc2_spec(), DISC2)
    behavior = ObservedBehavior(2, (2,), {(1, 1, 1): 0.9, (2, 1, 1): 0.1,
                                          (1, 2, 1): 0.1, (2, 2, 1): 0.9})
    pinned = attach_behavior(rel, behavior=behavior)
    rows = by_tag(pinned, "prob[")
    assert len(rows) == 4
    assert all(r.relation == "==" for r in rows)


def test_attach_witness_value():
    """Test if the witness pin has coefficients 1/2 and 1/2."""
    rel = build_relaxation(disc2_spec(), DISC2)
    pinned = attach_behavior(rel, witness=discrimination_witness(2),
                             value=0.8)
    row, = by_tag(pinned, "witness")
    assert row.rhs == pytest.approx(0.8)
    assert dict(row.coefficients) == {rel.probability(1, 1, 1): 0.5,
                                      rel.probability(2, 2, 1): 0.5}


def test_missing_moment_named():
    """Test if requiring an absent moment names the word to add."""
    scenario = Scenario(2, (2,), 0)
    rel = build_relaxation(RelaxationSpec(level=1, localizing_level=0),
                           scenario)
    with pytest.raises(LevelTooLowError) as error:
        rel.require(word(R1, M11, R2))
    assert "r1*r2*M1|1" in str(error.value)


def test_witness_objective_entries():
    """Test if the two-state witness touches two probability moments."""
    rel = build_relaxation(disc2_spec(), DISC2)
    objective = witness_objective(rel, discrimination_witness(2))
    assert len(objective) == 2
    assert sum(objective.values()) == pytest.approx(1.0)


def test_relabelling_preparations_is_a_bijection():
    """Test if swapping x = 1 and x = 2 keeps the variable count."""
    photon = ComponentBounds(((0.1,), (0.2,)))
    swapped = ComponentBounds(((0.2,), (0.1,)))
    first = build_relaxation(disc2_spec(), DISC2, photon)
    second = build_relaxation(disc2_spec(), DISC2, swapped)
    assert first.n_vars == second.n_vars
    assert len(first.constraints) == len(second.constraints)


def test_dump_lists_constraints():
    """Test if the audit dump prints one line per constraint."""
    rel = build_relaxation(disc2_spec(), DISC2,
                           ComponentBounds.uniform(DISC2, 0.1))
    lines = rel.dump().splitlines()
    assert lines[0].startswith("gamma ")
    assert len(lines) == 1 + len(rel.localizers) + len(rel.constraints)
    assert any(line.startswith("photon[x=1,n=0]: 1*Tr[r1*s0] >= 0.9")
               for line in lines)


def test_localizing_basis_from_level():
    """Test if level 0 localizers are 1x1."""
    spec = RelaxationSpec(level=1, localizing_level=0)
    assert localizing_basis(spec, DISC2) == [ONE]
