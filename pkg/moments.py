"""
Purpose: Moment relaxations of the tracial prepare-and-measure problem.
Generates monomial bases, assembles the symbolic moment matrix Gamma and the
localizing matrices for rho_x - rho_x^2, and turns the scenario's assumptions
(normalization, photon statistics, measurement completeness, identity traces
of the scalar Z symbols) into linear constraints on moment variables.
"""
# Import essential libraries
import logging
from dataclasses import dataclass, replace
from enum import Enum

from custom_exceptions import ConfigurationError, LevelTooLowError
from opalg import (ONE, Kind, Monomial, adjoint, aux, canonicalize,
                   expand_pattern, measurement, number, state, trace_class)

log = logging.getLogger(__name__)

RELATIONS = ("==", ">=", "<=")


class BlockMode(Enum):
    """How quadrature nodes share moment matrices in the Shannon program."""
    PER_NODE = "per-node"
    JOINT = "joint"


##############################################################################
                            #   Specification   #
##############################################################################


@dataclass(frozen=True)
class RelaxationSpec:
    """
    Which monomials index the moment and localizing matrices.

    :param level: All products of length <= level enter the basis.
    :param extra_monomials: Canonical nonzero words added to the basis.
    :param localizing_level: Word length of the localizing basis.
    :param include_aux: Whether Z symbols enter the basis, as degree-one
        left factors of every non-Aux basis word.
    :param block_mode: Per-node or joint blocks for the Shannon program.
    :param localizing_monomials: Explicit localizing basis, overriding
        ``localizing_level``.
    :param aux_nodes: Quadrature nodes whose Z symbols enter.
    :param aux_outcomes: Outcome range b of the Z symbols (defaults to the
        largest setting).
    :param aux_localizers: Multiply the localizing basis by {1, Z_b,i} too.
    """
    level: int = 1
    extra_monomials: tuple = ()
    localizing_level: int = 1
    include_aux: bool = False
    block_mode: BlockMode = BlockMode.PER_NODE
    localizing_monomials: tuple = None
    aux_nodes: tuple = None
    aux_outcomes: int = None
    aux_localizers: bool = False

    def __post_init__(self):
        if self.level < 1:
            raise ConfigurationError("must be >= 1", "relaxation.level")
        if self.localizing_level < 0:
            raise ConfigurationError("must be >= 0",
                                     "relaxation.localizing_level")
        object.__setattr__(self, "extra_monomials",
                           tuple(self.extra_monomials))
        if self.localizing_monomials is not None:
            object.__setattr__(self, "localizing_monomials",
                               tuple(self.localizing_monomials))
        if self.aux_nodes is not None:
            object.__setattr__(self, "aux_nodes",
                               tuple(sorted(set(self.aux_nodes))))
        if self.include_aux and not self.aux_nodes:
            raise ConfigurationError("Z symbols need at least one node",
                                     "relaxation.aux_nodes")
        for word in self.extra_monomials + (self.localizing_monomials or ()):
            if word.is_zero:
                raise ConfigurationError("basis words must be nonzero",
                                         "relaxation.extras")

    @property
    def n_nodes(self):
        return max(self.aux_nodes) if self.aux_nodes else 0


def spec_from_dict(section, scenario, **overrides):
    """
    Builds a RelaxationSpec from the ``relaxation`` section of a document.
    Extras and localizing words may use family patterns such as ``r*M``.

    :param section: The parsed section.
    :type section: dict
    :param scenario: Scenario used to expand patterns.
    :type scenario: Scenario
    :return: The spec.
    :rtype: RelaxationSpec
    """
    alphabet = scenario.alphabet(max_word_length=64)
    try:
        extras = [word for text in section.get("extras", [])
                  for word in expand_pattern(text, alphabet)]
        localizing = None
        if "localizing" in section:
            localizing = [word for text in section["localizing"]
                          for word in ([ONE] if text.strip() == "1"
                                       else expand_pattern(text, alphabet))]
        options = dict(
            level=int(section.get("level", 1)),
            extra_monomials=tuple(dict.fromkeys(extras)),
            localizing_level=int(section.get("localizing_level", 1)),
            localizing_monomials=localizing,
            block_mode=BlockMode(section.get("block_mode", "per-node")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc), "relaxation")
    options.update(overrides)
    return RelaxationSpec(**options)


##############################################################################
                            #   Basis generation   #
##############################################################################


def _longest_word(spec):
    longest = max([spec.level, spec.localizing_level] +
                  [len(w) for w in spec.extra_monomials] +
                  [len(w) for w in spec.localizing_monomials or ()])
    return longest + (1 if spec.include_aux else 0)


def relaxation_alphabet(spec, scenario):
    """Alphabet with the word-length cap 2 k_max + 4 of this spec."""
    return scenario.alphabet(n_nodes=spec.n_nodes,
                             max_word_length=2 * _longest_word(spec) + 4)


def _words_up_to(letters, length, alphabet):
    """Canonical nonzero products of at most ``length`` letters."""
    found = {ONE: None}
    frontier = [ONE]
    for _ in range(length):
        grown = []
        for word in frontier:
            for letter in letters:
                candidate = canonicalize(word * Monomial((letter,)), alphabet)
                if candidate.is_zero or candidate in found:
                    continue
                found[candidate] = None
                grown.append(candidate)
        frontier = grown
    return list(found)


def _with_aux(words, spec, alphabet):
    """{1, Z_b,i} x words for the selected aux nodes."""
    letters = alphabet.aux_letters(spec.aux_nodes, spec.aux_outcomes)
    out = dict.fromkeys(words)
    for letter in letters:
        for word in words:
            out[canonicalize(Monomial((letter,)) * word, alphabet)] = None
    return list(out)


def _ordered(words):
    return sorted(dict.fromkeys(words), key=lambda w: w.sort_key)


def generate_basis(spec, scenario):
    """
    Monomial basis of the moment matrix.

    :param spec: Relaxation level and extras.
    :type spec: RelaxationSpec
    :param scenario: Scenario fixing the alphabet.
    :type scenario: Scenario
    :return: Canonical words ordered by length then lexicographically.
    :rtype: list
    """
    alphabet = relaxation_alphabet(spec, scenario)
    words = _words_up_to(alphabet.letters(), spec.level, alphabet)
    for extra in spec.extra_monomials:
        reduced = canonicalize(extra, alphabet)
        if reduced != extra or extra.is_zero:
            raise ConfigurationError(
                f"extra monomial {extra} is not canonical (reduces to "
                f"{reduced})", "relaxation.extras")
        if extra.aux_part:
            raise ConfigurationError(
                f"extra monomial {extra} may not contain Z symbols",
                "relaxation.extras")
        words.append(extra)
    words = _ordered(words)
    if spec.include_aux:
        words = _ordered(_with_aux(words, spec, alphabet))
    return words


def localizing_basis(spec, scenario):
    """Basis of the localizing matrices."""
    alphabet = relaxation_alphabet(spec, scenario)
    if spec.localizing_monomials is not None:
        words = [canonicalize(w, alphabet) for w in spec.localizing_monomials]
    else:
        words = _words_up_to(alphabet.letters(), spec.localizing_level,
                             alphabet)
    words = _ordered(w for w in words if not w.is_zero)
    if spec.include_aux and spec.aux_localizers:
        words = _ordered(_with_aux(words, spec, alphabet))
    return words


##############################################################################
                            #   Relaxation   #
##############################################################################


@dataclass(frozen=True)
class LinearConstraint:
    """
    sum coef * variable REL rhs, tagged for dual lookup.

    :param tag: Name such as ``photon[x=1,n=0]`` or ``prob[b=1,x=1,y=1]``.
    :param coefficients: Sorted (variable id, coefficient) pairs.
    :param relation: ``==``, ``>=`` or ``<=``.
    :param rhs: Right-hand side.
    """
    tag: str
    coefficients: tuple
    relation: str
    rhs: float

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ConfigurationError(f"unknown relation {self.relation!r}")

    @classmethod
    def build(cls, tag, terms, relation, rhs):
        """Merges repeated variables and drops zero coefficients."""
        merged = {}
        for var, coef in terms:
            if var is None:
                continue
            merged[var] = merged.get(var, 0.0) + coef
        pairs = tuple(sorted((v, c) for v, c in merged.items() if c != 0.0))
        return cls(tag, pairs, relation, float(rhs))

    def shifted(self, offset, prefix=""):
        return replace(self, tag=prefix + self.tag,
                       coefficients=tuple((v + offset, c)
                                          for v, c in self.coefficients))


_MISSING = object()


class _VariableTable:
    """Assigns ids to trace classes in order of first use."""

    def __init__(self, alphabet):
        self.alphabet = alphabet
        self.ids = {}
        self.classes = []

    def _class(self, word):
        return trace_class(canonicalize(word, self.alphabet))

    def ensure(self, word):
        """Id of the word's class, registering it; None for Zero."""
        cls = self._class(word)
        if cls.is_zero:
            return None
        if cls not in self.ids:
            self.ids[cls] = len(self.classes)
            self.classes.append(cls)
        return self.ids[cls]

    def find(self, word):
        """Id of the word's class, None for Zero, _MISSING if absent."""
        cls = self._class(word)
        if cls.is_zero:
            return None
        return self.ids.get(cls, _MISSING)


@dataclass(frozen=True)
class MomentRelaxation:
    """
    Symbolic moment relaxation. Matrix entries are variable ids (None for
    Zero); localizer entries are (id, coefficient) pairs.
    """
    scenario: object
    spec: RelaxationSpec
    alphabet: object
    basis: tuple
    localizing_basis: tuple
    variables: tuple
    var_table: dict
    gamma: tuple
    localizers: tuple
    constraints: tuple = ()

    @property
    def n_vars(self):
        return len(self.variables)

    def find(self, word):
        """Variable id of a word, None when it is Zero or absent."""
        cls = trace_class(canonicalize(word, self.alphabet))
        if cls.is_zero:
            return None
        return self.var_table.get(cls)

    def require(self, word):
        """
        Variable id of a word.

        :raises LevelTooLowError: When the word's class has no variable.
        """
        cls = trace_class(canonicalize(word, self.alphabet))
        if cls.is_zero:
            return None
        if cls not in self.var_table:
            raise LevelTooLowError(str(cls.representative))
        return self.var_table[cls]

    def moment(self, left, right):
        """Variable id of Tr(left^dagger right)."""
        return self.require(adjoint(canonicalize(left, self.alphabet)) * right)

    def probability(self, b, x, y):
        return self.require(Monomial((state(x), measurement(b, y))))

    def photon(self, x, n):
        return self.require(Monomial((state(x), number(n))))

    def with_constraints(self, extra):
        return replace(self, constraints=self.constraints + tuple(extra))

    def block_sizes(self):
        """Sizes of Gamma and each localizer, in lowering order."""
        return [len(self.basis)] + [len(self.localizing_basis)
                                    for _ in self.localizers]

    def dump(self):
        """
        Human-readable listing: one header line per matrix and one line per
        constraint, moments in text form.
        """
        lines = [f"gamma {len(self.basis)}x{len(self.basis)} over "
                 f"{self.n_vars} variables"]
        for x, _ in self.localizers:
            size = len(self.localizing_basis)
            lines.append(f"localizer[x={x}] {size}x{size}")
        for constraint in self.constraints:
            terms = " + ".join(
                f"{coef:g}*Tr[{self.variables[var]}]"
                for var, coef in constraint.coefficients) or "0"
            lines.append(f"{constraint.tag}: {terms} {constraint.relation} "
                         f"{constraint.rhs:.12g}")
        return "\n".join(lines)


def _gamma(basis, table, alphabet):
    size = len(basis)
    rows = [[None] * size for _ in range(size)]
    daggers = [adjoint(u) for u in basis]
    for i in range(size):
        for j in range(i, size):
            var = table.ensure(canonicalize(daggers[i] * basis[j], alphabet))
            rows[i][j] = var
            rows[j][i] = var
    return tuple(tuple(row) for row in rows)


def _localizer(x, basis, table, alphabet):
    rho = Monomial((state(x),))
    size = len(basis)
    rows = [[()] * size for _ in range(size)]
    for i in range(size):
        left = adjoint(basis[i])
        for j in range(i, size):
            linear = table.ensure(left * rho * basis[j])
            square = table.ensure(left * rho * rho * basis[j])
            terms = {}
            if linear is not None:
                terms[linear] = terms.get(linear, 0.0) + 1.0
            if square is not None:
                terms[square] = terms.get(square, 0.0) - 1.0
            entry = tuple(sorted((v, c) for v, c in terms.items() if c))
            rows[i][j] = entry
            rows[j][i] = entry
    return tuple(tuple(row) for row in rows)


def _completeness(basis, scenario, table):
    """Sum_b Gamma[u, M_b|y v] = Gamma[u, v] wherever every word exists."""
    constraints = []
    seen = set()
    daggers = [adjoint(u) for u in basis]
    for i, left in enumerate(daggers):
        for j in range(i, len(basis)):
            right = basis[j]
            target = table.find(left * right)
            if target is _MISSING:
                continue
            for y, n_b in enumerate(scenario.outcomes, start=1):
                ids = [table.find(left * Monomial((measurement(b, y),)) *
                                  right) for b in range(1, n_b + 1)]
                if any(var is _MISSING for var in ids):
                    continue
                terms = [(var, 1.0) for var in ids if var is not None]
                if target is not None:
                    terms.append((target, -1.0))
                row = LinearConstraint.build("", terms, "==", 0.0)
                if not row.coefficients or row.coefficients in seen:
                    continue
                seen.add(row.coefficients)
                constraints.append(replace(
                    row, tag=f"complete[y={y},#{len(constraints) + 1}]"))
    return constraints


def _aux_traces(table):
    """Tr[P rho_x] = Tr[P sigma_n] for every registered pure-Z product P."""
    groups = {}
    for cls in table.classes:
        word = cls.representative
        prefix, core = word.aux_part, word.core_part
        if prefix and len(core) == 1 and \
                core[0].kind in (Kind.STATE, Kind.NUMBER):
            groups.setdefault(prefix, []).append(
                (core[0].sort_key, table.ids[cls]))

    constraints = []
    for prefix, members in sorted(groups.items(),
                                  key=lambda kv: Monomial(kv[0]).sort_key):
        members.sort()
        label = Monomial(prefix)
        first = members[0][1]
        for _, var in members[1:]:
            constraints.append(LinearConstraint.build(
                f"aux_trace[{label},#{len(constraints) + 1}]",
                [(var, 1.0), (first, -1.0)], "==", 0.0))
    return constraints


def _require(table, word):
    var = table.find(word)
    if var is _MISSING:
        raise LevelTooLowError(str(trace_class(word).representative))
    return var


def photon_constraints(photon, scenario, lookup):
    """
    Photon rows with moment variables substituted.

    :param photon: The photon model.
    :param scenario: The scenario.
    :param lookup: Callable (x, n) -> list of (variable id, weight) pairs.
    :return: Constraints tagged by the model.
    :rtype: list
    """
    constraints = []
    for x in range(1, scenario.n_x + 1):
        for row in photon.rows(x):
            terms = [(var, coef * weight) for n, coef in row.coefficients
                     for var, weight in lookup(x, n)]
            constraints.append(LinearConstraint.build(
                row.tag, terms, row.relation, row.rhs))
    return constraints


def build_relaxation(spec, scenario, photon=None):
    """
    Assembles the symbolic relaxation.

    :param spec: Basis specification.
    :type spec: RelaxationSpec
    :param scenario: Scenario cardinalities.
    :type scenario: Scenario
    :param photon: Photon model imposed on this block; None leaves the photon
        statistics to the caller.
    :type photon: PhotonModel, optional
    :return: The relaxation.
    :rtype: MomentRelaxation
    """
    if photon is not None:
        photon.check(scenario)
    alphabet = relaxation_alphabet(spec, scenario)
    basis = generate_basis(spec, scenario)
    loc_basis = localizing_basis(spec, scenario)
    table = _VariableTable(alphabet)

    gamma = _gamma(basis, table, alphabet)
    localizers = tuple((x, _localizer(x, loc_basis, table, alphabet))
                       for x in range(1, scenario.n_x + 1))
    log.debug("Gamma %sx%s, %s localizers %sx%s, %s variables",
              len(basis), len(basis), len(localizers), len(loc_basis),
              len(loc_basis), len(table.classes))

    constraints = []
    for x in range(1, scenario.n_x + 1):
        constraints.append(LinearConstraint.build(
            f"norm[rho,x={x}]", [(table.ensure(Monomial((state(x),))), 1.0)],
            "==", 1.0))
    for n in range(scenario.n_trunc + 1):
        constraints.append(LinearConstraint.build(
            f"norm[sigma,n={n}]",
            [(table.ensure(Monomial((number(n),))), 1.0)], "==", 1.0))
    constraints.append(LinearConstraint.build(
        "trace_identity", [(table.ensure(ONE), 1.0)], ">=",
        scenario.n_trunc + 1))

    if photon is not None:
        constraints.extend(photon_constraints(
            photon, scenario,
            lambda x, n: [(_require(table, Monomial((state(x), number(n)))),
                           1.0)]))

    constraints.extend(_completeness(basis, scenario, table))
    if spec.include_aux:
        constraints.extend(_aux_traces(table))
    log.debug("%s linear constraints", len(constraints))

    return MomentRelaxation(
        scenario=scenario,
        spec=spec,
        alphabet=alphabet,
        basis=tuple(basis),
        localizing_basis=tuple(loc_basis),
        variables=tuple(cls.representative for cls in table.classes),
        var_table=dict(table.ids),
        gamma=gamma,
        localizers=localizers,
        constraints=tuple(constraints),
    )


def attach_behavior(rel, behavior=None, witness=None, value=None,
                    relation="=="):
    """
    Pins the observed statistics: either every probability moment of a
    behavior, or one witness value.

    :param rel: The relaxation.
    :type rel: MomentRelaxation
    :param behavior: Full probability table.
    :type behavior: ObservedBehavior, optional
    :param witness: Witness whose value is pinned.
    :type witness: Witness, optional
    :param value: Observed witness value.
    :type value: float, optional
    :param relation: Relation of the witness row.
    :type relation: str
    :return: A new relaxation with the extra constraints.
    :rtype: MomentRelaxation
    """
    if (behavior is None) == (witness is None):
        raise ConfigurationError("pin either a behavior or a witness value")
    if behavior is not None:
        return rel.with_constraints(behavior_constraints(
            rel.scenario, behavior, lambda b, x, y: [(
                rel.probability(b, x, y), 1.0)]))
    return rel.with_constraints(witness_constraints(
        witness, value, lambda b, x, y: [(rel.probability(b, x, y), 1.0)],
        relation))


def behavior_constraints(scenario, behavior, lookup):
    """One equality per (b, x, y) with lookup giving (id, weight) pairs."""
    behavior.check(scenario, tol=1e-9)
    return [LinearConstraint.build(
        f"prob[b={b},x={x},y={y}]", lookup(b, x, y), "==",
        behavior.p(b, x, y)) for b, x, y in scenario.triples()]


def witness_constraints(witness, value, lookup, relation="=="):
    """A single row sum c_bxy p(b|x,y) REL value."""
    if value is None:
        raise ConfigurationError("a witness pin needs a value",
                                 "witness_value")
    terms = [(var, coef * weight)
             for triple, coef in witness.coefficients.items()
             for var, weight in lookup(*triple)]
    return [LinearConstraint.build("witness", terms, relation, value)]


def witness_objective(rel, witness):
    """Objective map variable id -> coefficient for a witness."""
    objective = {}
    for (b, x, y), coef in witness.coefficients.items():
        var = rel.probability(b, x, y)
        if var is not None:
            objective[var] = objective.get(var, 0.0) + coef
    return objective


def aux_symbol(b, i):
    """Z_b,i as a one-letter word."""
    return Monomial((aux(b, i),))
