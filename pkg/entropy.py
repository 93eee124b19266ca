"""
Purpose: Randomness certification. Gauss-Radau quadrature on (0, 1] with the
endpoint 1 fixed, the min-entropy program with one sub-normalized moment
block per outcome, and the Shannon-entropy lower bound that minimizes one
moment block per quadrature node with scalar Z variables.
"""
# Import essential libraries
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from colorama import Fore, Style
from scipy import linalg

from custom_exceptions import (ConfigurationError, InfeasibleError,
                               SolverFailure)
from moments import (BlockMode, LinearConstraint, RelaxationSpec,
                     attach_behavior, aux_symbol, behavior_constraints,
                     build_relaxation, photon_constraints,
                     witness_constraints)
from opalg import Monomial, measurement, state
from sdpcore import ProblemBuilder, Sense, Status, lower_problem, solve
from threads import map_bounded

log = logging.getLogger(__name__)


##############################################################################
                            #   Quadrature   #
##############################################################################


@dataclass(frozen=True)
class Quadrature:
    """
    Gauss-Radau rule on (0, 1] whose last node is t = 1.

    ``tau`` and ``c_m`` run over every node except the endpoint, the same
    node set the Shannon objective sums over.
    """
    m: int
    nodes: tuple
    weights: tuple

    @property
    def used(self):
        """Indices of the nodes entering the entropy objective."""
        return tuple(range(self.m - 1))

    @property
    def tau(self):
        return tuple(self.weights[i] / (self.nodes[i] * math.log(2))
                     for i in self.used)

    @property
    def c_m(self):
        return math.fsum(self.tau)


def gauss_radau(m):
    """
    Nodes and weights from the eigen-decomposition of the Jacobi matrix of
    the shifted Legendre polynomials, with the last diagonal entry modified
    so that 1 is an eigenvalue.

    :param m: Number of nodes, >= 2.
    :type m: int
    :return: The rule, nodes ascending.
    :rtype: Quadrature
    """
    if m < 2:
        raise ConfigurationError(f"need at least 2 nodes, got {m}", "m")
    k = np.arange(1, m)
    off = k / (2.0 * np.sqrt(4.0 * k ** 2 - 1.0))
    diagonal = np.full(m, 0.5)

    # (J_{m-1} - I) delta = off_{m-1}^2 e_{m-1}
    leading = np.diag(diagonal[:-1] - 1.0) + np.diag(off[:-1], 1) + \
        np.diag(off[:-1], -1)
    rhs = np.zeros(m - 1)
    rhs[-1] = off[-1] ** 2
    delta = linalg.solve(leading, rhs)
    diagonal[-1] = 1.0 + delta[-1]

    nodes, vectors = linalg.eigh_tridiagonal(diagonal, off)
    weights = vectors[0, :] ** 2
    nodes[-1] = 1.0
    return Quadrature(m, tuple(float(t) for t in nodes),
                      tuple(float(w) for w in weights))


def quadratic_inf_oracle(p, t):
    """
    min_z p (2 z + (1 - t) z^2) + t z^2 = -p^2 / (t (1 - p) + p).

    :param p: Probability in [0, 1].
    :type p: float
    :param t: Node in (0, 1].
    :type t: float
    :return: The infimum.
    :rtype: float
    """
    if p == 0.0:
        return 0.0
    return -p * p / (t * (1.0 - p) + p)


def scalar_shannon_bound(distribution, quadrature):
    """
    c_m + sum_i tau_i sum_b inf_z(...): the quadrature lower bound on the
    Shannon entropy of a fixed distribution, in bits.
    """
    total = quadrature.c_m
    for i, tau in zip(quadrature.used, quadrature.tau):
        t = quadrature.nodes[i]
        total += tau * math.fsum(quadratic_inf_oracle(float(p), t)
                                 for p in distribution)
    return total


##############################################################################
                            #   Tasks   #
##############################################################################


@dataclass(frozen=True)
class EntropyTask:
    """
    What is certified and under which observations.

    :param scenario: Scenario cardinalities.
    :param photon: Photon model.
    :param target: (x*, y*) whose outcome randomness is certified.
    :param behavior: Full probability table, or None.
    :param witness: Witness pinned at ``witness_value`` instead.
    :param witness_value: Observed witness value.
    :param quadrature: Rule for the Shannon bound (m = 8 when omitted).
    :param relaxation: Basis specification.
    :param name: Task id used in records.
    """
    scenario: object
    photon: object
    target: tuple = (1, 1)
    behavior: object = None
    witness: object = None
    witness_value: float = None
    quadrature: Quadrature = None
    relaxation: RelaxationSpec = field(default_factory=RelaxationSpec)
    name: str = "task"

    def __post_init__(self):
        x, y = self.target
        if not (1 <= x <= self.scenario.n_x and 1 <= y <= self.scenario.n_y):
            raise ConfigurationError(f"target inputs {self.target} outside "
                                     f"the scenario", "target")
        if (self.behavior is None) == (self.witness is None):
            raise ConfigurationError(
                "give either a behavior or a witness with its value")
        if self.witness is not None:
            self.witness.check(self.scenario)
            if self.witness_value is None or \
                    not 0.0 <= self.witness_value <= 1.0:
                raise ConfigurationError(
                    f"witness value {self.witness_value} outside [0, 1]",
                    "witness_value")
        if self.behavior is not None:
            self.behavior.check(self.scenario, tol=1e-9)
        self.photon.check(self.scenario)

    @property
    def n_outcomes(self):
        return self.scenario.outcomes[self.target[1] - 1]


@dataclass
class EntropyResult:
    """One certified entropy value and how it was obtained."""
    task: str
    kind: str
    bits: float
    m: int = None
    k: int = 1
    guessing_probability: float = None
    node_optima: tuple = ()
    status: str = Status.OPTIMAL.value
    diagnostics: dict = field(default_factory=dict)

    def as_record(self):
        return {"task": self.task, "kind": self.kind, "m": self.m,
                "k": self.k, "bound_bits": self.bits,
                "guessing_probability": self.guessing_probability,
                "node_optima": list(self.node_optima),
                "status": self.status}


def _raise_for(solution, node=None):
    if solution.status is Status.INFEASIBLE:
        raise InfeasibleError("Relaxation is infeasible", node)
    if solution.status is Status.UNBOUNDED:
        raise SolverFailure("Relaxation is unbounded",
                            solution.diagnostics, node)
    if solution.status is Status.NUMERICAL_TROUBLE:
        raise SolverFailure("Numerical trouble persisted after retry",
                            solution.diagnostics, node)


def _shifted(offsets, var):
    return [(offset + var, 1.0) for offset in offsets if var is not None]


##############################################################################
                            #   Min-entropy   #
##############################################################################


def solve_min_entropy(task, cfg=None):
    """
    Guessing probability of the eavesdropper holding one hidden variable per
    outcome b of setting y*. Each outcome gets its own moment block scaled by
    a weight q_b (sum q_b = 1); the observed statistics and photon
    constraints hold for the sum of the blocks.

    :param task: The task.
    :type task: EntropyTask
    :param cfg: Solver settings.
    :type cfg: SolverConfig, optional
    :return: Bits = -log2 P_g.
    :rtype: EntropyResult
    """
    scenario = task.scenario
    x_star, y_star = task.target
    spec = replace(task.relaxation, include_aux=False, aux_nodes=None,
                   aux_localizers=False)
    rel = build_relaxation(spec, scenario, photon=None)

    builder = ProblemBuilder()
    outcomes = range(1, task.n_outcomes + 1)
    weights = [builder.add_scalar(f"q[b={b}]") for b in outcomes]
    offsets = [builder.add_relaxation(rel, f"guess[b={b}].", weights[b - 1])
               for b in outcomes]
    builder.add_constraint(LinearConstraint.build(
        "weights", [(w, 1.0) for w in weights], "==", 1.0))
    for b, w in zip(outcomes, weights):
        builder.add_constraint(LinearConstraint.build(
            f"weight[b={b}]", [(w, 1.0)], ">=", 0.0))

    for row in photon_constraints(task.photon, scenario,
                                  lambda x, n: _shifted(offsets,
                                                        rel.photon(x, n))):
        builder.add_constraint(row)

    def lookup(b, x, y):
        return _shifted(offsets, rel.probability(b, x, y))

    if task.behavior is not None:
        rows = behavior_constraints(scenario, task.behavior, lookup)
    else:
        rows = witness_constraints(task.witness, task.witness_value, lookup)
    for row in rows:
        builder.add_constraint(row)

    objective = {offsets[b - 1] + rel.probability(b, x_star, y_star): 1.0
                 for b in outcomes}
    solution = solve(builder.build(objective, Sense.MAXIMIZE), cfg)
    _raise_for(solution)

    guess = solution.objective_value
    bits = -math.log2(max(guess, np.finfo(float).tiny))
    log.info("Min-entropy of %s%s%s: P_g = %.8f, %s%.6f bits%s",
             Fore.CYAN, task.name, Style.RESET_ALL, guess, Fore.GREEN, bits,
             Style.RESET_ALL)
    return EntropyResult(task.name, "min-entropy", bits,
                         k=task.relaxation.level, guessing_probability=guess,
                         diagnostics=solution.diagnostics)


def min_entropy_bound(task, cfg=None):
    """Certified min-entropy of the target outcome in bits."""
    return solve_min_entropy(task, cfg).bits


##############################################################################
                            #   Shannon entropy   #
##############################################################################


def node_objective(rel, task, t, tau, node):
    """
    tau sum_b [2 Gamma(Z rho, M_b) + (1 - t) Gamma(Z rho, Z M_b)
    + t Gamma(Z rho, Z)] with Z = Z_b,node, rho = rho_x*, M_b = M_b|y*.
    """
    x_star, y_star = task.target
    rho = Monomial((state(x_star),))
    objective = {}

    def add(var, coef):
        if var is not None:
            objective[var] = objective.get(var, 0.0) + coef

    for b in range(1, task.n_outcomes + 1):
        z = aux_symbol(b, node)
        m_b = Monomial((measurement(b, y_star),))
        add(rel.moment(z * rho, m_b), 2.0 * tau)
        add(rel.moment(z * rho, z * m_b), (1.0 - t) * tau)
        add(rel.moment(z * rho, z), t * tau)
    return objective


def _pinned(rel, task):
    if task.behavior is not None:
        return attach_behavior(rel, behavior=task.behavior)
    return attach_behavior(rel, witness=task.witness,
                           value=task.witness_value)


def _node_spec(task, nodes):
    return replace(task.relaxation, include_aux=True, aux_nodes=nodes,
                   aux_outcomes=task.n_outcomes, aux_localizers=True)


def solve_shannon(task, cfg=None):
    """
    Shannon-entropy lower bound c_m + sum_i (node optimum). In per-node mode
    every node minimizes its own moment block; node blocks differ only in
    their objective weights, so one relaxation is assembled and re-used.

    :param task: The task.
    :type task: EntropyTask
    :param cfg: Solver settings; ``threads`` bounds concurrent node solves.
    :type cfg: SolverConfig, optional
    :return: The bound in bits with per-node optima.
    :rtype: EntropyResult
    """
    quadrature = task.quadrature or gauss_radau(8)
    used = quadrature.used
    threads = cfg.threads if cfg is not None else 1

    if task.relaxation.block_mode is BlockMode.PER_NODE:
        rel = _pinned(build_relaxation(_node_spec(task, (1,)), task.scenario,
                                       task.photon), task)
        problems = [lower_problem(rel, node_objective(
            rel, task, quadrature.nodes[i], tau, 1), Sense.MINIMIZE)
            for i, tau in zip(used, quadrature.tau)]
        solutions = map_bounded(solve, [(p, cfg) for p in problems], threads)
        for i, solution in zip(used, solutions):
            _raise_for(solution, node=i + 1)
        node_optima = tuple(s.objective_value for s in solutions)
        diagnostics = {"node_diagnostics": [s.diagnostics
                                            for s in solutions]}
    else:
        nodes = tuple(range(1, len(used) + 1))
        rel = _pinned(build_relaxation(_node_spec(task, nodes), task.scenario,
                                       task.photon), task)
        objectives = [node_objective(rel, task, quadrature.nodes[i], tau,
                                     node)
                      for node, i, tau in zip(nodes, used, quadrature.tau)]
        total = {}
        for objective in objectives:
            for var, coef in objective.items():
                total[var] = total.get(var, 0.0) + coef
        solution = solve(lower_problem(rel, total, Sense.MINIMIZE), cfg)
        _raise_for(solution)
        node_optima = tuple(
            math.fsum(c * solution.value(v) for v, c in objective.items())
            for objective in objectives)
        diagnostics = solution.diagnostics

    bits = quadrature.c_m + math.fsum(node_optima)
    log.info("Shannon bound of %s%s%s (m=%s): %s%.6f bits%s", Fore.CYAN,
             task.name, Style.RESET_ALL, quadrature.m, Fore.GREEN, bits,
             Style.RESET_ALL)
    return EntropyResult(task.name, "shannon", bits, m=quadrature.m,
                         k=task.relaxation.level, node_optima=node_optima,
                         diagnostics=diagnostics)


def shannon_bound(task, cfg=None):
    """Certified Shannon entropy of the target outcome in bits."""
    return solve_shannon(task, cfg).bits
