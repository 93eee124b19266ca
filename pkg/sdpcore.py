"""
Purpose: Solver-agnostic conic problems. Moment relaxations are lowered to a
small intermediate representation (PSD blocks affine in the variables plus
tagged linear rows), solved through cvxpy, and the dual values are mapped
back to constraint tags so that callers can read off sensitivities and
affine trade-off certificates. Problems can also be exported in SDPA sparse
format for external solvers.
"""
# Import essential libraries
import logging
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from os import getenv

import cvxpy as cp
import numpy as np
from colorama import Fore, Style
from dotenv import load_dotenv
from scipy import sparse

from custom_exceptions import (ConfigurationError, SolverExceptionHandler,
                               UnsupportedError)
from moments import LinearConstraint, witness_objective

load_dotenv()  # Load solver settings

log = logging.getLogger(__name__)

CERTIFICATE_TAGS = ("photon", "prob", "witness")


class Sense(Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"
    FEASIBILITY = "feasibility"


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_TROUBLE = "numerical_trouble"


_STATUS_MAP = {
    cp.OPTIMAL: Status.OPTIMAL,
    cp.OPTIMAL_INACCURATE: Status.OPTIMAL,
    cp.INFEASIBLE: Status.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: Status.INFEASIBLE,
    cp.UNBOUNDED: Status.UNBOUNDED,
    cp.UNBOUNDED_INACCURATE: Status.UNBOUNDED,
}

# Inaccurate optima count only when the point passes an independent check
ACCEPT_TOL = 1e-6
# Least constraint slack above which a troubled problem is called infeasible
INFEASIBILITY_MARGIN = 1e-5


def constraint_residual(program):
    """
    Largest primal violation over the constraints of a solved cvxpy program
    (PSD constraints report their most negative eigenvalue).

    :param program: The solved program.
    :type program: cvxpy.Problem
    :return: The violation, inf when no primal point is available.
    :rtype: float
    """
    worst = 0.0
    for constraint in program.constraints:
        try:
            violation = constraint.violation()
        except ValueError:
            return float("inf")
        if violation is None:
            return float("inf")
        worst = max(worst, float(np.max(np.atleast_1d(violation))))
    return worst


def classify_status(program):
    """
    Status policy shared by every solve in the package. ``optimal`` is
    trusted; ``optimal_inaccurate`` is trusted only when the primal point
    violates no constraint by more than ACCEPT_TOL.

    :param program: The solved program.
    :type program: cvxpy.Problem
    :return: The status.
    :rtype: Status
    """
    status = _STATUS_MAP.get(program.status, Status.NUMERICAL_TROUBLE)
    if program.status == cp.OPTIMAL_INACCURATE:
        residual = constraint_residual(program)
        if residual > ACCEPT_TOL:
            log.debug("Rejected inaccurate optimum, residual %.3g", residual)
            return Status.NUMERICAL_TROUBLE
        log.debug("Accepted inaccurate optimum, residual %.3g", residual)
    return status


##############################################################################
                            #   Configuration   #
##############################################################################


@dataclass(frozen=True)
class SolverConfig:
    """
    Backend solver settings.

    :param solver: cvxpy solver name (CLARABEL, SCS, MOSEK, CVXOPT).
    :param tolerance: Feasibility and gap tolerance.
    :param max_iters: Iteration cap.
    :param threads: Worker threads, forwarded to solvers that take them.
    :param verbose: Let the solver print its log.
    :param retry: Retry once with jittered scaling on numerical trouble.
    :param jitter: Half-width of the log-uniform scaling jitter.
    :param seed: Seed of the jitter.
    """
    solver: str = "CLARABEL"
    tolerance: float = 1e-7
    max_iters: int = 10000
    threads: int = 1
    verbose: bool = False
    retry: bool = True
    jitter: float = 0.05
    seed: int = 0

    @classmethod
    def from_env(cls, **overrides):
        """Reads PHOTONSDP_* variables (a .env file is honoured)."""
        settings = dict(
            solver=getenv("PHOTONSDP_SOLVER", "CLARABEL").upper(),
            tolerance=float(getenv("PHOTONSDP_TOLERANCE", "1e-7")),
            max_iters=int(getenv("PHOTONSDP_MAX_ITERS", "10000")),
            threads=int(getenv("PHOTONSDP_THREADS", "1")),
        )
        settings.update({k: v for k, v in overrides.items()
                         if v is not None})
        return cls(**settings)

    def solver_options(self):
        tol = self.tolerance
        if self.solver == "CLARABEL":
            return {"tol_gap_abs": tol, "tol_gap_rel": tol, "tol_feas": tol,
                    "max_iter": self.max_iters}
        if self.solver == "SCS":
            return {"eps_abs": tol, "eps_rel": tol,
                    "max_iters": self.max_iters}
        if self.solver == "MOSEK":
            return {"mosek_params": {
                "MSK_DPAR_INTPNT_CO_TOL_REL_GAP": tol,
                "MSK_DPAR_INTPNT_CO_TOL_PFEAS": tol,
                "MSK_DPAR_INTPNT_CO_TOL_DFEAS": tol,
                "MSK_IPAR_NUM_THREADS": self.threads}}
        if self.solver == "CVXOPT":
            return {"abstol": tol, "reltol": tol, "feastol": tol,
                    "max_iters": self.max_iters}
        return {}


##############################################################################
                        #   Intermediate representation   #
##############################################################################


@dataclass(frozen=True)
class PsdBlock:
    """
    A symmetric matrix affine in the variables, constrained PSD. ``terms``
    hold upper-triangle entries (row, col, var, coef); var = -1 is the
    constant part.
    """
    name: str
    size: int
    terms: tuple

    def matrices(self, n_vars):
        """
        Column-major vectorization: (A, c) with vec(M) = A @ x + c.

        :return: Sparse (size^2, n_vars) matrix and dense constant vector.
        """
        s = self.size
        rows, cols, vals = [], [], []
        constant = np.zeros(s * s)
        for i, j, var, coef in self.terms:
            cells = {i + j * s, j + i * s}
            for cell in cells:
                if var < 0:
                    constant[cell] += coef
                else:
                    rows.append(cell)
                    cols.append(var)
                    vals.append(coef)
        matrix = sparse.csr_matrix((vals, (rows, cols)),
                                   shape=(s * s, n_vars))
        return matrix, constant


@dataclass(frozen=True)
class ConicProblem:
    """
    Optimize sum objective_j x_j + offset subject to PSD blocks and tagged
    linear rows. Immutable; safe to share across threads.
    """
    n_vars: int
    blocks: tuple
    constraints: tuple
    objective: tuple
    sense: Sense
    offset: float = 0.0
    var_names: tuple = ()

    def __post_init__(self):
        if self.n_vars < 1:
            raise ConfigurationError("problem has no variables")
        for block in self.blocks:
            if block.size < 1:
                raise ConfigurationError(f"block {block.name} is empty")
            for i, j, var, _ in block.terms:
                if not (0 <= i <= j < block.size) or var >= self.n_vars:
                    raise ConfigurationError(
                        f"block {block.name} has a bad entry "
                        f"({i}, {j}, var {var})")
        tags = set()
        for constraint in self.constraints:
            if constraint.tag in tags:
                raise ConfigurationError(
                    f"duplicate constraint tag {constraint.tag!r}")
            tags.add(constraint.tag)
            for var, _ in constraint.coefficients:
                if not 0 <= var < self.n_vars:
                    raise ConfigurationError(
                        f"constraint {constraint.tag} references variable "
                        f"{var} outside 0..{self.n_vars - 1}")
        for var, _ in self.objective:
            if not 0 <= var < self.n_vars:
                raise ConfigurationError(
                    f"objective references variable {var}")
        if self.sense is not Sense.FEASIBILITY and not self.objective:
            raise ConfigurationError(
                "empty objective; use Sense.FEASIBILITY for feasibility runs")

    def objective_vector(self):
        vector = np.zeros(self.n_vars)
        for var, coef in self.objective:
            vector[var] += coef
        return vector

    def scaled(self, factor):
        """Same problem with the objective multiplied by ``factor``."""
        return replace(self, objective=tuple((v, c * factor)
                                             for v, c in self.objective),
                       offset=self.offset * factor)


class ProblemBuilder:
    """
    Collects relaxations, scalar variables and cross-block rows into one
    ConicProblem.
    """

    def __init__(self):
        self.names = []
        self.blocks = []
        self.constraints = []

    @property
    def n_vars(self):
        return len(self.names)

    def add_variables(self, names):
        offset = len(self.names)
        self.names.extend(names)
        return offset

    def add_scalar(self, name):
        return self.add_variables([name])

    def add_constraint(self, constraint):
        self.constraints.append(constraint)

    def add_relaxation(self, rel, prefix="", weight=None):
        """
        Adds Gamma, the localizers and the relaxation's rows.

        :param rel: The relaxation.
        :type rel: MomentRelaxation
        :param prefix: Prepended to block names, variable names and tags.
        :type prefix: str
        :param weight: Scalar variable id; when given every row's right-hand
            side c becomes c * weight (sub-normalized block).
        :type weight: int, optional
        :return: Offset of the relaxation's variable ids.
        :rtype: int
        """
        offset = self.add_variables(
            [f"{prefix}Tr[{word}]" for word in rel.variables])

        terms = tuple((i, j, offset + var, 1.0)
                      for i, row in enumerate(rel.gamma)
                      for j, var in enumerate(row)
                      if j >= i and var is not None)
        self.blocks.append(PsdBlock(f"{prefix}gamma", len(rel.basis), terms))

        for x, matrix in rel.localizers:
            terms = tuple((i, j, offset + var, coef)
                          for i, row in enumerate(matrix)
                          for j, entry in enumerate(row) if j >= i
                          for var, coef in entry)
            self.blocks.append(PsdBlock(f"{prefix}localizer[x={x}]",
                                        len(rel.localizing_basis), terms))

        for constraint in rel.constraints:
            shifted = constraint.shifted(offset, prefix)
            if weight is not None and shifted.rhs != 0.0:
                shifted = LinearConstraint.build(
                    shifted.tag,
                    list(shifted.coefficients) + [(weight, -shifted.rhs)],
                    shifted.relation, 0.0)
            self.constraints.append(shifted)
        return offset

    def build(self, objective, sense, offset=0.0):
        """
        :param objective: Map variable id -> coefficient.
        :type objective: dict
        :param sense: Optimization sense.
        :type sense: Sense
        :return: The problem.
        :rtype: ConicProblem
        """
        pairs = tuple(sorted((v, c) for v, c in objective.items() if c != 0))
        return ConicProblem(self.n_vars, tuple(self.blocks),
                            tuple(self.constraints), pairs, sense, offset,
                            tuple(self.names))


def lower_problem(rel, objective, sense):
    """
    One Gamma block, one block per localizer, every row of the relaxation.

    :param rel: The relaxation.
    :type rel: MomentRelaxation
    :param objective: Map variable id -> coefficient.
    :type objective: dict
    :param sense: Optimization sense.
    :type sense: Sense
    :return: The problem.
    :rtype: ConicProblem
    """
    if sense is not Sense.FEASIBILITY and not any(objective.values()):
        raise ConfigurationError(
            f"cannot {sense.value} an empty objective; use feasibility")
    builder = ProblemBuilder()
    builder.add_relaxation(rel)
    return builder.build(objective, sense)


##############################################################################
                                #   Solving   #
##############################################################################


@dataclass
class Solution:
    """
    Result of one solve. ``duals`` maps each tag to d(objective)/d(rhs) in
    the problem's own sense; ``psd_term`` is the contribution of the PSD
    blocks' constant parts to the dual objective.
    """
    status: Status
    objective_value: float = None
    primal: np.ndarray = None
    duals: dict = None
    rhs: dict = field(default_factory=dict)
    psd_term: float = 0.0
    offset: float = 0.0
    block_duals: list = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status is Status.OPTIMAL

    def value(self, var):
        return float(self.primal[var])


def _split_rows(problem):
    """Equality rows and <= rows (>= rows negated) as sparse matrices."""
    eq, ineq = [], []
    for constraint in problem.constraints:
        if constraint.relation == "==":
            eq.append((constraint, 1.0))
        else:
            ineq.append((constraint, -1.0 if constraint.relation == ">="
                         else 1.0))

    def stack(rows):
        data, r, c, rhs = [], [], [], []
        for k, (constraint, sign) in enumerate(rows):
            for var, coef in constraint.coefficients:
                r.append(k)
                c.append(var)
                data.append(sign * coef)
            rhs.append(sign * constraint.rhs)
        matrix = sparse.csr_matrix((data, (r, c)),
                                   shape=(len(rows), problem.n_vars))
        return matrix, np.array(rhs)

    return eq, stack(eq), ineq, stack(ineq)


def _psd_expressions(problem, x, scales):
    """Each block as a symmetric cvxpy expression, congruence-scaled."""
    expressions, psd_data = [], []
    for block, scale in zip(problem.blocks, scales):
        matrix, constant = block.matrices(problem.n_vars)
        if scale is not None:
            factor = np.outer(scale, scale).ravel(order="F")
            matrix = sparse.diags(factor) @ matrix
            constant = constant * factor
        s = block.size
        expr = cp.reshape(matrix @ x + constant, (s, s), order="F")
        expressions.append((expr + expr.T) / 2)
        psd_data.append((matrix, constant, scale))
    return expressions, psd_data


def _solve_once(problem, cfg, scales):
    """
    One backend solve.

    :return: The solution and the primal point the solver ended on (None
        when it returned none), used to rescale a retry.
    :rtype: tuple
    """
    sign = {Sense.MAXIMIZE: -1.0, Sense.MINIMIZE: 1.0,
            Sense.FEASIBILITY: 0.0}[problem.sense]
    x = cp.Variable(problem.n_vars)
    expressions, psd_data = _psd_expressions(problem, x, scales)
    constraints = [expr >> 0 for expr in expressions]

    eq_rows, (a_eq, b_eq), ineq_rows, (g_in, h_in) = _split_rows(problem)
    eq_con = a_eq @ x == b_eq if eq_rows else None
    in_con = g_in @ x <= h_in if ineq_rows else None
    constraints += [c for c in (eq_con, in_con) if c is not None]

    cost = problem.objective_vector()
    target = cp.Minimize(sign * cost @ x) if sign else cp.Minimize(0)
    program = cp.Problem(target, constraints)

    started = time.perf_counter()
    try:
        program.solve(solver=cfg.solver, verbose=cfg.verbose,
                      **cfg.solver_options())
    except (cp.error.SolverError, ArithmeticError, ValueError) as exc:
        handled = SolverExceptionHandler(exc, cfg.solver)
        return Solution(Status.NUMERICAL_TROUBLE, diagnostics={
            "solver": cfg.solver, "error": handled.message,
            "solve_time": time.perf_counter() - started}), None

    stats = program.solver_stats
    diagnostics = {
        "solver": cfg.solver,
        "raw_status": program.status,
        "iterations": getattr(stats, "num_iters", None),
        "solve_time": time.perf_counter() - started,
    }
    estimate = None if x.value is None else \
        np.asarray(x.value, dtype=float).reshape(-1)
    status = classify_status(program)
    if status is not Status.OPTIMAL:
        return Solution(status, diagnostics=diagnostics), estimate

    diagnostics["residual"] = constraint_residual(program)
    objective_value = float(cost @ estimate) + problem.offset
    solution = Solution(Status.OPTIMAL, objective_value, estimate,
                        offset=problem.offset, diagnostics=diagnostics)
    _attach_duals(solution, problem, sign, constraints[:len(psd_data)],
                  psd_data, eq_rows, eq_con, a_eq, ineq_rows, in_con, g_in,
                  cost)
    gap = diagnostics.get("duality_gap")
    if program.status == cp.OPTIMAL_INACCURATE and (
            gap is None or gap > ACCEPT_TOL * (1.0 + abs(objective_value))):
        log.debug("Rejected inaccurate optimum, duality gap %s", gap)
        return Solution(Status.NUMERICAL_TROUBLE,
                        diagnostics=diagnostics), estimate
    return solution, estimate


def _attach_duals(solution, problem, sign, psd_cons, psd_data, eq_rows,
                  eq_con, a_eq, ineq_rows, in_con, g_in, cost):
    """
    Maps duals back to tags. The backend minimizes sign * cost; its optimal
    value equals sum_k sens_k rhs_k - sum_blocks <Z, C>, with sens = -dual
    for equalities and <= rows. The sign convention of equality duals is
    fixed by checking stationarity.
    """
    if sign == 0.0:
        solution.duals = {c.tag: 0.0 for c in problem.constraints}
        solution.rhs = {c.tag: c.rhs for c in problem.constraints}
        solution.psd_term = 0.0
        solution.block_duals = [np.zeros((b.size, b.size))
                                for b in problem.blocks]
        solution.diagnostics["duality_gap"] = 0.0
        return

    stationarity = sign * cost
    psd_term = 0.0
    block_duals = []
    for con, (matrix, constant, scale), block in zip(psd_cons, psd_data,
                                                     problem.blocks):
        dual = con.dual_value
        if dual is None:
            return
        dual = np.asarray(dual, dtype=float)
        dual = (dual + dual.T) / 2
        flat = dual.ravel(order="F")
        stationarity = stationarity - matrix.T @ flat
        psd_term -= float(flat @ constant)
        if scale is not None:
            dual = np.diag(scale) @ dual @ np.diag(scale)
        block_duals.append(dual)

    y = np.zeros(0)
    if in_con is not None:
        y = np.asarray(in_con.dual_value, dtype=float).reshape(-1)
        stationarity = stationarity + g_in.T @ y
    nu = np.zeros(0)
    if eq_con is not None:
        nu = np.asarray(eq_con.dual_value, dtype=float).reshape(-1)
        plus = np.linalg.norm(stationarity + a_eq.T @ nu)
        minus = np.linalg.norm(stationarity - a_eq.T @ nu)
        if minus < plus:
            nu = -nu

    duals, rhs = {}, {}
    for k, (constraint, _) in enumerate(eq_rows):
        duals[constraint.tag] = sign * -nu[k]
        rhs[constraint.tag] = constraint.rhs
    for k, (constraint, row_sign) in enumerate(ineq_rows):
        # >= rows were negated: sensitivity to the original rhs flips
        duals[constraint.tag] = sign * -y[k] * row_sign
        rhs[constraint.tag] = constraint.rhs

    solution.duals = duals
    solution.rhs = rhs
    solution.psd_term = sign * psd_term
    solution.block_duals = block_duals
    dual_value = sum(duals[t] * rhs[t] for t in duals) + solution.psd_term \
        + problem.offset
    solution.diagnostics["dual_value"] = dual_value
    solution.diagnostics["duality_gap"] = abs(dual_value -
                                              solution.objective_value)


def _block_scales(problem, estimate, rng, jitter):
    """
    Diagonal congruence scaling for a retry: blocks whose diagonal grew large
    on the failed attempt are shrunk to unit size, then jittered.
    """
    scales = []
    for block in problem.blocks:
        diagonal = np.ones(block.size)
        if estimate is not None:
            diagonal = np.zeros(block.size)
            for i, j, var, coef in block.terms:
                if i == j:
                    diagonal[i] += coef * (1.0 if var < 0 else estimate[var])
        shrink = 1.0 / np.sqrt(np.maximum(np.abs(diagonal), 1.0))
        scales.append(shrink * np.exp(rng.uniform(-jitter, jitter,
                                                  block.size)))
    return scales


def _least_slack(problem, cfg):
    """
    Smallest uniform slack t >= 0 making every block and row hold. A
    strictly positive value certifies infeasibility; None when even this
    always-feasible program fails.
    """
    x = cp.Variable(problem.n_vars)
    t = cp.Variable(nonneg=True)
    expressions, _ = _psd_expressions(problem, x,
                                      [None] * len(problem.blocks))
    constraints = [expr + t * np.eye(block.size) >> 0
                   for expr, block in zip(expressions, problem.blocks)]
    eq_rows, (a_eq, b_eq), ineq_rows, (g_in, h_in) = _split_rows(problem)
    if eq_rows:
        constraints += [a_eq @ x - b_eq <= t, b_eq - a_eq @ x <= t]
    if ineq_rows:
        constraints.append(g_in @ x - h_in <= t)
    program = cp.Problem(cp.Minimize(t), constraints)
    try:
        program.solve(solver=cfg.solver, **cfg.solver_options())
    except (cp.error.SolverError, ArithmeticError, ValueError):
        return None
    if classify_status(program) is not Status.OPTIMAL:
        return None
    return float(t.value)


def solve(problem, cfg=None):
    """
    Solves a conic problem. Numerical trouble triggers one retry with the
    PSD blocks congruence-scaled by a positive diagonal taken from the failed
    attempt's primal point and jittered. When the retry fails as well, a
    slack program decides whether the problem is infeasible.

    :param problem: The problem.
    :type problem: ConicProblem
    :param cfg: Solver settings, read from the environment by default.
    :type cfg: SolverConfig, optional
    :return: The solution; never raises for solver failures.
    :rtype: Solution
    """
    cfg = cfg or SolverConfig.from_env()
    log.debug("Solving %s vars, %s blocks, %s rows with %s",
              problem.n_vars, len(problem.blocks), len(problem.constraints),
              cfg.solver)

    scales = [None] * len(problem.blocks)
    solution, estimate = _solve_once(problem, cfg, scales)
    solution.diagnostics["attempts"] = 1
    if solution.status is Status.NUMERICAL_TROUBLE and cfg.retry:
        log.warning(
            "%sNumerical trouble%s (%s); retrying with rescaled blocks",
            Fore.YELLOW, Style.RESET_ALL,
            solution.diagnostics.get("raw_status",
                                     solution.diagnostics.get("error")))
        rng = np.random.default_rng(cfg.seed)
        scales = _block_scales(problem, estimate, rng, cfg.jitter)
        solution, _ = _solve_once(problem, cfg, scales)
        solution.diagnostics["attempts"] = 2
        solution.diagnostics["jittered"] = True
    if solution.status is Status.NUMERICAL_TROUBLE:
        margin = _least_slack(problem, cfg)
        solution.diagnostics["infeasibility_margin"] = margin
        if margin is not None and margin > INFEASIBILITY_MARGIN:
            log.warning("%sProblem is infeasible%s: least slack %.3g",
                        Fore.YELLOW, Style.RESET_ALL, margin)
            solution = Solution(Status.INFEASIBLE,
                                diagnostics=solution.diagnostics)
    log.debug("Solver finished with status %s", solution.status.value)
    return solution



##############################################################################
                            #   Certificates   #
##############################################################################


@dataclass(frozen=True)
class Certificate:
    """
    Affine bound constant + sum_j slopes[j] * c_j, valid at any values c_j of
    the selected right-hand sides with the same dual point.
    """
    constant: float
    slopes: dict
    rhs: dict

    def evaluate(self, overrides=None):
        overrides = overrides or {}
        return self.constant + sum(
            slope * overrides.get(tag, self.rhs[tag])
            for tag, slope in self.slopes.items())


def tradeoff_report(solution, tags=None):
    """
    Affine certificate in the selected constraint right-hand sides.

    :param solution: An optimal solution with duals.
    :type solution: Solution
    :param tags: Tags kept as free parameters; defaults to every photon,
        probability and witness row.
    :type tags: list, optional
    :return: The certificate.
    :rtype: Certificate
    """
    if not solution.optimal or solution.duals is None:
        raise UnsupportedError(
            f"no dual values available (status {solution.status.value})")
    if tags is None:
        tags = [t for t in solution.duals if t.startswith(CERTIFICATE_TAGS)]
    missing = [t for t in tags if t not in solution.duals]
    if missing:
        raise UnsupportedError(f"unknown constraint tags {missing}")
    selected = set(tags)
    constant = solution.offset + solution.psd_term + sum(
        solution.duals[t] * solution.rhs[t]
        for t in solution.duals if t not in selected)
    return Certificate(constant,
                       {t: solution.duals[t] for t in tags},
                       {t: solution.rhs[t] for t in tags})


##############################################################################
                            #   SDPA export   #
##############################################################################


def _number(value):
    return repr(float(value))


def to_sdpa(problem):
    """
    SDPA sparse format of the minimization form. Blocks come first, then one
    diagonal LP block holding the linear rows sorted by tag (equalities as two
    inequalities, the >= half first).

    :param problem: The problem.
    :type problem: ConicProblem
    :return: File contents.
    :rtype: str
    """
    sign = {Sense.MAXIMIZE: -1.0, Sense.MINIMIZE: 1.0,
            Sense.FEASIBILITY: 0.0}[problem.sense]
    cost = sign * problem.objective_vector()

    lp_rows = []
    for constraint in sorted(problem.constraints, key=lambda c: c.tag):
        # every row becomes a x - b >= 0
        if constraint.relation in ("==", ">="):
            lp_rows.append((dict(constraint.coefficients), constraint.rhs))
        if constraint.relation in ("==", "<="):
            lp_rows.append(({v: -c for v, c in constraint.coefficients},
                            -constraint.rhs))

    sizes = [block.size for block in problem.blocks]
    if lp_rows:
        sizes.append(-len(lp_rows))
    lines = [f"* {problem.sense.value} problem, {problem.n_vars} variables",
             str(problem.n_vars), str(len(sizes)),
             " ".join(str(s) for s in sizes),
             " ".join(_number(c) for c in cost)]

    entries = []
    for number, block in enumerate(problem.blocks, start=1):
        for i, j, var, coef in block.terms:
            # F(x) = sum F_k x_k - F_0, so the constant part is negated
            matrix, value = (0, -coef) if var < 0 else (var + 1, coef)
            entries.append((matrix, number, i + 1, j + 1, value))
    lp_block = len(problem.blocks) + 1
    for k, (coefficients, rhs) in enumerate(lp_rows, start=1):
        if rhs != 0.0:
            entries.append((0, lp_block, k, k, rhs))
        for var, coef in sorted(coefficients.items()):
            entries.append((var + 1, lp_block, k, k, coef))

    entries.sort(key=lambda e: e[:4])
    lines.extend(f"{m} {b} {i} {j} {_number(v)}" for m, b, i, j, v in entries)
    return "\n".join(lines) + "\n"


def write_sdpa(problem, path):
    """Writes to_sdpa(problem) to ``path``."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(to_sdpa(problem))
    log.info("Wrote SDPA file %s%s%s", Fore.CYAN, path, Style.RESET_ALL)


##############################################################################
                            #   Witness bounds   #
##############################################################################


def witness_upper_bound(rel, witness, cfg=None):
    """
    Largest witness value compatible with the relaxation.

    :param rel: The relaxation, photon constraints included.
    :type rel: MomentRelaxation
    :param witness: The witness to maximize.
    :type witness: Witness
    :param cfg: Solver settings.
    :type cfg: SolverConfig, optional
    :return: The solution; ``objective_value`` is the bound when optimal.
    :rtype: Solution
    """
    problem = lower_problem(rel, witness_objective(rel, witness),
                            Sense.MAXIMIZE)
    solution = solve(problem, cfg)
    if solution.optimal:
        log.info("Witness %s%s%s upper bound %s%.8f%s", Fore.CYAN,
                 witness.name, Style.RESET_ALL, Fore.GREEN,
                 solution.objective_value, Style.RESET_ALL)
    return solution
