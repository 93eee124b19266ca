"""
Purpose: Heuristic lower bounds on witness values from explicit quantum
models in the Fock basis. States and measurements are optimized in turn,
each step being a small SDP, from several random starts run in parallel.
The best model is cleaned up and re-validated before its value is reported.
"""
# Import essential libraries
import logging
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from colorama import Fore, Style
from scipy.stats import unitary_group

from custom_exceptions import ConfigurationError, ModelError
from scenarios import ObservedBehavior
from sdpcore import SolverConfig, Status, classify_status
from threads import map_bounded

log = logging.getLogger(__name__)

PSD_TOL = 1e-9
COMPLETENESS_TOL = 1e-9
PHOTON_TOL = 1e-7


@dataclass(frozen=True)
class SeesawConfig:
    """
    :param dimension: Hilbert-space dimension, max(n_x, n_trunc + 1) if None.
    :param restarts: Number of random starts.
    :param max_iters: Alternations per start.
    :param tolerance: Stop when one alternation gains less than this.
    :param seed: Seed of the first start; start r uses seed + r.
    :param solver: Settings of the inner SDPs.
    """
    dimension: int = None
    restarts: int = 20
    max_iters: int = 200
    tolerance: float = 1e-9
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigurationError("need at least one restart",
                                     "seesaw.restarts")
        if self.dimension is not None and self.dimension < 1:
            raise ConfigurationError("must be >= 1", "seesaw.dimension")


@dataclass(frozen=True)
class ExplicitModel:
    """
    States rho_x and POVMs {M_b|y} as d x d complex matrices, the basis
    being the photon-number basis |0>, ..., |d-1>.
    """
    dimension: int
    states: tuple
    measurements: tuple

    def validate(self, scenario, photon=None):
        """
        Checks dimensions, positivity, normalization, completeness and the
        photon rows on the diagonal.

        :raises ModelError: On the first violated invariant.
        """
        _check_shapes(self, scenario)
        d = self.dimension
        for x, rho in enumerate(self.states, start=1):
            if not np.allclose(rho, rho.conj().T, atol=PSD_TOL):
                raise ModelError(f"state x={x} is not Hermitian")
            if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
                raise ModelError(f"state x={x} is not positive semidefinite")
            if abs(np.trace(rho).real - 1.0) > PSD_TOL:
                raise ModelError(f"state x={x} does not have unit trace")
            if photon is not None:
                diagonal = np.real(np.diag(rho))
                for row in _diagonal_rows(photon, x, d):
                    value = sum(c * diagonal[n] for n, c in row[1])
                    if not _holds(value, row[2], row[3], PHOTON_TOL):
                        raise ModelError(
                            f"state x={x} violates {row[0]}: {value:.10f} "
                            f"{row[2]} {row[3]:.10f}")
        for y, povm in enumerate(self.measurements, start=1):
            for b, element in enumerate(povm, start=1):
                if np.linalg.eigvalsh(element).min() < -PSD_TOL:
                    raise ModelError(
                        f"POVM element b={b}, y={y} is not positive")
            if np.abs(sum(povm) - np.eye(d)).max() > COMPLETENESS_TOL:
                raise ModelError(f"POVM for y={y} does not sum to identity")


def _check_shapes(model, scenario):
    d = model.dimension
    if len(model.states) != scenario.n_x:
        raise ModelError(f"model has {len(model.states)} states, scenario "
                         f"has {scenario.n_x} preparations")
    if len(model.measurements) != scenario.n_y:
        raise ModelError(f"model has {len(model.measurements)} settings, "
                         f"scenario has {scenario.n_y}")
    for matrix in list(model.states) + [e for povm in model.measurements
                                        for e in povm]:
        if np.shape(matrix) != (d, d):
            raise ModelError(f"matrix of shape {np.shape(matrix)} in a "
                             f"dimension-{d} model")
    for y, povm in enumerate(model.measurements, start=1):
        if len(povm) != scenario.outcomes[y - 1]:
            raise ModelError(f"POVM for y={y} has {len(povm)} elements, "
                             f"expected {scenario.outcomes[y - 1]}")


def _holds(value, relation, rhs, tol):
    if relation == ">=":
        return value >= rhs - tol
    if relation == "<=":
        return value <= rhs + tol
    return abs(value - rhs) <= tol


def _diagonal_rows(photon, x, d):
    """Photon rows restricted to the levels n < d; empty rows are dropped."""
    rows = []
    for row in photon.rows(x):
        terms = tuple((n, c) for n, c in row.coefficients if n < d)
        if terms:
            rows.append((row.tag, terms, row.relation, row.rhs))
    return rows


def evaluate_model(model, scenario):
    """
    p(b|x,y) = Tr(rho_x M_b|y).

    :param model: The model.
    :type model: ExplicitModel
    :param scenario: Cardinalities the model must match.
    :type scenario: Scenario
    :return: The behavior.
    :rtype: ObservedBehavior
    """
    _check_shapes(model, scenario)
    table = {}
    for y, povm in enumerate(model.measurements, start=1):
        for x, rho in enumerate(model.states, start=1):
            for b, element in enumerate(povm, start=1):
                table[(b, x, y)] = float(np.real(np.trace(rho @ element)))
    return ObservedBehavior(scenario.n_x, scenario.outcomes, table)


def model_to_dict(model):
    """Real and imaginary parts, row-major."""
    def encode(matrix):
        matrix = np.asarray(matrix)
        return {"real": matrix.real.tolist(), "imag": matrix.imag.tolist()}

    return {"dimension": model.dimension,
            "states": [encode(rho) for rho in model.states],
            "measurements": [[encode(e) for e in povm]
                             for povm in model.measurements]}


def model_from_dict(data):
    """Inverse of model_to_dict."""
    def decode(entry):
        return np.array(entry["real"]) + 1j * np.array(entry["imag"])

    try:
        return ExplicitModel(
            int(data["dimension"]),
            tuple(decode(rho) for rho in data["states"]),
            tuple(tuple(decode(e) for e in povm)
                  for povm in data["measurements"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model document: {exc}")


##############################################################################
                            #   Optimization steps   #
##############################################################################


def _solve(problem, cfg):
    problem.solve(solver=cfg.solver, **cfg.solver_options())
    return classify_status(problem) is Status.OPTIMAL


def _photon_constraints(rho, photon, x, d):
    constraints = []
    for _, terms, relation, rhs in _diagonal_rows(photon, x, d):
        expr = sum(c * cp.real(rho[n, n]) for n, c in terms)
        if relation == ">=":
            constraints.append(expr >= rhs)
        elif relation == "<=":
            constraints.append(expr <= rhs)
        else:
            constraints.append(expr == rhs)
    return constraints


def feasible_states(scenario, photon, d, cfg):
    """
    One state per preparation satisfying the photon rows at dimension d.

    :raises ConfigurationError: When no such state exists.
    """
    states = []
    for x in range(1, scenario.n_x + 1):
        rho = cp.Variable((d, d), hermitian=True)
        constraints = [rho >> 0, cp.real(cp.trace(rho)) == 1]
        constraints += _photon_constraints(rho, photon, x, d)
        # maximally mixed where allowed, so starts stay interior
        problem = cp.Problem(cp.Maximize(cp.lambda_min(rho)), constraints)
        if not _solve(problem, cfg):
            raise ConfigurationError(
                f"photon constraints for x={x} cannot be met in dimension "
                f"{d} (solver status {problem.status})", "photon")
        states.append(_clean_state(rho.value))
    return states


def _optimize_measurements(states, witness, scenario, current, cfg):
    d = states[0].shape[0]
    povms = []
    for y, n_b in enumerate(scenario.outcomes, start=1):
        weights = [sum(witness.coefficients.get((b, x, y), 0.0) * states[x - 1]
                       for x in range(1, scenario.n_x + 1))
                   for b in range(1, n_b + 1)]
        if not any(np.any(w) for w in weights if not np.isscalar(w)):
            povms.append(current[y - 1])
            continue
        elements = [cp.Variable((d, d), hermitian=True) for _ in range(n_b)]
        constraints = [e >> 0 for e in elements]
        constraints.append(sum(elements) == np.eye(d))
        objective = sum(cp.real(cp.trace(e @ np.asarray(w)))
                        for w, e in zip(weights, elements) if not
                        np.isscalar(w))
        problem = cp.Problem(cp.Maximize(objective), constraints)
        if not _solve(problem, cfg):
            povms.append(current[y - 1])
            continue
        povms.append(_clean_povm([e.value for e in elements]))
    return povms


def _optimize_states(measurements, witness, scenario, photon, current, cfg):
    d = current[0].shape[0]
    states = []
    for x in range(1, scenario.n_x + 1):
        operator = np.zeros((d, d), dtype=complex)
        for (b, xx, y), coef in witness.coefficients.items():
            if xx == x:
                operator += coef * measurements[y - 1][b - 1]
        if not np.any(operator):
            states.append(current[x - 1])
            continue
        rho = cp.Variable((d, d), hermitian=True)
        constraints = [rho >> 0, cp.real(cp.trace(rho)) == 1]
        constraints += _photon_constraints(rho, photon, x, d)
        problem = cp.Problem(cp.Maximize(cp.real(cp.trace(rho @ operator))),
                             constraints)
        if not _solve(problem, cfg):
            states.append(current[x - 1])
            continue
        states.append(_clean_state(rho.value))
    return states


def _clean_state(matrix):
    matrix = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    matrix = (vectors * values) @ vectors.conj().T
    return matrix / np.trace(matrix).real


def _clean_povm(elements):
    cleaned = []
    for element in elements:
        element = (element + element.conj().T) / 2
        values, vectors = np.linalg.eigh(element)
        cleaned.append((vectors * np.clip(values, 0.0, None)) @
                       vectors.conj().T)
    total = sum(cleaned)
    values, vectors = np.linalg.eigh((total + total.conj().T) / 2)
    root = (vectors / np.sqrt(np.clip(values, 1e-15, None))) @ \
        vectors.conj().T
    return [root @ e @ root for e in cleaned]


def _value(states, measurements, witness):
    return float(sum(
        coef * np.real(np.trace(states[x - 1] @ measurements[y - 1][b - 1]))
        for (b, x, y), coef in witness.coefficients.items()))


def _random_projective(rng, d, n_b):
    unitary = unitary_group.rvs(d, random_state=rng) if d > 1 else \
        np.ones((1, 1))
    elements = [np.zeros((d, d), dtype=complex) for _ in range(n_b)]
    for k in range(d):
        vector = unitary[:, k:k + 1]
        elements[k % n_b] += vector @ vector.conj().T
    return elements


def _random_start(rng, scenario, photon, d, anchors):
    """Wishart states mixed with a feasible anchor just enough to comply."""
    states = []
    for x in range(1, scenario.n_x + 1):
        gaussian = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        wishart = gaussian @ gaussian.conj().T
        wishart /= np.trace(wishart).real
        rows = _diagonal_rows(photon, x, d)
        for share in np.linspace(0.0, 1.0, 11):
            candidate = (1 - share) * wishart + share * anchors[x - 1]
            diagonal = np.real(np.diag(candidate))
            if all(_holds(sum(c * diagonal[n] for n, c in terms), rel, rhs,
                          PSD_TOL)
                   for _, terms, rel, rhs in rows):
                break
        states.append(candidate)
    measurements = [_random_projective(rng, d, n_b)
                    for n_b in scenario.outcomes]
    return states, measurements


def seesaw_restart(scenario, photon, witness, cfg, seed, anchors=None):
    """
    One alternation from a random start.

    :return: (value, model, history of values after each half step).
    :rtype: tuple
    """
    d = cfg.dimension or max(scenario.n_x, scenario.n_trunc + 1)
    if anchors is None:
        anchors = feasible_states(scenario, photon, d, cfg.solver)
    rng = np.random.default_rng(seed)
    states, measurements = _random_start(rng, scenario, photon, d, anchors)

    history = []
    best = -np.inf
    for _ in range(cfg.max_iters):
        measurements = _optimize_measurements(states, witness, scenario,
                                              measurements, cfg.solver)
        history.append(_value(states, measurements, witness))
        states = _optimize_states(measurements, witness, scenario, photon,
                                  states, cfg.solver)
        value = _value(states, measurements, witness)
        history.append(value)
        if value - best < cfg.tolerance:
            best = max(best, value)
            break
        best = value

    model = ExplicitModel(d, tuple(states),
                          tuple(tuple(povm) for povm in measurements))
    value = witness.value(evaluate_model(model, scenario))
    return value, model, history


def seesaw_witness(scenario, photon, witness, cfg=None):
    """
    Best witness value over random restarts of the seesaw.

    :param scenario: Scenario cardinalities.
    :type scenario: Scenario
    :param photon: Photon model imposed on the states' diagonals.
    :type photon: PhotonModel
    :param witness: Witness to maximize.
    :type witness: Witness
    :param cfg: Seesaw settings.
    :type cfg: SeesawConfig, optional
    :return: (value, model) of the best validated restart.
    :rtype: tuple
    """
    cfg = cfg or SeesawConfig()
    photon.check(scenario)
    witness.check(scenario)
    d = cfg.dimension or max(scenario.n_x, scenario.n_trunc + 1)
    if d < scenario.n_trunc + 1:
        log.warning("%sSeesaw dimension %s is below n_trunc + 1 = %s%s; "
                    "photon rows above n = %s are dropped", Fore.YELLOW, d,
                    scenario.n_trunc + 1, Style.RESET_ALL, d - 1)
    anchors = feasible_states(scenario, photon, d, cfg.solver)

    seeds = [cfg.seed + r for r in range(cfg.restarts)]
    runs = map_bounded(
        seesaw_restart,
        [(scenario, photon, witness, cfg, seed, anchors) for seed in seeds],
        cfg.solver.threads)

    ranked = []
    for seed, (value, model, _) in zip(seeds, runs):
        try:
            model.validate(scenario, photon)
        except ModelError as exc:
            log.debug("Restart %s discarded: %s", seed, exc)
            continue
        ranked.append((-value, seed, model))
    if not ranked:
        raise ModelError("no restart produced a valid model")
    ranked.sort(key=lambda item: (item[0], item[1]))
    value, seed, model = -ranked[0][0], ranked[0][1], ranked[0][2]
    log.info("Seesaw %s%s%s: best value %s%.8f%s (seed %s, d=%s)",
             Fore.CYAN, witness.name, Style.RESET_ALL, Fore.GREEN, value,
             Style.RESET_ALL, seed, d)
    return value, model
