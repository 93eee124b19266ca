"""
Purpose: Independent brute-force references the tests compare the SDP
machinery against: explicit qubit strategies for the guessing probability,
numerical minimization for the scalar entropy bound and numerical
integration of the homodyne bins.
"""
# Import essential libraries
import logging
import math

import numpy as np
from scipy import integrate, optimize, stats

log = logging.getLogger(__name__)


##############################################################################
                            #   Guessing probability   #
##############################################################################


def _qubit_strategy(params):
    """Real qubit states cos t|0> + sin t|1> and a projective measurement."""
    theta_1, theta_2, phi = params
    p_first = np.cos(np.array([theta_1, theta_2]) - phi) ** 2
    vacuum = np.cos(np.array([theta_1, theta_2])) ** 2
    return p_first, vacuum


def qubit_guessing_probability(omega, witness_value, starts=30, seed=0):
    """
    Best guessing probability of outcome b for x = 1 found by an eavesdropper
    mixing two real-qubit strategies, one per guess, in the two-state
    discrimination game with vacuum weights >= 1 - omega on average and the
    witness pinned on average.

    A feasible strategy, so the result is a lower bound on the true optimum.

    :param omega: Vacuum bound.
    :type omega: float
    :param witness_value: Pinned discrimination witness value.
    :type witness_value: float
    :param starts: Random starts of the local search.
    :type starts: int
    :param seed: Seed of the starts.
    :type seed: int
    :return: The best guessing probability found, or None if no start
        converged to a feasible strategy.
    :rtype: float
    """
    def blocks(v):
        q = v[0]
        first, vac_first = _qubit_strategy(v[1:4])
        second, vac_second = _qubit_strategy(v[4:7])
        return q, first, vac_first, second, vac_second

    def guess(v):
        q, first, _, second, _ = blocks(v)
        return -(q * first[0] + (1.0 - q) * (1.0 - second[0]))

    def witness(v):
        q, first, _, second, _ = blocks(v)
        w_first = 0.5 * (first[0] + 1.0 - first[1])
        w_second = 0.5 * (second[0] + 1.0 - second[1])
        return q * w_first + (1.0 - q) * w_second - witness_value

    def vacuum(v):
        q, _, vac_first, _, vac_second = blocks(v)
        return q * vac_first + (1.0 - q) * vac_second - (1.0 - omega)

    constraints = [{"type": "eq", "fun": witness},
                   {"type": "ineq", "fun": vacuum}]
    bounds = [(0.0, 1.0)] + [(-math.pi, math.pi)] * 6
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        start = np.concatenate(([rng.uniform()],
                                rng.uniform(-math.pi, math.pi, 6)))
        result = optimize.minimize(guess, start, method="SLSQP",
                                   bounds=bounds, constraints=constraints,
                                   options={"ftol": 1e-12, "maxiter": 500})
        if not result.success:
            continue
        if abs(witness(result.x)) > 1e-8 or np.min(vacuum(result.x)) < -1e-8:
            continue
        value = -result.fun
        if best is None or value > best:
            best = value
    log.debug("Qubit oracle at omega=%s, W=%s: %s", omega, witness_value,
              best)
    return best


##############################################################################
                            #   Scalar entropy   #
##############################################################################


def scalar_quadrature_oracle(distribution, nodes, weights):
    """
    Quadrature entropy bound of a fixed distribution, each inner infimum
    found numerically instead of in closed form. The endpoint node is left
    out.
    """
    total = 0.0
    for t, w in zip(nodes[:-1], weights[:-1]):
        tau = w / (t * math.log(2))
        total += tau
        for p in distribution:
            if p == 0.0:
                continue
            result = optimize.minimize_scalar(
                lambda z: p * (2 * z + (1 - t) * z * z) + t * z * z,
                bounds=(-1.0 / t - 1.0, 1.0), method="bounded",
                options={"xatol": 1e-12})
            total += tau * result.fun
    return total


def shannon_entropy(distribution):
    """Exact entropy in bits."""
    return float(stats.entropy(np.asarray(distribution, dtype=float),
                               base=2))


def monomial_integral_error(nodes, weights, degree):
    """|sum_i w_i t_i^degree - 1 / (degree + 1)|."""
    exact = 1.0 / (degree + 1)
    approx = math.fsum(w * t ** degree for t, w in zip(nodes, weights))
    return abs(approx - exact)


##############################################################################
                            #   Homodyne bins   #
##############################################################################


def _density(q, mean):
    return math.exp(-(q - mean) ** 2) / math.sqrt(math.pi)


def gaussian_bin_probabilities(edges, mean):
    """
    Probabilities of the bins cut by ``edges`` for a quadrature with the
    given mean and variance 1/2, integrated numerically.
    """
    cuts = [-math.inf] + list(edges) + [math.inf]
    probabilities = []
    for low, high in zip(cuts, cuts[1:]):
        value, _ = integrate.quad(_density, low, high, args=(mean,),
                                  epsabs=1e-14, epsrel=1e-12)
        probabilities.append(value)
    return probabilities


def threshold_balance(alpha, x1):
    """
    P(q < -x1) - P(-x1 < q < 0) for the state -alpha; zero at the outer
    four-bin threshold.
    """
    mean = -math.sqrt(2.0) * alpha
    lowest, _ = integrate.quad(_density, -math.inf, -x1, args=(mean,),
                               epsabs=1e-14, epsrel=1e-12)
    second, _ = integrate.quad(_density, -x1, 0.0, args=(mean,),
                               epsabs=1e-14, epsrel=1e-12)
    return lowest - second
