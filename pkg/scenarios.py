"""
Purpose: Concrete experiment definitions. Scenarios fix the cardinalities,
photon models describe what is assumed about the photon-number statistics of
the prepared states, witnesses and observed behaviors describe what was
measured. Also holds the Poisson source statistics, the BPSK homodyne
binnings and the JSON experiment document.
"""
# Import essential libraries
import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.special import erf, erfinv

from custom_exceptions import ConfigurationError, DomainError
from opalg import Alphabet

log = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-12


##############################################################################
                            #   Scenario   #
##############################################################################


@dataclass(frozen=True)
class Scenario:
    """
    Cardinalities of a prepare-and-measure experiment.

    :param n_x: Number of preparations.
    :param outcomes: Outcome count nB(y) for each setting y.
    :param n_trunc: Highest photon number with its own projector.
    """
    n_x: int
    outcomes: tuple
    n_trunc: int = 0

    def __post_init__(self):
        object.__setattr__(self, "outcomes",
                           tuple(int(n) for n in self.outcomes))
        if self.n_x < 1:
            raise ConfigurationError("need at least one preparation",
                                     "scenario.n_x")
        if not self.outcomes:
            raise ConfigurationError("need at least one setting",
                                     "scenario.outcomes")
        if any(n < 2 for n in self.outcomes):
            raise ConfigurationError("every setting needs >= 2 outcomes",
                                     "scenario.outcomes")
        if self.n_trunc < 0:
            raise ConfigurationError("must be >= 0", "scenario.n_trunc")

    @property
    def n_y(self):
        return len(self.outcomes)

    def alphabet(self, n_nodes=0, max_word_length=8):
        return Alphabet(self.n_x, self.outcomes, self.n_trunc, n_nodes,
                        max_word_length)

    def triples(self):
        """Every (b, x, y) index triple, 1-based."""
        for y, n_b in enumerate(self.outcomes, start=1):
            for x in range(1, self.n_x + 1):
                for b in range(1, n_b + 1):
                    yield b, x, y

    def to_dict(self):
        return {"n_x": self.n_x, "outcomes": list(self.outcomes),
                "n_trunc": self.n_trunc}


def discrimination_scenario(n_x, n_trunc=0):
    """One setting with as many outcomes as preparations."""
    return Scenario(n_x, (n_x,), n_trunc)


def rac_scenario(n_trunc=0):
    """Four preparations x0x1, two binary settings."""
    return Scenario(4, (2, 2), n_trunc)


def bpsk_scenario(bins, n_trunc=0):
    """Two coherent states +-alpha measured by one binned homodyne setting."""
    if bins not in (2, 4, 8):
        raise ConfigurationError(f"unsupported bin count {bins}", "bins")
    return Scenario(2, (bins,), n_trunc)


##############################################################################
                            #   Photon models   #
##############################################################################


@dataclass(frozen=True)
class PhotonRow:
    """
    One linear row on the diagonal <n|rho_x|n>: sum coef_n * diag_n REL rhs.
    """
    tag: str
    coefficients: tuple
    relation: str
    rhs: float


class PhotonModel:
    """Base class for the photon-statistics assumptions."""

    variant = ""

    def check(self, scenario):
        raise NotImplementedError

    def rows(self, x):
        raise NotImplementedError

    def mix(self, other, q):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


def _table(values, n_x, width, name):
    table = tuple(tuple(float(v) for v in row) for row in values)
    if len(table) != n_x:
        raise ConfigurationError(
            f"expected {n_x} rows (one per preparation), got {len(table)}",
            f"photon.{name}")
    for x, row in enumerate(table, start=1):
        if len(row) != width:
            raise ConfigurationError(
                f"row for x={x} has {len(row)} entries but n_trunc allows "
                f"{width} (n = 0..{width - 1})", f"photon.{name}")
        for n, value in enumerate(row):
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(
                    f"entry (x={x}, n={n}) = {value} outside [0, 1]",
                    f"photon.{name}")
    return table


def _mix_tables(a, b, q):
    return tuple(tuple(q * u + (1 - q) * v for u, v in zip(ra, rb))
                 for ra, rb in zip(a, b))


@dataclass(frozen=True)
class ComponentBounds(PhotonModel):
    """<n|rho_x|n> >= 1 - omega[x][n] for every x and n <= n_trunc."""
    omega: tuple
    variant = "bounds"

    def __post_init__(self):
        object.__setattr__(
            self, "omega", tuple(tuple(float(v) for v in row)
                                 for row in self.omega))

    @classmethod
    def uniform(cls, scenario, omega):
        """Vacuum bound omega on every preparation, other levels free."""
        row = [omega] + [1.0] * scenario.n_trunc
        return cls(tuple(tuple(row) for _ in range(scenario.n_x)))

    def with_vacuum(self, omega):
        """Copy with omega[x][0] replaced for every x."""
        return ComponentBounds(tuple((omega,) + row[1:] for row in self.omega))

    def check(self, scenario):
        _table(self.omega, scenario.n_x, scenario.n_trunc + 1, "omega")
        for x, row in enumerate(self.omega, start=1):
            if sum(1.0 - w for w in row) > 1.0 + 1e-12:
                log.debug("Photon bounds for x=%s force more than unit "
                          "diagonal mass", x)

    def rows(self, x):
        return [PhotonRow(f"photon[x={x},n={n}]", ((n, 1.0),), ">=", 1.0 - w)
                for n, w in enumerate(self.omega[x - 1])]

    def mix(self, other, q):
        return ComponentBounds(_mix_tables(self.omega, other.omega, q))

    def to_dict(self):
        return {"variant": self.variant,
                "omega": [list(row) for row in self.omega]}


@dataclass(frozen=True)
class ComponentPins(PhotonModel):
    """<n|rho_x|n> == weights[x][n]; the mass above n_trunc stays free."""
    weights: tuple
    variant = "pins"

    def __post_init__(self):
        object.__setattr__(
            self, "weights", tuple(tuple(float(v) for v in row)
                                   for row in self.weights))

    def check(self, scenario):
        _table(self.weights, scenario.n_x, scenario.n_trunc + 1, "weights")
        for x, row in enumerate(self.weights, start=1):
            if sum(row) > 1.0 + NORMALIZATION_TOL:
                raise ConfigurationError(
                    f"pinned weights for x={x} sum to {sum(row)} > 1",
                    "photon.weights")

    def rows(self, x):
        return [PhotonRow(f"photon[x={x},n={n}]", ((n, 1.0),), "==", w)
                for n, w in enumerate(self.weights[x - 1])]

    def mix(self, other, q):
        return ComponentPins(_mix_tables(self.weights, other.weights, q))

    def to_dict(self):
        return {"variant": self.variant,
                "weights": [list(row) for row in self.weights]}


@dataclass(frozen=True)
class TruncatedMean(PhotonModel):
    """
    sum_n n <n|rho_x|n> <= mean[x] and sum_n <n|rho_x|n> >= 1 - leakage[x],
    both sums running over n <= n_trunc.
    """
    mean: tuple
    leakage: tuple
    n_trunc: int = 0
    variant = "truncated_mean"

    def __post_init__(self):
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "leakage",
                           tuple(float(v) for v in self.leakage))

    def check(self, scenario):
        if self.n_trunc != scenario.n_trunc:
            raise ConfigurationError(
                f"model truncated at {self.n_trunc}, scenario at "
                f"{scenario.n_trunc}", "photon.n_trunc")
        for name, values in (("mean", self.mean), ("leakage", self.leakage)):
            if len(values) != scenario.n_x:
                raise ConfigurationError(
                    f"expected {scenario.n_x} entries, got {len(values)}",
                    f"photon.{name}")
        for x, (mean, leak) in enumerate(zip(self.mean, self.leakage), 1):
            if not 0.0 <= mean <= scenario.n_trunc:
                raise ConfigurationError(
                    f"mean photon number {mean} for x={x} outside "
                    f"[0, n_trunc={scenario.n_trunc}]", "photon.mean")
            if not 0.0 <= leak <= 1.0:
                raise ConfigurationError(
                    f"leakage {leak} for x={x} outside [0, 1]",
                    "photon.leakage")

    def rows(self, x):
        levels = range(self.n_trunc + 1)
        return [
            PhotonRow(f"photon_mean[x={x}]",
                      tuple((n, float(n)) for n in levels),
                      "<=", self.mean[x - 1]),
            PhotonRow(f"photon_leak[x={x}]",
                      tuple((n, 1.0) for n in levels),
                      ">=", 1.0 - self.leakage[x - 1]),
        ]

    def mix(self, other, q):
        return TruncatedMean(
            tuple(q * a + (1 - q) * b for a, b in zip(self.mean, other.mean)),
            tuple(q * a + (1 - q) * b
                  for a, b in zip(self.leakage, other.leakage)),
            self.n_trunc,
        )

    def to_dict(self):
        return {"variant": self.variant, "mean": list(self.mean),
                "leakage": list(self.leakage)}


def photon_from_dict(data, scenario):
    """
    Builds and checks a photon model from its document form.

    :param data: The ``photon`` section of an experiment document.
    :type data: dict
    :param scenario: The scenario the model must fit.
    :type scenario: Scenario
    :return: The photon model.
    :rtype: PhotonModel
    """
    if not isinstance(data, dict):
        raise ConfigurationError("must be an object", "photon")
    variant = data.get("variant")
    try:
        if variant == "bounds":
            if "omega" in data and not isinstance(data["omega"], list):
                model = ComponentBounds.uniform(scenario, float(data["omega"]))
            else:
                model = ComponentBounds(data["omega"])
        elif variant == "pins":
            model = ComponentPins(data["weights"])
        elif variant == "truncated_mean":
            model = TruncatedMean(data["mean"], data["leakage"],
                                  scenario.n_trunc)
        elif variant == "poisson":
            model = poisson_photon_model(
                data["alpha2"], scenario.n_x, scenario.n_trunc,
                data.get("model", "pins"), data.get("leakage", "poisson"))
        else:
            raise ConfigurationError(
                f"unknown variant {variant!r} (expected bounds, pins, "
                f"truncated_mean or poisson)", "photon.variant")
    except KeyError as missing:
        raise ConfigurationError(f"missing field {missing}", "photon")
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc), "photon")
    model.check(scenario)
    return model


##############################################################################
                            #   Poisson sources   #
##############################################################################


@dataclass(frozen=True)
class PoissonComponents:
    """Poisson weights P(n) for n <= n_trunc, truncated mean and leakage."""
    weights: tuple
    mean_trunc: float
    leakage: float


def poisson_components(alpha2, n_trunc):
    """
    Photon-number statistics of a coherent state with mean photon number
    ``alpha2``, truncated at ``n_trunc``.

    :param alpha2: Mean photon number |alpha|^2.
    :type alpha2: float
    :param n_trunc: Truncation level.
    :type n_trunc: int
    :return: Weights, truncated mean and leakage.
    :rtype: PoissonComponents
    """
    if alpha2 < 0:
        raise DomainError(f"mean photon number {alpha2} is negative")
    levels = np.arange(n_trunc + 1)
    weights = stats.poisson.pmf(levels, alpha2) if alpha2 > 0 else \
        (levels == 0).astype(float)
    mean_trunc = float(np.dot(levels, weights))
    leakage = max(0.0, 1.0 - float(np.sum(weights)))
    return PoissonComponents(tuple(float(w) for w in weights), mean_trunc,
                             leakage)


def poisson_photon_model(alpha2, n_x, n_trunc, model="pins",
                         leakage="poisson"):
    """
    Photon model of coherent-state preparations.

    :param alpha2: Mean photon number, one value or one per preparation.
    :type alpha2: float or list
    :param n_x: Number of preparations.
    :type n_x: int
    :param n_trunc: Truncation level.
    :type n_trunc: int
    :param model: ``pins`` (equal to P(n)), ``bounds`` (omega = 1 - P(n))
        or ``truncated_mean``.
    :type model: str
    :param leakage: For ``truncated_mean``: ``poisson`` uses the Poisson tail,
        ``zero`` assumes no mass above n_trunc.
    :type leakage: str
    :return: The photon model.
    :rtype: PhotonModel
    """
    if isinstance(alpha2, (int, float)):
        alpha2 = [float(alpha2)] * n_x
    if len(alpha2) != n_x:
        raise ConfigurationError(f"expected {n_x} mean photon numbers",
                                 "photon.alpha2")
    components = [poisson_components(a, n_trunc) for a in alpha2]

    if model == "pins":
        return ComponentPins(tuple(c.weights for c in components))
    if model == "bounds":
        return ComponentBounds(tuple(tuple(1.0 - w for w in c.weights)
                                     for c in components))
    if model == "truncated_mean":
        if leakage not in ("poisson", "zero"):
            raise ConfigurationError(f"unknown leakage {leakage!r}",
                                     "photon.leakage")
        return TruncatedMean(
            tuple(c.mean_trunc for c in components),
            tuple(c.leakage if leakage == "poisson" else 0.0
                  for c in components),
            n_trunc,
        )
    raise ConfigurationError(f"unknown Poisson model {model!r}",
                             "photon.model")


##############################################################################
                            #   Witnesses   #
##############################################################################


@dataclass(frozen=True)
class Witness:
    """
    Linear functional sum c_bxy p(b|x,y).

    :param name: Label used in records.
    :param coefficients: Map (b, x, y) -> c, 1-based indices.
    :param shape: (n_x, outcomes) the witness is defined for, if fixed.
    """
    name: str
    coefficients: dict = field(default_factory=dict)
    shape: tuple = None

    def __post_init__(self):
        if not self.coefficients:
            raise ConfigurationError("witness has no coefficients", "witness")
        if not any(c != 0 for c in self.coefficients.values()):
            raise ConfigurationError("witness coefficients are all zero",
                                     "witness")
        if not all(math.isfinite(c) for c in self.coefficients.values()):
            raise ConfigurationError("witness coefficients must be finite",
                                     "witness")

    def check(self, scenario):
        if self.shape is not None and \
                self.shape != (scenario.n_x, scenario.outcomes):
            raise ConfigurationError(
                f"witness {self.name!r} needs n_x={self.shape[0]} and "
                f"outcomes={list(self.shape[1])}, scenario has "
                f"n_x={scenario.n_x} and outcomes={list(scenario.outcomes)}",
                "witness")
        valid = set(scenario.triples())
        for triple in self.coefficients:
            if triple not in valid:
                raise ConfigurationError(
                    f"coefficient index (b, x, y) = {triple} is outside the "
                    f"scenario", "witness.coefficients")

    def value(self, behavior):
        return sum(c * behavior.p(*triple)
                   for triple, c in self.coefficients.items())

    def to_dict(self):
        return {"name": self.name,
                "coefficients": [[b, x, y, c] for (b, x, y), c
                                 in sorted(self.coefficients.items())]}


def discrimination_witness(n_x):
    """
    Average success probability of guessing x, (1/n_x) sum_x p(x|x,1).

    :param n_x: Number of states to discriminate.
    :type n_x: int
    :return: The witness.
    :rtype: Witness
    """
    if n_x < 2:
        raise ConfigurationError("state discrimination needs n_x >= 2",
                                 "witness")
    return Witness(f"{n_x}disc", {(x, x, 1): 1.0 / n_x
                                  for x in range(1, n_x + 1)},
                   (n_x, (n_x,)))


def rac_bits(x):
    """Bits (x0, x1) of preparation label x in 1..4 (00, 01, 10, 11)."""
    return (x - 1) // 2, (x - 1) % 2


def rac_witness():
    """
    2->1 random access code: guess bit x_y of x = x0x1. Outcome b=1 means
    bit 0, b=2 means bit 1; setting y=1 asks for x0, y=2 for x1.

    :return: The witness, 8 coefficients of 1/8.
    :rtype: Witness
    """
    coefficients = {}
    for x in range(1, 5):
        bits = rac_bits(x)
        for y in (1, 2):
            coefficients[(bits[y - 1] + 1, x, y)] = 1.0 / 8
    return Witness("rac", coefficients, (4, (2, 2)))


def witness_from_dict(data, scenario):
    """Builds and checks a witness from its document form."""
    if not isinstance(data, dict):
        raise ConfigurationError("must be an object", "witness")
    kind = data.get("kind", "custom")
    if kind == "discrimination":
        witness = discrimination_witness(scenario.n_x)
    elif kind == "rac":
        witness = rac_witness()
    elif kind == "custom":
        try:
            coefficients = {(int(b), int(x), int(y)): float(c)
                            for b, x, y, c in data["coefficients"]}
        except KeyError:
            raise ConfigurationError("missing field 'coefficients'",
                                     "witness")
        except (TypeError, ValueError):
            raise ConfigurationError("entries must be [b, x, y, c]",
                                     "witness.coefficients")
        witness = Witness(data.get("name", "custom"), coefficients)
    else:
        raise ConfigurationError(f"unknown witness kind {kind!r}",
                                 "witness.kind")
    witness.check(scenario)
    return witness


def discrimination_optimum(n_x, omega):
    """
    Largest quantum value of the n_x-state discrimination witness when every
    state keeps vacuum weight >= 1 - omega.
    """
    root = math.sqrt(omega * (1.0 - omega))
    if n_x == 2:
        return 0.5 + root
    if n_x == 3:
        return (1.0 + omega) / 3.0 + 2.0 * math.sqrt(2.0) / 3.0 * root
    if n_x == 4:
        return (1.0 + 2.0 * omega) / 4.0 + math.sqrt(3.0) / 2.0 * root
    raise ConfigurationError(f"no closed form for n_x={n_x}", "witness")


def rac_approximation(omega):
    """Approximate quantum RAC value 1/2 + sqrt(omega/2), valid at small omega."""
    return 0.5 + math.sqrt(omega / 2.0)


##############################################################################
                            #   Behaviors   #
##############################################################################


@dataclass(frozen=True)
class ObservedBehavior:
    """
    Probability table p(b|x,y) with 1-based indices.

    :param n_x: Number of preparations.
    :param outcomes: Outcome count per setting.
    :param table: Map (b, x, y) -> p.
    """
    n_x: int
    outcomes: tuple
    table: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "outcomes",
                           tuple(int(n) for n in self.outcomes))

    def p(self, b, x, y):
        return self.table.get((b, x, y), 0.0)

    def distribution(self, x, y):
        return np.array([self.p(b, x, y)
                         for b in range(1, self.outcomes[y - 1] + 1)])

    def entropy(self, x, y):
        """Shannon entropy of p(.|x,y) in bits."""
        return float(stats.entropy(self.distribution(x, y), base=2))

    def check(self, scenario, tol=NORMALIZATION_TOL):
        if (self.n_x, tuple(self.outcomes)) != (scenario.n_x,
                                                scenario.outcomes):
            raise ConfigurationError(
                "behavior cardinalities do not match the scenario",
                "behavior")
        for y, n_b in enumerate(self.outcomes, start=1):
            for x in range(1, self.n_x + 1):
                dist = self.distribution(x, y)
                if np.any(dist < -tol):
                    raise ConfigurationError(
                        f"negative probability for x={x}, y={y}", "behavior")
                if abs(dist.sum() - 1.0) > tol:
                    raise ConfigurationError(
                        f"p(.|x={x},y={y}) sums to {dist.sum():.15g}",
                        "behavior")

    def mix(self, other, q):
        keys = set(self.table) | set(other.table)
        return ObservedBehavior(self.n_x, self.outcomes, {
            k: q * self.table.get(k, 0.0) + (1 - q) * other.table.get(k, 0.0)
            for k in keys})

    def to_csv(self):
        """CSV text with header ``b,x,y,p``, rows in (y, x, b) order."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["b", "x", "y", "p"])
        for y, n_b in enumerate(self.outcomes, start=1):
            for x in range(1, self.n_x + 1):
                for b in range(1, n_b + 1):
                    writer.writerow([b, x, y, repr(self.p(b, x, y))])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text, scenario):
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != ["b", "x", "y", "p"]:
            raise ConfigurationError("CSV header must be b,x,y,p",
                                     "behavior")
        table = {(int(r["b"]), int(r["x"]), int(r["y"])): float(r["p"])
                 for r in reader}
        return cls(scenario.n_x, scenario.outcomes, table)

    @classmethod
    def from_rows(cls, rows, scenario):
        """From [[b, x, y, p], ...] as found in experiment documents."""
        try:
            table = {(int(b), int(x), int(y)): float(p)
                     for b, x, y, p in rows}
        except (TypeError, ValueError):
            raise ConfigurationError("entries must be [b, x, y, p]",
                                     "behavior")
        return cls(scenario.n_x, scenario.outcomes, table)

    def to_rows(self):
        return [[b, x, y, p] for (b, x, y), p in sorted(self.table.items())]


##############################################################################
                            #   BPSK homodyne   #
##############################################################################


@dataclass(frozen=True)
class BpskConfig:
    """
    Coherent states +-alpha measured by homodyne detection of the X
    quadrature, binned into ``bins`` outcomes.

    :param alpha: Amplitude, alpha^2 is the mean photon number.
    :param bins: 2, 4 or 8.
    :param thresholds: Optional bin edges overriding the defaults.
    """
    alpha: float
    bins: int = 2
    thresholds: tuple = None

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ConfigurationError(f"amplitude {self.alpha} must be >= 0",
                                     "alpha")
        if self.bins not in (2, 4, 8):
            raise ConfigurationError(f"unsupported bin count {self.bins}",
                                     "bins")
        if self.thresholds is not None:
            edges = tuple(float(t) for t in self.thresholds)
            if len(edges) != self.bins - 1 or \
                    any(b <= a for a, b in zip(edges, edges[1:])):
                raise ConfigurationError(
                    f"need {self.bins - 1} strictly increasing thresholds",
                    "thresholds")
            object.__setattr__(self, "thresholds", edges)

    @classmethod
    def from_mean_photon(cls, alpha2, bins=2):
        return cls(math.sqrt(alpha2), bins)

    def edges(self):
        """Bin thresholds in quadrature units."""
        if self.thresholds is not None:
            return self.thresholds
        if self.bins == 2:
            return (0.0,)
        x1 = bpsk_threshold(self.alpha)
        if self.bins == 4:
            return (-x1, 0.0, x1)
        return tuple(k * x1 for k in range(-3, 4))


def bpsk_threshold(alpha):
    """
    Outer threshold x1 of the four-bin homodyne partition, chosen so that
    the state -alpha is equally likely to land in the two lowest bins.

    :param alpha: Amplitude, >= 0.
    :type alpha: float
    :return: x1 > 0.
    :rtype: float
    """
    if alpha < 0:
        raise DomainError(f"amplitude {alpha} is negative")
    shift = math.sqrt(2.0) * alpha
    argument = 0.5 * (float(erf(shift)) - 1.0)
    if not -1.0 < argument < 1.0:
        raise DomainError(f"inverse-erf argument {argument} outside (-1, 1)")
    return shift - float(erfinv(argument))


def _bin_probabilities(edges, mean):
    """
    Probabilities of the intervals (-inf, e1), (e1, e2), ..., (e_k, inf) for
    a Gaussian quadrature distribution with the given mean and variance 1/2.
    """
    cdf = np.concatenate(([-1.0], erf(np.asarray(edges) - mean), [1.0]))
    return 0.5 * np.diff(cdf)


def bpsk_behavior(cfg):
    """
    Homodyne statistics of the BPSK states, x=1 is +alpha and x=2 is -alpha.
    The binary table labels b=1 as the positive half line; wider binnings
    count bins from the most negative quadrature value.

    :param cfg: Amplitude and binning.
    :type cfg: BpskConfig
    :return: The behavior, normalized per preparation.
    :rtype: ObservedBehavior
    """
    shift = math.sqrt(2.0) * cfg.alpha
    if cfg.bins == 2 and cfg.thresholds is None:
        plus = 0.5 * (float(erf(shift)) + 1.0)
        rows = {1: np.array([plus, 1.0 - plus]),
                2: np.array([1.0 - plus, plus])}
    else:
        edges = cfg.edges()
        rows = {1: _bin_probabilities(edges, shift),
                2: _bin_probabilities(edges, -shift)}

    table = {}
    for x, dist in rows.items():
        for b, p in enumerate(dist, start=1):
            table[(b, x, 1)] = float(p)
    return ObservedBehavior(2, (cfg.bins,), table)


##############################################################################
                            #   Experiment documents   #
##############################################################################


DOCUMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "photonsdp experiment",
    "type": "object",
    "required": ["scenario", "photon"],
    "properties": {
        "name": {"type": "string"},
        "scenario": {
            "type": "object",
            "required": ["n_x", "outcomes"],
            "properties": {
                "n_x": {"type": "integer", "minimum": 1},
                "outcomes": {"type": "array",
                             "items": {"type": "integer", "minimum": 2}},
                "n_trunc": {"type": "integer", "minimum": 0},
            },
        },
        "photon": {
            "type": "object",
            "required": ["variant"],
            "properties": {
                "variant": {"enum": ["bounds", "pins", "truncated_mean",
                                     "poisson"]},
                "omega": {"type": ["number", "array"]},
                "weights": {"type": "array"},
                "mean": {"type": ["array", "number"]},
                "leakage": {"type": ["array", "string", "number"]},
                "alpha2": {"type": ["number", "array"]},
                "model": {"enum": ["pins", "bounds", "truncated_mean"]},
            },
        },
        "witness": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["discrimination", "rac", "custom"]},
                "name": {"type": "string"},
                "coefficients": {"type": "array",
                                 "items": {"type": "array", "minItems": 4,
                                           "maxItems": 4}},
            },
        },
        "witness_value": {"type": ["number", "string"]},
        "behavior": {"type": "array",
                     "items": {"type": "array", "minItems": 4,
                               "maxItems": 4}},
        "target": {"type": "object",
                   "properties": {"x": {"type": "integer"},
                                  "y": {"type": "integer"}}},
        "relaxation": {
            "type": "object",
            "properties": {
                "level": {"type": "integer", "minimum": 1},
                "extras": {"type": "array", "items": {"type": "string"}},
                "localizing_level": {"type": "integer", "minimum": 0},
                "localizing": {"type": "array", "items": {"type": "string"}},
                "block_mode": {"enum": ["per-node", "joint"]},
            },
        },
        "quadrature": {"type": "object",
                       "properties": {"m": {"type": "integer",
                                            "minimum": 2}}},
        "seesaw": {"type": "object",
                   "properties": {"dimension": {"type": ["integer", "null"]},
                                  "restarts": {"type": "integer"},
                                  "max_iters": {"type": "integer"},
                                  "tolerance": {"type": "number"}}},
    },
}


_JSON_TYPES = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, (list, tuple)),
    "string": lambda v: isinstance(v, str),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: (isinstance(v, (int, float)) and
                         not isinstance(v, bool)),
    "null": lambda v: v is None,
}


def schema_check(value, schema, path=None):
    """
    Validates ``value`` against the subset of JSON Schema DOCUMENT_SCHEMA
    uses: type, required, properties, enum, items, minimum, minItems and
    maxItems. Unknown keys pass.

    :param value: Parsed JSON value.
    :param schema: Schema node.
    :type schema: dict
    :param path: Dotted path of ``value``, None at the root.
    :type path: str, optional
    :raises ConfigurationError: On the first violation, naming its path.
    """
    expected = schema.get("type")
    if expected is not None:
        kinds = expected if isinstance(expected, list) else [expected]
        if not any(_JSON_TYPES[kind](value) for kind in kinds):
            raise ConfigurationError(
                f"expected {' or '.join(kinds)}, got {type(value).__name__}",
                path)
    if "enum" in schema and value not in schema["enum"]:
        raise ConfigurationError(
            f"{value!r} is not one of {', '.join(map(str, schema['enum']))}",
            path)

    if isinstance(value, dict):
        for key in schema.get("required", ()):
            if key not in value:
                raise ConfigurationError(
                    "missing field", f"{path}.{key}" if path else key)
        for key, child in schema.get("properties", {}).items():
            if key in value:
                schema_check(value[key], child,
                             f"{path}.{key}" if path else key)
    elif isinstance(value, (list, tuple)):
        if len(value) < schema.get("minItems", 0):
            raise ConfigurationError(
                f"needs at least {schema['minItems']} entries", path)
        if "maxItems" in schema and len(value) > schema["maxItems"]:
            raise ConfigurationError(
                f"allows at most {schema['maxItems']} entries", path)
        if "items" in schema:
            for i, item in enumerate(value):
                schema_check(item, schema["items"], f"{path}[{i}]")
    elif _JSON_TYPES["number"](value) and "minimum" in schema and \
            value < schema["minimum"]:
        raise ConfigurationError(f"{value} is below {schema['minimum']}", path)


@dataclass(frozen=True)
class ExperimentDocument:
    """
    A resolved experiment document. ``relaxation``, ``quadrature`` and
    ``seesaw`` stay as raw sections; the modules using them build their own
    objects from them.
    """
    name: str
    scenario: Scenario
    photon: PhotonModel
    witness: Witness = None
    witness_value: object = None
    behavior: ObservedBehavior = None
    target: tuple = (1, 1)
    relaxation: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)
    seesaw: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def check_document(data):
    """
    Resolves and cross-checks a parsed experiment document.

    :param data: The parsed JSON object.
    :type data: dict
    :return: The resolved document.
    :rtype: ExperimentDocument
    """
    if not isinstance(data, dict):
        raise ConfigurationError("document must be a JSON object")
    schema_check(data, DOCUMENT_SCHEMA)
    section = data.get("scenario")
    if not isinstance(section, dict):
        raise ConfigurationError("missing or not an object", "scenario")
    try:
        scenario = Scenario(int(section["n_x"]), section["outcomes"],
                            int(section.get("n_trunc", 0)))
    except KeyError as missing:
        raise ConfigurationError(f"missing field {missing}", "scenario")
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc), "scenario")

    if "photon" not in data:
        raise ConfigurationError("missing section", "photon")
    photon = photon_from_dict(data["photon"], scenario)

    witness = None
    if "witness" in data:
        witness = witness_from_dict(data["witness"], scenario)

    witness_value = data.get("witness_value")
    if witness_value is not None and witness_value != "optimal":
        try:
            witness_value = float(witness_value)
        except (TypeError, ValueError):
            raise ConfigurationError("must be a number or 'optimal'",
                                     "witness_value")
        if not 0.0 <= witness_value <= 1.0:
            raise ConfigurationError(f"{witness_value} outside [0, 1]",
                                     "witness_value")
        if witness is None:
            raise ConfigurationError("a witness value needs a witness",
                                     "witness_value")

    behavior = None
    if "behavior" in data:
        behavior = ObservedBehavior.from_rows(data["behavior"], scenario)
        behavior.check(scenario, tol=1e-9)

    target_section = data.get("target", {})
    target = (int(target_section.get("x", 1)), int(target_section.get("y", 1)))
    if not (1 <= target[0] <= scenario.n_x and
            1 <= target[1] <= scenario.n_y):
        raise ConfigurationError(f"target inputs {target} outside scenario",
                                 "target")

    for name in ("relaxation", "quadrature", "seesaw"):
        if not isinstance(data.get(name, {}), dict):
            raise ConfigurationError("must be an object", name)

    return ExperimentDocument(
        name=str(data.get("name", "experiment")),
        scenario=scenario,
        photon=photon,
        witness=witness,
        witness_value=witness_value,
        behavior=behavior,
        target=target,
        relaxation=dict(data.get("relaxation", {})),
        quadrature=dict(data.get("quadrature", {})),
        seesaw=dict(data.get("seesaw", {})),
        raw=data,
    )


def load_document(path):
    """
    Reads and checks a JSON experiment document.

    :param path: Path of the file.
    :type path: str
    :return: The resolved document.
    :rtype: ExperimentDocument
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}")
    return check_document(data)


def document_to_dict(doc):
    """Inverse of check_document, with the photon model fully resolved."""
    data = {"name": doc.name, "scenario": doc.scenario.to_dict(),
            "photon": doc.photon.to_dict(),
            "target": {"x": doc.target[0], "y": doc.target[1]}}
    if doc.witness is not None:
        data["witness"] = dict(doc.witness.to_dict(), kind="custom")
    if doc.witness_value is not None:
        data["witness_value"] = doc.witness_value
    if doc.behavior is not None:
        data["behavior"] = doc.behavior.to_rows()
    for name in ("relaxation", "quadrature", "seesaw"):
        if getattr(doc, name):
            data[name] = getattr(doc, name)
    return data
