"""
Purpose: Noncommutative monomial algebra over the operator alphabet
{1, r_x, M_b|y, s_n, Z_b,i}. Words are reduced with the projector relations
of the measurements and photon-number projectors, the scalar Z symbols are
moved to the front, and trace classes identify words equal under cyclic
rotation and reversal.

Text form of a word: symbols joined by ``*`` (``r1*M1|1*s0``, ``Z1,2``);
``1`` is the empty word and ``0`` the Zero monomial.
"""
# Import essential libraries
import itertools
import logging
import re
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

from custom_exceptions import (ConfigurationError, InvalidSymbolError,
                               WordTooLongError)

log = logging.getLogger(__name__)


##############################################################################
                            #   Symbols   #
##############################################################################


class Kind(IntEnum):
    """Symbol families, in their canonical sort order."""
    AUX = 0
    STATE = 1
    MEASUREMENT = 2
    NUMBER = 3
    IDENTITY = 4


PROJECTOR_KINDS = (Kind.MEASUREMENT, Kind.NUMBER)


@dataclass(frozen=True)
class OperatorSymbol:
    """
    One letter of a word. ``first``/``second`` hold (x, -), (b, y), (n, -)
    or (b, i) depending on the kind. Every symbol is Hermitian.
    """
    kind: Kind
    first: int = 0
    second: int = 0

    @property
    def sort_key(self):
        # Aux sorted by (i, b), measurements by (y, b)
        if self.kind in (Kind.AUX, Kind.MEASUREMENT):
            return (int(self.kind), self.second, self.first)
        return (int(self.kind), self.first, self.second)

    def __str__(self):
        if self.kind is Kind.STATE:
            return f"r{self.first}"
        if self.kind is Kind.MEASUREMENT:
            return f"M{self.first}|{self.second}"
        if self.kind is Kind.NUMBER:
            return f"s{self.first}"
        if self.kind is Kind.AUX:
            return f"Z{self.first},{self.second}"
        return "1"


IDENTITY = OperatorSymbol(Kind.IDENTITY)


def state(x):
    """Preparation operator rho_x (1-based x)."""
    return OperatorSymbol(Kind.STATE, x)


def measurement(b, y):
    """POVM element M_b|y (1-based b and y)."""
    return OperatorSymbol(Kind.MEASUREMENT, b, y)


def number(n):
    """Photon-number projector sigma_n (0-based n)."""
    return OperatorSymbol(Kind.NUMBER, n)


def aux(b, i):
    """Scalar quadrature variable Z_b,i (1-based b and i)."""
    return OperatorSymbol(Kind.AUX, b, i)


_SYMBOL_PATTERNS = (
    (re.compile(r"r(\d+)"), lambda m: state(int(m[1]))),
    (re.compile(r"M(\d+)\|(\d+)"),
     lambda m: measurement(int(m[1]), int(m[2]))),
    (re.compile(r"s(\d+)"), lambda m: number(int(m[1]))),
    (re.compile(r"Z(\d+),(\d+)"), lambda m: aux(int(m[1]), int(m[2]))),
    (re.compile(r"1"), lambda m: IDENTITY),
)


def parse_symbol(text):
    """
    Parses a single symbol in text form.

    :param text: e.g. ``r1``, ``M2|1``, ``s0``, ``Z1,3`` or ``1``.
    :type text: str
    :return: The parsed symbol.
    :rtype: OperatorSymbol
    """
    token = text.strip()
    for pattern, build in _SYMBOL_PATTERNS:
        match = pattern.fullmatch(token)
        if match:
            return build(match)
    raise InvalidSymbolError(token, "unrecognised symbol text")


##############################################################################
                            #   Monomials   #
##############################################################################


@dataclass(frozen=True)
class Monomial:
    """A word of symbols, or the distinguished Zero value."""
    word: tuple = ()
    is_zero: bool = False

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return ZERO
        return Monomial(self.word + other.word)

    def __len__(self):
        return len(self.word)

    def __str__(self):
        if self.is_zero:
            return "0"
        if not self.word:
            return "1"
        return "*".join(str(symbol) for symbol in self.word)

    @property
    def sort_key(self):
        """Ordering used everywhere: length first, then lexicographic."""
        return (len(self.word), tuple(s.sort_key for s in self.word))

    @property
    def is_one(self):
        return not self.is_zero and not self.word

    @property
    def aux_part(self):
        return tuple(s for s in self.word if s.kind is Kind.AUX)

    @property
    def core_part(self):
        return tuple(s for s in self.word if s.kind is not Kind.AUX)

    @classmethod
    def parse(cls, text):
        """
        Parses the ``*``-joined text form. The result is NOT canonicalized.

        :param text: Text such as ``r1*M1|1*s0``, ``1`` or ``0``.
        :type text: str
        :return: The parsed word.
        :rtype: Monomial
        """
        text = text.strip()
        if text == "0":
            return ZERO
        if text in ("", "1"):
            return ONE
        return cls(tuple(parse_symbol(token) for token in text.split("*")))

    @classmethod
    def of(cls, *symbols):
        return cls(tuple(symbols))


ZERO = Monomial((), True)
ONE = Monomial(())


def parse_monomial(text):
    """Text form -> Monomial (not canonicalized)."""
    return Monomial.parse(text)


def format_monomial(word):
    """Monomial -> text form."""
    return str(word)


##############################################################################
                            #   Alphabet   #
##############################################################################


@dataclass(frozen=True)
class Alphabet:
    """
    Declared index ranges used to validate symbols.

    :param n_x: Number of preparations, x in 1..n_x.
    :param outcomes: Outcome count per setting, y in 1..len(outcomes).
    :param n_trunc: Photon truncation, n in 0..n_trunc.
    :param n_nodes: Quadrature nodes available to Z symbols, i in 1..n_nodes.
    :param max_word_length: Longest word accepted by canonicalize.
    """
    n_x: int
    outcomes: tuple
    n_trunc: int
    n_nodes: int = 0
    max_word_length: int = 8

    def validate(self, symbol):
        """
        Raises InvalidSymbolError when the symbol is outside the ranges.

        :param symbol: The symbol to check.
        :type symbol: OperatorSymbol
        """
        kind = symbol.kind
        if kind is Kind.IDENTITY:
            return
        if kind is Kind.STATE:
            ok = 1 <= symbol.first <= self.n_x
        elif kind is Kind.MEASUREMENT:
            y = symbol.second
            ok = (1 <= y <= len(self.outcomes)
                  and 1 <= symbol.first <= self.outcomes[y - 1])
        elif kind is Kind.NUMBER:
            ok = 0 <= symbol.first <= self.n_trunc
        else:
            ok = (1 <= symbol.second <= self.n_nodes
                  and 1 <= symbol.first <= max(self.outcomes))
        if not ok:
            raise InvalidSymbolError(str(symbol))

    def letters(self):
        """Every non-Aux letter, in canonical order."""
        symbols = [state(x) for x in range(1, self.n_x + 1)]
        for y, n_b in enumerate(self.outcomes, start=1):
            symbols.extend(measurement(b, y) for b in range(1, n_b + 1))
        symbols.extend(number(n) for n in range(self.n_trunc + 1))
        return symbols

    def aux_letters(self, nodes=None, n_b=None):
        """
        Aux letters Z_b,i for the given nodes (all declared nodes by default),
        sorted by (i, b).
        """
        nodes = range(1, self.n_nodes + 1) if nodes is None else nodes
        n_b = max(self.outcomes) if n_b is None else n_b
        return [aux(b, i) for i in sorted(nodes) for b in range(1, n_b + 1)]


##############################################################################
                            #   Rewriting   #
##############################################################################


_MERGE = "merge"
_ANNIHILATE = "annihilate"


def _relation(left, right):
    """
    Relation between two adjacent symbols: None when they are free,
    _MERGE for equal projectors, _ANNIHILATE for orthogonal ones.
    """
    if left.kind is not right.kind or left.kind not in PROJECTOR_KINDS:
        return None
    if left.kind is Kind.MEASUREMENT and left.second != right.second:
        return None
    return _MERGE if left == right else _ANNIHILATE


def _reduce_core(symbols):
    """Stack reduction of a word free of Aux symbols; None means Zero."""
    out = []
    for symbol in symbols:
        if symbol.kind is Kind.IDENTITY:
            continue
        if out:
            relation = _relation(out[-1], symbol)
            if relation is _ANNIHILATE:
                return None
            if relation is _MERGE:
                continue
        out.append(symbol)
    return out


def canonicalize(word, alphabet=None, from_right=False):
    """
    Reduces a word to its canonical form.

    Identity letters are dropped, Aux letters move to the front sorted by
    (i, b), repeated projectors merge and orthogonal projectors give Zero.
    States are never reduced (mixed states are allowed).

    :param word: The word to reduce.
    :type word: Monomial
    :param alphabet: When given, every symbol and the word length are checked.
    :type alphabet: Alphabet, optional
    :param from_right: Apply the rewrite rules right to left instead.
    :type from_right: bool, optional
    :return: The canonical word or ZERO.
    :rtype: Monomial
    """
    if word.is_zero:
        return ZERO
    if alphabet is not None:
        for symbol in word.word:
            alphabet.validate(symbol)
        length = sum(1 for s in word.word if s.kind is not Kind.IDENTITY)
        if length > alphabet.max_word_length:
            raise WordTooLongError(length, alphabet.max_word_length)
    return _canonical(word.word, from_right)


@lru_cache(maxsize=None)
def _canonical(symbols, from_right=False):
    prefix = tuple(sorted((s for s in symbols if s.kind is Kind.AUX),
                          key=lambda s: s.sort_key))
    rest = [s for s in symbols if s.kind is not Kind.AUX]
    if from_right:
        core = _reduce_core(reversed(rest))
        core = None if core is None else core[::-1]
    else:
        core = _reduce_core(rest)
    if core is None:
        return ZERO
    return Monomial(prefix + tuple(core))


def adjoint(word):
    """
    The adjoint of a word: its canonicalized reversal.

    :param word: A canonical word.
    :type word: Monomial
    :return: The adjoint word.
    :rtype: Monomial
    """
    if word.is_zero:
        return ZERO
    return _canonical(word.word[::-1])


@dataclass(frozen=True)
class TraceClass:
    """Words sharing one moment variable; held by a minimal representative."""
    representative: Monomial

    @property
    def is_zero(self):
        return self.representative.is_zero

    def __str__(self):
        return f"Tr[{self.representative}]"


ZERO_CLASS = TraceClass(ZERO)


def trace_class(word):
    """
    Minimal representative over all cyclic rotations of the word and of its
    reversal. Projectors meeting across the cyclic boundary are reduced
    first, so every rotation compared is itself canonical.

    :param word: The word.
    :type word: Monomial
    :return: The trace class.
    :rtype: TraceClass
    """
    if word.is_zero:
        return ZERO_CLASS
    return _trace_class(_canonical(word.word))


@lru_cache(maxsize=None)
def _trace_class(word):
    if word.is_zero:
        return ZERO_CLASS
    prefix = word.aux_part
    core = list(word.core_part)
    while len(core) >= 2:
        relation = _relation(core[-1], core[0])
        if relation is None:
            break
        if relation is _ANNIHILATE:
            return ZERO_CLASS
        core.pop()

    best = None
    for sequence in (core, core[::-1]):
        for shift in range(max(1, len(sequence))):
            rotated = tuple(sequence[shift:] + sequence[:shift])
            key = tuple(s.sort_key for s in rotated)
            if best is None or key < best[0]:
                best = (key, rotated)
    return TraceClass(Monomial(prefix + best[1]))


##############################################################################
                            #   Patterns   #
##############################################################################


_FAMILIES = {"r": Kind.STATE, "M": Kind.MEASUREMENT,
             "s": Kind.NUMBER, "Z": Kind.AUX}


def expand_pattern(text, alphabet):
    """
    Expands an index-free family pattern such as ``r*M`` or ``s0*r`` into
    every canonical nonzero word it denotes. Fully indexed tokens are kept
    as they are; a bare family letter runs over all its indices.

    :param text: The pattern.
    :type text: str
    :param alphabet: Ranges to expand over.
    :type alphabet: Alphabet
    :return: Canonical, deduplicated words in canonical order.
    :rtype: list
    """
    options = []
    non_aux = alphabet.letters()
    for token in text.strip().split("*"):
        token = token.strip()
        if token in _FAMILIES:
            kind = _FAMILIES[token]
            pool = (alphabet.aux_letters() if kind is Kind.AUX
                    else [s for s in non_aux if s.kind is kind])
            if not pool:
                raise ConfigurationError(
                    f"pattern {text!r} uses family {token!r} which is empty"
                )
            options.append(pool)
        else:
            symbol = parse_symbol(token)
            alphabet.validate(symbol)
            options.append([symbol])

    words = {}
    for combo in itertools.product(*options):
        word = canonicalize(Monomial(tuple(combo)), alphabet)
        if not word.is_zero:
            words[word] = None
    return sorted(words, key=lambda w: w.sort_key)
