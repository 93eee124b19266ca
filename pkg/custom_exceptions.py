"""
Purpose: Import into other files to use custom exceptions and save space.
Every error the library raises derives from PhotonSdpError so that the
command line can turn them into exit codes in one place.
"""
# Import essential libraries
import colorama
from colorama import Fore, Style

colorama.init(autoreset=True)  # Initialize colorized output


class PhotonSdpError(Exception):
    """
    Base class for every error raised by the library.

    :param message: A human-readable description of the exception.
    :type message: str
    """

    def __init__(self, message="Photon SDP error."):
        self.message = message
        super().__init__(self.message)


class InvalidSymbolError(PhotonSdpError):
    """
    Exception raised when an operator symbol carries an index outside the
    ranges declared by the scenario alphabet.

    :param symbol: Text form of the offending symbol.
    :type symbol: str
    :param reason: What range was violated.
    :type reason: str
    """

    def __init__(self, symbol, reason="index out of range"):
        self.symbol = symbol
        super().__init__(f"Invalid symbol {symbol!r}: {reason}.")


class WordTooLongError(PhotonSdpError):
    """
    Exception raised when a monomial exceeds the alphabet's word-length cap.

    :param length: The length of the rejected word.
    :type length: int
    :param limit: The configured maximum.
    :type limit: int
    """

    def __init__(self, length, limit):
        self.length = length
        self.limit = limit
        super().__init__(
            f"Word of length {length} exceeds the maximum length {limit}."
        )


class ConfigurationError(PhotonSdpError):
    """
    Exception raised for malformed or inconsistent inputs.

    :param message: A human-readable description of the problem.
    :type message: str
    :param field: Dotted path of the offending configuration field.
    :type field: str, optional
    """

    def __init__(self, message="Invalid configuration.", field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class LevelTooLowError(PhotonSdpError):
    """
    Exception raised when a moment the caller needs has no variable in the
    relaxation, meaning the monomial basis is too small.

    :param word: Text form of the missing monomial.
    :type word: str
    """

    def __init__(self, word):
        self.word = word
        super().__init__(
            f"Moment {word!r} is not in the relaxation; add a basis "
            f"monomial producing it or raise the level."
        )


class InfeasibleError(PhotonSdpError):
    """
    Exception raised when a relaxation has no feasible point, e.g. the pinned
    behavior lies outside the relaxed quantum set.

    :param message: A human-readable description of the exception.
    :type message: str
    :param node: Quadrature node index of the failing block, if any.
    :type node: int, optional
    """

    def __init__(self, message="Problem is infeasible.", node=None):
        self.node = node
        if node is not None:
            message = f"{message} (quadrature node {node})"
        super().__init__(message)


class SolverFailure(PhotonSdpError):
    """
    Exception raised when the solver reports numerical trouble after the
    automatic retry.

    :param message: A human-readable description of the exception.
    :type message: str
    :param diagnostics: Solver diagnostics of the last attempt.
    :type diagnostics: dict, optional
    :param node: Quadrature node index of the failing block, if any.
    :type node: int, optional
    """

    def __init__(self, message="Solver failed.", diagnostics=None, node=None):
        self.diagnostics = diagnostics or {}
        self.node = node
        if node is not None:
            message = f"{message} (quadrature node {node})"
        super().__init__(message)


class UnsupportedError(PhotonSdpError):
    """Exception raised when a requested feature is unavailable."""


class DomainError(PhotonSdpError):
    """Exception raised when a numeric argument is outside its domain."""


class ModelError(PhotonSdpError):
    """
    Exception raised when an explicit quantum model breaks one of its
    invariants (positivity, normalization, photon constraints, dimension).
    """


class SolverExceptionHandler(PhotonSdpError):
    """
    Exception handler for errors raised by the solver stack.

    :param exception: The exception to be handled.
    :type exception: Exception
    :param solver_name: The name of the backend solver.
    :type solver_name: str
    """

    def __init__(self, exception, solver_name="Solver"):
        self.exception = exception
        self.solver_name = solver_name
        self.handle_exception()

    def handle_exception(self):
        """
        Translates the passed exception into a readable message.
        """
        # Imported here so that pure-algebra users never load cvxpy
        from cvxpy.error import DCPError, SolverError

        if isinstance(self.exception, SolverError):
            self.message = (f"{Fore.RED}{self.solver_name} failed to solve "
                            f"the problem: {self.exception}{Style.RESET_ALL}")
        elif isinstance(self.exception, DCPError):
            self.message = (f"{Fore.RED}Problem is not convex as written."
                            f"{Style.RESET_ALL}")
        elif isinstance(self.exception, ArithmeticError):
            self.message = (f"{Fore.RED}Arithmetic error while solving:"
                            f"{Style.RESET_ALL} {self.exception}")
        elif isinstance(self.exception, ValueError):
            self.message = (f"{Fore.RED}Invalid problem data:"
                            f"{Style.RESET_ALL} {self.exception}")
        else:
            self.message = (
                f"{Fore.RED}An unknown error occurred.{Style.RESET_ALL}"
            )

        super().__init__(self.message)
