"""
Synthesis Error Handling Utilities.

This module provides the exception hierarchy shared by every synthesis
and inference operation, together with the context manager, decorator and
metrics collector used to run those operations with consistent logging.
"""

import functools
import logging
import threading
import time
from collections import Counter, defaultdict
from collections.abc import Callable, Generator, Iterable, Mapping
from contextlib import contextmanager
from typing import Any, TypeVar

from ..utils.constants import (
    EXIT_DEGENERATE,
    EXIT_DOMAIN,
    EXIT_FAILURE,
    EXIT_INPUT,
    EXIT_NUMERIC,
)

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


class SynthesisError(Exception):
    """Base exception for synthesis and inference errors."""

    exit_code = EXIT_FAILURE


class InputError(SynthesisError):
    """Raised when an input file, argument or setting is malformed."""

    exit_code = EXIT_INPUT


class SchemaError(InputError):
    """Raised when a file carries an unknown schema tag or bad fields."""

    pass


class DimensionError(InputError):
    """Raised when vector, table or matrix sizes disagree."""

    pass


class ArgumentError(InputError):
    """Raised when an argument lies outside its documented range."""

    pass


class ConfigurationError(InputError):
    """Raised when there's an issue with the settings file."""

    pass


class DegenerateDistributionError(SynthesisError):
    """Raised when a distribution has no mass or an empty support."""

    exit_code = EXIT_DEGENERATE


class NumericError(SynthesisError):
    """Raised when a computation produces non-finite or unusable values."""

    exit_code = EXIT_NUMERIC


class CalibrationError(NumericError):
    """Raised when calibration sweeps fail to reach the tolerance."""

    def __init__(self, message: str, residuals: Mapping[int, float]) -> None:
        super().__init__(message)
        self.residuals = dict(residuals)


class DomainError(SynthesisError):
    """Raised when a request falls outside the supported problem domain."""

    exit_code = EXIT_DOMAIN


class AdmissibilityError(DomainError):
    """Raised when a width is not of the form 2**(b - 1) + b."""

    def __init__(self, n: int, admissible: Iterable[int]) -> None:
        self.n = n
        self.admissible = tuple(admissible)
        listed = ", ".join(str(value) for value in self.admissible)
        super().__init__(
            f"n={n} is not admissible; admissible values are {{{listed}}}"
        )


class SizeError(DomainError):
    """Raised when a model or table exceeds the dense enumeration cap."""

    pass


@contextmanager
def synthesis_operation(operation_name: str) -> Generator[None, None, None]:
    """
    Context manager for synthesis operations with consistent error handling.

    Errors from the synthesis hierarchy pass through unchanged; anything
    else is wrapped in a SynthesisError naming the operation.

    Args:
        operation_name: Name of the operation for logging
    """
    logger.debug(f"Starting operation: {operation_name}")
    try:
        yield
        logger.debug(f"Completed operation: {operation_name}")
    except SynthesisError:
        raise
    except Exception as e:
        logger.error(f"Error in operation '{operation_name}': {e}")
        raise SynthesisError(f"Failed to execute {operation_name}: {e}") from e


class OperationMetrics:
    """
    Counts, failures and wall-clock time per named operation.

    Durations accumulate across calls; the most recent duration of each
    operation is kept separately for run manifests. Updates and reads
    hold a lock, so steps may run on several threads.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.calls: Counter[str] = Counter()
        self.failures: Counter[str] = Counter()
        self.seconds: dict[str, float] = defaultdict(float)
        self.last_seconds: dict[str, float] = {}

    def record_operation(self, operation_name: str, duration: float = 0.0) -> None:
        with self._lock:
            self.calls[operation_name] += 1
            self.seconds[operation_name] += duration
            self.last_seconds[operation_name] = duration

    def record_error(self, operation_name: str) -> None:
        with self._lock:
            self.failures[operation_name] += 1

    @contextmanager
    def operation_timer(self, operation_name: str) -> Generator[None, None, None]:
        """Time a block and record it as one call of operation_name."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record_operation(operation_name, time.perf_counter() - start)

    def last_duration(self, operation_name: str) -> float:
        with self._lock:
            return self.last_seconds.get(operation_name, 0.0)

    def get_stats(self) -> dict[str, Any]:
        with self._lock:
            return {
                "operations": dict(self.calls),
                "errors": dict(self.failures),
                "seconds": dict(self.seconds),
                "total_operations": self.calls.total(),
                "total_errors": self.failures.total(),
            }

    def reset(self) -> None:
        with self._lock:
            self.calls.clear()
            self.failures.clear()
            self.seconds.clear()
            self.last_seconds.clear()


# Global metrics instance
_metrics = OperationMetrics()


def get_metrics() -> OperationMetrics:
    """Get the global metrics instance."""
    return _metrics


def synthesis_step(operation_name: str) -> Callable[[F], F]:
    """
    Decorator that counts and times a synthesis operation.

    Failures are counted and re-raised unchanged.

    Args:
        operation_name: Name of the operation for logging and metrics
    """

    def decorator(func: F) -> F:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            metrics = get_metrics()
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                metrics.record_error(operation_name)
                logger.debug(f"{operation_name} failed: {e}")
                raise
            duration = time.perf_counter() - start
            metrics.record_operation(operation_name, duration)
            logger.debug(f"{operation_name} finished in {duration:.3f}s")
            return result

        return wrapper  # type: ignore

    return decorator
