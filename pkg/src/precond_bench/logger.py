#!/usr/bin/env python3
"""
Common Logger Module for precond-bench

Provides standardized logging configuration across all modules including:
- Console and optional file handlers with consistent formatting
- JSON structured logging through structlog
- A dedicated performance logger for timings of builds and solves
- Decorators that time library calls and benchmark stages
"""

import logging
import sys
from datetime import datetime
from functools import wraps
from typing import Any, Callable, Dict, Optional, TypeVar

import structlog

# Default logging configuration
DEFAULT_LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DEFAULT_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

ROOT_LOGGER_NAME = 'precond_bench'
PERFORMANCE_LOGGER_NAME = 'precond_bench.performance'

F = TypeVar("F", bound=Callable[..., Any])


class PerformanceLogger:
    """Logger for tracking timings of factorizations, solves and sweeps."""

    def __init__(self, name: str = PERFORMANCE_LOGGER_NAME):
        self.logger = logging.getLogger(name)

    def log_timing(self, operation: str, duration_ms: float, context: Optional[Dict[str, Any]] = None) -> None:
        """Log timing information for operations."""
        context = context or {}
        self.logger.info(
            f"Performance: {operation} {duration_ms:.2f}ms",
            extra={
                'operation': operation,
                'duration_ms': duration_ms,
                'timestamp': datetime.now().isoformat(),
                **context,
            },
        )

    def log_solve_performance(
        self,
        label: str,
        duration_ms: float,
        iterations: int = 0,
        work: Optional[int] = None,
        status: str = "",
    ) -> None:
        """Log PCG solve metrics."""
        self.logger.info(
            f"Solve Performance: {label} status={status} iters={iterations} work={work} {duration_ms:.2f}ms",
            extra={
                'precond_label': label,
                'duration_ms': duration_ms,
                'iterations': iterations,
                'work': work,
                'status': status,
                'timestamp': datetime.now().isoformat(),
            },
        )


class StructuredLogger:
    """Structured logger with JSON output for machine-read sweep logs."""

    def __init__(self, name: str, enable_json: bool = False):
        self.name = name
        self.enable_json = enable_json
        self.logger = self._setup_logger()

    def _setup_logger(self) -> logging.Logger:
        """Setup structured logging with optional JSON output."""
        logger = logging.getLogger(self.name)

        if self.enable_json:
            structlog.configure(
                processors=[
                    structlog.stdlib.filter_by_level,
                    structlog.stdlib.add_logger_name,
                    structlog.stdlib.add_log_level,
                    structlog.stdlib.PositionalArgumentsFormatter(),
                    structlog.processors.TimeStamper(fmt="iso"),
                    structlog.processors.StackInfoRenderer(),
                    structlog.processors.format_exc_info,
                    structlog.processors.UnicodeDecoder(),
                    structlog.processors.JSONRenderer(),
                ],
                context_class=dict,
                logger_factory=structlog.stdlib.LoggerFactory(),
                cache_logger_on_first_use=True,
            )

        return logger

    def info(self, message: str, **context: Any) -> None:
        """Log info message with context."""
        if self.enable_json:
            structlog.get_logger(self.name).info(message, **context)
        else:
            self.logger.info(f"{message} - Context: {context}" if context else message)

    def warning(self, message: str, **context: Any) -> None:
        """Log warning message with context."""
        if self.enable_json:
            structlog.get_logger(self.name).warning(message, **context)
        else:
            self.logger.warning(f"{message} - Context: {context}" if context else message)

    def debug(self, message: str, **context: Any) -> None:
        """Log debug message with context."""
        if self.enable_json:
            structlog.get_logger(self.name).debug(message, **context)
        else:
            self.logger.debug(f"{message} - Context: {context}" if context else message)


def setup_logging(
    level: str = "INFO",
    enable_debug: bool = False,
    enable_json: bool = False,
    log_file: Optional[str] = None,
    module_name: str = ROOT_LOGGER_NAME,
) -> logging.Logger:
    """
    Setup standardized logging configuration for the whole toolkit.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        enable_debug: Enable debug logging
        enable_json: Enable JSON structured logging
        log_file: Optional log file path
        module_name: Name of the logger that receives the handlers

    Returns:
        Configured logger instance
    """
    log_level = getattr(logging, level.upper(), logging.INFO)

    if enable_debug:
        log_level = logging.DEBUG

    logger = logging.getLogger(module_name)
    logger.setLevel(log_level)

    # Clear existing handlers to avoid duplicates
    logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)

    if enable_json:
        formatter = logging.Formatter(
            '{"timestamp": "%(asctime)s", "name": "%(name)s", "level": "%(levelname)s", "message": "%(message)s"}'
        )
        # Route structlog through the same stdlib handlers
        StructuredLogger(module_name, enable_json=True)
    else:
        formatter = logging.Formatter(DEFAULT_LOG_FORMAT, DEFAULT_DATE_FORMAT)

    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # The performance logger writes its own lines and does not bubble up twice
    perf_logger = logging.getLogger(PERFORMANCE_LOGGER_NAME)
    perf_logger.setLevel(logging.INFO if enable_debug else logging.WARNING)
    perf_logger.propagate = False
    perf_logger.handlers.clear()
    perf_handler = logging.StreamHandler(sys.stderr)
    perf_handler.setFormatter(logging.Formatter('PERF - %(asctime)s - %(message)s', DEFAULT_DATE_FORMAT))
    perf_logger.addHandler(perf_handler)

    logger.debug(f"Logging configured - Level: {level}, Debug: {enable_debug}, JSON: {enable_json}")

    return logger


def log_function_call(logger: Optional[logging.Logger] = None) -> Callable[[F], F]:
    """
    Decorator to log function calls and execution time.

    Args:
        logger: Optional logger instance, will use the function's module logger if not provided
    """
    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            func_logger = logger or logging.getLogger(func.__module__)
            perf_logger = PerformanceLogger()
            start_time = datetime.now()

            func_logger.debug(f"Entering {func.__name__}")

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration_ms = (datetime.now() - start_time).total_seconds() * 1000
                func_logger.debug(f"Error in {func.__name__}: {e}")
                perf_logger.log_timing(
                    operation=f"{func.__module__}.{func.__name__}",
                    duration_ms=duration_ms,
                    context={'success': False, 'error': str(e)},
                )
                raise

            duration_ms = (datetime.now() - start_time).total_seconds() * 1000
            func_logger.debug(f"Completed {func.__name__} in {duration_ms:.2f}ms")
            perf_logger.log_timing(
                operation=f"{func.__module__}.{func.__name__}",
                duration_ms=duration_ms,
                context={'success': True},
            )
            return result

        return wrapper  # type: ignore[return-value]
    return decorator


def log_benchmark_operation(operation_type: str) -> Callable[[F], F]:
    """
    Decorator for harness stages (sweep, report, fetch) to track progress and timing.

    Args:
        operation_type: Name of the stage being run
    """
    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            logger = logging.getLogger(func.__module__)
            perf_logger = PerformanceLogger()
            start_time = datetime.now()

            logger.info(f"Starting benchmark operation: {operation_type}")

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration_ms = (datetime.now() - start_time).total_seconds() * 1000
                logger.error(f"Benchmark operation failed: {operation_type} - {e}")
                perf_logger.log_timing(
                    operation=f"benchmark.{operation_type}",
                    duration_ms=duration_ms,
                    context={'success': False, 'error': str(e)},
                )
                raise

            duration_ms = (datetime.now() - start_time).total_seconds() * 1000
            perf_logger.log_timing(
                operation=f"benchmark.{operation_type}",
                duration_ms=duration_ms,
                context={'success': True},
            )
            logger.info(f"Completed benchmark operation: {operation_type} in {duration_ms:.2f}ms")
            return result

        return wrapper  # type: ignore[return-value]
    return decorator


def get_cli_logger(debug: bool = False, enable_json: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """Get the toolkit root logger configured for command-line use."""
    return setup_logging(
        level="DEBUG" if debug else "INFO",
        enable_debug=debug,
        enable_json=enable_json,
        log_file=log_file,
        module_name=ROOT_LOGGER_NAME,
    )


__all__ = [
    'setup_logging',
    'log_function_call',
    'log_benchmark_operation',
    'PerformanceLogger',
    'StructuredLogger',
    'get_cli_logger',
    'ROOT_LOGGER_NAME',
    'PERFORMANCE_LOGGER_NAME',
]
