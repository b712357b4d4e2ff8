"""Custom exceptions for the application."""

from typing import Any


class GSAError(Exception):
    """Base exception for gene set analysis."""

    exit_code: int = 1

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class InputValidationError(GSAError):
    """Exception for invalid input data."""

    exit_code = 2


class ParseError(InputValidationError):
    """Exception for malformed input files, with location details."""

    pass


class DuplicateIdentifierError(InputValidationError):
    """Exception for duplicated gene, sample or gene set identifiers."""

    pass


class PhenotypeError(InputValidationError):
    """Exception for invalid phenotype assignments."""

    pass


class MappingFormatError(ParseError):
    """Exception for malformed gene ID mapping files."""

    pass


class ConfigurationError(GSAError):
    """Exception for configuration errors."""

    exit_code = 2


class AnalysisError(GSAError):
    """Exception for analyses that cannot be carried out on the given data."""

    exit_code = 2


class NoTestableGeneSetsError(AnalysisError):
    """Exception when no gene set survives universe and size filtering."""

    pass


class EmptyResultError(AnalysisError):
    """Exception when a preprocessing step removes every gene."""

    pass


class InsufficientReplicatesError(AnalysisError):
    """Exception when a phenotype group is too small for a variance-based statistic."""

    pass


class DegenerateStatisticError(AnalysisError):
    """Exception for statistics that are undefined on the given input."""

    pass


class NumericalError(GSAError):
    """Exception for numerical failures."""

    exit_code = 3


class QuadratureError(NumericalError):
    """Exception when numerical integration does not converge."""

    pass


class PipelineError(GSAError):
    """Exception for a failed pipeline stage."""

    def __init__(self, stage: str, cause: GSAError):
        super().__init__(f"Stage '{stage}' failed: {cause.message}", {"stage": stage, **cause.details})
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code
