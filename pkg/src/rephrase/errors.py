"""Errors raised by the rephrase package."""


class Error(Exception):
    """Base class for all rephrase errors."""


class RuleParseError(Error):
    """A rule file line could not be parsed."""


class RuleValidationError(Error):
    """A rule violates a structural constraint (e.g. a free right-hand variable)."""


class StaleMatchError(Error):
    """A match was applied to a sequence it no longer fits."""


class QueryTooLongError(Error):
    """A frequency query exceeded the index's maximum counted length."""


class IndexFormatError(Error):
    """An index file has a bad header or a malformed entry."""


class ConfigError(Error):
    """Incompatible or invalid configuration (k mismatch, bad flag value, ...)."""


class NormalizationError(Error):
    """Question normalization did not produce the expected wildcard token."""
