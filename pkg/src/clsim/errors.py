"""Exception types shared across the toolkit."""


class ClsimError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(ClsimError):
    """Malformed aligned-pairs file or invalid corpus contents."""


class UnknownTagError(ClsimError):
    """A raw POS tag is missing from the tag mapping."""


class EmbeddingFormatError(ClsimError):
    """Malformed word-vector file."""


class DictionaryFormatError(ClsimError):
    """Malformed or inconsistent bilingual dictionary file."""


class MissingResourceError(ClsimError):
    """A similarity method was invoked without a resource it requires."""


class OptimizationError(ClsimError):
    """Optimizer misconfiguration (bad bounds, exhausted budget, ...)."""


class ConfigError(ClsimError):
    """Invalid run configuration at the CLI boundary."""
