from django.core.exceptions import ImproperlyConfigured


class BTEvolveError(Exception):
    """Base class of every error raised by btevolve."""


class ConfigError(BTEvolveError, ImproperlyConfigured):
    pass


class ChromosomeError(BTEvolveError):
    pass


class ParseError(ChromosomeError):
    pass


class SchemaError(ChromosomeError):
    pass


class InvariantError(ChromosomeError):
    pass


class DepthOutOfRange(ChromosomeError, IndexError):
    pass


class CompileError(BTEvolveError):
    pass


class UnknownNodeId(CompileError):
    pass


class ArityViolation(CompileError):
    pass


class PropertyOutOfRange(CompileError):
    pass


class BlackboardError(BTEvolveError, TypeError):
    """Write of a value that does not match the key's declared type."""


class FitnessError(BTEvolveError):
    pass


class UndeclaredKey(FitnessError, KeyError):
    pass


class ArenaError(BTEvolveError):
    pass


class BlockedStart(ArenaError):
    pass


class MapError(ArenaError, ConfigError):
    """A map file that cannot be read or fails validation."""
