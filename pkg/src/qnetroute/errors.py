"""Exception hierarchy shared by all qnetroute modules."""


class QnetError(Exception):
    """Base class for all qnetroute errors."""


class InvalidConfigError(QnetError):
    """A configuration value, parameter range, or input file violates its domain.

    The message always names the offending key or field.
    """


class UnknownNodeError(QnetError):
    """A node id is outside the graph's 0..node_count-1 range."""


class ZeroProbabilityError(QnetError):
    """Entanglement success probability is zero; expected time diverges."""


class NotAPathError(QnetError):
    """A node sequence contains a consecutive pair that is not a graph link."""


class UnreachableError(QnetError):
    """No path exists between the requested source and destination."""
