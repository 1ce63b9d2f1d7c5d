"""Exception taxonomy.

Three families so the command line can map failures to distinct exit
codes: malformed input documents, structurally unusable models, and
numerical breakdowns discovered at run time.
"""


class QubdoeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(QubdoeError):
    """A building document violates the input schema.

    The message always names the offending path, e.g.
    ``branches[3].to: unknown node 'x9'``.
    """


class ModelError(QubdoeError):
    """A circuit or model cannot support the requested operation
    (e.g. no capacitive node, unknown output node, unassigned source)."""


class NumericalError(QubdoeError):
    """A computation failed numerically (singular system, ill-conditioned
    eigenbasis, degenerate estimator input, infeasible design space)."""
