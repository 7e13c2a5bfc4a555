"""Exception types shared across modules.

Validation problems raise ``ValueError`` directly. Numerical failures use the
classes below so the CLI can map them to a distinct exit code.
"""


class NumericalError(RuntimeError):
    """A solver failed to produce a trustworthy number."""


class NoBoundStateError(NumericalError):
    """The requested negative eigenvalue does not exist or was not bracketed."""


class BracketError(NumericalError):
    """A root or eigenvalue search did not find a sign change."""
