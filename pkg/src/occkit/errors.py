"""Domain errors shared across the toolkit.

The CLI maps OckitError subclasses to exit code 1; anything else is a bug.
"""


class OckitError(Exception):
    """Base class for all expected domain failures."""


class BitOverrunError(OckitError):
    """A bit reader was asked to read past the end of its buffer."""


class MalformedCodeError(OckitError):
    """A self-delimiting integer code was truncated or invalid."""


class DecodeError(OckitError):
    """A payload was rejected by the circuit decoder.

    `reason` is one of the frozen reason codes in occkit.codec.REJECT_REASONS.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class NonDyadicExactError(OckitError):
    """delta = 0 was requested for a distribution with non-dyadic masses."""


class BudgetExceededError(OckitError):
    """An operation needs more than the configured budget allows.

    `required` carries the budget that would have sufficed.
    """

    def __init__(self, message: str, required: int | None = None):
        self.required = required
        super().__init__(message)


class NonErgodicError(OckitError):
    """The stationary distribution of a state machine is not unique."""


class DyadicRequiredError(OckitError):
    """A machine with non-dyadic transition probabilities cannot be compiled."""


class EffUndefinedError(OckitError):
    """Effectiveness is undefined when the semantic information amount is 0."""
