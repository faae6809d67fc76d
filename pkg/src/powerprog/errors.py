"""Shared exception types."""


class RangeGuardError(ValueError):
    """An input exceeds a hard range guard (64-bit overflow, oracle cap, DFT size)."""


class VerificationError(AssertionError):
    """A verification suite found a mismatch between fast path and oracle."""
