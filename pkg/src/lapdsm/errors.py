"""Exception types shared across the package.

The CLI maps ValidationError to exit code 2 and NumericalError to exit
code 3; library code raises them directly.
"""


class ValidationError(ValueError):
    """Invalid user input: bad geometry, mismatched shapes, bad parameters."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: singular system, divergent training."""
