class NotReadyError(RuntimeError):
    """Estimate requested while the estimator is still warming up."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge."""
