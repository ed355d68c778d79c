"""
Errors raised by the open-system solvers
"""


class OpenSystemError(Exception):
    pass


class InvalidStateError(OpenSystemError, ValueError):
    pass


class IntegrationError(OpenSystemError):
    """RK4 failed to reach the requested agreement under step halving"""

    def __init__(self, halvings, difference, tolerance):
        self.halvings = halvings
        self.difference = difference
        self.tolerance = tolerance
        super().__init__(
            f'RK4 did not converge after {halvings} halvings: '
            f'successive refinements differ by {difference:.3e} > {tolerance:.1e}'
        )


class ExperimentConfigurationError(OpenSystemError, ValueError):
    pass
