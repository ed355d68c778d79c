"""
Errors raised by the dense linear-algebra layer
"""


class MatrixError(Exception):
    """Base class for linear-algebra failures"""
    pass


class DimensionError(MatrixError):
    pass


class NotHermitianError(MatrixError):
    """Raised with the measured asymmetry max|M - M^H|"""

    def __init__(self, asymmetry, tolerance):
        self.asymmetry = asymmetry
        self.tolerance = tolerance
        super().__init__(
            f'Matrix is not Hermitian: max|M - M^H| = {asymmetry:.3e} exceeds {tolerance:.1e}'
        )


class ConvergenceError(MatrixError):
    def __init__(self, sweeps, off_norm, threshold):
        self.sweeps = sweeps
        self.off_norm = off_norm
        self.threshold = threshold
        super().__init__(
            f'Jacobi eigensolver did not converge after {sweeps} sweeps: '
            f'off-diagonal norm {off_norm:.3e} > threshold {threshold:.3e}'
        )


class NonFiniteError(MatrixError):
    pass
