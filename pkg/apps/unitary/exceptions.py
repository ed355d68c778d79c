"""
Errors raised by the closed-system dynamics
"""


class UnitaryError(Exception):
    pass


class NoTransferError(UnitaryError, ValueError):
    """Raised when a timescale is requested for a chain without coupling"""
    pass


class ScanLimitError(UnitaryError):
    def __init__(self, points, t_reached):
        self.points = points
        self.t_reached = t_reached
        super().__init__(
            f'Blockade window not closed after {points} scan points (t = {t_reached:.6e} s); '
            f'raise BLOCKADE_SCAN_MAX_POINTS or lower the threshold'
        )


class TraceRangeError(UnitaryError):
    pass
