"""
Probability traces over a time grid
"""
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import TraceRangeError

RANGE_SLACK = 1e-9


@dataclass(frozen=True)
class ProbabilityTrace:
    """
    Basis-projection probabilities for the excitation injected on the source,
    plus the survival probability of the full input alpha|udd> + beta|ddd>.

    Entries may overshoot [0, 1] by at most RANGE_SLACK; anything larger means
    a broken kernel and raises TraceRangeError.
    """
    times: np.ndarray
    p_source: np.ndarray
    p_gate: np.ndarray
    p_drain: np.ndarray
    p_blockade_total: np.ndarray

    def __post_init__(self):
        length = None
        for field in fields(self):
            values = np.asarray(getattr(self, field.name), dtype=float).reshape(-1)
            object.__setattr__(self, field.name, values)
            if length is None:
                length = values.size
            elif values.size != length:
                raise TraceRangeError(
                    f'{field.name} has {values.size} entries, expected {length}'
                )
        violation = self.max_range_violation()
        if violation > RANGE_SLACK:
            raise TraceRangeError(f'Probability leaves [0, 1] by {violation:.3e}')

    def __len__(self):
        return self.times.size

    @property
    def probability_columns(self):
        return ('p_source', 'p_gate', 'p_drain', 'p_blockade_total')

    def max_range_violation(self):
        """Largest distance of any probability outside [0, 1]."""
        worst = 0.0
        for name in self.probability_columns:
            values = getattr(self, name)
            if values.size:
                worst = max(worst, float(np.max(-values)), float(np.max(values - 1.0)))
        return worst

    def conservation_residual(self):
        """max |p_source + p_gate + p_drain - 1| over the grid"""
        if not len(self):
            return 0.0
        return float(np.max(np.abs(self.p_source + self.p_gate + self.p_drain - 1.0)))
