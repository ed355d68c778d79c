"""
Physical parameters of the XY chain. Frequencies are angular (rad/s), hbar = 1.
"""
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ChainParamsError

UNITS_ANGULAR = 'angular'
UNITS_CYCLIC = 'cyclic'
UNITS_CHOICES = (
    (UNITS_ANGULAR, 'Frequencies given in rad/s'),
    (UNITS_CYCLIC, 'Frequencies given in Hz, multiplied by 2*pi'),
)


def to_angular(value, units_mode=UNITS_ANGULAR):
    """Convert a frequency to rad/s."""
    if units_mode == UNITS_ANGULAR:
        return float(value)
    if units_mode == UNITS_CYCLIC:
        return 2.0 * math.pi * float(value)
    raise ValueError(f'Unknown units mode: {units_mode!r}')


@dataclass(frozen=True)
class ChainParams:
    """
    Site frequencies and coupling of the chain.

    Every site precesses at ``omega0`` except ``gate_site``, which sits at
    ``omega0 + delta``. ``gate_site`` defaults to the middle site.
    """
    n_sites: int = 3
    omega0: float = 0.0
    delta: float = 0.0
    coupling_j: float = 0.0
    gate_site: int = None

    def __post_init__(self):
        if self.gate_site is None:
            object.__setattr__(self, 'gate_site', self.n_sites // 2)

        problems = []
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 2:
            problems.append(f'n_sites must be an integer >= 2 (got {self.n_sites!r})')
        for name in ('omega0', 'delta', 'coupling_j'):
            if not math.isfinite(getattr(self, name)):
                problems.append(f'{name} must be finite')
        if self.coupling_j < 0:
            problems.append(f'coupling_j must be >= 0 (got {self.coupling_j})')
        if not 0 <= self.gate_site < max(self.n_sites, 0):
            problems.append(f'gate_site must lie in [0, {self.n_sites}) (got {self.gate_site})')
        if problems:
            raise ChainParamsError(problems)

    @property
    def dimension(self):
        return 2 ** self.n_sites

    @property
    def source_site(self):
        return 0

    @property
    def drain_site(self):
        return self.n_sites - 1

    def frequencies(self):
        """Per-site Z frequencies omega_i."""
        omegas = np.full(self.n_sites, self.omega0, dtype=float)
        omegas[self.gate_site] += self.delta
        return omegas

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)
