"""
Computational basis and pure states.

Bit convention: site 0 (the source) is the most significant bit and an up spin
is bit 1, so for three sites |up,down,down> is index 4 and |down,down,up> is
index 1.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import NormalizationError, SiteIndexError

UP = 'up'
DOWN = 'down'

NORM_TOL = 1e-10

_LABEL_CHARS = {
    'u': UP, '1': UP, '↑': UP,
    'd': DOWN, '0': DOWN, '↓': DOWN,
}


@dataclass(frozen=True)
class BasisLabel:
    spins: tuple

    def __post_init__(self):
        spins = tuple(self.spins)
        bad = [s for s in spins if s not in (UP, DOWN)]
        if bad or not spins:
            raise ValueError(f'Spins must be a non-empty sequence of {UP!r}/{DOWN!r}, got {self.spins!r}')
        object.__setattr__(self, 'spins', spins)

    @classmethod
    def parse(cls, text):
        """Build a label from a string such as 'udd', '100' or '↑↓↓'."""
        try:
            return cls(tuple(_LABEL_CHARS[ch] for ch in text))
        except KeyError as exc:
            raise ValueError(f'Unrecognized spin character {exc.args[0]!r} in {text!r}') from None

    @classmethod
    def from_index(cls, index, n_sites):
        if not 0 <= index < 2 ** n_sites:
            raise SiteIndexError(f'Basis index {index} out of range for {n_sites} sites')
        bits = format(index, f'0{n_sites}b')
        return cls(tuple(UP if b == '1' else DOWN for b in bits))

    @property
    def n_sites(self):
        return len(self.spins)

    @property
    def index(self):
        value = 0
        for spin in self.spins:
            value = (value << 1) | (1 if spin == UP else 0)
        return value

    @property
    def magnetization(self):
        ups = sum(1 for s in self.spins if s == UP)
        return ups - (len(self.spins) - ups)

    def __str__(self):
        return ''.join('↑' if s == UP else '↓' for s in self.spins)


def basis_index(label):
    """Index of a label given as BasisLabel, string or spin sequence."""
    if isinstance(label, BasisLabel):
        return label.index
    if isinstance(label, str):
        return BasisLabel.parse(label).index
    return BasisLabel(tuple(label)).index


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over the 2**n basis."""
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        size = amplitudes.size
        if size < 2 or size & (size - 1):
            raise ValueError(f'State length must be a power of two >= 2, got {size}')
        norm = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f'State is not normalized: sum|a|^2 = {norm:.15f}')
        object.__setattr__(self, 'amplitudes', amplitudes)

    @property
    def n_sites(self):
        return int(self.amplitudes.size).bit_length() - 1

    @property
    def dimension(self):
        return self.amplitudes.size

    def amplitude(self, label):
        return self.amplitudes[basis_index(label)]

    def probability(self, label):
        return float(abs(self.amplitude(label)) ** 2)

    def overlap(self, other):
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self):
        """|psi><psi| as a dense matrix."""
        return np.outer(self.amplitudes, np.conjugate(self.amplitudes))


def basis_state(label):
    if isinstance(label, str):
        label = BasisLabel.parse(label)
    elif not isinstance(label, BasisLabel):
        label = BasisLabel(tuple(label))
    amplitudes = np.zeros(2 ** label.n_sites, dtype=np.complex128)
    amplitudes[label.index] = 1.0
    return PureState(amplitudes)


def check_normalized(alpha, beta):
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f'|alpha|^2 + |beta|^2 = {norm:.15f}, expected 1')


def product_state(spins=None, alpha=None, beta=None, n_sites=3, site=0):
    """
    Product input state.

    Either pass ``spins`` for a computational basis state, or the amplitudes
    (alpha, beta) of one spin: the result is alpha|up> + beta|down> on
    ``site`` with every other spin down. The default (site 0) is the
    transistor input |psi>_s |down>_g |down>_d.

    Raises:
        NormalizationError: if |alpha|^2 + |beta|^2 differs from 1 by more than 1e-10
    """
    if spins is not None:
        return basis_state(spins)
    if alpha is None or beta is None:
        raise ValueError('product_state needs either spins or both alpha and beta')
    if not 0 <= site < n_sites:
        raise SiteIndexError(f'Site {site} out of range for {n_sites} sites')
    check_normalized(alpha, beta)

    amplitudes = np.zeros(2 ** n_sites, dtype=np.complex128)
    amplitudes[1 << (n_sites - 1 - site)] = alpha
    amplitudes[0] = beta
    return PureState(amplitudes)
