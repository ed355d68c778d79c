"""
Transfer and blockade timescales
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings
from scipy.optimize import brentq

from .analytic import p_source_analytic
from .exceptions import NoTransferError, ScanLimitError

logger = logging.getLogger(__name__)

BLOCKADE_THRESHOLD = 0.999
ANCHOR_RATIO = 1e3
ANCHOR_FACTOR = 10.0
SCAN_CHUNK = 65536
SCAN_STEPS_PER_HALF_PERIOD = 16
ENVELOPE_MARGIN = 10.0


@dataclass(frozen=True)
class TransferTimes:
    """
    tau_transfer is pi / (J sqrt(2)). tau_blockade is 10 tau_transfer when
    delta / J = 1e3 and the threshold scan otherwise; tau_blockade_scan is
    always the scan.
    """
    tau_transfer: float
    tau_blockade: float
    tau_blockade_scan: float


def transfer_time(j):
    """pi / (J sqrt(2)), the time of perfect transfer at zero detuning."""
    if not j > 0:
        raise NoTransferError(f'Coupling J must be > 0 for a transfer time (got {j})')
    return math.pi / (j * math.sqrt(2.0))


def _envelope(j, delta):
    """
    p_source split as C + A cos(w t) + ripple, with w = D - |d| the slow
    beat and |ripple| <= R. Returns (C, A, R, w).
    """
    big_delta = math.sqrt(delta ** 2 + 2.0 * j ** 2)
    detuning = abs(delta)
    # D - |d| and 1 - |d|/D without cancellation
    slow = 2.0 * j ** 2 / (big_delta + detuning)
    defect = slow / big_delta
    offset = 0.125 * (3.0 + (delta / big_delta) ** 2)
    amplitude = 0.25 * (2.0 - defect)
    ripple = 0.25 * defect + j ** 2 / (4.0 * big_delta ** 2)
    return offset, amplitude, ripple, slow


def _scan(j, delta, threshold, start, step, max_points):
    """First crossing below ``threshold`` sampled from ``start``, or None when out of points."""
    def excess(t):
        return float(p_source_analytic(j, delta, t)) - threshold

    scanned = 0
    while scanned < max_points:
        count = min(SCAN_CHUNK, max_points - scanned)
        times = start + (scanned + np.arange(count)) * step
        below = np.flatnonzero(p_source_analytic(j, delta, times) < threshold)
        if below.size:
            k = scanned + int(below[0])
            if k == 0:
                return start
            crossing = brentq(excess, start + (k - 1) * step, start + k * step, xtol=1e-15 * (start + k * step) + 1e-300)
            logger.debug('Blockade window J=%g delta=%g: %d samples, t=%.9e s', j, delta, k + 1, crossing)
            return crossing
        scanned += count
    return None


def blockade_window(j, delta, threshold=BLOCKADE_THRESHOLD):
    """
    Largest t with p_source_analytic >= threshold on all of [0, t].

    The source probability is sampled with step pi / (16 Delta), fine enough
    to resolve its fastest oscillation, until it first drops below the
    threshold; the crossing is then refined with brentq. At large detuning
    the fast ripple is much smaller than 1 - threshold, and only the window
    where the slow envelope lies within one ripple amplitude of the
    threshold is sampled.

    Raises:
        NoTransferError: if J <= 0 (the source never empties)
        ScanLimitError: if BLOCKADE_SCAN_MAX_POINTS samples do not reach the crossing
    """
    if not j > 0:
        raise NoTransferError(f'Coupling J must be > 0 for a blockade window (got {j})')
    if not 0 < threshold < 1:
        raise ValueError(f'threshold must lie in (0, 1), got {threshold}')

    big_delta = math.sqrt(delta ** 2 + 2.0 * j ** 2)
    step = math.pi / (SCAN_STEPS_PER_HALF_PERIOD * big_delta)
    max_points = int(getattr(settings, 'BLOCKADE_SCAN_MAX_POINTS', 50_000_000))

    start = 0.0
    offset, amplitude, ripple, slow = _envelope(j, delta)
    if ENVELOPE_MARGIN * ripple < 1.0 - threshold and threshold - ripple > offset - amplitude:
        # p >= threshold while the envelope stays above threshold + ripple
        upper = np.clip((threshold + ripple - offset) / amplitude, -1.0, 1.0)
        start = float(np.arccos(upper)) / slow
        logger.debug('Blockade window J=%g delta=%g: envelope puts the crossing after %.9e s', j, delta, start)

    crossing = _scan(j, delta, threshold, start, step, max_points)
    if crossing is None:
        raise ScanLimitError(max_points, start + max_points * step)
    return crossing


def transfer_times(j, delta, threshold=BLOCKADE_THRESHOLD):
    """
    TransferTimes for coupling ``j`` and gate detuning ``delta`` (rad/s).

    Raises:
        NoTransferError: if J <= 0
    """
    tau_transfer = transfer_time(j)
    scan = blockade_window(j, delta, threshold)
    anchored = math.isclose(abs(delta) / j, ANCHOR_RATIO, rel_tol=1e-9)
    tau_blockade = ANCHOR_FACTOR * tau_transfer if anchored else scan
    return TransferTimes(tau_transfer=tau_transfer, tau_blockade=tau_blockade, tau_blockade_scan=scan)
