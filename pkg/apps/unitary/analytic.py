"""
Closed-form probabilities of the three-spin chain in the one-excitation sector.

All functions take angular frequencies (rad/s) and times in seconds, broadcast
over numpy arrays and return floats (or float arrays). Nothing here is
clamped: values may leave [0, 1] by rounding, and the reporting layer decides
what to do about it.

With omega0 = 0 the sector {|ddu>, |dud>, |udd>} splits into the
antisymmetric combination (|udd> - |ddu>)/sqrt(2) at energy -delta and a
two-level problem between the symmetric combination and |dud> with splitting
2 * Delta, Delta = sqrt(delta^2 + 2 J^2). Every amplitude below follows from
that split. omega0 only adds a common phase to the sector.
"""
import numpy as np

SQRT2 = np.sqrt(2.0)


def _rabi(j, delta):
    """(Delta, Delta with zeros replaced by 1, mask of Delta > 0)"""
    j = np.asarray(j, dtype=float)
    delta = np.asarray(delta, dtype=float)
    big_delta = np.sqrt(delta ** 2 + 2.0 * j ** 2)
    coupled = big_delta > 0
    return j, delta, np.where(coupled, big_delta, 1.0), coupled


def _symmetric_amplitude(delta, big_delta, t):
    """cos(Delta t) + i (delta / Delta) sin(Delta t)"""
    return np.cos(big_delta * t) + 1j * (delta / big_delta) * np.sin(big_delta * t)


def source_amplitude_analytic(j, delta, t):
    """<udd|U(t)|udd> at omega0 = 0."""
    j, delta, big_delta, coupled = _rabi(j, delta)
    t = np.asarray(t, dtype=float)
    amplitude = 0.5 * (np.exp(1j * delta * t) + _symmetric_amplitude(delta, big_delta, t))
    return np.where(coupled, amplitude, 1.0 + 0j)


def p_source_analytic(j, delta, t):
    """
    Probability that the source excitation is still on the source.

    (1/8)(3 + d^2/D^2) + (1/2) cos(dt) cos(Dt) + (J^2 / 4D^2) cos(2Dt)
    + (d / 2D) sin(dt) sin(Dt), with D = sqrt(d^2 + 2J^2).

    J = delta = 0 is the trivial chain and gives 1 for every t.
    """
    j, delta, big_delta, coupled = _rabi(j, delta)
    t = np.asarray(t, dtype=float)
    ratio = delta / big_delta
    value = (
        0.125 * (3.0 + ratio ** 2)
        + 0.5 * np.cos(delta * t) * np.cos(big_delta * t)
        + (j ** 2 / (4.0 * big_delta ** 2)) * np.cos(2.0 * big_delta * t)
        + 0.5 * ratio * np.sin(delta * t) * np.sin(big_delta * t)
    )
    return np.where(coupled, value, 1.0)


def p_source_expansion(j, delta, t):
    """
    Weak-coupling expansion of p_source_analytic to fourth order in J/delta:

    1 - (J/d)^2 sin^2(dt) - (J^4 / 8 d^4) [-7 + 2 d^2 t^2 + 7 cos(2dt) + 6 dt sin(2dt)]

    Only meaningful for J << delta. delta must be non-zero.
    """
    j = np.asarray(j, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta == 0):
        raise ValueError('p_source_expansion needs a non-zero detuning')
    t = np.asarray(t, dtype=float)
    dt = delta * t
    eps2 = (j / delta) ** 2
    return (
        1.0
        - eps2 * np.sin(dt) ** 2
        - (eps2 ** 2 / 8.0) * (-7.0 + 2.0 * dt ** 2 + 7.0 * np.cos(2.0 * dt) + 6.0 * dt * np.sin(2.0 * dt))
    )


def p_source_resonant(j, t):
    """cos^4(Jt / sqrt(2)), the source probability at zero detuning."""
    return np.cos(np.asarray(j, dtype=float) * np.asarray(t, dtype=float) / SQRT2) ** 4


def p_drain_resonant(j, t):
    """sin^4(Jt / sqrt(2)); reaches 1 at Jt = pi / sqrt(2)."""
    return np.sin(np.asarray(j, dtype=float) * np.asarray(t, dtype=float) / SQRT2) ** 4


def drain_amplitude_analytic(j, delta, t):
    """<ddu|U(t)|udd> at omega0 = 0."""
    j, delta, big_delta, coupled = _rabi(j, delta)
    t = np.asarray(t, dtype=float)
    amplitude = 0.5 * (_symmetric_amplitude(delta, big_delta, t) - np.exp(1j * delta * t))
    return np.where(coupled, amplitude, 0j)


def p_drain_analytic(j, delta, t):
    """(1/4) |cos(Dt) + i (d/D) sin(Dt) - exp(i d t)|^2"""
    return np.abs(drain_amplitude_analytic(j, delta, t)) ** 2


def p_gate_analytic(j, delta, t):
    """(J^2 / D^2) sin^2(Dt)"""
    j, delta, big_delta, coupled = _rabi(j, delta)
    t = np.asarray(t, dtype=float)
    return np.where(coupled, (j / big_delta) ** 2 * np.sin(big_delta * t) ** 2, 0.0)


def all_down_phase(omega0, delta, t):
    """<ddd|U(t)|ddd> = exp(i (3 omega0 + delta) t)"""
    return np.exp(1j * (3.0 * np.asarray(omega0, dtype=float) + np.asarray(delta, dtype=float)) * np.asarray(t, dtype=float))


def survival_probability_analytic(alpha, beta, j, delta, t, omega0=0.0):
    """
    |<psi0|psi(t)>|^2 for psi0 = alpha|udd> + beta|ddd>, including the
    relative phase between the one-excitation and all-down components.
    """
    t = np.asarray(t, dtype=float)
    sector_phase = np.exp(1j * np.asarray(omega0, dtype=float) * t)
    overlap = (
        abs(alpha) ** 2 * sector_phase * source_amplitude_analytic(j, delta, t)
        + abs(beta) ** 2 * all_down_phase(omega0, delta, t)
    )
    return np.abs(overlap) ** 2
