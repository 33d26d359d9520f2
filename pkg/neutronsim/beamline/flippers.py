"""Spin and spin-energy operators of the flippers and phase shifters.

Operators act on spin (2 x 2, basis down, up) or on spin ⊗ energy
(6 x 6, index spin*3 + energy).

RF flipper at m times the drive frequency, flip angle theta:
    |up, e>   -> cos(theta/2)|up, e> + i sin(theta/2)|down, e+m>
    |down, e> -> cos(theta/2)|down, e> + i sin(theta/2)|up, e-m>
Levels whose partner would leave the energy ladder 0..2 are left alone by the
matrix; applying a flipper to a state with support there is a TruncationError,
raised by the interferometer.

DC flipper: the same rotation on spin with no energy change.
"""

import numpy as np

from neutronsim.hilbert.tensor_core import DIMS

SPIN_DIM, ENERGY_DIM = DIMS[1], DIMS[2]
DOWN, UP = 0, 1
FREQUENCY_MULTIPLIERS = (1, 2)


class TruncationError(ValueError):
    """An RF transition would leave the three-level energy ladder."""


def _se_index(spin, energy):
    return spin*ENERGY_DIM + energy


def _check_multiplier(m):
    if m not in FREQUENCY_MULTIPLIERS:
        raise ValueError('Frequency multiplier must be one of {}, got '
                         '{!r}.'.format(FREQUENCY_MULTIPLIERS, m))


def rf_flipper_unitary(theta, m):
    """6 x 6 RF flipper operator on spin ⊗ energy."""
    _check_multiplier(m)
    c, s = np.cos(theta/2), np.sin(theta/2)
    unitary = np.eye(SPIN_DIM*ENERGY_DIM, dtype=complex)
    for e in range(ENERGY_DIM - m):
        up, down = _se_index(UP, e), _se_index(DOWN, e + m)
        unitary[up, up] = unitary[down, down] = c
        unitary[down, up] = unitary[up, down] = 1j*s
    return unitary


def truncated_levels(m):
    """Spin-energy indices an RF flipper at multiplier m cannot pair."""
    _check_multiplier(m)
    ups = [_se_index(UP, e) for e in range(ENERGY_DIM) if e + m >= ENERGY_DIM]
    downs = [_se_index(DOWN, e) for e in range(ENERGY_DIM) if e - m < 0]
    return sorted(ups + downs)


def dc_flipper_unitary(theta):
    """2 x 2 spin rotation without energy exchange."""
    c, s = np.cos(theta/2), np.sin(theta/2)
    return np.array([[c, 1j*s], [1j*s, c]], dtype=complex)


def spin_phase_unitary(phi):
    """Larmor accelerator: phase e^{i phi} on spin up."""
    return np.diag([1, np.exp(1j*phi)]).astype(complex)
