"""Path dephasing and fidelity.

The dephasing channel
    rho -> (1 - p) rho + p (D_0 rho D_0 + D_1 rho D_1),
with D_q the projector onto path q, scales every entry between different
path values by (1 - p) and leaves spin/energy coherences within a path intact.
"""

from dataclasses import dataclass

import numpy as np

from neutronsim.hilbert.tensor_core import (
    ALL_LABELS, DensityMatrix, PureState)

_PATHS = np.array([label.path for label in ALL_LABELS])
CROSS_PATH = _PATHS[:, None] != _PATHS[None, :]


@dataclass(frozen=True)
class DephasingStrength:
    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError('Dephasing strength must lie in [0, 1], got '
                             '{}.'.format(self.p))


def path_projector(q):
    """D_q as a 12 x 12 matrix."""
    return np.diag((_PATHS == q).astype(complex))


def scale_path_coherence(entries, factor):
    """Multiply the path-off-diagonal entries of a raw matrix by factor."""
    scaled = np.array(entries, dtype=complex)
    scaled[CROSS_PATH] *= factor
    return scaled


def path_dephase(rho, strength):
    """Apply the path dephasing channel.

    Arguments:
        rho: DensityMatrix
        strength: DephasingStrength or a float p in [0, 1]
    """
    if not isinstance(strength, DephasingStrength):
        strength = DephasingStrength(float(strength))
    return DensityMatrix(scale_path_coherence(rho.entries, 1 - strength.p))


def fidelity(rho, target):
    """Return <target|rho|target>, clipped to [0, 1]."""
    if not isinstance(target, PureState):
        target = PureState(target)
    value = np.vdot(target.amplitudes, rho.entries @ target.amplitudes).real
    return float(np.clip(value, 0., 1.))
