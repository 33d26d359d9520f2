"""Operator-level run of a beamline configuration.

The state is carried as an unnormalized 12 x 12 matrix; absorbers, blockers
and the supermirror remove probability mass and the remaining trace is the
survival probability. Path-located operators act as controlled operations,
    P_q ⊗ U + P_{1-q} ⊗ 1,
and post-recombination operators as 1_path ⊗ U.

External classes:
    BeamOutput

External functions:
    run_beamline, detector_probability

Usage:
> from neutronsim.beamline import setups
> output = run_beamline(setups.preparation_config('GHZ'))
> output.survival
1.0
"""

from dataclasses import dataclass
import logging

import numpy as np

from neutronsim.beamline import flippers
from neutronsim.beamline.components import PATH_INDEX
from neutronsim.hilbert.tensor_core import DIM, DIMS, DensityMatrix
from neutronsim.states.channels import scale_path_coherence

logger = logging.getLogger(__name__)

PATH_DIM = DIMS[0]
LOCAL_DIM = DIM // PATH_DIM
SURVIVAL_FLOOR = 1e-15
SUPPORT_TOL = 1e-14

_PLUS = np.ones(PATH_DIM, dtype=complex)/np.sqrt(PATH_DIM)


class DegenerateOutputError(ValueError):
    """No probability mass survives the beamline."""


@dataclass(frozen=True)
class BeamOutput:
    """Post-selected state and surviving probability mass.

    Attributes:
        rho: Renormalized DensityMatrix, or None when nothing survives
        survival: Probability in [0, 1] that the neutron reaches the detector
        pending_visibility: Coherence factor still to be applied at
            recombination (the beam had no post-recombination component)
    """
    rho: object
    survival: float
    pending_visibility: float = 1.

    @property
    def degenerate(self):
        return self.rho is None

    def state(self):
        if self.rho is None:
            raise DegenerateOutputError(
                'Beamline output is degenerate (survival {:.3g}); no '
                'renormalized state exists.'.format(self.survival))
        return self.rho


def _path_projector(q):
    projector = np.zeros((PATH_DIM, PATH_DIM), dtype=complex)
    projector[q, q] = 1
    return projector


def _controlled(q, local):
    """Apply a spin-energy operator in path q only."""
    return (np.kron(_path_projector(q), local) +
            np.kron(_path_projector(1 - q), np.eye(LOCAL_DIM)))


def _spin_local(spin_operator):
    return np.kron(spin_operator, np.eye(flippers.ENERGY_DIM))


def _embed(location, local):
    if location in PATH_INDEX:
        return _controlled(PATH_INDEX[location], local)
    return np.kron(np.eye(PATH_DIM), local)


def _check_truncation(entries, component):
    """Raise TruncationError if an RF flipper would push population off the
    energy ladder."""
    theta = component.params['flip_angle']
    m = component.params['frequency_multiplier']
    if abs(np.sin(theta/2)) < SUPPORT_TOL:
        return
    paths = ([PATH_INDEX[component.location]]
             if component.location in PATH_INDEX else range(PATH_DIM))
    diagonal = np.diag(entries).real
    for q in paths:
        for level in flippers.truncated_levels(m):
            weight = diagonal[q*LOCAL_DIM + level]
            if weight > SUPPORT_TOL:
                raise flippers.TruncationError(
                    'RF flipper (m={}) at {} acts on spin-energy level {} '
                    'with weight {:.3g}; the transition leaves the energy '
                    'ladder.'.format(m, component.location, level, weight))


def _operator(component):
    """Return the 12 x 12 operator of a component, or None for channels."""
    kind, params = component.kind, component.params
    if kind == 'rf_flipper':
        local = flippers.rf_flipper_unitary(params['flip_angle'],
                                            params['frequency_multiplier'])
        return _embed(component.location, local)
    if kind == 'dc_flipper':
        local = _spin_local(flippers.dc_flipper_unitary(params['flip_angle']))
        return _embed(component.location, local)
    if kind == 'spin_phase_shifter':
        local = _spin_local(flippers.spin_phase_unitary(params['phase']))
        if component.location == 'both':
            return np.kron(np.eye(PATH_DIM), local)
        return _embed(component.location, local)
    if kind == 'phase_shifter':
        return np.kron(np.diag([1, np.exp(1j*params['phase'])]),
                       np.eye(LOCAL_DIM))
    if kind == 'absorber':
        return _controlled(PATH_INDEX[component.location],
                           np.sqrt(params['transmission'])*np.eye(LOCAL_DIM))
    if kind == 'blocker':
        return _controlled(PATH_INDEX[component.location],
                           np.zeros((LOCAL_DIM, LOCAL_DIM)))
    if kind == 'supermirror':
        up = np.diag([0, 1]).astype(complex)
        return np.kron(np.eye(PATH_DIM), _spin_local(up))
    return None


def split_state():
    """The state right after the splitter: (|I> + |II>)/sqrt(2) ⊗ |up, 0>."""
    local = np.zeros(LOCAL_DIM, dtype=complex)
    local[flippers.UP*flippers.ENERGY_DIM] = 1
    vector = np.kron(_PLUS, local)
    return np.outer(vector, vector.conj())


def run_beamline(config):
    """Propagate the beam through config.

    Arguments:
        config: BeamlineConfig

    Returns: BeamOutput

    Raises: TruncationError if an RF flipper acts on population it cannot
        move within the energy ladder.
    """
    entries = split_state()
    recombined = False
    for component in config.components[1:]:
        if not component.in_interferometer and not recombined:
            entries = scale_path_coherence(entries, config.visibility)
            recombined = True
        if component.kind == 'dephaser':
            entries = scale_path_coherence(
                entries, 1 - component.params['dephasing'])
            continue
        if component.kind == 'rf_flipper':
            _check_truncation(entries, component)
        operator = _operator(component)
        entries = operator @ entries @ operator.conj().T
        logger.debug('%s at %s: trace %.6f', component.kind,
                     component.location, np.trace(entries).real)
    survival = float(np.clip(np.trace(entries).real, 0., 1.))
    pending = 1. if recombined else config.visibility
    if survival < SURVIVAL_FLOOR:
        logger.info('Beamline output is degenerate (survival %.3g).',
                    survival)
        return BeamOutput(None, survival, pending)
    entries = (entries + entries.conj().T)/(2*survival)
    return BeamOutput(DensityMatrix(entries), survival, pending)


def path_reduced(entries):
    """Trace out spin and energy, leaving the 2 x 2 path matrix."""
    blocks = np.asarray(entries).reshape(PATH_DIM, LOCAL_DIM,
                                         PATH_DIM, LOCAL_DIM)
    return np.einsum('aibi->ab', blocks)


def detector_probability(output):
    """Probability of a count in the O-beam detector.

    The O-port projects the path onto (|I> + |II>)/sqrt(2); spin and energy
    are not resolved.
    """
    if output.degenerate:
        return 0.
    entries = scale_path_coherence(output.rho.entries,
                                   output.pending_visibility)
    reduced = path_reduced(entries)
    value = np.vdot(_PLUS, reduced @ _PLUS).real
    return float(np.clip(output.survival*value, 0., 1.))
