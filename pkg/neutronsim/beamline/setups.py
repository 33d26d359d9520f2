"""Preset preparations and analysis chains.

Preparations (inside the interferometer, after the splitter):
    GHZ:    RF(pi, m=1) in path II
    W_asym: RF(pi, m=2), RF(pi/2, m=1) in path I; RF(pi, m=1) in path II
    W_sym:  W_asym plus an absorber of transmission t in path II

Analysis chains are appended after the preparation; the phase shifter of the
coherence scans sits in path II, the rest acts on the recombined beam.

External functions:
    preparation_config, analysis_chain, measurement_config, reference_config

Usage:
> config = measurement_config(preparation_config('W_sym'), 'coherence_ab', 0.)
"""

import numpy as np

from neutronsim.beamline import components as cmp
from neutronsim.states.targets import TARGET_KINDS

CHAIN_KINDS = ('plain', 'spin_flip_pi', 'coherence_ab', 'coherence_ac',
               'coherence_bc', 'coherence_ghz')
SCANNED_CHAINS = CHAIN_KINDS[2:]
# Chains whose contrast comes from path interference and is divided by the
# reference contrast of the bare interferometer.
REFERENCED_CHAINS = ('coherence_ab', 'coherence_ac', 'coherence_ghz')

DEFAULT_TRANSMISSION = .5


def _flip(theta, delta):
    """Flip angle under a proportional angle error delta (pi -> pi - delta)."""
    return theta*(1 - delta/np.pi)


def preparation_config(kind, delta=0., p=0., transmission=DEFAULT_TRANSMISSION,
                       visibility=1.):
    """Beamline preparing one of the target states.

    Arguments:
        kind: One of 'GHZ', 'W_sym', 'W_asym'
        delta: Flip-angle error; every in-path RF angle theta becomes
            theta*(1 - delta/pi)
        p: Path dephasing strength in [0, 1]
        transmission: Absorber transmission for W_sym
        visibility: Instrument visibility in (0, 1]

    Returns: BeamlineConfig
    """
    if kind not in TARGET_KINDS:
        raise ValueError('State kind {!r} not recognized; expecting one of '
                         '{}.'.format(kind, TARGET_KINDS))
    if delta < 0:
        raise ValueError('Flip-angle error must be nonnegative, got '
                         '{}.'.format(delta))
    parts = [cmp.splitter()]
    if kind.startswith('W'):
        parts += [cmp.rf_flipper('path_I', _flip(np.pi, delta), 2),
                  cmp.rf_flipper('path_I', _flip(np.pi/2, delta), 1)]
    parts.append(cmp.rf_flipper('path_II', _flip(np.pi, delta), 1))
    if kind == 'W_sym':
        parts.append(cmp.absorber('path_II', transmission))
    if p > 0:
        parts.append(cmp.dephaser('both', p))
    return cmp.BeamlineConfig(tuple(parts), visibility=visibility)


def analysis_chain(kind, scan_phase=0.):
    """Components appended to a preparation for one measurement mode.

    Arguments:
        kind: One of CHAIN_KINDS
        scan_phase: chi (phase shifter) for the ab, ac and ghz chains, phi
            (spin phase) for the bc chain; ignored otherwise

    Returns: Tuple of Components
    """
    if kind == 'plain':
        return (cmp.supermirror(),)
    if kind == 'spin_flip_pi':
        return (cmp.rf_flipper('post_recombination', np.pi, 1),
                cmp.supermirror())
    if kind == 'coherence_ab':
        return (cmp.phase_shifter(scan_phase),
                cmp.dc_flipper('post_recombination', np.pi/2),
                cmp.supermirror())
    if kind == 'coherence_ac':
        return (cmp.phase_shifter(scan_phase),
                cmp.rf_flipper('post_recombination', np.pi/2, 1),
                cmp.dc_flipper('post_recombination', np.pi/2),
                cmp.supermirror())
    if kind == 'coherence_bc':
        return (cmp.spin_phase_shifter(scan_phase),
                cmp.rf_flipper('post_recombination', np.pi/2, 1),
                cmp.supermirror())
    if kind == 'coherence_ghz':
        return (cmp.phase_shifter(scan_phase),
                cmp.rf_flipper('post_recombination', np.pi/2, 1),
                cmp.supermirror())
    raise ValueError('Analysis chain {!r} not recognized; expecting one of '
                     '{}.'.format(kind, CHAIN_KINDS))


def measurement_config(preparation, chain_kind, scan_phase=0., blocked=None):
    """Preparation plus analysis chain, optionally with one path blocked."""
    config = preparation
    if blocked is not None:
        config = config.with_blocked(blocked)
    return config.extended(analysis_chain(chain_kind, scan_phase))


def reference_config(preparation, chain_kind, scan_phase=0., blocked=None):
    """Reference measurement for a chain.

    Contrast references use the bare interferometer; intensity references
    keep the preparation with its in-path flippers switched off.
    """
    if chain_kind in SCANNED_CHAINS:
        base = preparation.empty()
    else:
        base = preparation.flippers_off()
    return measurement_config(base, chain_kind, scan_phase, blocked)
