"""Matrix elements from intensity runs and fitted contrasts.

Runs by name (blocked path noted as the path left open):
    open_I        path II blocked, plain chain
    open_I_flip   path II blocked, spin_flip_pi chain
    open_I_ref    path II blocked, plain chain, flippers off
    open_II       path I blocked, plain chain
    open_II_ref   path I blocked, plain chain, flippers off
    coherence_<x>, coherence_<x>_ref   phase scans and their references

With T = R_I + R_II the summed references,
    <101|rho|101> = (R_II - I_II)/T
    <011|rho|011> = I_up/T,   <002|rho|002> = I_down/T   (W)
    <010|rho|010> = I_up/T                                (GHZ)
and from the contrasts
    |<011|rho|101>| = C_ab/(2 C_ab^ref)
    |<002|rho|101>| = C_ac/C_ac^ref - |<011|rho|101>|
    |<002|rho|011>| = C_bc/2
    |<010|rho|101>| = C_ghz/(2 C_ghz^ref)

External classes:
    CampaignResult

External functions:
    required_runs, extract_elements
"""

from dataclasses import dataclass, field
import logging

import numpy as np

logger = logging.getLogger(__name__)

FAMILIES = ('W', 'GHZ')
POPULATION_RUNS = ('open_I', 'open_I_ref', 'open_II', 'open_II_ref')
REQUIRED_RUNS = {
    'W': POPULATION_RUNS + ('open_I_flip', 'coherence_ab', 'coherence_ab_ref',
                            'coherence_ac', 'coherence_ac_ref',
                            'coherence_bc'),
    'GHZ': POPULATION_RUNS + ('coherence_ghz', 'coherence_ghz_ref'),
}
MAX_MAGNITUDE = .5
STEP = 1e-7


def family_of(kind):
    """'GHZ' for the GHZ state, 'W' for both W states."""
    return 'GHZ' if kind == 'GHZ' else 'W'


def required_runs(family):
    if family not in FAMILIES:
        raise ValueError('State family {!r} not recognized; expecting one of '
                         '{}.'.format(family, FAMILIES))
    return REQUIRED_RUNS[family]


@dataclass(frozen=True)
class CampaignResult:
    """Extracted populations and coherence magnitudes.

    Attributes:
        family: 'W' or 'GHZ'
        populations: Map ket string -> (value, err)
        cross_magnitudes: Map (ket, ket) -> (value, err)
        reference_contrasts: Map chain kind -> fitted reference contrast
    """
    family: str
    populations: dict
    cross_magnitudes: dict
    reference_contrasts: dict = field(default_factory=dict)

    def elements(self):
        """Element map in the form witness_from_elements expects."""
        table = {(label, label): value
                 for label, value in self.populations.items()}
        table.update(self.cross_magnitudes)
        return table

    def to_dict(self):
        return {
            'family': self.family,
            'populations': {k: list(v) for k, v in self.populations.items()},
            'cross_magnitudes': {'{}|{}'.format(*k): list(v)
                                 for k, v in self.cross_magnitudes.items()},
            'reference_contrasts': dict(self.reference_contrasts)
        }


def _propagate(func, values, errors):
    """Value and first-order quadrature error of func(*values)."""
    values = np.asarray(values, dtype=float)
    result = func(*values)
    variance = 0.
    for n, err in enumerate(errors):
        if err <= 0:
            continue
        step = STEP*max(abs(values[n]), 1.)
        up, down = values.copy(), values.copy()
        up[n] += step
        down[n] -= step
        variance += ((func(*up) - func(*down))/(2*step)*err)**2
    return float(result), float(np.sqrt(variance))


def _clip(name, value, err, upper):
    clipped = float(np.clip(value, 0., upper))
    # Excess within the counting error is expected noise.
    if abs(clipped - value) > err:
        logger.warning('Extracted %s = %.4g clipped to %.4g.', name, value,
                       clipped)
    return clipped, err


def _intensities(runs, names):
    return ([runs[n].counts for n in names], [runs[n].err for n in names])


def _populations(runs, family):
    values, errors = _intensities(runs, ('open_II', 'open_II_ref',
                                         'open_I_ref'))
    pops = {'101': _propagate(lambda i2, r2, r1: (r2 - i2)/(r1 + r2),
                              values, errors)}
    upper = {'W': (('011', 'open_I'), ('002', 'open_I_flip')),
             'GHZ': (('010', 'open_I'),)}[family]
    for label, name in upper:
        values, errors = _intensities(runs, (name, 'open_I_ref',
                                             'open_II_ref'))
        pops[label] = _propagate(lambda i, r1, r2: i/(r1 + r2), values,
                                 errors)
    return {label: _clip('<{0}|rho|{0}>'.format(label), *entry, upper=1.)
            for label, entry in pops.items()}


def _reference(runs, kind):
    contrast = runs[kind + '_ref'].contrast
    if contrast == 0:
        raise ZeroDivisionError('Reference contrast of {} is zero.'.format(
            kind))
    return contrast


def _contrast(runs, name):
    return runs[name].contrast, runs[name].contrast_err


def _cross_terms(runs, family):
    if family == 'GHZ':
        _reference(runs, 'coherence_ghz')
        c, err = _contrast(runs, 'coherence_ghz')
        cref, err_ref = _contrast(runs, 'coherence_ghz_ref')
        cross = {('010', '101'): _propagate(lambda c, r: c/(2*r), (c, cref),
                                            (err, err_ref))}
    else:
        _reference(runs, 'coherence_ab')
        _reference(runs, 'coherence_ac')
        values = [v for name in ('coherence_ab', 'coherence_ab_ref',
                                 'coherence_ac', 'coherence_ac_ref')
                  for v in _contrast(runs, name)]
        contrasts, errors = values[::2], values[1::2]
        c_bc, err_bc = _contrast(runs, 'coherence_bc')
        cross = {
            ('101', '011'): _propagate(lambda a, ra, b, rb: a/(2*ra),
                                       contrasts, errors),
            ('101', '002'): _propagate(lambda a, ra, b, rb: b/rb - a/(2*ra),
                                       contrasts, errors),
            ('011', '002'): _propagate(lambda c: c/2, [c_bc], [err_bc]),
        }
    return {pair: _clip('|<{}|rho|{}>|'.format(*pair), *entry,
                        upper=MAX_MAGNITUDE)
            for pair, entry in cross.items()}


def extract_elements(runs, family):
    """Reconstruct the accessible matrix elements of a campaign.

    Arguments:
        runs: Map run name -> ScanResult or IntensityResult (see module doc)
        family: 'W' or 'GHZ'

    Returns: CampaignResult

    Raises:
        KeyError: Naming the first missing run
        ZeroDivisionError: A reference contrast is zero
    """
    for name in required_runs(family):
        if name not in runs:
            raise KeyError('Campaign is missing the {!r} run.'.format(name))
    references = {name[:-len('_ref')]: runs[name].contrast
                  for name in runs
                  if name.startswith('coherence') and name.endswith('_ref')}
    return CampaignResult(family, _populations(runs, family),
                          _cross_terms(runs, family), references)
