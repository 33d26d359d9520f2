"""Phase scans and intensity runs over a prepared beamline.

A phase scan runs preparation + analysis chain at every grid phase, turns the
detector probability into N*P expected counts (Poisson draws on request),
sums the repeats and fits the sinusoid. An intensity run does the same for a
single setting without a scan.

External classes:
    ScanResult, IntensityResult

External functions:
    scan_probabilities, simulate_scan, simulate_intensity

Usage:
> from neutronsim.beamline.setups import preparation_config
> scan = simulate_scan(preparation_config('W_asym'), 'coherence_ab')
> scan.contrast
0.7071...
"""

from dataclasses import dataclass

import numpy as np

from neutronsim.beamline import setups
from neutronsim.beamline.interferometer import (
    detector_probability, run_beamline)
from neutronsim.experiment.fitting import check_grid, fit_sinusoid, phase_grid


@dataclass(frozen=True)
class ScanResult:
    """One fitted phase scan.

    Attributes:
        chain_kind: Analysis chain used
        phases: Grid in radians
        counts: Counts per phase, summed over repeats
        fit: SinusoidFit (mean A, amplitude B, offset delta)
        repeats: Number of summed repeats
        reference: True for a reference scan
    """
    chain_kind: str
    phases: np.ndarray
    counts: np.ndarray
    fit: object
    repeats: int = 1
    reference: bool = False

    @property
    def contrast(self):
        return self.fit.contrast

    @property
    def contrast_err(self):
        return self.fit.contrast_err

    def table(self):
        """Rows (phase_rad, counts, fit_value) for CSV output."""
        return np.column_stack([self.phases, self.counts,
                                self.fit.evaluate(self.phases)])

    def summary(self):
        return {'chain': self.chain_kind, 'reference': self.reference,
                'repeats': self.repeats, 'mean': self.fit.mean,
                'amplitude': self.fit.amplitude, 'offset': self.fit.offset,
                'contrast': self.contrast, 'contrast_err': self.contrast_err}


@dataclass(frozen=True)
class IntensityResult:
    """Mean counts of repeated single-setting runs.

    Attributes:
        counts: Mean counts per repeat
        err: Standard error of the mean, sqrt(total)/repeats
        probability: Exact detector probability of the setting
    """
    chain_kind: str
    counts: float
    err: float
    probability: float
    blocked: str = None
    reference: bool = False

    def summary(self):
        return {'chain': self.chain_kind, 'blocked': self.blocked,
                'reference': self.reference, 'counts': self.counts,
                'err': self.err, 'probability': self.probability}


def _config(preparation, chain_kind, phase, blocked, reference):
    build = setups.reference_config if reference else setups.measurement_config
    return build(preparation, chain_kind, phase, blocked)


def scan_probabilities(preparation, chain_kind, phases, blocked=None,
                       reference=False):
    """Exact detector probability at each phase."""
    return np.array([
        detector_probability(run_beamline(
            _config(preparation, chain_kind, phase, blocked, reference)))
        for phase in phases])


def _draw(rng, expected, repeats, poisson):
    expected = np.broadcast_to(expected, (repeats,) + np.shape(expected))
    if poisson:
        return rng.poisson(expected).astype(float)
    return np.array(expected, dtype=float)


def simulate_scan(preparation, chain_kind, phases=None, counts_per_point=1000,
                  poisson=False, seed=None, repeats=1, reference=False):
    """Simulate and fit one phase scan.

    Arguments:
        preparation: BeamlineConfig of the prepared state
        chain_kind: One of the scanned analysis chains
        phases: Grid with at least 8 points over 2 pi; default 16 points
        counts_per_point: Expected neutrons N per point and repeat
        poisson: Draw counts instead of using N*P
        seed: Int, SeedSequence or None for the Poisson draws
        repeats: Independent repeats, summed before the fit
        reference: Run the bare-interferometer reference instead

    Returns: ScanResult
    """
    if chain_kind not in setups.SCANNED_CHAINS:
        raise ValueError('Chain {!r} has no phase scan; expecting one of '
                         '{}.'.format(chain_kind, setups.SCANNED_CHAINS))
    if counts_per_point <= 0:
        raise ValueError('Counts per point must be positive, got {}.'.format(
            counts_per_point))
    if repeats < 1:
        raise ValueError('Repeats must be at least 1, got {}.'.format(repeats))
    phases = phase_grid() if phases is None else np.asarray(phases, float)
    check_grid(phases)
    expected = counts_per_point*scan_probabilities(preparation, chain_kind,
                                                   phases, reference=reference)
    rng = np.random.default_rng(seed)
    counts = _draw(rng, expected, repeats, poisson).sum(axis=0)
    return ScanResult(chain_kind, phases, counts, fit_sinusoid(phases, counts),
                      repeats=repeats, reference=reference)


def simulate_intensity(preparation, chain_kind, blocked=None,
                       counts_per_point=1000, poisson=False, seed=None,
                       repeats=1, reference=False):
    """Simulate repeated counting at one fixed setting.

    Arguments:
        blocked: 'path_I', 'path_II' or None
        reference: Use the preparation with its in-path flippers off

    Returns: IntensityResult
    """
    if counts_per_point <= 0:
        raise ValueError('Counts per point must be positive, got {}.'.format(
            counts_per_point))
    if repeats < 1:
        raise ValueError('Repeats must be at least 1, got {}.'.format(repeats))
    probability = float(scan_probabilities(preparation, chain_kind, [0.],
                                           blocked, reference)[0])
    rng = np.random.default_rng(seed)
    draws = _draw(rng, counts_per_point*probability, repeats, poisson)
    total = float(draws.sum())
    return IntensityResult(chain_kind, total/repeats,
                           np.sqrt(max(total, 1.))/repeats, probability,
                           blocked=blocked, reference=reference)
