"""Run a full simulated measurement campaign and calibrate noise parameters.

A campaign prepares one of the target states, runs the intensity and phase
scans that extraction needs, reconstructs the accessible matrix elements and
evaluates the witnesses on them.

External classes:
    Campaign, CampaignReport

External functions:
    run_campaign

Usage:
> campaign = Campaign(poisson=True, seed=3)
> report = campaign.run('W_sym', p=.5)
> report.witness('W_scaled').value
> campaign.calibrate('delta', .985, 'GHZ')

Campaign defaults are read from default_specs.json and overridden by keyword
specs, or by a different file passed as specs_filename.
"""

from dataclasses import dataclass, field
import json
import logging
import os

import dask
import numpy as np
from scipy import optimize

from neutronsim.beamline import setups
from neutronsim.beamline.interferometer import run_beamline
from neutronsim.experiment import extraction
from neutronsim.experiment.fitting import phase_grid
from neutronsim.experiment.scans import simulate_intensity, simulate_scan
from neutronsim.states.channels import fidelity
from neutronsim.states.targets import TARGET_KINDS, make_target
from neutronsim.witnesses.nonlinear import (
    fidelity_witness, witness_from_elements)

logger = logging.getLogger(__name__)

SPECS_FILE = os.path.join(os.path.dirname(__file__), 'default_specs.json')

# name: (chain kind, blocked path, reference)
RUNS = {
    'open_I': ('plain', 'path_II', False),
    'open_I_flip': ('spin_flip_pi', 'path_II', False),
    'open_I_ref': ('plain', 'path_II', True),
    'open_II': ('plain', 'path_I', False),
    'open_II_ref': ('plain', 'path_I', True),
    'coherence_ab': ('coherence_ab', None, False),
    'coherence_ab_ref': ('coherence_ab', None, True),
    'coherence_ac': ('coherence_ac', None, False),
    'coherence_ac_ref': ('coherence_ac', None, True),
    'coherence_bc': ('coherence_bc', None, False),
    'coherence_ghz': ('coherence_ghz', None, False),
    'coherence_ghz_ref': ('coherence_ghz', None, True),
}
RUN_ORDER = tuple(sorted(RUNS))

W_PAIRS = (('101', '011'), ('101', '002'), ('011', '002'))
GHZ_PAIRS = (('010', '101'),)
PARAMETERS = ('delta', 'p')


class CalibrationError(ValueError):
    """Target fidelity unreachable, or fidelity not monotone over the
    bracket."""


@dataclass(frozen=True)
class CampaignReport:
    """Outcome of one campaign.

    Attributes:
        kind: State kind
        parameters: delta, p, visibility, counts per point, seed, poisson
        result: CampaignResult of extracted elements
        witnesses: Tuple of WitnessReports from the extracted elements
        fidelity: Fidelity of the simulated prepared state to its target
        fidelity_witness: Fidelity witness of the prepared state; positive
            flags genuine multipartite entanglement
        runs: Map run name -> summary dict
    """
    kind: str
    parameters: dict
    result: object
    witnesses: tuple
    fidelity: float
    fidelity_witness: float
    runs: dict = field(default_factory=dict)

    def witness(self, name, k=None):
        for report in self.witnesses:
            if report.name == name and report.k == k:
                return report
        raise KeyError('No {} witness{} in the report.'.format(
            name, '' if k is None else ' with k={}'.format(k)))

    def to_dict(self):
        return {
            'kind': self.kind,
            'parameters': dict(self.parameters),
            'elements': self.result.to_dict(),
            'witnesses': [w.to_dict() for w in self.witnesses],
            'fidelity': self.fidelity,
            'fidelity_witness': self.fidelity_witness,
            'runs': dict(self.runs)
        }


def _best_ksep(elements, k, pairs):
    reports = [witness_from_elements(elements, 'KSEP', k=k, phi_pair=pair)
               for pair in pairs]
    return max(reports, key=lambda report: report.value)


def evaluate_witnesses(result):
    """Witness reports over the elements of a CampaignResult."""
    elements = result.elements()
    if result.family == 'GHZ':
        reports = [witness_from_elements(elements, 'GHZ')]
        pairs = GHZ_PAIRS
    else:
        reports = [witness_from_elements(elements, 'W_raw'),
                   witness_from_elements(elements, 'W_scaled')]
        pairs = W_PAIRS
    reports += [_best_ksep(elements, k, pairs) for k in (2, 3)]
    return tuple(reports)


class Campaign(object):
    """Simulated measurement campaign with configurable counting.

    Attributes:
        specs: Dict of campaign specs (see default_specs.json)

    External methods:
        preparation: Beamline preparing a state kind.
        prepared_fidelity: Fidelity of the simulated preparation.
        runs: Simulate every run extraction needs.
        run: Full campaign returning a CampaignReport.
        calibrate: Fit delta or p to a target fidelity.
    """

    def __init__(self, specs_filename=SPECS_FILE, **specs):
        with open(specs_filename, 'r') as f:
            self.specs = json.load(f)
        self.specs.update(specs)
        if self.specs['counts_per_point'] <= 0:
            raise ValueError('counts_per_point must be positive, got '
                             '{}.'.format(self.specs['counts_per_point']))
        if int(self.specs['threads']) < 1:
            raise ValueError('threads must be at least 1, got {}.'.format(
                self.specs['threads']))

    def preparation(self, kind, delta=0., p=0.):
        return setups.preparation_config(
            kind, delta=delta, p=p,
            transmission=self.specs['absorber_transmission'],
            visibility=self.specs['visibility'])

    def prepared_fidelity(self, kind, delta=0., p=0.):
        """Fidelity of the prepared state (no analysis chain) to its target."""
        rho = run_beamline(self.preparation(kind, delta, p)).state()
        return fidelity(rho, make_target(kind))

    def _counts(self, kind):
        counts = self.specs['counts_per_point']
        if kind == 'W_sym':
            counts *= self.specs['absorber_count_factor']
        return counts

    def _simulate(self, preparation, name, counts, seed):
        chain, blocked, reference = RUNS[name]
        if chain in setups.SCANNED_CHAINS:
            return simulate_scan(
                preparation, chain, phase_grid(self.specs['scan_points']),
                counts_per_point=counts, poisson=self.specs['poisson'],
                seed=seed, repeats=self.specs['scan_repeats'],
                reference=reference)
        return simulate_intensity(
            preparation, chain, blocked=blocked, counts_per_point=counts,
            poisson=self.specs['poisson'], seed=seed,
            repeats=self.specs['population_repeats'], reference=reference)

    def runs(self, kind, delta=0., p=0.):
        """Simulate every run extraction needs for kind.

        Each run draws from its own child of the campaign seed, so results
        do not depend on the thread count.

        Returns: Map run name -> ScanResult or IntensityResult
        """
        preparation = self.preparation(kind, delta, p)
        counts = self._counts(kind)
        seeds = dict(zip(RUN_ORDER, np.random.SeedSequence(
            self.specs['seed']).spawn(len(RUN_ORDER))))
        names = extraction.required_runs(extraction.family_of(kind))
        threads = int(self.specs['threads'])
        if threads > 1:
            tasks = [dask.delayed(self._simulate)(preparation, name, counts,
                                                  seeds[name])
                     for name in names]
            results = dask.compute(*tasks, scheduler='threads',
                                   num_workers=threads)
        else:
            results = [self._simulate(preparation, name, counts, seeds[name])
                       for name in names]
        return dict(zip(names, results))

    def run(self, kind, delta=0., p=0.):
        """Run the campaign for one state kind.

        Arguments:
            kind: One of 'GHZ', 'W_sym', 'W_asym'
            delta: Flip-angle error of the in-path RF flippers
            p: Path dephasing strength

        Returns: CampaignReport
        """
        if kind not in TARGET_KINDS:
            raise ValueError('State kind {!r} not recognized; expecting one '
                             'of {}.'.format(kind, TARGET_KINDS))
        runs = self.runs(kind, delta, p)
        result = extraction.extract_elements(runs,
                                             extraction.family_of(kind))
        parameters = {'delta': delta, 'p': p,
                      'visibility': self.specs['visibility'],
                      'counts_per_point': self._counts(kind),
                      'poisson': self.specs['poisson'],
                      'seed': self.specs['seed']}
        rho = run_beamline(self.preparation(kind, delta, p)).state()
        target = make_target(kind)
        report = CampaignReport(
            kind, parameters, result, evaluate_witnesses(result),
            fidelity(rho, target), fidelity_witness(rho, target),
            {name: run.summary() for name, run in runs.items()})
        logger.info('Campaign %s (delta=%.4g, p=%.4g): fidelity %.4f.', kind,
                    delta, p, report.fidelity)
        return report

    def calibrate(self, parameter, target, kind, fixed=0.):
        """Find delta or p at which the prepared fidelity equals target.

        Arguments:
            parameter: 'delta' or 'p'
            target: Fidelity in (0, 1]
            kind: State kind
            fixed: Value held for the other parameter

        Returns: The calibrated parameter value

        Raises CalibrationError: If the fidelity is not monotonically
            decreasing over the bracket, or target lies outside its range.
        """
        if parameter not in PARAMETERS:
            raise ValueError('Parameter {!r} not recognized; expecting one of '
                             '{}.'.format(parameter, PARAMETERS))
        if not 0 < target <= 1:
            raise ValueError('Target fidelity must lie in (0, 1], got '
                             '{}.'.format(target))
        tol = self.specs['calibration_tol']
        lo, hi = self.specs['{}_bracket'.format(parameter)]

        def fidelity_at(x):
            if parameter == 'delta':
                return self.prepared_fidelity(kind, delta=x, p=fixed)
            return self.prepared_fidelity(kind, delta=fixed, p=x)

        grid = np.linspace(lo, hi, self.specs['monotonicity_points'])
        values = np.array([fidelity_at(x) for x in grid])
        if np.any(np.diff(values) > 1e-12):
            raise CalibrationError(
                'Fidelity of {} is not monotone in {} over [{}, {}].'.format(
                    kind, parameter, lo, hi))
        if target >= values[0] - tol:
            return float(lo)
        if target < values[-1] - tol:
            raise CalibrationError(
                'Target fidelity {} unreachable for {}: {} in [{}, {}] gives '
                'fidelities down to {:.4f}.'.format(target, kind, parameter,
                                                    lo, hi, values[-1]))
        if target <= values[-1]:
            return float(hi)
        value = optimize.bisect(lambda x: fidelity_at(x) - target, lo, hi,
                                xtol=1e-12)
        logger.info('Calibrated %s = %.6f for %s at fidelity %.4f.',
                    parameter, value, kind, target)
        return float(value)


def run_campaign(kind, p=0., visibility=1., delta=0., counts_per_point=1000,
                 seed=0, poisson=False, **specs):
    """Build a Campaign from specs and run it once.

    Returns: CampaignReport
    """
    campaign = Campaign(visibility=visibility,
                        counts_per_point=counts_per_point, seed=seed,
                        poisson=poisson, **specs)
    return campaign.run(kind, delta=delta, p=p)
