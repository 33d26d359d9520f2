"""Command line front end: states, witnesses, beamlines, scans, campaigns.

Usage:
> python -m neutronsim state --kind w --a 0.5774 --b 0.5774 --c 0.5774 -o wsym
> python -m neutronsim witness --builtin W_sym --dephase 1 --witness w
> python -m neutronsim simulate beamline.json -o out
> python -m neutronsim scan --builtin W_asym --chain coherence_ab -o ab
> python -m neutronsim campaign --kind GHZ --poisson --seed 3 -o ghz
> python -m neutronsim reproduce --table I [--ideal | --paper]
> python -m neutronsim sample-test --samples 10000 --seed 0 --threads 4

Every command writes its outputs under the -o prefix plus a manifest
<prefix>-manifest.json recording the command, parameters, seed, version and
output paths. JSON is written with sorted keys; CSV floats with 12
significant digits.
"""

import argparse
from dataclasses import asdict, dataclass, field
import json
import logging
import sys

import numpy as np

from neutronsim import __version__
from neutronsim.beamline import setups
from neutronsim.beamline.components import BeamlineConfig
from neutronsim.beamline.interferometer import (
    detector_probability, run_beamline)
from neutronsim.experiment import tables
from neutronsim.experiment.campaign import Campaign, SPECS_FILE
from neutronsim.experiment.fitting import phase_grid
from neutronsim.experiment.scans import simulate_scan
from neutronsim.hilbert.tensor_core import (
    ALL_LABELS, DensityMatrix, PureState)
from neutronsim.states.channels import path_dephase
from neutronsim.states.targets import (
    TARGET_KINDS, GHZParams, WParams, make_ghz, make_target, make_w)
from neutronsim.witnesses.nonlinear import (
    PHI_PAIRS, best_ksep, exact_report)
from neutronsim.witnesses.reports import WitnessReport
from neutronsim.witnesses.suites import SUITES, run_suites

SCHEMA_VERSION = 1
CSV_FORMAT = '%.12g'
DEFAULT_TOL = 1e-3

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: object = None
    version: str = __version__
    outputs: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def write(self, prefix):
        path = '{}-manifest.json'.format(prefix)
        self.outputs.append(path)
        _write_json(path, asdict(self))
        return path


def _write_json(path, document):
    with open(path, 'w') as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write('\n')


def _document(payload):
    payload = dict(payload)
    payload['schema_version'] = SCHEMA_VERSION
    return payload


def _matrix(entries):
    return {'real': np.real(entries).tolist(),
            'imag': np.imag(entries).tolist()}


# State input/output

def _normalized(values, tol, name):
    values = np.array(values, dtype=float)
    if np.any(values < 0):
        raise ValueError('{} amplitudes must be nonnegative, got {}.'.format(
            name, values.tolist()))
    norm = np.sqrt(np.sum(values**2))
    if abs(norm**2 - 1) > tol:
        raise ValueError('{} amplitudes are not normalized: sum of squares '
                         '{:.6g} (tolerance {}).'.format(name, norm**2, tol))
    return values/norm


def build_state(kind, a=None, b=None, c=None, d=None, e=None, tol=DEFAULT_TOL):
    """Target state from real command-line amplitudes.

    Amplitudes within tol of normalization are renormalized exactly.
    """
    if kind == 'w':
        if None in (a, b, c):
            raise ValueError('A W state needs --a, --b and --c.')
        return make_w(WParams(*_normalized([a, b, c], tol, 'W')))
    if kind == 'ghz':
        if None in (d, e):
            raise ValueError('A GHZ state needs --d and --e.')
        return make_ghz(GHZParams(*_normalized([d, e], tol, 'GHZ')))
    raise ValueError('State kind {!r} not recognized; expecting w or '
                     'ghz.'.format(kind))


def state_document(state):
    return _document({
        'labels': [str(label) for label in ALL_LABELS],
        'amplitudes': {'real': state.amplitudes.real.tolist(),
                       'imag': state.amplitudes.imag.tolist()},
        'density': _matrix(state.density().entries)
    })


def load_state(path):
    """DensityMatrix from a state or density JSON file."""
    with open(path, 'r') as f:
        document = json.load(f)
    if 'density' in document:
        entries = (np.array(document['density']['real']) +
                   1j*np.array(document['density']['imag']))
        return DensityMatrix(entries)
    if 'amplitudes' in document:
        amplitudes = (np.array(document['amplitudes']['real']) +
                      1j*np.array(document['amplitudes']['imag']))
        return PureState(amplitudes).density()
    raise ValueError('File {} holds neither amplitudes nor a density '
                     'matrix.'.format(path))


# Commands

def cmd_state(args):
    state = build_state(args.kind, args.a, args.b, args.c, args.d, args.e,
                        args.tol)
    path = '{}.json'.format(args.output)
    _write_json(path, state_document(state))
    print(repr(state), flush=True)
    return [path]


def _input_state(args):
    if args.state:
        rho = load_state(args.state)
    else:
        rho = make_target(args.builtin).density()
    if args.dephase:
        rho = path_dephase(rho, args.dephase)
    return rho


def cmd_witness(args):
    rho = _input_state(args)
    if args.witness == 'ghz':
        report = exact_report(rho, 'GHZ')
    elif args.witness == 'w':
        report = exact_report(rho, 'W_raw' if args.raw else 'W_scaled')
    elif args.best:
        value, pair = best_ksep(rho, args.k, PHI_PAIRS)
        report = WitnessReport('KSEP', value, k=args.k, phi_pair=pair)
    else:
        report = exact_report(rho, 'KSEP', k=args.k,
                              phi_pair=(args.phi1, args.phi2))
    path = '{}.json'.format(args.output)
    _write_json(path, _document({'report': report.to_dict()}))
    print('{} = {:.6f}'.format(report.name, report.value), flush=True)
    return [path]


def cmd_simulate(args):
    with open(args.config, 'r') as f:
        config = BeamlineConfig.from_json(f.read())
    output = run_beamline(config)
    document = {'survival': output.survival,
                'detector_probability': detector_probability(output),
                'degenerate': output.degenerate}
    if not output.degenerate:
        document['populations'] = dict(zip(
            (str(label) for label in ALL_LABELS),
            output.rho.populations().tolist()))
        document['density'] = _matrix(output.rho.entries)
    path = '{}.json'.format(args.output)
    _write_json(path, _document(document))
    print('survival {:.6f}, detector probability {:.6f}'.format(
        output.survival, document['detector_probability']), flush=True)
    return [path]


def _preparation(args):
    if args.config:
        with open(args.config, 'r') as f:
            return BeamlineConfig.from_json(f.read())
    return setups.preparation_config(args.builtin, delta=args.delta, p=args.p,
                                     visibility=args.visibility)


def cmd_scan(args):
    scan = simulate_scan(_preparation(args), args.chain,
                         phase_grid(args.points), counts_per_point=args.counts,
                         poisson=args.poisson, seed=args.seed,
                         repeats=args.repeats, reference=args.reference)
    csv_path = '{}.csv'.format(args.output)
    np.savetxt(csv_path, scan.table(), fmt=CSV_FORMAT, delimiter=',',
               header='phase_rad,counts,fit_value', comments='')
    json_path = '{}.json'.format(args.output)
    _write_json(json_path, _document(scan.summary()))
    print('contrast {:.6f} ± {:.6f}'.format(scan.contrast, scan.contrast_err),
          flush=True)
    return [csv_path, json_path]


def _campaign(args, **specs):
    specs = {k: v for k, v in specs.items() if v is not None}
    return Campaign(specs_filename=args.specs_filename, **specs)


def cmd_campaign(args):
    campaign = _campaign(args, counts_per_point=args.counts, seed=args.seed,
                         poisson=args.poisson or None,
                         visibility=args.visibility, threads=args.threads)
    delta = args.delta
    if args.calibrate_fidelity is not None:
        delta = campaign.calibrate('delta', args.calibrate_fidelity,
                                   args.kind, fixed=args.p)
        print('calibrated delta = {:.6f}'.format(delta), flush=True)
    report = campaign.run(args.kind, delta=delta, p=args.p)
    path = '{}.json'.format(args.output)
    _write_json(path, _document(report.to_dict()))
    for witness in report.witnesses:
        print('{:<9} {:>9.4f} ± {:.4f}'.format(
            witness.name + ('' if witness.k is None else str(witness.k)),
            witness.value, witness.uncertainty), flush=True)
    print('fidelity  {:>9.4f}'.format(report.fidelity), flush=True)
    return [path]


def cmd_reproduce(args):
    if args.paper:
        variants, campaign = (), None
    else:
        variants = ('ideal',) if args.ideal else tables.VARIANTS
        campaign = _campaign(args, poisson=args.poisson or None,
                             seed=args.seed, visibility=args.visibility,
                             threads=args.threads)
    rows = tables.table_rows(args.table, campaign, variants)
    print(tables.format_table(args.table, rows, variants), flush=True)
    path = '{}.json'.format(args.output)
    _write_json(path, _document({'table': args.table, 'rows': rows}))
    return [path]


def cmd_sample_test(args):
    results = run_suites(args.samples, args.seed, args.threads)
    for result in results.values():
        print('{:<18} max {:+.3e}  {}'.format(
            result.suite, result.max_value,
            'ok' if result.passed else 'VIOLATED'), flush=True)
    path = '{}.json'.format(args.output)
    _write_json(path, _document(
        {'results': [r.to_dict() for r in results.values()]}))
    failed = [r.suite for r in results.values() if not r.passed]
    if failed:
        raise ValueError('Nonpositivity violated in {}.'.format(failed))
    return [path]


# Parser

def _add_noise_args(parser):
    parser.add_argument('--delta', type=float, default=0.,
                        help='Flip-angle error of the in-path RF flippers.')
    parser.add_argument('--p', type=float, default=0.,
                        help='Path dephasing strength in [0, 1].')


def _add_campaign_args(parser):
    parser.add_argument('--visibility', type=float,
                        help='Instrument visibility in (0, 1].')
    parser.add_argument('--seed', type=int, help='Campaign seed.')
    parser.add_argument('--poisson', action='store_true',
                        help='Draw Poisson counts.')
    parser.add_argument('-s', '--specs_filename', type=str, default=SPECS_FILE,
                        help=('Json-formatted file of campaign specs. Ref. '
                              'default_specs.json for formatting and options.'))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--threads', type=int, default=1,
                        help='Worker threads for campaigns and sample suites.')
    common.add_argument('-v', '--verbose', action='store_true',
                        help='Log at DEBUG level.')
    parser = argparse.ArgumentParser(
        prog='neutronsim',
        description='Simulate path-spin-energy entanglement in a neutron '
                    'interferometer.')
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    state = subparsers.add_parser(
        'state', parents=[common], help='Build a target state.')
    state.add_argument('--kind', choices=['w', 'ghz'], required=True)
    for name in 'abcde':
        state.add_argument('--{}'.format(name), type=float)
    state.add_argument('--tol', type=float, default=DEFAULT_TOL,
                       help='Normalization tolerance before renormalizing, '
                            'default {}.'.format(DEFAULT_TOL))
    state.add_argument('-o', '--output', default='state')
    state.set_defaults(func=cmd_state)

    witness = subparsers.add_parser(
        'witness', parents=[common], help='Evaluate a witness.')
    source = witness.add_mutually_exclusive_group(required=True)
    source.add_argument('--state', type=str,
                        help='State or density JSON file.')
    source.add_argument('--builtin', choices=TARGET_KINDS)
    witness.add_argument('--dephase', type=float, default=0.,
                         help='Path dephasing applied before evaluation.')
    witness.add_argument('--witness', choices=['ghz', 'w', 'ksep'],
                         required=True)
    scale = witness.add_mutually_exclusive_group()
    scale.add_argument('--scaled', action='store_true',
                       help='Report I_W scaled by 1/2 (default).')
    scale.add_argument('--raw', action='store_true',
                       help='Report the raw I_W.')
    witness.add_argument('--k', type=int, choices=[2, 3], default=3)
    witness.add_argument('--phi1', default='010')
    witness.add_argument('--phi2', default='101')
    witness.add_argument('--best', action='store_true',
                         help='Maximize KSEP over the built-in pair list.')
    witness.add_argument('-o', '--output', default='witness')
    witness.set_defaults(func=cmd_witness)

    simulate = subparsers.add_parser(
        'simulate', parents=[common],
        help='Run a beamline JSON configuration.')
    simulate.add_argument('config', type=str)
    simulate.add_argument('-o', '--output', default='beam')
    simulate.set_defaults(func=cmd_simulate)

    scan = subparsers.add_parser(
        'scan', parents=[common], help='Simulate and fit a phase scan.')
    prep = scan.add_mutually_exclusive_group(required=True)
    prep.add_argument('--config', type=str, help='Beamline JSON file.')
    prep.add_argument('--builtin', choices=TARGET_KINDS)
    _add_noise_args(scan)
    scan.add_argument('--visibility', type=float, default=1.)
    scan.add_argument('--chain', choices=setups.SCANNED_CHAINS, required=True)
    scan.add_argument('--points', type=int, default=16)
    scan.add_argument('--counts', type=float, default=1000.)
    scan.add_argument('--repeats', type=int, default=1)
    scan.add_argument('--poisson', action='store_true')
    scan.add_argument('--seed', type=int, default=0)
    scan.add_argument('--reference', action='store_true',
                      help='Scan the bare interferometer instead.')
    scan.add_argument('-o', '--output', default='scan')
    scan.set_defaults(func=cmd_scan)

    campaign = subparsers.add_parser(
        'campaign', parents=[common], help='Run a measurement campaign.')
    campaign.add_argument('--kind', choices=TARGET_KINDS, required=True)
    _add_noise_args(campaign)
    _add_campaign_args(campaign)
    campaign.add_argument('--counts', type=float,
                          help='Counts per scan point.')
    campaign.add_argument('--calibrate-fidelity', type=float,
                          help='Fit delta to this preparation fidelity first.')
    campaign.add_argument('-o', '--output', default='campaign')
    campaign.set_defaults(func=cmd_campaign)

    reproduce = subparsers.add_parser(
        'reproduce', parents=[common],
        help='Witness tables next to the published values.')
    reproduce.add_argument('--table', choices=['I', 'II'], required=True)
    variant = reproduce.add_mutually_exclusive_group()
    variant.add_argument('--ideal', action='store_true',
                         help='Simulate the ideal variant only.')
    variant.add_argument('--paper', action='store_true',
                         help='Print the published values only.')
    _add_campaign_args(reproduce)
    reproduce.add_argument('-o', '--output', default='reproduce')
    reproduce.set_defaults(func=cmd_reproduce)

    sample_test = subparsers.add_parser(
        'sample-test', parents=[common],
        help='Nonpositivity suites on separable samples: {}.'.format(
            ', '.join(SUITES)))
    sample_test.add_argument('--samples', type=int, default=10000)
    sample_test.add_argument('--seed', type=int, default=0)
    sample_test.add_argument('-o', '--output', default='sample-test')
    sample_test.set_defaults(func=cmd_sample_test)
    return parser


def main(argv=None):
    """Parse argv, run the command, write its manifest.

    Exits nonzero with the error and usage on any failure.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s')
    parameters = {k: v for k, v in vars(args).items() if k != 'func'}
    try:
        outputs = args.func(args)
        manifest = RunManifest(args.command, parameters,
                               seed=parameters.get('seed'), outputs=outputs)
        manifest.write(args.output)
    except (ValueError, KeyError, ZeroDivisionError, OSError) as e:
        sys.exit('{}\n{}'.format(repr(e), parser.format_usage()))
    return outputs


if __name__ == '__main__':
    main()
