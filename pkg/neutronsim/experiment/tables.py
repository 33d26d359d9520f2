"""Witness tables from simulated campaigns next to the published values.

Each row covers one state kind with up to three simulated variants:
    ideal:      perfect flippers, no dephasing
    calibrated: flip-angle error fitted to the published preparation fidelity
    dephased:   calibrated flippers plus path dephasing fitted to the
                published degraded fidelity (W states only)

External functions:
    table_rows, format_table
"""

import logging

from neutronsim.experiment import published
from neutronsim.states.targets import TARGET_KINDS

logger = logging.getLogger(__name__)

VARIANTS = ('ideal', 'calibrated', 'dephased')
FLAG = 'phi-unspecified in paper'


def _witness_value(report, table):
    if table == 'I':
        name = 'GHZ' if report.kind == 'GHZ' else 'W_scaled'
        return report.witness(name).value
    return report.witness('KSEP', k=3).value


def _published(table, kind, column):
    entry = published.TABLES[table][kind][column]
    return list(entry) if entry else None


def _published_fidelity(kind, degraded=False):
    source = published.DEGRADED_FIDELITIES if degraded else published.FIDELITIES
    entry = source.get(kind)
    return list(entry) if entry else None


def _fill(row, variant, report, table):
    row[variant] = _witness_value(report, table)
    row['{}_fidelity'.format(variant)] = report.fidelity
    row['{}_fidelity_witness'.format(variant)] = report.fidelity_witness


def table_rows(table, campaign=None, variants=VARIANTS):
    """Rows of Table I or II.

    Calibration targets are the published preparation and degraded
    fidelities.

    Arguments:
        table: 'I' or 'II'
        campaign: Campaign used for simulation; with no variants requested
            it may be None
        variants: Subset of VARIANTS to simulate

    Returns: List of dicts with keys state, the simulated variants with
        their <variant>_fidelity and <variant>_fidelity_witness, the
        calibrated parameters, published, published_degraded,
        published_fidelity, published_degraded_fidelity and flag.
    """
    if table not in published.TABLES:
        raise ValueError('Table {!r} not recognized; expecting one of '
                         '{}.'.format(table, list(published.TABLES)))
    unknown = set(variants) - set(VARIANTS)
    if unknown:
        raise ValueError('Variants {} not recognized; expecting a subset of '
                         '{}.'.format(sorted(unknown), VARIANTS))
    rows = []
    for kind in TARGET_KINDS:
        row = {'state': kind,
               'published': _published(table, kind, 0),
               'published_degraded': _published(table, kind, 1),
               'published_fidelity': _published_fidelity(kind),
               'published_degraded_fidelity': _published_fidelity(
                   kind, degraded=True),
               'flag': (FLAG if kind in published.PHI_UNSPECIFIED.get(table, ())
                        else None)}
        if 'ideal' in variants:
            _fill(row, 'ideal', campaign.run(kind), table)
        delta = 0.
        if 'calibrated' in variants or 'dephased' in variants:
            delta = campaign.calibrate(
                'delta', published.FIDELITIES[kind][0], kind)
            row['delta'] = delta
        if 'calibrated' in variants:
            _fill(row, 'calibrated', campaign.run(kind, delta=delta), table)
        if 'dephased' in variants and kind in published.DEGRADED_FIDELITIES:
            p = campaign.calibrate(
                'p', published.DEGRADED_FIDELITIES[kind][0], kind,
                fixed=delta)
            row['p'] = p
            _fill(row, 'dephased', campaign.run(kind, delta=delta, p=p),
                  table)
        rows.append(row)
        logger.debug('Table %s row: %s', table, row)
    return rows


def _cell(value, width=14):
    if value is None:
        text = '-'
    elif isinstance(value, list):
        text = '{:.2f}±{:.2f}'.format(*value)
    else:
        text = '{:.4f}'.format(value)
    return text.rjust(width)


def _section(title, rows, columns, flags=False):
    widths = [max(14, len(c) + 2) for c in columns]
    lines = [title, '{:<8}'.format('state') + ''.join(
        c.rjust(w) for c, w in zip(columns, widths))]
    for row in rows:
        line = '{:<8}'.format(row['state']) + ''.join(
            _cell(row.get(c), w) for c, w in zip(columns, widths))
        if flags and row['flag']:
            line += '  ({})'.format(row['flag'])
        lines.append(line)
    return lines


def format_table(table, rows, variants=VARIANTS):
    """Fixed-width text rendering of table_rows output: witness values,
    then fidelities and fidelity witnesses."""
    lines = _section('Table {}'.format(table), rows,
                     list(variants) + ['published', 'published_degraded'],
                     flags=True)
    lines.append('')
    fidelity_columns = ['{}_fidelity'.format(v) for v in variants]
    fidelity_columns += ['{}_fidelity_witness'.format(v) for v in variants]
    lines += _section('Fidelity', rows, fidelity_columns + [
        'published_fidelity', 'published_degraded_fidelity'])
    lines.append('Published reference-beam contrast: {:.3f}'.format(
        published.REFERENCE_CONTRAST))
    return '\n'.join(lines)
