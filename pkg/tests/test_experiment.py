import _env

import dataclasses
import json

import numpy as np
from numpy.testing import assert_allclose
import pytest

from neutronsim.beamline import setups
from neutronsim.beamline.interferometer import run_beamline
from neutronsim.experiment import campaign as cmpg
from neutronsim.experiment import extraction, published, tables
from neutronsim.experiment.fitting import check_grid, fit_sinusoid, phase_grid
from neutronsim.experiment.scans import (
    scan_probabilities, simulate_intensity, simulate_scan)
from neutronsim.hilbert import tensor_core as tc


def _label(text):
    return tc.BasisLabel.parse(text)


def test_fit_recovers_noiseless_sinusoid():
    phases = phase_grid()
    fit = fit_sinusoid(phases, 500 + 200*np.sin(phases + .4))
    assert_allclose([fit.mean, fit.amplitude, fit.offset], [500, 200, .4],
                    atol=1e-9)
    assert_allclose(fit.contrast, .4, atol=1e-12)
    assert_allclose(fit.residuals, 0., atol=1e-9)
    assert_allclose(fit.evaluate(phases), 500 + 200*np.sin(phases + .4))


def test_fit_with_zero_counts_has_zero_contrast():
    fit = fit_sinusoid(phase_grid(), np.zeros(16))
    assert fit.contrast == 0.
    with pytest.raises(ValueError):
        fit_sinusoid(phase_grid(), np.ones(8))


def test_check_grid():
    check_grid(phase_grid(8))
    with pytest.raises(ValueError):
        check_grid(phase_grid(4))
    with pytest.raises(ValueError):
        check_grid(np.linspace(0, np.pi, 16))


def test_ghz_scan_has_full_contrast():
    prep = setups.preparation_config('GHZ')
    scan = simulate_scan(prep, 'coherence_ghz', counts_per_point=1e6)
    assert_allclose(scan.contrast, 1., atol=1e-9)
    noisy = simulate_scan(prep, 'coherence_ghz', counts_per_point=1e6,
                          poisson=True, seed=1)
    assert_allclose(noisy.contrast, 1., atol=1e-2)
    assert noisy.contrast_err > 0
    assert scan.table().shape == (16, 3)


def test_visibility_limits_scan_contrast():
    prep = setups.preparation_config('GHZ', visibility=.455)
    scan = simulate_scan(prep, 'coherence_ghz')
    assert_allclose(scan.contrast, .455, atol=1e-9)
    reference = simulate_scan(prep, 'coherence_ghz', reference=True)
    assert_allclose(reference.contrast, .455, atol=1e-9)


def test_blocked_path_removes_interference():
    probabilities = scan_probabilities(setups.preparation_config('GHZ'),
                                       'coherence_ghz', phase_grid(),
                                       blocked='path_I')
    contrast = ((probabilities.max() - probabilities.min()) /
                (probabilities.max() + probabilities.min()))
    assert contrast < 1e-9


@pytest.mark.parametrize('kwargs', [
    {'chain_kind': 'plain'},
    {'chain_kind': 'coherence_ab', 'counts_per_point': 0},
    {'chain_kind': 'coherence_ab', 'repeats': 0},
    {'chain_kind': 'coherence_ab', 'phases': phase_grid(4)},
])
def test_simulate_scan_rejects_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        simulate_scan(setups.preparation_config('W_sym'), **kwargs)


def test_poisson_draws_are_seeded():
    prep = setups.preparation_config('W_asym')
    first = simulate_scan(prep, 'coherence_ab', poisson=True, seed=5)
    second = simulate_scan(prep, 'coherence_ab', poisson=True, seed=5)
    other = simulate_scan(prep, 'coherence_ab', poisson=True, seed=6)
    assert_allclose(first.counts, second.counts)
    assert not np.array_equal(first.counts, other.counts)


def test_poisson_intensity_mean():
    prep = setups.preparation_config('GHZ')
    counts = [simulate_intensity(prep, 'plain', blocked='path_II',
                                 poisson=True, seed=s, repeats=10).counts
              for s in range(100)]
    # Half the beam survives the block; half of that exits the O port.
    assert_allclose(np.mean(counts), 250., rtol=.05)
    exact = simulate_intensity(prep, 'plain', blocked='path_II', repeats=10)
    assert_allclose(exact.probability, .25, atol=1e-12)
    assert_allclose(exact.counts, 250., atol=1e-9)


@pytest.mark.parametrize('kind', ['GHZ', 'W_sym', 'W_asym'])
@pytest.mark.parametrize('p', [0., .4])
def test_noiseless_campaign_recovers_prepared_elements(kind, p):
    campaign = cmpg.Campaign()
    runs = campaign.runs(kind, p=p)
    result = extraction.extract_elements(runs, extraction.family_of(kind))
    rho = run_beamline(campaign.preparation(kind, p=p)).state()
    for label, (value, _) in result.populations.items():
        assert_allclose(value, rho.population(_label(label)), atol=1e-6)
    for (x, y), (value, _) in result.cross_magnitudes.items():
        assert_allclose(value, abs(rho.element(_label(x), _label(y))),
                        atol=1e-6)


def test_asymmetric_w_ab_coherence():
    result = extraction.extract_elements(cmpg.Campaign().runs('W_asym'), 'W')
    assert_allclose(result.cross_magnitudes[('101', '011')][0], .3536,
                    atol=1e-4)


@pytest.mark.parametrize('p', [0., .25, .5, .75, 1.])
def test_path_coherences_scale_with_dephasing(p):
    campaign = cmpg.Campaign()
    clean = extraction.extract_elements(campaign.runs('W_sym'), 'W')
    dephased = extraction.extract_elements(campaign.runs('W_sym', p=p), 'W')
    for pair in (('101', '011'), ('101', '002')):
        assert_allclose(dephased.cross_magnitudes[pair][0],
                        (1 - p)*clean.cross_magnitudes[pair][0], atol=1e-9)
    assert_allclose(dephased.cross_magnitudes[('011', '002')][0],
                    clean.cross_magnitudes[('011', '002')][0], atol=1e-9)


def test_extraction_errors():
    runs = cmpg.Campaign().runs('W_sym')
    missing = dict(runs)
    del missing['coherence_bc']
    with pytest.raises(KeyError):
        extraction.extract_elements(missing, 'W')
    flat = dict(runs)
    ref = runs['coherence_ab_ref']
    flat['coherence_ab_ref'] = dataclasses.replace(
        ref, fit=dataclasses.replace(ref.fit, contrast=0.))
    with pytest.raises(ZeroDivisionError):
        extraction.extract_elements(flat, 'W')
    with pytest.raises(ValueError):
        extraction.required_runs('cluster')


def test_counting_errors_propagate():
    result = extraction.extract_elements(
        cmpg.Campaign(poisson=True, seed=2).runs('W_asym'), 'W')
    for value, err in result.populations.values():
        assert err > 0
    for value, err in result.cross_magnitudes.values():
        assert err > 0


@pytest.mark.parametrize('kind, name, expected', [
    ('GHZ', 'GHZ', .5),
    ('W_sym', 'W_scaled', .5),
    ('W_asym', 'W_scaled', .4571),
])
def test_ideal_campaign_witnesses(kind, name, expected):
    report = cmpg.Campaign().run(kind)
    assert_allclose(report.witness(name).value, expected, atol=1e-4)
    assert_allclose(report.fidelity, 1., atol=1e-12)
    assert_allclose(report.fidelity_witness, .5, atol=1e-12)


def test_ghz_witness_survives_reduced_visibility():
    report = cmpg.run_campaign('GHZ',
                               visibility=published.REFERENCE_CONTRAST)
    assert_allclose(report.witness('GHZ').value, .5, atol=1e-6)


def test_fully_dephased_w_campaign():
    report = cmpg.Campaign().run('W_sym', p=1.)
    assert_allclose(report.witness('W_scaled').value, -1/6, atol=1e-6)
    assert_allclose(report.witness('KSEP', k=3).value, 1/3, atol=1e-6)
    assert report.witness('KSEP', k=3).phi_pair == ('011', '002')
    with pytest.raises(KeyError):
        report.witness('GHZ')


def test_calibrate_returns_bracket_edge_for_perfect_target():
    assert cmpg.Campaign().calibrate('delta', 1., 'GHZ') == 0.


def test_calibrate_dephasing_to_degraded_fidelity():
    campaign = cmpg.Campaign()
    p = campaign.calibrate('p', .646, 'W_sym')
    assert_allclose(p, .7965, atol=1e-6)
    assert_allclose(campaign.prepared_fidelity('W_sym', p=p), .646, atol=1e-9)
    near_edge = campaign.calibrate('p', 5/9 + 1e-6, 'W_sym')
    assert near_edge > .999


def test_calibrate_flip_error_to_preparation_fidelity():
    delta = cmpg.Campaign().calibrate('delta', .985, 'GHZ')
    assert_allclose(delta, 2*np.arccos(2*np.sqrt(.985) - 1), atol=1e-9)


def test_calibrate_errors():
    campaign = cmpg.Campaign()
    with pytest.raises(cmpg.CalibrationError):
        campaign.calibrate('delta', .5, 'GHZ')
    with pytest.raises(ValueError):
        campaign.calibrate('delta', 0., 'GHZ')
    with pytest.raises(ValueError):
        campaign.calibrate('gamma', .9, 'GHZ')


def test_campaign_does_not_depend_on_threads():
    serial = cmpg.Campaign(poisson=True, seed=4).run('W_asym')
    threaded = cmpg.Campaign(poisson=True, seed=4, threads=3).run('W_asym')
    assert serial.to_dict() == threaded.to_dict()


def test_campaign_specs(tmp_path):
    assert cmpg.Campaign(counts_per_point=10).specs['scan_points'] == 16
    with pytest.raises(ValueError):
        cmpg.Campaign(counts_per_point=0)
    with pytest.raises(ValueError):
        cmpg.Campaign(threads=0)
    with open(cmpg.SPECS_FILE) as f:
        specs = json.load(f)
    specs['seed'] = 7
    path = tmp_path / 'specs.json'
    path.write_text(json.dumps(specs))
    assert cmpg.Campaign(specs_filename=str(path)).specs['seed'] == 7


def test_report_is_json_serializable():
    report = cmpg.Campaign(poisson=True, seed=1).run('GHZ')
    record = json.loads(json.dumps(report.to_dict()))
    assert record['kind'] == 'GHZ'
    assert set(record['runs']) == set(extraction.required_runs('GHZ'))
    with pytest.raises(ValueError):
        cmpg.Campaign().run('cluster')


def test_published_rows_flag_unspecified_phi():
    rows = tables.table_rows('II', variants=())
    flags = {row['state']: row['flag'] for row in rows}
    assert flags == {'GHZ': None, 'W_sym': tables.FLAG,
                     'W_asym': tables.FLAG}
    assert rows[0]['published'] == [.49, .01]
    assert rows[1]['published_fidelity'] == [.987, .029]
    assert rows[0]['published_degraded_fidelity'] is None
    text = tables.format_table('II', rows, ())
    assert tables.FLAG in text
    assert 'published_fidelity' in text
    assert '0.455' in text
    with pytest.raises(ValueError):
        tables.table_rows('III')


def test_ideal_table_rows():
    rows = tables.table_rows('I', cmpg.Campaign(), variants=('ideal',))
    values = {row['state']: row['ideal'] for row in rows}
    assert_allclose([values['GHZ'], values['W_sym'], values['W_asym']],
                    [.5, .5, .4571], atol=1e-4)
    for row in rows:
        assert_allclose(row['ideal_fidelity'], 1., atol=1e-12)
        assert_allclose(row['ideal_fidelity_witness'], .5, atol=1e-12)
    text = tables.format_table('I', rows, ('ideal',))
    assert 'ideal_fidelity_witness' in text


@pytest.mark.slow
def test_full_table_rows():
    rows = tables.table_rows('I', cmpg.Campaign())
    by_state = {row['state']: row for row in rows}
    assert 'p' not in by_state['GHZ']
    for kind in ('W_sym', 'W_asym'):
        row = by_state[kind]
        assert row['delta'] > 0
        assert 0 < row['p'] < 1
        assert row['dephased'] < row['calibrated']
        assert_allclose(row['dephased_fidelity'],
                        published.DEGRADED_FIDELITIES[kind][0], atol=1e-6)
        assert row['dephased_fidelity_witness'] > 0
    for kind, row in by_state.items():
        assert_allclose(row['calibrated_fidelity'],
                        published.FIDELITIES[kind][0], atol=1e-6)


def test_calibrated_ghz_witness_matches_published_range():
    campaign = cmpg.Campaign()
    delta = campaign.calibrate('delta', published.FIDELITIES['GHZ'][0], 'GHZ')
    report = campaign.run('GHZ', delta=delta)
    assert_allclose(report.fidelity, .985, atol=1e-6)
    assert_allclose(report.fidelity_witness, .485, atol=1e-6)
    assert .44 <= report.witness('GHZ').value <= .50
    assert report.to_dict()['fidelity_witness'] == report.fidelity_witness


def test_specs_hold_no_fidelity_targets():
    specs = cmpg.Campaign().specs
    assert not any('fidelity' in key for key in specs)


@pytest.mark.slow
@pytest.mark.parametrize('kind', ['GHZ', 'W_sym', 'W_asym'])
def test_poisson_extraction_is_unbiased(kind):
    family = extraction.family_of(kind)
    exact = extraction.extract_elements(cmpg.Campaign().runs(kind), family)
    draws = [extraction.extract_elements(
                 cmpg.Campaign(poisson=True, seed=seed).runs(kind), family)
             for seed in range(100)]
    for label, (value, _) in exact.populations.items():
        mean = np.mean([d.populations[label][0] for d in draws])
        assert abs(mean - value) <= .05*value
    for pair, (value, _) in exact.cross_magnitudes.items():
        mean = np.mean([d.cross_magnitudes[pair][0] for d in draws])
        assert abs(mean - value) <= .05*value


def test_clip_warns_only_beyond_counting_error(caplog):
    with caplog.at_level('WARNING', logger=extraction.logger.name):
        assert extraction._clip('x', .5002, .001, .5) == (.5, .001)
    assert not caplog.records
    with caplog.at_level('WARNING', logger=extraction.logger.name):
        assert extraction._clip('x', .6, .001, .5) == (.5, .001)
        assert extraction._clip('y', -.01, .001, 1.) == (0., .001)
    assert len(caplog.records) == 2
    assert 'clipped' in caplog.records[0].getMessage()
