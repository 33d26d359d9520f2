import _env

import json

import numpy as np
from numpy.testing import assert_allclose
import pytest

from neutronsim import __version__, cli
from neutronsim.beamline import setups
from neutronsim.experiment import tables


def _load(path):
    with open(path) as f:
        return json.load(f)


def test_state_round_trip(tmp_path):
    prefix = str(tmp_path / 'wsym')
    cli.main(['state', '--kind', 'w', '--a', '.5774', '--b', '.5774',
              '--c', '.5774', '-o', prefix])
    document = _load(prefix + '.json')
    assert document['schema_version'] == cli.SCHEMA_VERSION
    assert document['labels'][7] == '101'
    rho = cli.load_state(prefix + '.json')
    assert_allclose(np.trace(rho.entries).real, 1., atol=1e-12)
    out = str(tmp_path / 'w')
    cli.main(['witness', '--state', prefix + '.json', '--witness', 'w',
              '-o', out])
    assert_allclose(_load(out + '.json')['report']['value'], .5, atol=1e-12)


def test_unnormalized_state_exits(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(['state', '--kind', 'w', '--a', '1', '--b', '1', '--c', '1',
                  '-o', str(tmp_path / 'bad')])
    assert 'normalized' in str(info.value.code)


def test_build_state_needs_all_amplitudes():
    with pytest.raises(ValueError):
        cli.build_state('ghz', d=1.)
    state = cli.build_state('ghz', d=.7071, e=.7071)
    assert_allclose(np.linalg.norm(state.amplitudes), 1., atol=1e-12)


@pytest.mark.parametrize('extra, expected', [
    (['--witness', 'w'], -1/6),
    (['--witness', 'w', '--raw'], -1/3),
    (['--witness', 'ksep', '--phi1', '011', '--phi2', '002'], 1/3),
    (['--witness', 'ksep', '--best'], 1/3),
])
def test_witness_on_dephased_builtin(tmp_path, extra, expected):
    prefix = str(tmp_path / 'witness')
    cli.main(['witness', '--builtin', 'W_sym', '--dephase', '1', '-o',
              prefix] + extra)
    assert_allclose(_load(prefix + '.json')['report']['value'], expected,
                    atol=1e-9)


def test_simulate_beamline_file(tmp_path):
    config = setups.measurement_config(setups.preparation_config('GHZ'),
                                       'plain')
    path = tmp_path / 'beamline.json'
    path.write_text(config.to_json())
    prefix = str(tmp_path / 'beam')
    cli.main(['simulate', str(path), '-o', prefix])
    document = _load(prefix + '.json')
    assert_allclose(document['survival'], .5, atol=1e-12)
    assert_allclose(document['detector_probability'], .25, atol=1e-12)
    assert_allclose(document['populations']['010'], 1., atol=1e-12)


def test_scan_outputs_and_manifest(tmp_path):
    prefix = str(tmp_path / 'ab')
    outputs = cli.main(['scan', '--builtin', 'W_asym', '--chain',
                        'coherence_ab', '--counts', '1e6', '-o', prefix])
    with open(prefix + '.csv') as f:
        assert f.readline().strip() == 'phase_rad,counts,fit_value'
    rows = np.loadtxt(prefix + '.csv', delimiter=',', skiprows=1)
    assert rows.shape == (16, 3)
    assert_allclose(_load(prefix + '.json')['contrast'], np.sqrt(2)/2,
                    atol=1e-9)
    manifest = _load(prefix + '-manifest.json')
    assert manifest['command'] == 'scan'
    assert manifest['version'] == __version__
    assert manifest['seed'] == 0
    assert manifest['parameters']['chain'] == 'coherence_ab'
    assert prefix + '.csv' in manifest['outputs']
    assert prefix + '-manifest.json' in outputs


def test_poisson_scan_is_reproducible(tmp_path):
    texts = []
    for name in ('first', 'second'):
        prefix = str(tmp_path / name)
        cli.main(['scan', '--builtin', 'GHZ', '--chain', 'coherence_ghz',
                  '--poisson', '--seed', '3', '-o', prefix])
        with open(prefix + '.csv') as f:
            texts.append(f.read())
    assert texts[0] == texts[1]


def test_scan_rejects_short_grid(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(['scan', '--builtin', 'GHZ', '--chain', 'coherence_ghz',
                  '--points', '4', '-o', str(tmp_path / 'short')])


def test_campaign_command(tmp_path):
    prefix = str(tmp_path / 'ghz')
    cli.main(['campaign', '--kind', 'GHZ', '-o', prefix])
    document = _load(prefix + '.json')
    values = {w['name']: w['value'] for w in document['witnesses']}
    assert_allclose(values['GHZ'], .5, atol=1e-6)
    assert document['parameters']['poisson'] is False


def test_reproduce_published_values(tmp_path, capsys):
    prefix = str(tmp_path / 'table')
    cli.main(['reproduce', '--table', 'II', '--paper', '-o', prefix])
    assert tables.FLAG in capsys.readouterr().out
    rows = _load(prefix + '.json')['rows']
    assert [row['state'] for row in rows] == ['GHZ', 'W_sym', 'W_asym']


def test_sample_test_command(tmp_path):
    prefix = str(tmp_path / 'suites')
    cli.main(['sample-test', '--samples', '20', '--threads', '2', '-o',
              prefix])
    results = _load(prefix + '.json')['results']
    assert len(results) == 4
    assert all(r['passed'] for r in results)
