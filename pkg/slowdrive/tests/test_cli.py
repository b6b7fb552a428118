import io
import json

import numpy as np
import pandas
import pytest
from numpy.testing import assert_allclose

from slowdrive.scripts import run_experiment
from slowdrive.scripts.run_experiment import RunConfig
from slowdrive.scripts import ConfigError
from slowdrive.theory import carnot
from slowdrive.theory import superop

BATH = {'beta': 1.0, 'gamma0': 1.0, 'alpha': 0.0}
DRIVE = {'shape': 'cosine-drive', 'omega': 1.0, 'delta0': 1.0}


def write_config(tmp_path, document, name='run.json'):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def run_main(tmp_path, document, name='out.txt'):
    output = tmp_path / name
    code = run_experiment.main(['--config', write_config(tmp_path, document),
                                '--output', str(output), '--jobs', '1'])
    return code, output


def read_table(text):
    body = ''.join(line + '\n' for line in text.splitlines()
                   if not line.startswith('#'))
    return pandas.read_csv(io.StringIO(body))


def read_header(text):
    lines = [line[2:] for line in text.splitlines() if line.startswith('# ')]
    return json.loads('\n'.join(lines))


def test_perturb_table(tmp_path):
    document = {'command': 'perturb', 'protocol': DRIVE, 'bath': BATH,
                'tau': 10.0, 'order': 2, 'points': 21}
    code, output = run_main(tmp_path, document)
    assert code == run_experiment.EXIT_OK
    text = output.read_text()
    header = read_header(text)
    assert header['command'] == 'perturb'
    assert header['tolerances']['ode'] == 1e-10
    assert 'output' not in header
    table = read_table(text)
    assert list(table.columns) == [
        't_prime', 'sz_exact', 'sz_ord0', 'sz_ord1', 'sz_ord2',
        'sy_exact', 'sy_ord0', 'sy_ord1', 'sy_ord2']
    assert len(table) == 21
    assert_allclose(table['t_prime'], np.linspace(0, 1, 21))
    assert_allclose(table['sz_exact'][0], 0.0, atol=1e-12)
    late = table['t_prime'] >= 0.8
    errors = [np.abs(table['sz_exact'] - table['sz_ord%d' % j])[late].max()
              for j in range(3)]
    assert errors[0] > errors[1] > errors[2]


def test_runs_are_byte_identical(tmp_path):
    document = {'command': 'perturb', 'protocol': DRIVE, 'bath': BATH,
                'tau': 10.0, 'order': 1, 'points': 11}
    _, first = run_main(tmp_path, document, 'first.csv')
    _, second = run_main(tmp_path, document, 'second.csv')
    assert first.read_bytes() == second.read_bytes()


def test_steady_table(tmp_path):
    document = {'command': 'steady', 'protocol': DRIVE, 'bath': BATH}
    code, output = run_main(tmp_path, document)
    assert code == 0
    table = read_table(output.read_text())
    assert list(table['component']) == [11, 12, 21, 22]
    assert_allclose(table['real'].sum() - table['real'][1] -
                    table['real'][2], 1.0)


def test_evolve_table(tmp_path):
    document = {'command': 'evolve', 'protocol': DRIVE, 'bath': BATH,
                'tau': 5.0, 'points': 7, 'initial': 'steady'}
    code, output = run_main(tmp_path, document)
    assert code == 0
    table = read_table(output.read_text())
    assert list(table.columns) == ['t_prime', 't', 'p_1', 'p_2', 'sx', 'sy',
                                   'sz']
    assert len(table) == 7
    assert_allclose(table['p_1'] + table['p_2'], 1.0, atol=1e-9)
    assert_allclose(table['t'], np.linspace(0, 5.0, 7))


def test_seeded_random_initial_state(tmp_path):
    document = {'command': 'evolve', 'protocol': DRIVE, 'bath': BATH,
                'tau': 5.0, 'points': 5, 'initial': 'random', 'seed': 7}
    code, first = run_main(tmp_path, document, 'first.csv')
    assert code == 0
    _, second = run_main(tmp_path, document, 'second.csv')
    assert first.read_bytes() == second.read_bytes()
    assert read_header(first.read_text())['seed'] == 7
    start = superop.random_density_matrix(np.random.default_rng(7), 2)
    table = read_table(first.read_text())
    assert_allclose([table['p_1'][0], table['p_2'][0]],
                    superop.populations(start), atol=1e-12)

    document['seed'] = 8
    _, other = run_main(tmp_path, document, 'other.csv')
    assert read_table(other.read_text())['sz'][0] != table['sz'][0]


@pytest.mark.parametrize('document', [
    {'command': 'evolve', 'protocol': DRIVE, 'bath': BATH, 'tau': 5.0,
     'seed': 3},
    {'command': 'isotherm', 'protocol': DRIVE, 'bath': BATH, 'seed': 3},
    {'command': 'evolve', 'protocol': DRIVE, 'bath': BATH, 'tau': 5.0,
     'initial': 'random', 'seed': -1},
], ids=['mixed-start', 'no-trajectory', 'negative'])
def test_seed_is_rejected_where_unused(tmp_path, document):
    code, output = run_main(tmp_path, document)
    assert code == run_experiment.EXIT_CONFIG
    assert not output.exists()


def test_isotherm_table(tmp_path):
    document = {'command': 'isotherm', 'bath': {'beta': 1.0, 'gamma0': 1.0,
                                                 'alpha': 1.0},
                'protocol': {'shape': 'cosine-ramp', 'omega0': 1.0,
                             'start': 2.0, 'end': 1.0},
                'order': 2, 'tolerances': {'panels': 8}}
    code, output = run_main(tmp_path, document)
    assert code == 0
    table = read_table(output.read_text())
    assert list(table['j']) == [0, 1, 2]
    assert table['Q'][1] < 0
    assert np.all(np.abs(table['first_law_residual']) < 1e-7)


def test_carnot_document(tmp_path):
    document = {'command': 'carnot',
                'carnot': {'T_H': 0.5, 'T_C': 0.25, 'alpha': 0.0},
                'tolerances': {'panels': 16}, 'tau_H': 10.0, 'tau_C': 5.0}
    code, output = run_main(tmp_path, document, 'carnot.json')
    assert code == 0
    result = json.loads(output.read_text())
    assert result['config']['carnot']['T_C'] == 0.25
    body = result['result']
    assert body['exact'] is None
    assert_allclose(body['eta_star'], body['eta_star_analytic'], rtol=1e-6)
    assert_allclose(body['eta_star_analytic'], 1 - np.sqrt(0.5))
    assert body['at_durations']['tau_H'] == 10.0
    assert 'P_first_order' in body['at_durations']


def test_external_shape_names(tmp_path):
    drive = dict(DRIVE, shape='appendixA-drive')
    document = {'command': 'steady', 'protocol': drive, 'bath': BATH,
                't_prime': 0.3}
    code, aliased = run_main(tmp_path, document, 'aliased.csv')
    assert code == 0
    document['protocol'] = DRIVE
    _, named = run_main(tmp_path, document, 'named.csv')
    assert_allclose(read_table(aliased.read_text())['real'],
                    read_table(named.read_text())['real'])

    document = {'command': 'carnot',
                'carnot': {'T_H': 0.5, 'T_C': 0.25,
                           'shape': 'appendixC-isotherm'},
                'tolerances': {'panels': 16}}
    code, output = run_main(tmp_path, document, 'carnot.json')
    assert code == 0
    body = json.loads(output.read_text())['result']
    assert_allclose(body['eta_star'], 0.5, rtol=1e-6)


def test_sweep_table(tmp_path):
    document = {'command': 'sweep', 'carnot': {'T_H': 0.5},
                'ratios': [0.5, 1.0], 'alphas': [0.0], 'exact': False,
                'tolerances': {'panels': 8}}
    code, output = run_main(tmp_path, document)
    assert code == 0
    table = read_table(output.read_text())
    assert list(table.columns) == carnot.SWEEP_COLUMNS
    assert list(table['engine_flag']) == ['skipped', 'degenerate']
    assert_allclose(table['eta_analytic'][0], 1 - np.sqrt(0.5))


@pytest.mark.parametrize('document', [
    {'command': 'perturb', 'protocol': DRIVE,
     'bath': {'beta': 1.0, 'gamma0': -1.0}, 'tau': 10.0},
    {'command': 'perturb', 'protocol': DRIVE, 'bath': BATH, 'tau': 10.0,
     'colour': 'blue'},
    {'command': 'perturb', 'protocol': DRIVE, 'bath': BATH},
    {'command': 'perturb', 'protocol': {'shape': 'square'}, 'bath': BATH,
     'tau': 1.0},
    {'command': 'teleport'},
    {'command': 'carnot', 'carnot': {'T_H': 0.5, 'T_C': 0.5}},
    {'command': 'sweep', 'carnot': {'T_H': 0.5}, 'ratios': 'all',
     'alphas': [0.0]},
    {'command': 'steady', 'protocol': DRIVE, 'bath': BATH, 't_prime': 2.0},
], ids=['negative-gamma', 'unknown-key', 'missing-tau', 'unknown-shape',
        'unknown-command', 'equal-temperatures', 'bad-ratios', 'bad-time'])
def test_configuration_errors(tmp_path, document):
    code, output = run_main(tmp_path, document)
    assert code == run_experiment.EXIT_CONFIG
    assert not output.exists()


def test_malformed_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"command": ')
    assert run_experiment.main(['--config', str(path)]) == 1


def test_missing_arguments():
    assert run_experiment.main([]) == run_experiment.EXIT_CONFIG


def test_numerical_failure(tmp_path):
    document = {'command': 'steady', 'bath': BATH, 't_prime': 1.0,
                'protocol': {'shape': 'cosine-expansion',
                             'omega_floor_ratio': 0.0}}
    code, output = run_main(tmp_path, document)
    assert code == run_experiment.EXIT_NUMERICAL
    assert not output.exists()


def test_run_config_defaults():
    run_config = RunConfig.from_dict({'command': 'perturb', 'tau': 1.0,
                                      'protocol': DRIVE, 'bath': BATH})
    assert run_config.order == 2
    assert run_config.points == 201
    assert run_config.initial == 'mixed'
    assert run_config.tolerances == {'ode': 1e-10, 'panels': 64}
    with pytest.raises(ConfigError):
        RunConfig.from_dict({'command': 'perturb', 'order': -1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict(['perturb'])
