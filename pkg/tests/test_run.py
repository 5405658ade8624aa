import json
import os

import pytest

import run
from constants import ARC_THRESHOLDS


def test_example1_table(tmp_path):
    thresholds = run.example1_table(out_dir=str(tmp_path), max_n=60, samples=1024)
    for (threshold, first, published), expected in zip(thresholds, ARC_THRESHOLDS):
        assert (threshold, published) == expected
        if published <= 60:
            assert 0 < first <= published
    assert os.path.exists(os.path.join(str(tmp_path), 'example1_errors.csv'))


def test_cross_9x9(tmp_path):
    report = run.cross_9x9(out_dir=str(tmp_path))
    assert report.exit_status == 0
    assert report.outputs == [os.path.join(str(tmp_path), 'cross_9x9.csv')]


def test_cross_theta_small(tmp_path):
    report = run.cross_theta(out_dir=str(tmp_path), max_n=16)
    assert report.exit_status == 0
    assert report.get('max Theta deviation') < 1e-5


@pytest.mark.parametrize('recipe,names', [
    ('drop-boundary', ['drop_h{}.{}'.format(n, ext) for n in (5, 8, 11) for ext in ('csv', 'svg')]),
    ('spiral-boundary', ['spiral_h{}.{}'.format(n, ext) for n in (7, 11) for ext in ('csv', 'svg')]),
    ('example1-figures', ['example1_h{}{}.{}'.format(n, part, ext) for n in (16, 21, 37)
                          for part in ('', '_equipotentials') for ext in ('csv', 'svg')]),
    ('cross-figures', ['cross_h{}{}.{}'.format(n, part, ext) for n in (12, 32, 60)
                       for part in ('', '_far', '_near') for ext in ('csv', 'svg')]),
])
def test_figures_are_deterministic(tmp_path, recipe, names):
    contents = []
    for name in ('first', 'second'):
        out = os.path.join(str(tmp_path), name)
        report = run.RECIPES[recipe](out_dir=out)
        assert report.exit_status == 0
        assert sorted(os.path.basename(p) for p in report.outputs) == sorted(names)
        contents.append([open(os.path.join(out, f)).read() for f in names])
    assert contents[0] == contents[1]


def test_example1_figures_track_the_reference(tmp_path):
    report = run.example1_figures(out_dir=str(tmp_path))
    errors = {n: value for n, radius, value, bound in report.sup_differences}
    assert sorted(errors) == [16, 21, 37]
    assert errors[37] < errors[21] < errors[16]
    assert all(value <= bound + 1e-12 for _, _, value, bound in report.sup_differences)
    with open(os.path.join(str(tmp_path), 'example1_h16_equipotentials.csv')) as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith('# config=')
    assert lines[1] == 'r,theta,re,im'


def test_cross_figures_grid_radii(tmp_path):
    run.cross_figures(out_dir=str(tmp_path))
    with open(os.path.join(str(tmp_path), 'cross_h60_near.svg')) as fh:
        svg = fh.read()
    assert svg.count('id="curve-') == 4


def test_main_with_config(tmp_path, capsys):
    path = os.path.join(str(tmp_path), 'config.json')
    with open(path, 'w') as fh:
        json.dump({'curve': {'kind': 'cross', 'a': 1, 'b': 1}, 'n': 9}, fh)
    status = run.main(['hessenberg', path, '--n', '10', '--out-dir', str(tmp_path)])
    assert status == 0
    assert os.path.exists(os.path.join(str(tmp_path), 'hessenberg.csv'))
    assert 'hessenberg' in capsys.readouterr().out


def test_main_rejects_bad_config(tmp_path):
    path = os.path.join(str(tmp_path), 'config.json')
    with open(path, 'w') as fh:
        fh.write('{"curve":{"kind":"interval","a":1,"b":-1},"n":9}')
    assert run.main(['map', path]) == 2


def test_main_unknown_recipe():
    assert run.main(['repro', 'figure-7']) == 2
