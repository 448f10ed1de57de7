import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from kepler import radial
from kepler.models import ClaimVerdict, ComputationRun, SpectrumEntry
from kepler.output import parse_csv

FLAGSHIP_FLAGS = ['--alpha', '0.2', '--beta-s=-0.5']
ALGEBRAIC_CLAIMS = ['--claims', 'offdiagonal', 'lstar_noninteger', 'lambda_eigencheck']
SOLVER_SETTINGS = {
    'GRID_POINTS': 6000,
    'R_MIN': 1e-6,
    'R_MAX': 400.0,
    'WINDOW': (-0.999, 0.999),
    'NR_MAX': 2,
    'N_MAX': 5,
    'REFINE': True,
    'WORKERS': 1,
    'ENERGY_TOLERANCE': 1e-8,
    'CONFIG_FILE': '',
}


def run(*args):
    out, err = StringIO(), StringIO()
    call_command(*args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


real_brentq = radial.brentq


def brentq_failing_below_zero(f, a, b, **kwargs):
    if b <= 0.0:
        raise RuntimeError('не сошлось')
    return real_brentq(f, a, b, **kwargs)


@override_settings(DIRAC_KEPLER=SOLVER_SETTINGS)
class SpectrumCommandTests(SimpleTestCase):
    def test_flagship_csv(self):
        out, err = run('spectrum', *FLAGSHIP_FLAGS, '--kappa=-1', '--nr-max', '0', '--format', 'csv')
        rows = parse_csv(out)
        self.assertAlmostEqual(rows[0]['E'], 0.8, places=14)
        self.assertAlmostEqual(rows[1]['E'], -0.96, places=14)
        self.assertEqual([row['host_kappa'] for row in rows], [-1, 1])
        self.assertIn('✓', err)

    def test_integer_l_star_rows(self):
        out, _ = run('spectrum', '--alpha', '0.5', '--beta-s', '0.5', '--kappa=-1', '--format', 'json')
        rows = json.loads(out)
        self.assertEqual(len(rows), 6)
        self.assertTrue(all(row['l_star'] == 0.0 for row in rows))

    def test_text_output(self):
        out, _ = run('spectrum', *FLAGSHIP_FLAGS, '--kappa=-1', '--nr-max', '0')
        self.assertIn('Спектр при α=0.2, β_s=-0.5', out)
        self.assertIn('✓ Каналов: 1', out)

    def test_ev_units(self):
        out, _ = run('spectrum', *FLAGSHIP_FLAGS, '--kappa=-1', '--nr-max', '0', '--format', 'csv',
                     '--units', 'ev', '--mc2', '1000')
        self.assertAlmostEqual(parse_csv(out)[0]['E'], 800.0)

    def test_all_channels_supercritical(self):
        with self.assertRaises(CommandError) as ctx:
            run('spectrum', '--alpha', '2.0', '--kappa=-1', '--format', 'csv')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_partially_supercritical(self):
        out, _ = run('spectrum', '--alpha', '1.5', '--kappa=-1', '--kappa=2', '--nr-max', '0', '--format', 'csv')
        rows = parse_csv(out)
        self.assertIn('Закритический', rows[0]['error'])
        self.assertEqual(rows[1]['kappa'], 2)

    def test_usage_errors(self):
        for args in (['--kappa=-1'], ['--alpha', '0.2', '--e2', '0.1'], [*FLAGSHIP_FLAGS, '--window=0.5,0.1']):
            with self.assertRaises(CommandError) as ctx:
                run('spectrum', *args)
            self.assertEqual(ctx.exception.returncode, 2)

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'run.conf'
            path.write_text('alpha = 0.2\nbeta_s = -0.5\nkappa = -1\nnr_max = 0\nformat = csv\n', encoding='utf-8')
            out, _ = run('spectrum', '--config', str(path))
        self.assertEqual(len(parse_csv(out)), 2)

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'spectrum.csv'
            out, _ = run('spectrum', *FLAGSHIP_FLAGS, '--kappa=-1', '--nr-max', '0', '--format', 'csv',
                         '--out', str(path))
            rows = parse_csv(path.read_text(encoding='utf-8'))
        self.assertEqual(len(rows), 2)
        self.assertIn('Результат записан', out)


@override_settings(DIRAC_KEPLER=SOLVER_SETTINGS)
class SolveCommandTests(SimpleTestCase):
    def test_flagship_both_branches(self):
        out, _ = run('solve', *FLAGSHIP_FLAGS, '--kappa=-1', '--kappa=1', '--n-max', '0', '--format', 'csv')
        self.assertEqual(out.splitlines()[0], 'kappa,n_r,E_numeric,E_analytic,abs_err,q_eff,gamma,l_star,N')
        rows = parse_csv(out)
        positive = [row for row in rows if row['kappa'] == -1 and row['E_numeric'] > 0]
        negative = [row for row in rows if row['kappa'] == 1 and row['E_numeric'] < 0]
        self.assertAlmostEqual(positive[0]['E_analytic'], 0.8, places=12)
        self.assertAlmostEqual(negative[0]['E_analytic'], -0.96, places=12)
        for row in positive + negative:
            self.assertLessEqual(row['abs_err'], 1e-8)

    def test_empty_window(self):
        out, _ = run('solve', *FLAGSHIP_FLAGS, '--kappa=-1', '--window=0.1,0.2', '--format', 'csv')
        self.assertEqual(parse_csv(out), [])

    def test_failed_state_reported_separately(self):
        out, err = StringIO(), StringIO()
        with mock.patch('kepler.radial.brentq', brentq_failing_below_zero):
            with self.assertRaises(CommandError) as ctx:
                call_command('solve', *FLAGSHIP_FLAGS, '--kappa=-1', '--n-max', '0', '--format', 'csv',
                             stdout=out, stderr=err)
        self.assertEqual(ctx.exception.returncode, 1)
        rows = parse_csv(out.getvalue())
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(rows[0]['E_numeric'], 0.8, delta=1e-8)
        self.assertIn('κ=-1: Не удалось уточнить уровень', err.getvalue())
        self.assertIn('ошибок: 1', str(ctx.exception))

    def test_sommerfeld_column(self):
        out, _ = run('solve', '--alpha', '0.5', '--kappa=-1', '--n-max', '1', '--format', 'json')
        rows = json.loads(out)
        self.assertEqual(len(rows), 2)
        for row in rows:
            self.assertLessEqual(row['abs_err'], 1e-8)
        self.assertEqual([row['n_r'] for row in rows], [0, 1])


@override_settings(DIRAC_KEPLER=SOLVER_SETTINGS)
class ScanCommandTests(SimpleTestCase):
    def test_scan_alpha(self):
        out, _ = run('scan', '--beta-s=-0.5', '--scan-param', 'alpha', '--scan-values', '0.1,0.2',
                     '--kappa=-1', '--nr-max', '0', '--format', 'csv')
        rows = parse_csv(out)
        self.assertEqual([row['alpha'] for row in rows], [0.1, 0.1, 0.2, 0.2])
        self.assertAlmostEqual(rows[2]['E'], 0.8, places=14)

    def test_scan_beta_s_spelling(self):
        out, _ = run('scan', '--alpha', '0.2', '--scan-param', 'beta-s', '--scan-values=-0.5,0.1',
                     '--kappa=-1', '--nr-max', '0', '--format', 'csv')
        self.assertEqual(sorted({row['beta_s'] for row in parse_csv(out)}), [-0.5, 0.1])

    def test_scan_without_values(self):
        with self.assertRaises(CommandError) as ctx:
            run('scan', '--alpha', '0.2', '--scan-param', 'alpha')
        self.assertEqual(ctx.exception.returncode, 2)


@override_settings(DIRAC_KEPLER=SOLVER_SETTINGS)
class VerifyClaimsCommandTests(SimpleTestCase):
    def test_json_report(self):
        out, _ = run('verify_claims', *FLAGSHIP_FLAGS, '--kappa=-1', '--kappa=1', '--nr-max', '0',
                     *ALGEBRAIC_CLAIMS, '--skip-sweep', '--format', 'json')
        report = json.loads(out)
        self.assertTrue(report['all_supported'])
        self.assertEqual([claim['claim'] for claim in report['claims']],
                         ['offdiagonal', 'lstar_noninteger', 'lambda_eigencheck'])
        self.assertIsNone(report['sweep'])

    def test_boundary_verdict_fails(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify_claims', '--alpha', '0.3', '--beta-s', '0.3', '--kappa=-1', '--claims', 'offdiagonal',
                '--skip-sweep')
        self.assertEqual(ctx.exception.returncode, 1)

    def test_csv_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            run('verify_claims', *FLAGSHIP_FLAGS, '--claims', 'offdiagonal', '--skip-sweep', '--format', 'csv')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_report_files(self):
        with tempfile.TemporaryDirectory() as directory:
            base = Path(directory) / 'report'
            run('verify_claims', *FLAGSHIP_FLAGS, '--kappa=-1', '--claims', 'offdiagonal', '--skip-sweep',
                '--reproduce-flaw', '--out', str(base))
            payload = json.loads(base.with_suffix('.json').read_text(encoding='utf-8'))
            text = base.with_suffix('.txt').read_text(encoding='utf-8')
        self.assertTrue(any('2×2' in note for note in payload['notes']))
        self.assertIn('[supported] offdiagonal', text)


@override_settings(DIRAC_KEPLER=SOLVER_SETTINGS)
class SaveRunTests(TestCase):
    def test_spectrum_saved(self):
        run('spectrum', *FLAGSHIP_FLAGS, '--kappa=-1', '--nr-max', '0', '--format', 'csv', '--save',
            '--units', 'ev', '--mc2', '1000')
        saved = ComputationRun.objects.get()
        self.assertEqual(saved.command, 'spectrum')
        self.assertEqual(saved.exit_status, 0)
        self.assertEqual(saved.parameters['alpha'], 0.2)
        low, high = sorted(SpectrumEntry.objects.values_list('energy', flat=True))
        self.assertAlmostEqual(low, -0.96, places=14)
        self.assertAlmostEqual(high, 0.8, places=14)

    def test_failed_spectrum_saved(self):
        with self.assertRaises(CommandError):
            run('spectrum', '--alpha', '2.0', '--kappa=-1', '--save')
        saved = ComputationRun.objects.get()
        self.assertEqual(saved.exit_status, 1)
        self.assertIn('Закритический', SpectrumEntry.objects.get().error)

    def test_claims_saved(self):
        run('verify_claims', *FLAGSHIP_FLAGS, '--kappa=-1', *ALGEBRAIC_CLAIMS, '--skip-sweep', '--save')
        saved = ComputationRun.objects.get()
        self.assertEqual(ClaimVerdict.objects.filter(run=saved).count(), 3)
        self.assertIn('[supported] lambda_eigencheck', saved.report_text)
