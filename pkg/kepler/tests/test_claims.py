from unittest import mock

from django.test import SimpleTestCase

from kepler.claims import (
    BOUNDARY,
    CLAIM_IDS,
    REFUTED,
    SUPPORTED,
    ClaimGrid,
    SpectrumOracle,
    claim_binding_condition,
    claim_lambda_eigencheck,
    claim_lstar_noninteger,
    claim_offdiagonal,
    claim_two_branches,
    full_report,
    oracle_sweep,
    run_claim,
    unpaired_levels,
)
from kepler.exceptions import InvalidInputError
from kepler.spectrum import MINUS, channel_lines

# Одна точка (α, β_s) и ослабленный допуск, чтобы тесты с численным решателем шли быстро
FLAGSHIP_GRID = ClaimGrid(alphas=(0.2,), betas=(-0.5,), kappas=(-1, 1), nr_max=0, tolerance=1e-7)
REPULSIVE_GRID = ClaimGrid(alphas=(0.5,), betas=(0.4,), kappas=(-1,), nr_max=0,
                           window=(-0.999, 0.998), tolerance=1e-7)


class ClaimGridTests(SimpleTestCase):
    def test_empty_grid(self):
        with self.assertRaises(InvalidInputError):
            ClaimGrid(alphas=())
        with self.assertRaises(InvalidInputError):
            ClaimGrid(nr_max=-1)

    def test_couplings_product(self):
        grid = ClaimGrid()
        self.assertEqual(len(grid.couplings()), 18)
        self.assertTrue(grid.in_window(0.5))
        self.assertFalse(grid.in_window(0.9995))


class AlgebraicClaimTests(SimpleTestCase):
    def test_offdiagonal_default_grid(self):
        report = claim_offdiagonal(ClaimGrid())
        self.assertEqual(report.verdict, SUPPORTED)
        self.assertEqual(len(report.evidence), 18)

    def test_offdiagonal_coincidence_only(self):
        report = claim_offdiagonal(ClaimGrid(alphas=(0.3,), betas=(0.3,)))
        self.assertEqual(report.verdict, BOUNDARY)
        self.assertEqual(report.evidence[0]['role'], 'coincidence')

    def test_offdiagonal_free_excluded(self):
        report = claim_offdiagonal(ClaimGrid(alphas=(0.0,), betas=(0.0,)))
        self.assertEqual(report.verdict, BOUNDARY)
        self.assertEqual(report.evidence[0]['role'], 'excluded')

    def test_lstar_default_grid(self):
        report = claim_lstar_noninteger(ClaimGrid())
        self.assertEqual(report.verdict, SUPPORTED)
        integer_rows = [row for row in report.evidence if row.get('integer')]
        self.assertEqual(len(integer_rows), 9)
        for row in integer_rows:
            self.assertEqual(abs(row['alpha']), abs(row['beta_s']))

    def test_lstar_integer_only(self):
        report = claim_lstar_noninteger(ClaimGrid(alphas=(0.3,), betas=(-0.3, 0.3)))
        self.assertEqual(report.verdict, BOUNDARY)

    def test_lstar_flagship_value(self):
        report = claim_lstar_noninteger(ClaimGrid(alphas=(0.2,), betas=(-0.5,), kappas=(-1,)))
        self.assertAlmostEqual(report.evidence[0]['l_star'], 0.1, places=12)
        self.assertFalse(report.evidence[0]['integer'])

    def test_lambda_eigencheck_default_grid(self):
        report = claim_lambda_eigencheck(ClaimGrid())
        self.assertEqual(report.verdict, SUPPORTED)

    def test_lambda_eigencheck_reports_eigenvectors(self):
        report = claim_lambda_eigencheck(ClaimGrid(alphas=(0.2,), betas=(-0.5,), kappas=(-1,)))
        point = report.evidence[0]
        self.assertFalse(point['hermitian'])
        values = [pair['eigenvalue'] for pair in point['eigenvectors']]
        self.assertAlmostEqual(values[0], -1.1, places=12)
        self.assertAlmostEqual(values[1], 1.1, places=12)
        for pair in point['eigenvectors']:
            self.assertAlmostEqual(sum(re * re + im * im for re, im in pair['vector']), 1.0, places=12)

    def test_lambda_eigencheck_near_critical(self):
        report = claim_lambda_eigencheck(ClaimGrid(alphas=(0.999,), betas=(0.0,), kappas=(-1,)))
        self.assertEqual(report.verdict, SUPPORTED)

    def test_supercritical_points_recorded(self):
        report = claim_lambda_eigencheck(ClaimGrid(alphas=(2.0,), betas=(0.0,), kappas=(-1,)))
        self.assertIn('error', report.evidence[0])

    def test_unknown_claim(self):
        with self.assertRaises(InvalidInputError):
            run_claim('nonexistent', ClaimGrid())


class NumericClaimTests(SimpleTestCase):
    def test_two_branches_flagship(self):
        report = claim_two_branches(FLAGSHIP_GRID)
        self.assertEqual(report.verdict, SUPPORTED)
        row = report.evidence[0]
        self.assertEqual((row['host_plus'], row['host_minus']), (-1, 1))
        self.assertTrue(row['confirmed'])

    def test_two_branches_pure_vector(self):
        grid = ClaimGrid(alphas=(0.5,), betas=(0.0,), kappas=(-1,), nr_max=0)
        report = claim_two_branches(grid)
        self.assertEqual(report.verdict, REFUTED)
        self.assertEqual(report.evidence, [])

    def test_binding_condition_arbitration(self):
        report = claim_binding_condition(REPULSIVE_GRID)
        self.assertEqual(report.verdict, SUPPORTED)
        for row in report.evidence:
            self.assertEqual(row['solver'], row['corrected'])
        self.assertTrue(any(row['solver'] != row['uncorrected'] for row in report.evidence))

    def test_oracle_sweep_flagship(self):
        sweep = oracle_sweep(FLAGSHIP_GRID)
        self.assertTrue(sweep.passed)
        self.assertLessEqual(sweep.max_error, 1e-7)
        energies = sorted(row['E_analytic'] for row in sweep.rows)
        self.assertAlmostEqual(energies[1], -0.96, places=12)

    def test_sweep_flags_levels_of_a_missing_branch(self):
        def without_minus(kappa, c, nr_max):
            return [line for line in channel_lines(kappa, c, nr_max) if line.branch != MINUS]

        with mock.patch('kepler.claims.channel_lines', without_minus):
            sweep = oracle_sweep(FLAGSHIP_GRID)
        self.assertFalse(sweep.passed)
        self.assertEqual(sweep.unmatched_analytic, [])
        flagged = [(row['kappa'], row['E_numeric']) for row in sweep.unmatched_numeric]
        self.assertTrue(all(energy < 0 for _, energy in flagged))
        self.assertTrue(any(kappa == 1 and abs(energy + 0.96) < 1e-6 for kappa, energy in flagged))

    def test_oracle_cache(self):
        oracle = SpectrumOracle(FLAGSHIP_GRID)
        c = FLAGSHIP_GRID.couplings()[0]
        self.assertIs(oracle.energies(-1, c), oracle.energies(-1, c))
        self.assertTrue(oracle.has_level(0.8, -1, c))


class UnpairedLevelsTests(SimpleTestCase):
    def test_all_paired(self):
        self.assertEqual(unpaired_levels([-0.96, 0.8, 0.94], [0.8, -0.96, 0.94, 0.97, -0.99], 1e-6), [])

    def test_side_without_lines(self):
        self.assertEqual(unpaired_levels([-0.9, 0.8], [0.8], 1e-6), [-0.9])

    def test_extra_level_breaks_pairs_outward(self):
        self.assertEqual(unpaired_levels([0.8, 0.85, 0.94], [0.8, 0.94, 0.97], 1e-6), [0.85, 0.94])

    def test_more_levels_than_lines(self):
        self.assertEqual(unpaired_levels([0.8, 0.94], [0.8], 1e-6), [0.94])


class FullReportTests(SimpleTestCase):
    ALGEBRAIC = ('lambda_eigencheck', 'offdiagonal', 'lstar_noninteger')

    def test_selected_claims_in_canonical_order(self):
        report = full_report(FLAGSHIP_GRID, self.ALGEBRAIC, sweep=False)
        self.assertEqual([claim.claim_id for claim in report.claims],
                         ['offdiagonal', 'lstar_noninteger', 'lambda_eigencheck'])
        self.assertTrue(report.all_supported)
        self.assertIsNone(report.sweep)
        self.assertEqual(len(report.factorization), 2)

    def test_deterministic(self):
        first = full_report(FLAGSHIP_GRID, self.ALGEBRAIC, sweep=False).as_dict()
        second = full_report(FLAGSHIP_GRID, self.ALGEBRAIC, sweep=False).as_dict()
        self.assertEqual(first, second)

    def test_reproduce_flaw_note(self):
        report = full_report(FLAGSHIP_GRID, ('offdiagonal',), reproduce_flaw=True, sweep=False)
        self.assertTrue(any('2×2' in note for note in report.notes))

    def test_invalid_selection(self):
        with self.assertRaises(InvalidInputError):
            full_report(FLAGSHIP_GRID, ())
        with self.assertRaises(InvalidInputError):
            full_report(FLAGSHIP_GRID, ('offdiagonal', 'unknown'))

    def test_all_claims_on_flagship(self):
        report = full_report(FLAGSHIP_GRID, CLAIM_IDS)
        verdicts = {claim.claim_id: claim.verdict for claim in report.claims}
        self.assertEqual(verdicts['two_branches'], SUPPORTED)
        self.assertEqual(verdicts['offdiagonal'], SUPPORTED)
        self.assertTrue(report.sweep.passed)


class DefaultGridTests(SimpleTestCase):
    """Полная сетка по умолчанию: 18 точек (α, β_s) и три канала, около минуты"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.report = full_report(ClaimGrid())

    def test_every_claim_supported(self):
        verdicts = {claim.claim_id: claim.verdict for claim in self.report.claims}
        self.assertEqual(verdicts, {claim_id: SUPPORTED for claim_id in CLAIM_IDS})

    def test_sweep_matches_every_state(self):
        sweep = self.report.sweep
        self.assertTrue(sweep.passed)
        self.assertLessEqual(sweep.max_error, 1e-8)
        self.assertEqual(sweep.unmatched_analytic, [])
        self.assertEqual(sweep.unmatched_numeric, [])
        self.assertGreater(len(sweep.rows), 1)

    def test_two_branches_confirmed_somewhere(self):
        claim = next(claim for claim in self.report.claims if claim.claim_id == 'two_branches')
        self.assertTrue(any(row.get('confirmed') for row in claim.evidence))

    def test_binding_condition_contradicts_uncorrected_form(self):
        claim = next(claim for claim in self.report.claims if claim.claim_id == 'binding_condition')
        self.assertEqual(claim.verdict, SUPPORTED)
        contradicting = [row for row in claim.evidence if row['uncorrected'] and not row['corrected']]
        self.assertTrue(contradicting)
        self.assertFalse(any(row['solver'] for row in contradicting))
