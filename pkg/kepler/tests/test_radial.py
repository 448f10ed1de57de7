import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from kepler import radial
from kepler.exceptions import InvalidInputError, SolverError, SupercriticalError
from kepler.params import CouplingParams, channel_from_kappa
from kepler.radial import (
    RadialGrid,
    dirac_rhs,
    find_eigenvalues,
    frobenius_seed,
    integrate_path,
    locate_levels,
    matching_radius,
    shoot_and_match,
)
from kepler.spectrum import energy_branches

FLAGSHIP = CouplingParams(alpha=0.2, beta_s=-0.5)


def nearest(solutions, energy):
    return min(abs(solution.energy - energy) for solution in solutions)


class RadialGridTests(SimpleTestCase):
    def test_log_spacing(self):
        radii = RadialGrid(r_min=1e-3, r_max=10.0, points=31).radii()
        ratios = radii[1:] / radii[:-1]
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)
        self.assertAlmostEqual(radii[0], 1e-3)
        self.assertAlmostEqual(radii[-1], 10.0)

    def test_refined_grid_keeps_coarse_nodes(self):
        grid = RadialGrid(r_min=1e-3, r_max=10.0, points=31)
        fine = grid.refined_radii()
        self.assertEqual(fine.size, 61)
        np.testing.assert_array_equal(fine[::2], grid.radii())
        self.assertTrue(np.all(np.diff(fine) > 0))

    def test_invalid(self):
        with self.assertRaises(InvalidInputError):
            RadialGrid(r_min=0.0)
        with self.assertRaises(InvalidInputError):
            RadialGrid(points=4)
        with self.assertRaises(InvalidInputError):
            RadialGrid(spacing='cubic')

    def test_covers_decay(self):
        grid = RadialGrid(r_max=400.0)
        self.assertTrue(grid.covers_decay(0.6))
        self.assertFalse(grid.covers_decay(0.05))

    def test_covering_extends_grid(self):
        grid = RadialGrid(r_max=400.0, points=6000)
        self.assertIs(grid.covering(0.6), grid)
        extended = grid.covering(0.05)
        self.assertAlmostEqual(extended.r_max, 600.0)
        self.assertTrue(extended.covers_decay(0.05))
        self.assertGreater(extended.points, grid.points)
        step = math.log(grid.r_max / grid.r_min) / (grid.points - 1)
        extended_step = math.log(extended.r_max / extended.r_min) / (extended.points - 1)
        self.assertLessEqual(extended_step, step)
        with self.assertRaises(InvalidInputError):
            grid.covering(0.0)


class RhsTests(SimpleTestCase):
    def test_rejects_origin(self):
        with self.assertRaises(InvalidInputError):
            dirac_rhs(0.0, 1.0, 1.0, 0.5, -1, FLAGSHIP)

    def test_free_equations(self):
        c = CouplingParams(alpha=0.0, beta_s=0.0)
        dG, dF = dirac_rhs(2.0, 1.0, 0.5, 0.6, -1, c)
        self.assertAlmostEqual(dG, 0.5 + 1.6 * 0.5)
        self.assertAlmostEqual(dF, -0.5 * 0.5 + 0.4)

    def test_frobenius_seed_is_null_vector(self):
        for kappa in (-2, -1, 1, 2):
            channel = channel_from_kappa(kappa, FLAGSHIP)
            gamma = channel.gamma
            indicial = np.array([
                [gamma + kappa, -(FLAGSHIP.alpha + FLAGSHIP.beta_s)],
                [FLAGSHIP.alpha - FLAGSHIP.beta_s, gamma - kappa],
            ])
            seed = frobenius_seed(channel, FLAGSHIP)
            self.assertAlmostEqual(np.linalg.norm(seed), 1.0)
            self.assertLess(np.linalg.norm(indicial @ seed), 1e-12)

    def test_matching_radius_inside_grid(self):
        radii = RadialGrid().radii()
        r_match = matching_radius(channel_from_kappa(-1, FLAGSHIP), FLAGSHIP, radii)
        self.assertGreater(r_match, radii[0])
        self.assertLess(r_match, radii[-1])

    def test_propagation_keeps_exact_power_law(self):
        channel = channel_from_kappa(-1, FLAGSHIP)
        seed = frobenius_seed(channel, FLAGSHIP)
        path = np.geomspace(1e-8, 1e-6, 200)
        states = integrate_path(path, seed * 1e-8 ** channel.gamma, 0.8, -1, FLAGSHIP)
        slope = math.log(np.linalg.norm(states[-1]) / np.linalg.norm(states[0])) / math.log(100.0)
        self.assertAlmostEqual(slope, channel.gamma, places=4)


class ShootingTests(SimpleTestCase):
    def test_defect_vanishes_at_eigenvalue(self):
        result = shoot_and_match(0.8, -1, FLAGSHIP)
        self.assertLessEqual(abs(result.defect), 1e-8)

    def test_defect_away_from_eigenvalue(self):
        result = shoot_and_match(0.87, -1, FLAGSHIP)
        self.assertGreater(abs(result.defect), 1e-3)

    def test_index_steps_across_level(self):
        below = shoot_and_match(0.8 - 1e-4, -1, FLAGSHIP)
        above = shoot_and_match(0.8 + 1e-4, -1, FLAGSHIP)
        self.assertEqual(below.index - above.index, 1)

    def test_energy_outside_gap(self):
        with self.assertRaises(InvalidInputError):
            shoot_and_match(1.0, -1, FLAGSHIP)

    def test_supercritical(self):
        with self.assertRaises(SupercriticalError):
            shoot_and_match(0.5, -1, CouplingParams(alpha=1.5, beta_s=0.0))


class FindEigenvaluesTests(SimpleTestCase):
    def test_flagship_positive_branch(self):
        solutions = find_eigenvalues(-1, FLAGSHIP, n_max=1)
        self.assertLessEqual(nearest(solutions, 0.8), 1e-8)

    def test_flagship_negative_branch_lives_in_partner_channel(self):
        solutions = find_eigenvalues(1, FLAGSHIP, n_max=1)
        self.assertLessEqual(nearest(solutions, -0.96), 1e-8)

    def test_sommerfeld_ground_state(self):
        solutions = find_eigenvalues(-1, CouplingParams(alpha=0.5, beta_s=0.0), n_max=1)
        self.assertAlmostEqual(solutions[0].energy, math.sqrt(0.75), delta=1e-8)

    def test_degeneracy_between_channels(self):
        c = CouplingParams(alpha=0.5, beta_s=0.0)
        upper = find_eigenvalues(-1, c, window=(0.0, 0.999), n_max=1)
        lower = find_eigenvalues(1, c, window=(0.0, 0.999), n_max=0)
        self.assertAlmostEqual(upper[1].energy, lower[0].energy, delta=1e-8)

    def test_degeneracy_with_scalar_coupling(self):
        window = (0.85, 0.96)
        excited = find_eigenvalues(-1, FLAGSHIP, window=window, n_max=0)
        ground = find_eigenvalues(1, FLAGSHIP, window=window, n_max=0)
        self.assertEqual(len(excited), 1)
        self.assertEqual(len(ground), 1)
        self.assertAlmostEqual(excited[0].energy, ground[0].energy, delta=1e-8)
        plus, _ = energy_branches(1, channel_from_kappa(-1, FLAGSHIP), FLAGSHIP)
        self.assertAlmostEqual(excited[0].energy, plus.energy, delta=1e-8)

    def test_solution_properties(self):
        solutions = find_eigenvalues(-1, FLAGSHIP, window=(0.5, 0.9), n_max=0)
        self.assertEqual(len(solutions), 1)
        solution = solutions[0]
        gamma = channel_from_kappa(-1, FLAGSHIP).gamma
        self.assertAlmostEqual(solution.norm(), 1.0, delta=1e-8)
        self.assertLess(abs(solution.exponent - gamma) / gamma, 0.02)
        self.assertEqual(solution.nodes, 0)
        self.assertLess(abs(solution.upper[-1]), 1e-8)

    def test_no_levels_where_effective_charge_repels(self):
        c = CouplingParams(alpha=0.5, beta_s=0.4)
        for solution in find_eigenvalues(-1, c, window=(-0.999, 0.998), n_max=2):
            self.assertGreater(c.alpha * solution.energy - c.beta_s, 0.0)

    def test_empty_window(self):
        self.assertEqual(find_eigenvalues(-1, FLAGSHIP, window=(0.1, 0.2)), [])

    def test_sorted_and_parallel(self):
        serial = find_eigenvalues(1, FLAGSHIP, n_max=1)
        parallel = find_eigenvalues(1, FLAGSHIP, n_max=1, workers=4)
        energies = [solution.energy for solution in serial]
        self.assertEqual(energies, sorted(energies))
        self.assertEqual(energies, [solution.energy for solution in parallel])

    def test_grid_reaches_decay_at_window_edge(self):
        solutions = find_eigenvalues(-1, FLAGSHIP, window=(0.5, 0.999), n_max=0)
        self.assertAlmostEqual(solutions[0].energy, 0.8, delta=1e-8)
        self.assertAlmostEqual(solutions[0].radii[-1], 30.0 / math.sqrt(1.0 - 0.999 ** 2), places=6)

    def test_invalid_window(self):
        with self.assertRaises(InvalidInputError):
            find_eigenvalues(-1, FLAGSHIP, window=(-1.5, 0.5))
        with self.assertRaises(InvalidInputError):
            find_eigenvalues(-1, FLAGSHIP, n_max=-1)


real_brentq = radial.brentq


def brentq_failing_below_zero(f, a, b, **kwargs):
    if b <= 0.0:
        raise RuntimeError('не сошлось')
    return real_brentq(f, a, b, **kwargs)


class UnresolvedLevelTests(SimpleTestCase):
    def test_failure_is_reported_per_level(self):
        with mock.patch('kepler.radial.brentq', brentq_failing_below_zero):
            solutions, failures = locate_levels(-1, FLAGSHIP, n_max=0)
        self.assertEqual(len(solutions), 1)
        self.assertAlmostEqual(solutions[0].energy, 0.8, delta=1e-8)
        self.assertEqual(len(failures), 1)
        failure = failures[0]
        self.assertEqual((failure.kappa, failure.level), (-1, 0))
        self.assertLess(failure.bracket[0], failure.bracket[1])
        self.assertLessEqual(failure.bracket[1], 0.0)
        self.assertIn('не сошлось', failure.message)

    def test_find_eigenvalues_raises(self):
        with mock.patch('kepler.radial.brentq', brentq_failing_below_zero):
            with self.assertRaises(SolverError):
                find_eigenvalues(-1, FLAGSHIP, n_max=0)
