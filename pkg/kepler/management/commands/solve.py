from django.core.management.base import CommandError

from kepler.cli import FAILURE, KeplerCommand
from kepler.exceptions import SolverError, SupercriticalError
from kepler.output import SOLVE_COLUMNS, render_table, scale_energies
from kepler.radial import locate_levels
from kepler.spectrum import channel_lines

# Допуск сопоставления численного уровня с аналитической линией
PAIRING_TOLERANCE = 1e-6


def pair_with_lines(solutions, lines, c):
    """Строки таблицы: численный уровень и ближайшая аналитическая линия канала"""
    rows = []
    for solution in solutions:
        line = min(lines, key=lambda item: abs(item.energy - solution.energy), default=None)
        if line is not None and abs(line.energy - solution.energy) > PAIRING_TOLERANCE:
            line = None
        rows.append({
            'kappa': solution.kappa,
            'n_r': line.n_r if line is not None else solution.nodes,
            'E_numeric': solution.energy,
            'E_analytic': line.energy if line is not None else None,
            'abs_err': abs(line.energy - solution.energy) if line is not None else None,
            'q_eff': c.alpha * solution.energy - c.beta_s,
            'gamma': line.gamma if line is not None else None,
            'l_star': line.l_star if line is not None else None,
            'N': line.principal if line is not None else None,
        })
    return rows


class Command(KeplerCommand):
    help = 'Численные уровни радиальных уравнений Дирака и сравнение с аналитическим спектром'

    def run(self, config, **options):
        c = config.couplings()
        rows = []
        errors = []
        for kappa in config.channel_kappas():
            try:
                solutions, failures = locate_levels(
                    kappa, c,
                    window=config.window,
                    n_max=config.n_max,
                    grid=config.radial_grid(),
                    refine=config.refine,
                    workers=config.workers,
                )
                lines = [line for line in channel_lines(kappa, c, config.n_max + 1) if line.admissible]
            except (SupercriticalError, SolverError) as exc:
                errors.append((kappa, str(exc)))
                continue
            rows.extend(pair_with_lines(solutions, lines, c))
            errors.extend((kappa, failure.message) for failure in failures)

        title = f'Численные уровни при α={c.alpha:.12g}, β_s={c.beta_s:.12g} (энергии в {config.units})'
        table = render_table(SOLVE_COLUMNS, scale_energies(rows, config.energy_scale()), config.output_format, title)
        self.emit(table, config.out)
        for kappa, error in errors:
            self.stderr.write(f'κ={kappa}: {error}')

        errs = [row['abs_err'] for row in rows if row['abs_err'] is not None]
        worst = max(errs) if errs else 0.0
        summary = f'Уровней: {len(rows)}, макс. |E_numeric − E_analytic| = {worst:.3e}, ошибок: {len(errors)}'
        exit_status = FAILURE if errors else 0
        if options.get('save'):
            stored = [{'alpha': c.alpha, 'beta_s': c.beta_s, **row} for row in rows]
            stored += [{'alpha': c.alpha, 'beta_s': c.beta_s, 'kappa': kappa, 'error': error} for kappa, error in errors]
            self.save(config, 'solve', exit_status, summary, rows=stored)
        if errors:
            raise CommandError(summary, returncode=FAILURE)
        self.notify(config, f'✓ {summary}')
