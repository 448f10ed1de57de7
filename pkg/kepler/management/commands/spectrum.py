from django.core.management.base import CommandError

from kepler.cli import FAILURE, KeplerCommand
from kepler.exceptions import NoBoundStateError, SupercriticalError
from kepler.output import SPECTRUM_COLUMNS, render_table, scale_energies
from kepler.spectrum import branch_table


def spectrum_rows(c, kappas, nr_max):
    """Строки аналитического спектра; закритический канал даёт строку с ошибкой"""
    rows = []
    failed = 0
    for kappa in kappas:
        try:
            lines = branch_table(kappa, c, nr_max)
        except (SupercriticalError, NoBoundStateError) as exc:
            rows.append({'kappa': kappa, 'error': str(exc)})
            failed += 1
            continue
        rows.extend(line.as_row() for line in lines)
    return rows, failed


class Command(KeplerCommand):
    help = 'Аналитический спектр: обе ветви энергии с признаком допустимости'

    def run(self, config, **options):
        c = config.couplings()
        kappas = config.channel_kappas()
        rows, failed = spectrum_rows(c, kappas, config.nr_max)
        title = f'Спектр при α={c.alpha:.12g}, β_s={c.beta_s:.12g} (энергии в {config.units})'
        table = render_table(SPECTRUM_COLUMNS, scale_energies(rows, config.energy_scale()), config.output_format, title)
        self.emit(table, config.out)

        admissible = sum(1 for row in rows if row.get('admissible'))
        all_failed = failed == len(kappas)
        summary = f'Каналов: {len(kappas)}, закритических: {failed}, допустимых линий: {admissible}'
        if options.get('save'):
            stored = [{'alpha': c.alpha, 'beta_s': c.beta_s, **row} for row in rows]
            self.save(config, 'spectrum', FAILURE if all_failed else 0, summary, rows=stored)
        if all_failed:
            raise CommandError(f'Все каналы закритические: {summary}', returncode=FAILURE)
        self.notify(config, f'✓ {summary}')
