from concurrent.futures import ThreadPoolExecutor

from django.core.management.base import CommandError

from kepler.cli import FAILURE, USAGE_ERROR, KeplerCommand
from kepler.exceptions import ConfigError
from kepler.output import SCAN_COLUMNS, render_table, scale_energies

from .spectrum import spectrum_rows


class Command(KeplerCommand):
    help = 'Аналитический спектр при переборе одной из связей (α или β_s)'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--scan-param', dest='scan_param', choices=('alpha', 'beta-s', 'beta_s'),
                            help='Перебираемая связь')
        parser.add_argument('--scan-values', dest='scan_values', help='Значения через запятую: v1,v2,...')

    def run(self, config, **options):
        points = self.points(config)
        kappas = config.channel_kappas()

        def rows_at(c):
            rows, failed = spectrum_rows(c, kappas, config.nr_max)
            return [{'alpha': c.alpha, 'beta_s': c.beta_s, **row} for row in rows], failed

        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            results = list(executor.map(rows_at, points))

        rows = [row for chunk, _ in results for row in chunk]
        failed = sum(count for _, count in results)
        title = f'Сканирование {config.scan_param}: {len(points)} значений (энергии в {config.units})'
        table = render_table(SCAN_COLUMNS, scale_energies(rows, config.energy_scale()), config.output_format, title)
        self.emit(table, config.out)

        summary = f'Значений: {len(points)}, строк: {len(rows)}, закритических каналов: {failed}'
        all_failed = failed == len(points) * len(kappas)
        if options.get('save'):
            self.save(config, 'scan', FAILURE if all_failed else 0, summary, rows=rows)
        if all_failed:
            raise CommandError(f'Все каналы закритические: {summary}', returncode=FAILURE)
        self.notify(config, f'✓ {summary}')

    def points(self, config):
        try:
            return config.scan_points()
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
