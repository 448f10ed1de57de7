import json
from pathlib import Path

from django.core.management.base import CommandError

from kepler.claims import CLAIM_IDS, full_report
from kepler.cli import FAILURE, USAGE_ERROR, KeplerCommand
from kepler.output import render_json, render_report_text


class Command(KeplerCommand):
    help = 'Проверка утверждений комментария: вердикты, сравнение спектров, факторизация'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--claims', nargs='+', choices=CLAIM_IDS, help='Проверяемые утверждения')
        parser.add_argument('--skip-sweep', dest='skip_sweep', action='store_true',
                            help='Не сравнивать аналитический спектр с численным')

    def run(self, config, **options):
        if config.output_format == 'csv':
            raise CommandError('Отчёт выводится только в форматах json и text', returncode=USAGE_ERROR)

        grid = config.claim_grid()
        self.notify(config, f'Проверка {len(config.claims)} утверждений на сетке '
                            f'{len(grid.alphas)}×{len(grid.betas)}×{len(grid.kappas)}...')
        report = full_report(grid, config.claims, config.reproduce_flaw, sweep=not options.get('skip_sweep'))

        json_text = render_json(report.as_dict())
        text = render_report_text(report)
        if config.out:
            base = Path(config.out)
            self.emit(json_text, base.with_suffix('.json'))
            self.emit(text, base.with_suffix('.txt'))
        else:
            self.emit(json_text if config.output_format == 'json' else text)

        sweep_ok = report.sweep is None or report.sweep.passed
        ok = report.all_supported and sweep_ok
        supported = sum(1 for claim in report.claims if claim.supported)
        summary = f'Подтверждено {supported} из {len(report.claims)} утверждений'
        if report.sweep is not None:
            summary += f', макс. |ΔE| = {report.sweep.max_error:.3e}'
        if options.get('save'):
            self.save(config, 'verify_claims', 0 if ok else FAILURE, summary,
                      claims=json.loads(json_text)['claims'], report_text=text)
        if not ok:
            raise CommandError(summary, returncode=FAILURE)
        self.notify(config, f'✓ {summary}')
