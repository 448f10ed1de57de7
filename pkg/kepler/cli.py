"""
Общая часть management-команд: флаги, сборка RunConfig, вывод и сохранение.

Коды завершения: 0 успех, 1 численная ошибка или неподтверждённое
утверждение, 2 ошибка использования (флаги, конфигурация).
"""

import dataclasses
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from .config import ENERGY_UNITS, FORMATS, build_run_config
from .exceptions import ConfigError, DiracKeplerError
from .models import record_run

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
FAILURE = 1

# dest флага → поле RunConfig
FLAG_FIELDS = {
    'alpha': 'alpha',
    'beta_s': 'beta_s',
    'e2': 'e2',
    'a': 'a',
    'mass': 'mass',
    'input_units': 'input_units',
    'kappa': 'kappas',
    'nr_max': 'nr_max',
    'n_max': 'n_max',
    'window': 'window',
    'grid_points': 'grid_points',
    'r_min': 'r_min',
    'r_max': 'r_max',
    'workers': 'workers',
    'format': 'output_format',
    'out': 'out',
    'reproduce_flaw': 'reproduce_flaw',
    'units': 'units',
    'mc2': 'mc2',
    'claims': 'claims',
    'scan_param': 'scan_param',
    'scan_values': 'scan_values',
}


class KeplerCommand(BaseCommand):
    """Базовая команда: общие флаги и перевод ошибок в коды завершения"""

    def add_arguments(self, parser):
        coupling = parser.add_argument_group('параметры связи')
        coupling.add_argument('--alpha', type=float, help='Векторная связь α = e²/(ħc)')
        coupling.add_argument('--beta-s', dest='beta_s', type=float, help='Скалярная связь β_s = mca/ħ')
        coupling.add_argument('--e2', type=float, help='Сила векторного взаимодействия e²')
        coupling.add_argument('--a', type=float, help='Параметр массы m* = m(1 + a/r)')
        coupling.add_argument('--mass', type=float, help='Масса частицы')
        coupling.add_argument('--input-units', dest='input_units', choices=('natural', 'si'),
                              help='Единицы для --e2, --a, --mass')

        spectrum = parser.add_argument_group('спектр и сетка')
        spectrum.add_argument('--kappa', type=int, action='append', help='Канал κ (можно повторять)')
        spectrum.add_argument('--nr-max', dest='nr_max', type=int, help='Наибольший радиальный номер n_r')
        spectrum.add_argument('--n-max', dest='n_max', type=int, help='Число численных уровней с каждой стороны от E=0 минус один')
        spectrum.add_argument('--window', help='Окно энергий lo,hi в единицах mc² (пишите --window=-0.9,0.9)')
        spectrum.add_argument('--grid-points', dest='grid_points', type=int, help='Число узлов радиальной сетки')
        spectrum.add_argument('--r-min', dest='r_min', type=float)
        spectrum.add_argument('--r-max', dest='r_max', type=float)
        spectrum.add_argument('--workers', type=int, help='Число потоков для поиска уровней')

        output = parser.add_argument_group('вывод')
        output.add_argument('--format', choices=FORMATS, help='Формат вывода')
        output.add_argument('--out', help='Файл для результата (по умолчанию stdout)')
        output.add_argument('--units', choices=ENERGY_UNITS, help='Единицы энергии при выводе')
        output.add_argument('--mc2', type=float, help='Энергия покоя mc² в эВ для --units ev; при входных данных в СИ берётся из --mass')
        output.add_argument('--config', dest='config_path', help='Файл key = value (по умолчанию DIRAC_KEPLER_CONFIG)')
        output.add_argument('--reproduce-flaw', dest='reproduce_flaw', action='store_true',
                            help='Построить центробежный член с 2×2 σ')
        output.add_argument('--save', action='store_true', help='Сохранить результат в базу данных')

    def handle(self, *args, **options):
        config = self.run_config(options)
        try:
            return self.run(config, **options)
        except CommandError:
            raise
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except DiracKeplerError as exc:
            logger.debug('Команда завершилась ошибкой', exc_info=True)
            raise CommandError(str(exc), returncode=FAILURE) from exc

    def run(self, config, **options):
        raise NotImplementedError('subclasses of KeplerCommand must provide a run() method')

    def run_config(self, options):
        flags = {field: options.get(dest) for dest, field in FLAG_FIELDS.items()}
        try:
            return build_run_config(flags, config_path=options.get('config_path'))
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

    def emit(self, text, path=None):
        if not path:
            self.stdout.write(text, ending='')
            return
        try:
            Path(path).write_text(text, encoding='utf-8')
        except OSError as exc:
            raise CommandError(f'Не удалось записать {path}: {exc}', returncode=FAILURE) from exc
        self.stdout.write(self.style.SUCCESS(f'✓ Результат записан в {path}'))

    def notify(self, config, message, ok=True):
        """Итоговые сообщения не смешиваются с машинным выводом в stdout"""
        style = self.style.SUCCESS if ok else self.style.ERROR
        if config.out or config.output_format == 'text':
            self.stdout.write(style(message))
        else:
            self.stderr.write(style(message))

    def save(self, config, command, exit_status, summary, **payload):
        parameters = dataclasses.asdict(config)
        run = record_run(command, parameters, exit_status=exit_status, summary=summary, **payload)
        self.notify(config, f'✓ Запуск сохранён: #{run.run_id}')
        return run
