"""
Конфигурация запуска.

Порядок приоритета: значения из settings.DIRAC_KEPLER < файл конфигурации
(плоский key = value, ключи повторяют флаги) < флаги командной строки.
"""

import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from django.conf import settings
from scipy import constants

from .claims import CLAIM_IDS, DEFAULT_KAPPAS, ClaimGrid
from .exceptions import ConfigError, InvalidInputError
from .params import PhysicalInputs, CouplingParams, derive_couplings, l_from_kappa
from .radial import RadialGrid

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json', 'text')
ENERGY_UNITS = ('mc2', 'ev')
SCAN_PARAMS = ('alpha', 'beta_s')

COUPLING_KEYS = ('alpha', 'beta_s')
PHYSICAL_KEYS = ('e2', 'a', 'mass')

# Ключи settings.DIRAC_KEPLER → поля RunConfig
SETTINGS_KEYS = {
    'GRID_POINTS': 'grid_points',
    'R_MIN': 'r_min',
    'R_MAX': 'r_max',
    'WINDOW': 'window',
    'NR_MAX': 'nr_max',
    'N_MAX': 'n_max',
    'REFINE': 'refine',
    'WORKERS': 'workers',
    'ENERGY_TOLERANCE': 'tolerance',
}


def _float_pair(value):
    if isinstance(value, str):
        parts = [part.strip() for part in value.split(',')]
        if len(parts) != 2:
            raise ConfigError(f'Ожидалась пара чисел через запятую, получено {value!r}')
        value = parts
    lo, hi = value
    return float(lo), float(hi)


def _int_list(value):
    if isinstance(value, str):
        value = [part for part in value.replace(' ', '').split(',') if part]
    return tuple(int(item) for item in value)


def _float_list(value):
    if isinstance(value, str):
        value = [part for part in value.replace(' ', '').split(',') if part]
    return tuple(float(item) for item in value)


def _str_list(value):
    if isinstance(value, str):
        value = [part.strip() for part in value.split(',') if part.strip()]
    return tuple(value)


def _flag(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise ConfigError(f'Ожидалось логическое значение, получено {value!r}')


def _optional_path(value):
    return str(value) if value else None


def _scan_param(value):
    return str(value).replace('-', '_')


CONVERTERS = {
    'alpha': float,
    'beta_s': float,
    'e2': float,
    'a': float,
    'mass': float,
    'input_units': str,
    'kappas': _int_list,
    'nr_max': int,
    'n_max': int,
    'window': _float_pair,
    'grid_points': int,
    'r_min': float,
    'r_max': float,
    'refine': _flag,
    'workers': int,
    'tolerance': float,
    'output_format': str,
    'out': _optional_path,
    'claims': _str_list,
    'reproduce_flaw': _flag,
    'units': str,
    'mc2': float,
    'scan_param': _scan_param,
    'scan_values': _float_list,
}

# Имена ключей в файле и флагах, отличающиеся от полей
ALIASES = {
    'kappa': 'kappas',
    'format': 'output_format',
}


@dataclass(frozen=True)
class RunConfig:
    alpha: float | None = None
    beta_s: float | None = None
    e2: float | None = None
    a: float | None = None
    mass: float | None = None
    input_units: str = 'natural'
    kappas: tuple | None = None
    nr_max: int = 2
    n_max: int = 5
    window: tuple = (-0.999, 0.999)
    grid_points: int = 6000
    r_min: float = 1e-6
    r_max: float = 400.0
    refine: bool = True
    workers: int = 1
    tolerance: float = 1e-8
    output_format: str = 'text'
    out: str | None = None
    claims: tuple = CLAIM_IDS
    reproduce_flaw: bool = False
    units: str = 'mc2'
    mc2: float | None = None
    scan_param: str | None = None
    scan_values: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.has_couplings and self.has_physical_inputs:
            raise ConfigError('Укажите либо α и β_s, либо e², a и m, но не то и другое вместе')
        lo, hi = self.window
        if not (-1.0 < lo < hi < 1.0):
            raise ConfigError(f'Окно энергий должно лежать внутри (−1, 1), получено ({lo}, {hi})')
        if self.kappas is not None:
            if not self.kappas:
                raise ConfigError('Список κ пуст')
            for kappa in self.kappas:
                try:
                    l_from_kappa(kappa)
                except InvalidInputError as exc:
                    raise ConfigError(str(exc)) from exc
        if self.nr_max < 0 or self.n_max < 0:
            raise ConfigError('nr_max и n_max должны быть неотрицательными')
        if self.grid_points < 16 or self.r_min <= 0 or self.r_max <= self.r_min:
            raise ConfigError(
                f'Некорректная сетка: {self.grid_points} точек, r ∈ [{self.r_min}, {self.r_max}]'
            )
        if self.workers < 1:
            raise ConfigError(f'Число потоков должно быть положительным, получено {self.workers}')
        if self.output_format not in FORMATS:
            raise ConfigError(f'Неизвестный формат вывода: {self.output_format!r}')
        unknown = [claim for claim in self.claims if claim not in CLAIM_IDS]
        if unknown or not self.claims:
            raise ConfigError(f'Неизвестные утверждения: {", ".join(unknown) or "(пусто)"}')
        if self.units not in ENERGY_UNITS:
            raise ConfigError(f'Неизвестные единицы энергии: {self.units!r}')
        if self.units == 'ev' and not self.rest_energy_known:
            raise ConfigError('Для --units ev нужна положительная энергия покоя --mc2 (эВ) или масса в единицах СИ')
        if self.scan_param is not None and self.scan_param not in SCAN_PARAMS:
            raise ConfigError(f'Сканировать можно только alpha или beta_s, получено {self.scan_param!r}')

    @property
    def has_couplings(self):
        return self.alpha is not None or self.beta_s is not None

    @property
    def has_physical_inputs(self):
        return self.e2 is not None or self.a is not None or self.mass is not None

    @property
    def has_point(self):
        return self.has_couplings or self.has_physical_inputs

    @property
    def rest_energy_known(self):
        if self.mc2 is not None:
            return self.mc2 > 0 and math.isfinite(self.mc2)
        return self.input_units == 'si' and self.mass is not None and not self.has_couplings

    def physical_inputs(self) -> PhysicalInputs:
        if self.mass is None and self.input_units != 'natural':
            raise ConfigError('В единицах СИ масса обязательна')
        try:
            return PhysicalInputs(
                mass=1.0 if self.mass is None else self.mass,
                e2=self.e2 or 0.0,
                a=self.a or 0.0,
                units=self.input_units,
            )
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from exc

    def couplings(self) -> CouplingParams:
        """Безразмерные связи из α, β_s или из физических входных данных"""
        try:
            if self.has_couplings:
                return CouplingParams(alpha=self.alpha or 0.0, beta_s=self.beta_s or 0.0)
            if self.has_physical_inputs:
                return derive_couplings(self.physical_inputs())
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError('Не заданы параметры связи: укажите --alpha/--beta-s или --e2/--a/--mass')

    def channel_kappas(self):
        return self.kappas if self.kappas is not None else DEFAULT_KAPPAS

    def radial_grid(self) -> RadialGrid:
        return RadialGrid(r_min=self.r_min, r_max=self.r_max, points=self.grid_points)

    def claim_grid(self) -> ClaimGrid:
        """Сетка утверждений; заданная точка (α, β_s) сужает её до одной пары"""
        kwargs = {}
        if self.has_point:
            c = self.couplings()
            kwargs = {'alphas': (c.alpha,), 'betas': (c.beta_s,)}
        return ClaimGrid(
            kappas=tuple(self.channel_kappas()),
            nr_max=self.nr_max,
            window=self.window,
            radial_grid=self.radial_grid(),
            tolerance=self.tolerance,
            workers=self.workers,
            **kwargs,
        )

    def energy_scale(self):
        """Множитель энергий на выходе; без --mc2 энергия покоя берётся из массы в СИ"""
        if self.units != 'ev':
            return 1.0
        if self.mc2 is not None:
            return self.mc2
        return self.physical_inputs().rest_energy / constants.e

    def scan_points(self) -> list[CouplingParams]:
        if self.scan_param is None or not self.scan_values:
            raise ConfigError('Для сканирования нужны --scan-param и --scan-values')
        base = self.couplings() if self.has_point else CouplingParams(alpha=0.0, beta_s=0.0)
        points = []
        for value in self.scan_values:
            values = base.as_dict()
            values[self.scan_param] = value
            try:
                points.append(CouplingParams(**values))
            except InvalidInputError as exc:
                raise ConfigError(str(exc)) from exc
        return points


def _normalize_key(key):
    key = key.strip().lower().replace('-', '_')
    return ALIASES.get(key, key)


def convert_values(raw: dict, source: str) -> dict:
    values = {}
    for key, value in raw.items():
        name = _normalize_key(key)
        if name not in CONVERTERS:
            raise ConfigError(f'{source}: неизвестный параметр {key!r}')
        try:
            values[name] = CONVERTERS[name](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f'{source}: некорректное значение {key} = {value!r}') from exc
    return values


def parse_config_text(text: str, source: str = '<config>') -> dict:
    """Строки key = value; пустые строки и комментарии с # пропускаются"""
    raw = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f'{source}:{number}: ожидалась строка вида key = value')
        key, value = line.split('=', 1)
        raw[key.strip()] = value.strip()
    return convert_values(raw, source)


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f'Не удалось прочитать файл конфигурации {path}: {exc}') from exc
    logger.debug('Файл конфигурации %s', path)
    return parse_config_text(text, str(path))


def settings_defaults() -> dict:
    options = getattr(settings, 'DIRAC_KEPLER', {})
    return {SETTINGS_KEYS[key]: value for key, value in options.items() if key in SETTINGS_KEYS}


def build_run_config(flags: dict | None = None, config_path=None) -> RunConfig:
    """
    Собирает RunConfig из settings, файла и флагов. Флаги со значением None
    (или False для переключателей) считаются не заданными.
    """
    values = convert_values(settings_defaults(), 'settings.DIRAC_KEPLER')
    if config_path is None:
        config_path = getattr(settings, 'DIRAC_KEPLER', {}).get('CONFIG_FILE') or None
    if config_path:
        values.update(read_config_file(config_path))
    given = {key: value for key, value in (flags or {}).items() if value is not None and value is not False}
    given = convert_values(given, 'флаги')
    # флаги одного способа задания связи отменяют другой способ из файла
    for mode, other in ((COUPLING_KEYS, PHYSICAL_KEYS), (PHYSICAL_KEYS, COUPLING_KEYS)):
        if any(key in given for key in mode):
            for key in other:
                values.pop(key, None)
    values.update(given)
    valid = {f.name for f in fields(RunConfig)}
    return RunConfig(**{key: value for key, value in values.items() if key in valid})
