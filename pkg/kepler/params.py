"""
Физические входные данные, безразмерные константы связи и угловые каналы.

Внутри пакета всё считается в естественных единицах ħ = c = m = 1;
PhysicalInputs нужен только для перевода на границе (CLI, конфиг).
"""

import math
import numbers
from dataclasses import dataclass, field

from scipy import constants

from .exceptions import InvalidInputError, SupercriticalError

UNIT_SYSTEMS = ('natural', 'si')

UPPER = 'upper'  # j = l + 1/2, κ < 0
LOWER = 'lower'  # j = l − 1/2, κ > 0


def _require_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidInputError(f'Параметр {name} должен быть конечным числом, получено {value!r}')


@dataclass(frozen=True)
class PhysicalInputs:
    """Масса, сила векторной связи e² и наклон массы a с системой единиц"""
    mass: float
    e2: float
    a: float
    units: str = 'natural'
    hbar: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.units not in UNIT_SYSTEMS:
            raise InvalidInputError(f'Неизвестная система единиц: {self.units!r}')
        if self.hbar is None:
            object.__setattr__(self, 'hbar', constants.hbar if self.units == 'si' else 1.0)
        if self.c is None:
            object.__setattr__(self, 'c', constants.c if self.units == 'si' else 1.0)
        _require_finite(mass=self.mass, e2=self.e2, a=self.a, hbar=self.hbar, c=self.c)
        if self.mass <= 0:
            raise InvalidInputError(f'Масса должна быть положительной, получено {self.mass}')
        if self.e2 < 0:
            raise InvalidInputError(f'e² не может быть отрицательным, получено {self.e2}')
        if self.hbar <= 0 or self.c <= 0:
            raise InvalidInputError('ħ и c должны быть положительными')

    @property
    def rest_energy(self):
        return self.mass * self.c ** 2


@dataclass(frozen=True)
class CouplingParams:
    """Безразмерные связи: α = e²/(ħc) (векторная), β_s = mca/ħ (скалярная)"""
    alpha: float
    beta_s: float

    def __post_init__(self):
        _require_finite(alpha=self.alpha, beta_s=self.beta_s)
        if self.alpha < 0:
            raise InvalidInputError(f'α не может быть отрицательной, получено {self.alpha}')

    def gamma_squared(self, kappa):
        return kappa * kappa + self.beta_s * self.beta_s - self.alpha * self.alpha

    def is_subcritical(self, kappa):
        return self.gamma_squared(kappa) > 0

    def as_dict(self):
        return {'alpha': self.alpha, 'beta_s': self.beta_s}


@dataclass(frozen=True)
class Channel:
    """Угловой канал κ с производными γ и l*"""
    kappa: int
    j: float
    l: int
    sign: str
    gamma: float = field(compare=False)
    l_star: float = field(compare=False)

    @property
    def is_upper(self):
        return self.sign == UPPER

    @property
    def l_star_quadratic(self):
        return self.l_star * (self.l_star + 1.0)


def derive_couplings(inputs: PhysicalInputs) -> CouplingParams:
    """Перевод физических входных данных в безразмерные α и β_s"""
    alpha = inputs.e2 / (inputs.hbar * inputs.c)
    beta_s = inputs.mass * inputs.c * inputs.a / inputs.hbar
    return CouplingParams(alpha=alpha, beta_s=beta_s)


def physical_inputs_for_hydrogen() -> PhysicalInputs:
    """Электрон в кулоновском поле протона, a = 0, в единицах СИ"""
    e2 = constants.e ** 2 / (4.0 * math.pi * constants.epsilon_0)
    return PhysicalInputs(mass=constants.m_e, e2=e2, a=0.0, units='si')


def kappa_from_l(l: int, sign: str) -> int:
    """Биекция (l, знак) → κ: κ = −(l+1) для верхнего знака, κ = l для нижнего"""
    if l < 0:
        raise InvalidInputError(f'l должно быть неотрицательным, получено {l}')
    if sign == UPPER:
        return -(l + 1)
    if sign == LOWER:
        if l == 0:
            raise InvalidInputError('Для нижнего знака (j = l − 1/2) требуется l ≥ 1')
        return l
    raise InvalidInputError(f'Неизвестный знак канала: {sign!r}')


def l_from_kappa(kappa: int) -> tuple[int, str]:
    if not isinstance(kappa, numbers.Integral) or isinstance(kappa, bool) or kappa == 0:
        raise InvalidInputError(f'κ должно быть ненулевым целым, получено {kappa!r}')
    kappa = int(kappa)
    if kappa < 0:
        return -kappa - 1, UPPER
    # κ > 0: j = l − 1/2
    return kappa, LOWER


def channel_from_kappa(kappa: int, c: CouplingParams) -> Channel:
    """Канал κ: j, l, знак, γ = √(κ² + β_s² − α²) и l*"""
    l, sign = l_from_kappa(kappa)
    kappa = int(kappa)
    gamma_sq = c.gamma_squared(kappa)
    if gamma_sq <= 0:
        raise SupercriticalError(kappa, c.alpha, c.beta_s)
    gamma = math.sqrt(gamma_sq)
    # l* = γ − 1/2 ∓ 1/2
    l_star = gamma - 1.0 if kappa < 0 else gamma
    return Channel(
        kappa=kappa,
        j=abs(kappa) - 0.5,
        l=l,
        sign=sign,
        gamma=gamma,
        l_star=l_star,
    )
