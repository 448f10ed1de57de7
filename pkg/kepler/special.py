"""
Специальные функции для радиальных решений с нецелым l*.

Обобщённые полиномы Лагерра считаются по трёхчленной рекуррентной формуле,
порядок ν не обязан быть целым (основной случай ν = 2l* + 1).
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, special

from .exceptions import InvalidInputError

QUADRATURES = ('simpson', 'trapezoid')


@dataclass(frozen=True)
class LaguerreParams:
    """Степень n_r, порядок ν > −1 и аргумент x ≥ 0"""
    n_r: int
    nu: float
    x: ArrayLike

    def __post_init__(self):
        if int(self.n_r) != self.n_r or self.n_r < 0:
            raise InvalidInputError(f'Степень полинома должна быть целой неотрицательной, получено {self.n_r}')
        if not math.isfinite(self.nu) or self.nu <= -1.0:
            raise InvalidInputError(f'Порядок Лагерра должен быть больше −1, получено ν={self.nu}')
        x = np.asarray(self.x, dtype=float)
        if not np.all(np.isfinite(x)) or np.any(x < 0):
            raise InvalidInputError('Аргумент полинома Лагерра должен быть конечным и неотрицательным')


def ln_gamma(x):
    """ln Γ(x) для x > 0"""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidInputError(f'ln Γ определена здесь только для x > 0, получено {x!r}')
    value = special.gammaln(arr)
    return float(value) if value.ndim == 0 else value


def generalized_laguerre(p: LaguerreParams):
    """L_n^{(ν)}(x) по рекуррентной формуле по n"""
    x = np.asarray(p.x, dtype=float)
    nu = float(p.nu)
    prev = np.ones_like(x)
    if p.n_r == 0:
        return _scalar_or_array(prev)
    current = 1.0 + nu - x
    for k in range(1, int(p.n_r)):
        prev, current = current, ((2 * k + 1 + nu - x) * current - (k + nu) * prev) / (k + 1)
    return _scalar_or_array(current)


def laguerre_series(n_r: int, nu: float, x):
    """Прямая сумма Σ_k (−1)^k C(n+ν, n−k) x^k / k! (эталон для проверки рекурсии)"""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(int(n_r) + 1):
        total = total + (-1) ** k * special.binom(n_r + nu, n_r - k) * x ** k / math.factorial(k)
    return _scalar_or_array(total)


def _scalar_or_array(value: NDArray):
    return float(value) if np.ndim(value) == 0 else value


def check_grid(grid) -> NDArray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidInputError('Сетка должна быть одномерной и содержать хотя бы две точки')
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise InvalidInputError('Сетка должна строго возрастать')
    return grid


def radial_norm(f, grid, reduced: bool = False, method: str = 'simpson') -> float:
    """
    ∫ f² r² dr (или ∫ f² dr для приведённых функций при reduced=True).

    simpson сходится как O(h⁴), trapezoid как O(h²).
    """
    grid = check_grid(grid)
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise InvalidInputError('Функция и сетка должны иметь одинаковую длину')
    if not np.all(np.isfinite(f)):
        raise InvalidInputError('Функция содержит нечисловые значения')
    if method not in QUADRATURES:
        raise InvalidInputError(f'Неизвестная квадратура: {method!r}')

    integrand = f * f if reduced else f * f * grid * grid
    if method == 'simpson':
        return float(integrate.simpson(integrand, x=grid))
    return float(integrate.trapezoid(integrand, x=grid))


def count_sign_changes(f, floor: float = 1e-9) -> int:
    """Число смен знака; значения ниже floor·max|f| не учитываются"""
    f = np.asarray(f, dtype=float)
    if f.size == 0:
        return 0
    threshold = floor * float(np.max(np.abs(f)))
    signs = np.sign(f[np.abs(f) > threshold])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
