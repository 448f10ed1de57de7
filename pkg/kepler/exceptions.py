import math


class DiracKeplerError(Exception):
    """Базовая ошибка расчётов задачи Дирака–Кеплера"""


class InvalidInputError(DiracKeplerError, ValueError):
    """Недопустимые входные данные"""


class SupercriticalError(InvalidInputError):
    """Закритическая связь: γ² = κ² + β_s² − α² ≤ 0"""

    def __init__(self, kappa, alpha, beta_s):
        self.kappa = kappa
        self.alpha = alpha
        self.beta_s = beta_s
        self.critical_alpha = math.sqrt(kappa * kappa + beta_s * beta_s)
        super().__init__(
            f'Закритический канал κ={kappa}: α={alpha:.6g} ≥ α_крит={self.critical_alpha:.6g} '
            f'(β_s={beta_s:.6g})'
        )


class NoBoundStateError(DiracKeplerError):
    """Нет вещественных корней энергетического уравнения в канале"""


class SolverError(DiracKeplerError):
    """Сбой численного решателя"""


class DimensionMismatchError(DiracKeplerError):
    """Несогласованные размерности матриц"""


class ConfigError(DiracKeplerError):
    """Ошибка конфигурации запуска"""
