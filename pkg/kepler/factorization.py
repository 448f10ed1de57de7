"""
Проверка разложения на множители конечными разностями.

В радиальном базисе (G, F) оператор α·p переходит в
D = [[0, −∂ + κ/r], [∂ + κ/r, 0]], β в diag(1, −1). Для

    A = D + m*β + U − E,    B = D + m*β + E − U

произведение AB должно совпасть с D² + (m*² − (E − U)²) + C/r², где C:
радиальная проекция угловой связи iΣ·n(β_s β″ + α β′). Разностные производные
центральные, поэтому невязка убывает как O(h²), а в свободном случае равна нулю.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .angular import barrier_matrix, radial_coupling_matrix
from .exceptions import InvalidInputError
from .params import CouplingParams, l_from_kappa

logger = logging.getLogger(__name__)

DEFAULT_STEP = 2e-3
DEFAULT_RANGE = (1.0, 8.0)
DEFAULT_ENERGY = 0.5
BUMPS = 3
MIN_POINTS_PER_BUMP = 40

# относительная невязка, неотличимая от ошибок округления при h ~ 1e-3
ROUNDOFF_LEVEL = 1e-9


@dataclass(frozen=True)
class FactorizationReport:
    kappa: int
    couplings: CouplingParams
    steps: tuple[float, float]
    residuals: tuple[float, float] = field(compare=False)
    seed: int = 0

    @property
    def step(self):
        return self.steps[0]

    @property
    def residual(self):
        return self.residuals[0]

    @property
    def ratio(self):
        coarse, fine = self.residuals
        return coarse / fine if fine > 0 else math.inf

    @property
    def order(self):
        """log₂ отношения невязок; nan, если невязка на уровне округления"""
        coarse, fine = self.residuals
        if coarse < ROUNDOFF_LEVEL or fine <= 0:
            return math.nan
        return math.log(coarse / fine, self.steps[0] / self.steps[1])

    def as_dict(self):
        return {
            'kappa': self.kappa,
            'alpha': self.couplings.alpha,
            'beta_s': self.couplings.beta_s,
            'steps': list(self.steps),
            'residuals': list(self.residuals),
            'order': self.order,
            'seed': self.seed,
        }


def bump(radii, center, width):
    """Гладкая финитная функция exp(−1/(1 − x²)), x = (r − center)/width"""
    x = (np.asarray(radii, dtype=float) - center) / width
    inside = np.abs(x) < 1.0
    values = np.zeros_like(x)
    values[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return values


def random_bump_parameters(r_range, seed, count=BUMPS):
    """Случайные (амплитуда, центр, ширина) для пар (G, F); носители внутри r_range"""
    lo, hi = r_range
    rng = np.random.default_rng(seed)
    span = hi - lo
    params = []
    for _ in range(2):
        component = []
        for _ in range(count):
            width = rng.uniform(0.15, 0.3) * span
            center = rng.uniform(lo + 1.1 * width, hi - 1.1 * width)
            component.append((rng.uniform(-1.0, 1.0), center, width))
        params.append(component)
    return params


def trial_functions(radii, params, step):
    """Пара (G, F) на сетке; слишком узкие горбы отвергаются как негладкие"""
    components = []
    for component in params:
        values = np.zeros_like(radii)
        for amplitude, center, width in component:
            if 2.0 * width / step < MIN_POINTS_PER_BUMP:
                raise InvalidInputError(
                    f'Пробная функция негладкая на сетке: ширина {width:.3g} при шаге {step:.3g}'
                )
            values += amplitude * bump(radii, center, width)
        components.append(values)
    return np.concatenate(components)


def _derivative(size, step):
    return sparse.diags([-np.ones(size - 1), np.ones(size - 1)], [-1, 1], format='csr') / (2.0 * step)


def radial_dirac_operator(radii, kappa, step):
    """Разностный D для вектора (G, F) длины 2n"""
    size = radii.size
    d1 = _derivative(size, step)
    centrifugal = sparse.diags(kappa / radii)
    return sparse.bmat([[None, -d1 + centrifugal], [d1 + centrifugal, None]], format='csr')


def _diagonal_pair(upper, lower):
    return sparse.block_diag([sparse.diags(upper), sparse.diags(lower)], format='csr')


def factor_operators(radii, kappa, c: CouplingParams, energy, step):
    """Разностные A и B"""
    mass = 1.0 + c.beta_s / radii
    potential = -c.alpha / radii
    dirac = radial_dirac_operator(radii, kappa, step)
    mass_term = _diagonal_pair(mass, -mass)
    shift = _diagonal_pair(potential - energy, potential - energy)
    return dirac + mass_term + shift, dirac + mass_term - shift


def second_order_operator(radii, kappa, c: CouplingParams, energy, step):
    """D² + (m*² − (E − U)²) + C/r²"""
    mass = 1.0 + c.beta_s / radii
    kinetic = energy + c.alpha / radii
    dirac = radial_dirac_operator(radii, kappa, step)
    scalar = mass ** 2 - kinetic ** 2
    coupling, _ = radial_coupling_matrix(kappa, c)
    inverse_square = 1.0 / radii ** 2
    barrier = sparse.bmat([
        [sparse.diags(coupling[0, 0] * inverse_square), sparse.diags(coupling[0, 1] * inverse_square)],
        [sparse.diags(coupling[1, 0] * inverse_square), sparse.diags(coupling[1, 1] * inverse_square)],
    ], format='csr')
    return dirac @ dirac + _diagonal_pair(scalar, scalar) + barrier


def factorization_residual(kappa, c: CouplingParams, step, params, r_range=DEFAULT_RANGE,
                           energy=DEFAULT_ENERGY) -> float:
    """Относительная sup-невязка AB φ − (правая часть) φ на сетке с шагом step"""
    lo, hi = r_range
    size = int(round((hi - lo) / step)) + 1
    radii = np.linspace(lo, hi, size)
    step = radii[1] - radii[0]
    phi = trial_functions(radii, params, step)
    A, B = factor_operators(radii, kappa, c, energy, step)
    product = A @ (B @ phi)
    expected = second_order_operator(radii, kappa, c, energy, step) @ phi
    return float(np.max(np.abs(product - expected)) / np.max(np.abs(product)))


def verify_factorization(kappa: int, c: CouplingParams, step: float = DEFAULT_STEP, seed: int = 0,
                         r_range=DEFAULT_RANGE, energy: float = DEFAULT_ENERGY,
                         reproduce_flaw: bool = False) -> FactorizationReport:
    """
    Невязки на шагах h и h/2. С reproduce_flaw=True центробежный член строится
    с 2×2 σ вместо 4×4 Σ, и построение обрывается на проверке размерностей.
    """
    l_from_kappa(kappa)
    lo, hi = r_range
    if not (0 < lo < hi) or step <= 0 or step >= (hi - lo) / 16:
        raise InvalidInputError(f'Некорректная сетка: r ∈ [{lo}, {hi}], h={step}')
    if reproduce_flaw:
        barrier_matrix(c, corrected=False)

    params = random_bump_parameters(r_range, seed)
    steps = (float(step), float(step) / 2.0)
    residuals = tuple(factorization_residual(kappa, c, h, params, r_range, energy) for h in steps)
    report = FactorizationReport(kappa=int(kappa), couplings=c, steps=steps, residuals=residuals, seed=seed)
    logger.debug('Факторизация κ=%d: невязки %.3e, %.3e, порядок %.3f',
                 kappa, residuals[0], residuals[1], report.order)
    return report
