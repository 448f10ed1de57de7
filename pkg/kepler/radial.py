"""
Численный решатель связанных состояний радиальных уравнений Дирака

    G' = −κG/r + (E + 1 + (α + β_s)/r) F
    F' =  κF/r − (E − 1 + (α − β_s)/r) G

(G = rg, F = rf, естественные единицы, m*(r) = 1 + β_s/r, U(r) = −α/r).

Интегрирование: классический РК4 на логарифмической сетке. Уравнения линейны,
поэтому каждый шаг РК4 сводится к матрице 2×2, а состояния на всей сетке
получаются префиксными произведениями этих матриц.

Поиск уровней: угол Прюфера θ = atan2(F, G) монотонно убывает по E, поэтому
рассогласование Δ(E) = θ_out(r_match) − θ_in(r_match) строго убывает, и каждый
уровень в окне есть единственный корень Δ(E) = kπ. Корни уточняются brentq,
Δ уточняется экстраполяцией Ричардсона по сетке с половинным шагом.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .exceptions import InvalidInputError, SolverError
from .params import Channel, CouplingParams, channel_from_kappa
from .special import count_sign_changes, radial_norm

logger = logging.getLogger(__name__)

SPACINGS = ('log', 'uniform')

DEFAULT_POINTS = 6000
DEFAULT_R_MIN = 1e-6
DEFAULT_R_MAX = 400.0
DEFAULT_WINDOW = (-0.999, 0.999)
DEFAULT_N_MAX = 5

ENERGY_TOLERANCE = 1e-13
EXPONENT_FIT_RADIUS = 1e-4
# r_max в длинах затухания 1/λ
DECAY_LENGTHS = 30.0


@dataclass(frozen=True)
class RadialGrid:
    r_min: float = DEFAULT_R_MIN
    r_max: float = DEFAULT_R_MAX
    points: int = DEFAULT_POINTS
    spacing: str = 'log'

    def __post_init__(self):
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)):
            raise InvalidInputError('Границы сетки должны быть конечными')
        if self.r_min <= 0 or self.r_max <= self.r_min:
            raise InvalidInputError(f'Нужно 0 < r_min < r_max, получено {self.r_min}, {self.r_max}')
        if int(self.points) != self.points or self.points < 16:
            raise InvalidInputError(f'Слишком мало точек сетки: {self.points}')
        if self.spacing not in SPACINGS:
            raise InvalidInputError(f'Неизвестный закон разбиения сетки: {self.spacing!r}')

    def radii(self):
        if self.spacing == 'log':
            return np.geomspace(self.r_min, self.r_max, int(self.points))
        return np.linspace(self.r_min, self.r_max, int(self.points))

    def refined_radii(self):
        """Сетка с половинным шагом; чётные узлы совпадают с узлами исходной"""
        coarse = self.radii()
        fine = np.empty(2 * coarse.size - 1)
        fine[::2] = coarse
        if self.spacing == 'log':
            fine[1::2] = np.sqrt(coarse[:-1] * coarse[1:])
        else:
            fine[1::2] = 0.5 * (coarse[:-1] + coarse[1:])
        return fine

    def covers_decay(self, decay: float) -> bool:
        return decay > 0 and self.r_max >= DECAY_LENGTHS / decay

    def covering(self, decay: float) -> 'RadialGrid':
        """Сетка, продлённая до r_max ≥ 30/λ с прежней плотностью узлов"""
        if decay <= 0 or not math.isfinite(decay):
            raise InvalidInputError(f'Длина затухания должна быть положительной, получено λ={decay}')
        if self.covers_decay(decay):
            return self
        r_max = DECAY_LENGTHS / decay
        if self.spacing == 'log':
            ratio = math.log(r_max / self.r_min) / math.log(self.r_max / self.r_min)
        else:
            ratio = (r_max - self.r_min) / (self.r_max - self.r_min)
        return replace(self, r_max=r_max, points=math.ceil(self.points * ratio))


@dataclass(frozen=True)
class MatchResult:
    energy: float
    defect: float
    nodes: int
    mismatch: float

    @property
    def index(self):
        """Номер полуоборота угла Прюфера, меняется на 1 при переходе через уровень"""
        return math.floor(self.mismatch / math.pi)


@dataclass(frozen=True)
class UnresolvedLevel:
    """Уровень, скобка которого найдена, но корень не уточнён"""
    kappa: int
    level: int
    bracket: tuple[float, float]
    message: str


@dataclass(frozen=True)
class DiracRadialSolution:
    radii: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    energy: float
    kappa: int
    nodes: int
    match_defect: float
    level: int
    exponent: float

    def norm(self):
        return radial_norm(self.upper, self.radii, reduced=True) + radial_norm(self.lower, self.radii, reduced=True)


def dirac_rhs(r, G, F, E: float, kappa: int, c: CouplingParams):
    """Правые части (G', F') радиальной системы"""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidInputError('Радиальная система определена только при r > 0')
    dG = -kappa * G / r + (E + 1.0 + (c.alpha + c.beta_s) / r) * F
    dF = kappa * F / r - (E - 1.0 + (c.alpha - c.beta_s) / r) * G
    return dG, dF


def frobenius_seed(channel: Channel, c: CouplingParams):
    """
    Направление (G, F) регулярного решения r^γ у начала координат:
    нуль-вектор [[γ+κ, −(α+β_s)], [α−β_s, γ−κ]].
    """
    gamma, kappa = channel.gamma, channel.kappa
    first = np.array([c.alpha + c.beta_s, gamma + kappa])
    second = np.array([gamma - kappa, -(c.alpha - c.beta_s)])
    seed = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    return seed / np.linalg.norm(seed)


def matching_radius(channel: Channel, c: CouplingParams, radii) -> float:
    strength = abs(c.alpha) + abs(c.beta_s)
    if strength == 0:
        r_match = 1.0
    else:
        r_match = max(2.0 * strength, channel.gamma ** 2 / (2.0 * strength))
    return float(min(max(r_match, radii[1]), radii[-2]))


def inward_start(energy: float, c: CouplingParams, r_max: float) -> float:
    """Точка старта внутреннего интегрирования за внешней точкой поворота"""
    decay = math.sqrt(1.0 - energy * energy)
    q_eff = c.alpha * energy - c.beta_s
    return min(r_max, 2.0 * max(q_eff, 0.0) / decay ** 2 + DECAY_LENGTHS / decay)


def _generator(r, energy, kappa, c, spacing):
    """Матрица системы y' = A y по переменной t (t = ln r на логарифмической сетке)"""
    jac = r if spacing == 'log' else np.ones_like(r)
    A = np.empty(r.shape + (2, 2))
    A[:, 0, 0] = -kappa * jac / r
    A[:, 0, 1] = jac * (energy + 1.0 + (c.alpha + c.beta_s) / r)
    A[:, 1, 0] = -jac * (energy - 1.0 + (c.alpha - c.beta_s) / r)
    A[:, 1, 1] = kappa * jac / r
    return A


def _rk4_propagators(start, end, energy, kappa, c, spacing):
    """Матрицы шагов РК4 из узлов start в узлы end (шаг может быть отрицательным)"""
    if spacing == 'log':
        h = np.log(end / start)
        middle = np.sqrt(start * end)
    else:
        h = end - start
        middle = 0.5 * (start + end)
    h = h[:, None, None]
    eye = np.eye(2)
    A0 = _generator(start, energy, kappa, c, spacing)
    Am = _generator(middle, energy, kappa, c, spacing)
    A1 = _generator(end, energy, kappa, c, spacing)
    K1 = A0
    K2 = Am @ (eye + 0.5 * h * K1)
    K3 = Am @ (eye + 0.5 * h * K2)
    K4 = A1 @ (eye + h * K3)
    return eye + h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


def _prefix_products(steps):
    """P_i···P_0 для всех i (удвоение шага, без цикла по узлам)"""
    products = steps.copy()
    shift = 1
    while shift < products.shape[0]:
        products[shift:] = products[shift:] @ products[:-shift]
        shift *= 2
    return products


def integrate_path(path, start_state, energy, kappa, c, spacing='log'):
    """Состояния (G, F) во всех узлах пути, начиная с start_state"""
    path = np.asarray(path, dtype=float)
    states = np.empty((path.size, 2))
    states[0] = start_state
    if path.size > 1:
        steps = _rk4_propagators(path[:-1], path[1:], energy, kappa, c, spacing)
        states[1:] = _prefix_products(steps) @ np.asarray(start_state, dtype=float)
    if not np.all(np.isfinite(states)):
        raise SolverError(f'Переполнение при интегрировании (κ={kappa}, E={energy:.12g})')
    return states


def _path_angle(states):
    return np.unwrap(np.arctan2(states[:, 1], states[:, 0]))


class _Shooter:
    """Двустороннее интегрирование в одном канале на фиксированной паре сеток"""

    def __init__(self, channel: Channel, c: CouplingParams, grid: RadialGrid):
        self.channel = channel
        self.c = c
        self.grid = grid
        self.radii = grid.radii()
        self.fine_radii = grid.refined_radii()
        self.seed = frobenius_seed(channel, c)
        r_match = matching_radius(channel, c, self.radii)
        self.match = int(np.clip(np.searchsorted(self.radii, r_match), 1, self.radii.size - 2))

    def start_index(self, energy):
        r_start = inward_start(energy, self.c, self.grid.r_max)
        index = int(np.searchsorted(self.radii, r_start))
        return min(max(index, self.match + 1), self.radii.size - 1)

    def halves(self, energy, radii, match, start):
        decay = math.sqrt(1.0 - energy * energy)
        outward = integrate_path(radii[:match + 1], self.seed, energy, self.channel.kappa, self.c, self.grid.spacing)
        inward = integrate_path(radii[match:start + 1][::-1], (1.0 + energy, -decay), energy,
                                self.channel.kappa, self.c, self.grid.spacing)
        return outward, inward

    def mismatch_on(self, energy, radii, match, start):
        outward, inward = self.halves(energy, radii, match, start)
        return _path_angle(outward)[-1] - _path_angle(inward)[-1]

    def mismatch(self, energy, refine=True):
        start = self.start_index(energy)
        coarse = self.mismatch_on(energy, self.radii, self.match, start)
        if not refine:
            return coarse
        fine = self.mismatch_on(energy, self.fine_radii, 2 * self.match, 2 * start)
        # РК4: ошибка O(h⁴)
        return (16.0 * fine - coarse) / 15.0

    def solution(self, energy, level, refine=True):
        start = self.start_index(energy)
        outward, inward = self.halves(energy, self.radii, self.match, start)
        inward = inward[::-1]
        scale = float(outward[-1] @ inward[0]) / float(inward[0] @ inward[0])
        states = np.zeros((self.radii.size, 2))
        states[:self.match] = outward[:-1]
        states[self.match:start + 1] = scale * inward
        norm = math.sqrt(radial_norm(states[:, 0], self.radii, reduced=True)
                         + radial_norm(states[:, 1], self.radii, reduced=True))
        states /= norm
        return DiracRadialSolution(
            radii=self.radii,
            upper=states[:, 0],
            lower=states[:, 1],
            energy=energy,
            kappa=self.channel.kappa,
            nodes=count_sign_changes(states[:start + 1, 0]),
            match_defect=math.sin(self.mismatch(energy, refine)),
            level=level,
            exponent=small_r_exponent(self.radii, states[:, 0], states[:, 1]),
        )


def small_r_exponent(radii, upper, lower) -> float:
    """Показатель степени |(G, F)| ~ r^s у начала координат (подгонка в лог-масштабе)"""
    mask = radii <= EXPONENT_FIT_RADIUS
    if np.count_nonzero(mask) < 8:
        mask = np.zeros(radii.size, dtype=bool)
        mask[:20] = True
    amplitude = np.hypot(upper[mask], lower[mask])
    slope, _ = np.polyfit(np.log(radii[mask]), np.log(amplitude), 1)
    return float(slope)


def _check_energy(energy):
    if not math.isfinite(energy) or abs(energy) >= 1.0:
        raise InvalidInputError(f'Энергия должна лежать в (−1, 1), получено {energy!r}')


def shoot_and_match(E: float, kappa: int, c: CouplingParams, grid: RadialGrid | None = None,
                    refine: bool = True) -> MatchResult:
    """
    Рассогласование двух половин решения в точке сшивки.

    defect = (G_out F_in − G_in F_out)/(|y_out||y_in|) = sin Δ не зависит от
    нормировки половин; nodes: число смен знака G_out.
    """
    _check_energy(E)
    channel = channel_from_kappa(kappa, c)
    shooter = _Shooter(channel, c, grid or RadialGrid())
    start = shooter.start_index(E)
    outward, _ = shooter.halves(E, shooter.radii, shooter.match, start)
    mismatch = shooter.mismatch(E, refine)
    return MatchResult(
        energy=E,
        defect=math.sin(mismatch),
        nodes=count_sign_changes(outward[:, 0]),
        mismatch=mismatch,
    )


def _check_window(window):
    lo, hi = window
    if not (-1.0 < lo < hi < 1.0):
        raise InvalidInputError(f'Окно энергий должно лежать внутри (−1, 1), получено ({lo}, {hi})')
    return float(lo), float(hi)


def locate_levels(kappa: int, c: CouplingParams, window=DEFAULT_WINDOW, n_max: int = DEFAULT_N_MAX,
                  grid: RadialGrid | None = None, refine: bool = True, workers: int = 1):
    """
    Уровни канала κ в окне энергий, не более n_max + 1 с каждой стороны от E = 0
    (уровни нумеруются от нуля наружу).

    Возвращает (решения, отсортированные по энергии; неуточнённые уровни).
    Сбой одного уровня не прерывает остальные.
    """
    lo, hi = _check_window(window)
    if n_max < 0:
        raise InvalidInputError(f'n_max должно быть неотрицательным, получено {n_max}')
    edge = max(abs(lo), abs(hi))
    base = grid or RadialGrid()
    grid = base.covering(math.sqrt(1.0 - edge * edge))
    if grid is not base:
        logger.debug('κ=%d: сетка продлена до r_max=%.6g (%d точек)', kappa, grid.r_max, grid.points)
    channel = channel_from_kappa(kappa, c)
    shooter = _Shooter(channel, c, grid)

    @lru_cache(maxsize=None)
    def mismatch(energy):
        return shooter.mismatch(energy, refine)

    split = min(max(0.0, lo), hi)
    at_lo, at_split, at_hi = mismatch(lo), mismatch(split), mismatch(hi)
    if not at_lo >= at_split >= at_hi:
        raise SolverError(f'Рассогласование немонотонно по E в канале κ={kappa}')

    # выше split: Δ(hi) < kπ ≤ Δ(split); ниже: Δ(split) < kπ < Δ(lo)
    upper_ks = [k for k in range(math.floor(at_split / math.pi), math.floor(at_hi / math.pi), -1)
                if k * math.pi > at_hi][:n_max + 1]
    lower_ks = [k for k in range(math.floor(at_split / math.pi) + 1, math.ceil(at_lo / math.pi))][:n_max + 1]
    logger.debug('κ=%d: в окне (%.6g, %.6g) найдено скобок %d выше и %d ниже E=%.3g',
                 kappa, lo, hi, len(upper_ks), len(lower_ks), split)

    tasks = [(k, split, hi, level) for level, k in enumerate(upper_ks)]
    tasks += [(k, lo, split, level) for level, k in enumerate(lower_ks)]

    def solve(task):
        k, a, b, level = task
        target = k * math.pi
        try:
            energy = brentq(lambda e: mismatch(e) - target, a, b, xtol=ENERGY_TOLERANCE, maxiter=200)
            logger.debug('κ=%d: уровень E=%.12f', kappa, energy)
            return shooter.solution(energy, level, refine)
        except (ValueError, RuntimeError, SolverError) as error:
            logger.warning('κ=%d: уровень %d в (%.12g, %.12g) не уточнён: %s', kappa, level, a, b, error)
            return UnresolvedLevel(int(kappa), level, (a, b),
                                   f'Не удалось уточнить уровень κ={kappa}, k={k} в ({a:.12g}, {b:.12g}): {error}')

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(solve, tasks))
    else:
        results = [solve(task) for task in tasks]
    solutions = [item for item in results if isinstance(item, DiracRadialSolution)]
    failures = [item for item in results if isinstance(item, UnresolvedLevel)]
    return sorted(solutions, key=lambda solution: solution.energy), failures


def find_eigenvalues(kappa: int, c: CouplingParams, window=DEFAULT_WINDOW, n_max: int = DEFAULT_N_MAX,
                     grid: RadialGrid | None = None, refine: bool = True, workers: int = 1):
    """
    Все уровни канала κ в окне энергий, отсортированные по энергии; пустой
    список допустим. Любой неуточнённый уровень даёт SolverError.
    """
    solutions, failures = locate_levels(kappa, c, window, n_max, grid, refine, workers)
    if failures:
        raise SolverError(failures[0].message)
    return solutions
