"""
Проверка утверждений о задаче Дирака–Кеплера с массой m* = m(1 + a/r).

Каждое утверждение проверяется отдельной функцией и даёт ClaimReport с
вердиктом и таблицей свидетельств. Вердикт «supported» означает, что
утверждение критического комментария подтверждено расчётом, «refuted» значит
опровергнуто, а «boundary» ставится, когда данных хватает только на граничный случай.
"""

import logging
import math
from dataclasses import dataclass, field

from .angular import (
    barrier_block_structure,
    lambda_block,
    lambda_eigenvectors,
    lambda_quadratic_eigs,
    uncorrected_sigma_note,
)
from .exceptions import InvalidInputError, NoBoundStateError, SupercriticalError
from .factorization import FactorizationReport, verify_factorization
from .params import CouplingParams, channel_from_kappa
from .radial import DEFAULT_WINDOW, RadialGrid, find_eigenvalues
from .spectrum import MINUS, PLUS, binding_condition, branch_table, channel_lines, uncorrected_binding_condition

logger = logging.getLogger(__name__)

SUPPORTED = 'supported'
REFUTED = 'refuted'
BOUNDARY = 'boundary'

CLAIM_IDS = ('offdiagonal', 'lstar_noninteger', 'two_branches', 'binding_condition', 'lambda_eigencheck')

DEFAULT_ALPHAS = (0.1, 0.2, 0.5)
DEFAULT_BETAS = (-0.5, -0.1, 0.0, 0.1, 0.3, 0.4)
DEFAULT_KAPPAS = (-2, -1, 1)
DEFAULT_NR_MAX = 2

ENERGY_TOLERANCE = 1e-8
# численный уровень считается аналогом линии, если ближе этого
COUNTERPART_TOLERANCE = 1e-5
INTEGER_TOLERANCE = 1e-9
EIGEN_TOLERANCE = 1e-12
BLOCK_TOLERANCE = 1e-12

REPORT_HEADER = (
    'Проверка утверждений комментария к решению задачи Дирака–Кеплера с массой, '
    'зависящей от положения. Вердикт supported/refuted относится к утверждениям '
    'комментария, а не к критикуемой работе.'
)


@dataclass(frozen=True)
class ClaimGrid:
    """Сетка параметров для проверки утверждений"""
    alphas: tuple = DEFAULT_ALPHAS
    betas: tuple = DEFAULT_BETAS
    kappas: tuple = DEFAULT_KAPPAS
    nr_max: int = DEFAULT_NR_MAX
    window: tuple = DEFAULT_WINDOW
    radial_grid: RadialGrid = field(default_factory=RadialGrid)
    tolerance: float = ENERGY_TOLERANCE
    workers: int = 1

    def __post_init__(self):
        if not self.alphas or not self.betas or not self.kappas:
            raise InvalidInputError('Пустая сетка параметров')
        if self.nr_max < 0:
            raise InvalidInputError(f'nr_max должно быть неотрицательным, получено {self.nr_max}')

    def couplings(self):
        return [CouplingParams(alpha=alpha, beta_s=beta_s) for alpha in self.alphas for beta_s in self.betas]

    def in_window(self, energy):
        lo, hi = self.window
        return lo < energy < hi

    def as_dict(self):
        return {
            'alphas': list(self.alphas),
            'betas': list(self.betas),
            'kappas': list(self.kappas),
            'nr_max': self.nr_max,
            'window': list(self.window),
            'grid_points': self.radial_grid.points,
            'r_min': self.radial_grid.r_min,
            'r_max': self.radial_grid.r_max,
            'tolerance': self.tolerance,
        }


@dataclass(frozen=True)
class ClaimReport:
    claim_id: str
    verdict: str
    evidence: list = field(compare=False)
    tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def supported(self):
        return self.verdict == SUPPORTED

    def as_dict(self):
        return {
            'claim': self.claim_id,
            'verdict': self.verdict,
            'tolerances': dict(sorted(self.tolerances.items())),
            'notes': list(self.notes),
            'evidence': self.evidence,
        }


@dataclass(frozen=True)
class SweepReport:
    """Сравнение аналитических линий с численными уровнями"""
    max_error: float
    rows: list = field(compare=False)
    unmatched_analytic: list = field(default_factory=list)
    unmatched_numeric: list = field(default_factory=list)
    tolerance: float = ENERGY_TOLERANCE

    @property
    def passed(self):
        return self.max_error <= self.tolerance and not self.unmatched_analytic and not self.unmatched_numeric

    def as_dict(self):
        return {
            'max_error': self.max_error,
            'tolerance': self.tolerance,
            'passed': self.passed,
            'unmatched_analytic': self.unmatched_analytic,
            'unmatched_numeric': self.unmatched_numeric,
            'rows': self.rows,
        }


@dataclass(frozen=True)
class FullReport:
    header: str
    grid: ClaimGrid
    claims: list
    sweep: SweepReport | None
    factorization: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def all_supported(self):
        return all(report.supported for report in self.claims)

    def as_dict(self):
        return {
            'header': self.header,
            'grid': self.grid.as_dict(),
            'all_supported': self.all_supported,
            'claims': [report.as_dict() for report in self.claims],
            'sweep': self.sweep.as_dict() if self.sweep is not None else None,
            'factorization': [report.as_dict() for report in self.factorization],
            'notes': list(self.notes),
        }


class SpectrumOracle:
    """Кеш численных уровней по каналам: (κ, α, β_s) → энергии"""

    def __init__(self, grid: ClaimGrid):
        self.grid = grid
        self._levels = {}

    def energies(self, kappa, c: CouplingParams):
        key = (int(kappa), c.alpha, c.beta_s)
        if key not in self._levels:
            solutions = find_eigenvalues(
                kappa, c,
                window=self.grid.window,
                n_max=self.grid.nr_max + 1,
                grid=self.grid.radial_grid,
                workers=self.grid.workers,
            )
            self._levels[key] = tuple(solution.energy for solution in solutions)
        return self._levels[key]

    def nearest(self, energy, kappa, c: CouplingParams):
        """(ближайший численный уровень, расстояние) или (None, inf)"""
        levels = self.energies(kappa, c)
        if not levels:
            return None, math.inf
        best = min(levels, key=lambda level: abs(level - energy))
        return best, abs(best - energy)

    def has_level(self, energy, kappa, c: CouplingParams):
        return self.nearest(energy, kappa, c)[1] <= self.grid.tolerance


def _point(c: CouplingParams, **extra):
    return {'alpha': c.alpha, 'beta_s': c.beta_s, **extra}


def _lines(grid: ClaimGrid, c: CouplingParams, kappa):
    try:
        return branch_table(kappa, c, grid.nr_max)
    except (SupercriticalError, NoBoundStateError):
        return []


def claim_offdiagonal(grid: ClaimGrid) -> ClaimReport:
    """Центробежный член содержит недиагональные блоки, смешивающие компоненты ψ̄"""
    evidence = []
    generic_mixing = []
    for c in grid.couplings():
        report = barrier_block_structure(c)
        upper_right, lower_left = report.off_diagonal
        if c.alpha == 0 and c.beta_s == 0:
            role = 'excluded'
        elif upper_right <= BLOCK_TOLERANCE or lower_left <= BLOCK_TOLERANCE:
            role = 'coincidence'
        else:
            role = 'generic'
            generic_mixing.append(report.mixes)
        evidence.append(_point(c, upper_right=upper_right, lower_left=lower_left, mixes=report.mixes, role=role))

    if not generic_mixing:
        verdict = BOUNDARY
    else:
        verdict = SUPPORTED if all(generic_mixing) else REFUTED
    return ClaimReport('offdiagonal', verdict, evidence, {'block': BLOCK_TOLERANCE})


def claim_lstar_noninteger(grid: ClaimGrid) -> ClaimReport:
    """l* в общем случае не целое; целые значения только при целом γ"""
    evidence = []
    noninteger = integer = 0
    consistent = True
    for c in grid.couplings():
        for kappa in grid.kappas:
            try:
                channel = channel_from_kappa(kappa, c)
            except SupercriticalError as exc:
                evidence.append(_point(c, kappa=kappa, error=str(exc)))
                continue
            is_integer = abs(channel.l_star - round(channel.l_star)) <= INTEGER_TOLERANCE
            gamma_integer = abs(channel.gamma - round(channel.gamma)) <= INTEGER_TOLERANCE
            if is_integer:
                integer += 1
                consistent = consistent and gamma_integer
            else:
                noninteger += 1
            evidence.append(_point(c, kappa=kappa, gamma=channel.gamma, l_star=channel.l_star,
                                   integer=is_integer))

    if noninteger + integer == 0:
        verdict = BOUNDARY
    elif noninteger > integer and consistent:
        verdict = SUPPORTED
    elif noninteger == 0:
        verdict = BOUNDARY
    else:
        verdict = REFUTED
    notes = [f'нецелых l*: {noninteger}, целых: {integer}']
    return ClaimReport('lstar_noninteger', verdict, evidence, {'integer': INTEGER_TOLERANCE}, notes)


def claim_two_branches(grid: ClaimGrid, oracle: SpectrumOracle | None = None) -> ClaimReport:
    """Существуют связанные состояния обоих знаков энергии, подтверждённые численно"""
    oracle = oracle or SpectrumOracle(grid)
    evidence = []
    confirmed = None
    for c in grid.couplings():
        for kappa in grid.kappas:
            lines = [line for line in _lines(grid, c, kappa) if line.admissible and grid.in_window(line.energy)]
            plus = [line for line in lines if line.branch == PLUS and line.host_kappa is not None]
            minus = [line for line in lines if line.branch == MINUS and line.host_kappa is not None]
            if not (plus and minus):
                continue
            row = _point(c, kappa=kappa, E_plus=plus[0].energy, E_minus=minus[0].energy,
                         host_plus=plus[0].host_kappa, host_minus=minus[0].host_kappa)
            if confirmed is None:
                _, error_plus = oracle.nearest(plus[0].energy, plus[0].host_kappa, c)
                _, error_minus = oracle.nearest(minus[0].energy, minus[0].host_kappa, c)
                row['error_plus'] = error_plus
                row['error_minus'] = error_minus
                row['confirmed'] = max(error_plus, error_minus) <= grid.tolerance
                if row['confirmed']:
                    confirmed = row
            evidence.append(row)

    verdict = SUPPORTED if confirmed is not None else REFUTED
    notes = []
    if confirmed is not None:
        notes.append(f"обе ветви подтверждены при α={confirmed['alpha']}, β_s={confirmed['beta_s']}, "
                     f"κ={confirmed['kappa']}")
    return ClaimReport('two_branches', verdict, evidence, {'energy': grid.tolerance}, notes)


def _solver_channels(line):
    if line.host_kappa is not None:
        return (line.host_kappa,)
    if line.is_lowest:
        return (line.kappa, -line.kappa)
    return (line.kappa,)


def claim_binding_condition(grid: ClaimGrid, oracle: SpectrumOracle | None = None) -> ClaimReport:
    """
    Условие связывания β_s < αE, а не β_s < α: численный решатель находит
    состояние ровно тогда, когда q̃ > 0.
    """
    oracle = oracle or SpectrumOracle(grid)
    evidence = []
    corrected_agrees = True
    uncorrected_disagreements = 0
    for c in grid.couplings():
        uncorrected = uncorrected_binding_condition(c)
        for kappa in grid.kappas:
            for line in _lines(grid, c, kappa):
                if not grid.in_window(line.energy):
                    continue
                corrected = binding_condition(line.energy, c)
                exists = any(oracle.has_level(line.energy, channel, c) for channel in _solver_channels(line))
                corrected_agrees = corrected_agrees and exists == corrected
                if exists != uncorrected:
                    uncorrected_disagreements += 1
                evidence.append(_point(c, kappa=kappa, n_r=line.n_r, branch=line.branch, E=line.energy,
                                       q_eff=line.q_eff, corrected=corrected, uncorrected=uncorrected,
                                       solver=exists))

    if not evidence:
        verdict = BOUNDARY
    elif corrected_agrees and uncorrected_disagreements > 0:
        verdict = SUPPORTED
    elif corrected_agrees:
        verdict = BOUNDARY
    else:
        verdict = REFUTED
    notes = [f'расхождений решателя с условием β_s < α: {uncorrected_disagreements}']
    return ClaimReport('binding_condition', verdict, evidence, {'energy': grid.tolerance}, notes)


def _eigenvector_table(block):
    """Собственные пары Λ̂ в сериализуемом виде: компоненты как [Re, Im]"""
    return [
        {'eigenvalue': value.real, 'vector': [[float(z.real), float(z.imag)] for z in vector]}
        for value, vector in lambda_eigenvectors(block)
    ]


def claim_lambda_eigencheck(grid: ClaimGrid) -> ClaimReport:
    """Собственные значения Λ(Λ+1) на инвариантном подпространстве совпадают с l*(l*+1)"""
    evidence = []
    worst = 0.0
    for c in grid.couplings():
        for kappa in grid.kappas:
            try:
                channel = channel_from_kappa(kappa, c)
                block = lambda_block(kappa, c)
                eigs = lambda_quadratic_eigs(block)
            except SupercriticalError as exc:
                evidence.append(_point(c, kappa=kappa, error=str(exc)))
                continue
            target = channel.l_star_quadratic
            deviation = min(abs(value - target) for value in eigs)
            worst = max(worst, deviation)
            evidence.append(_point(c, kappa=kappa, eigenvalues=list(eigs), l_star_quadratic=target,
                                   deviation=deviation, hermitian=block.is_hermitian,
                                   eigenvectors=_eigenvector_table(block)))

    verdict = SUPPORTED if worst <= EIGEN_TOLERANCE else REFUTED
    return ClaimReport('lambda_eigencheck', verdict, evidence, {'eigen': EIGEN_TOLERANCE},
                       [f'максимальное отклонение {worst:.3e}'])


def _reference_energies(kappa, c: CouplingParams, grid: ClaimGrid):
    """Допустимые линии канала с запасом по n_r: численных уровней на сторону запрашивается nr_max + 2"""
    lo, hi = grid.window
    reach = COUNTERPART_TOLERANCE
    return [line.energy for line in channel_lines(kappa, c, grid.nr_max + 2)
            if line.admissible and lo - reach < line.energy < hi + reach]


def unpaired_levels(levels, references, tolerance):
    """
    Численные уровни без аналитического аналога.

    По каждую сторону от E = 0 уровни и линии упорядочиваются от нуля и
    сравниваются попарно; лишний или сдвинутый уровень ломает все пары за ним.
    """
    unpaired = []
    for side in (1.0, -1.0):
        numeric = sorted((level for level in levels if side * level > 0), key=abs)
        analytic = sorted((energy for energy in references if side * energy > 0), key=abs)
        for index, level in enumerate(numeric):
            if index >= len(analytic) or abs(level - analytic[index]) > tolerance:
                unpaired.append(level)
    return unpaired


def oracle_sweep(grid: ClaimGrid, oracle: SpectrumOracle | None = None) -> SweepReport:
    """Аналитические линии каждого канала против численных уровней того же канала"""
    oracle = oracle or SpectrumOracle(grid)
    rows = []
    unmatched_analytic = []
    unmatched_numeric = []
    max_error = 0.0
    for c in grid.couplings():
        for kappa in grid.kappas:
            try:
                lines = [line for line in channel_lines(kappa, c, grid.nr_max)
                         if line.admissible and grid.in_window(line.energy)]
                references = _reference_energies(kappa, c, grid)
            except (SupercriticalError, NoBoundStateError):
                continue
            levels = oracle.energies(kappa, c)
            for line in lines:
                numeric, error = oracle.nearest(line.energy, kappa, c)
                row = _point(c, kappa=kappa, n_r=line.n_r, branch=line.branch, N=line.principal,
                             E_analytic=line.energy, E_numeric=numeric, abs_err=error)
                rows.append(row)
                if error > grid.tolerance:
                    unmatched_analytic.append(row)
                else:
                    max_error = max(max_error, error)
            for level in unpaired_levels(levels, references, max(grid.tolerance, COUNTERPART_TOLERANCE)):
                unmatched_numeric.append(_point(c, kappa=kappa, E_numeric=level))

    if unmatched_analytic:
        max_error = max(max_error, max(row['abs_err'] for row in unmatched_analytic))
    logger.info('Сравнение спектров: %d линий, макс. ошибка %.3e', len(rows), max_error)
    return SweepReport(max_error, rows, unmatched_analytic, unmatched_numeric, grid.tolerance)


def run_claim(claim_id: str, grid: ClaimGrid, oracle: SpectrumOracle | None = None) -> ClaimReport:
    if claim_id not in CLAIM_IDS:
        raise InvalidInputError(f'Неизвестное утверждение: {claim_id!r}')
    if claim_id == 'offdiagonal':
        report = claim_offdiagonal(grid)
    elif claim_id == 'lstar_noninteger':
        report = claim_lstar_noninteger(grid)
    elif claim_id == 'two_branches':
        report = claim_two_branches(grid, oracle)
    elif claim_id == 'binding_condition':
        report = claim_binding_condition(grid, oracle)
    else:
        report = claim_lambda_eigencheck(grid)
    logger.info('Утверждение %s: %s', claim_id, report.verdict)
    return report


def factorization_checks(grid: ClaimGrid) -> list[FactorizationReport]:
    c = grid.couplings()[0]
    return [verify_factorization(kappa, c) for kappa in grid.kappas]


def full_report(grid: ClaimGrid, claims=CLAIM_IDS, reproduce_flaw: bool = False,
                sweep: bool = True) -> FullReport:
    """Все выбранные утверждения, сравнение спектров и проверка факторизации"""
    claims = tuple(claims)
    if not claims:
        raise InvalidInputError('Не выбрано ни одного утверждения')
    unknown = [claim_id for claim_id in claims if claim_id not in CLAIM_IDS]
    if unknown:
        raise InvalidInputError(f'Неизвестные утверждения: {", ".join(unknown)}')
    oracle = SpectrumOracle(grid)
    reports = [run_claim(claim_id, grid, oracle) for claim_id in sorted(claims, key=CLAIM_IDS.index)]
    notes = []
    if reproduce_flaw:
        notes.append(uncorrected_sigma_note(grid.couplings()[0]))
    return FullReport(
        header=REPORT_HEADER,
        grid=grid,
        claims=reports,
        sweep=oracle_sweep(grid, oracle) if sweep else None,
        factorization=factorization_checks(grid),
        notes=notes,
    )
