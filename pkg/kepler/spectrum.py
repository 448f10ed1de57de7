"""
Аналитический спектр: уровни Бора–подобного уравнения с нецелым l*.

Энергия входит и в эффективный заряд q̃ = αE − β_s, и в собственное значение,
поэтому на каждое N получаются два корня (ветви «+» и «−»). Недопустимые корни
не отбрасываются, а помечаются флагом admissible.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import InvalidInputError, NoBoundStateError, SupercriticalError
from .params import Channel, CouplingParams, channel_from_kappa
from .special import LaguerreParams, check_grid, generalized_laguerre, ln_gamma

logger = logging.getLogger(__name__)

PLUS = '+'
MINUS = '-'
BRANCHES = (PLUS, MINUS)

HOSTING_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EffectiveCoulomb:
    """Эффективная кулоновская сила q̃(E) = αE − β_s"""
    couplings: CouplingParams

    def __call__(self, energy: float) -> float:
        return self.couplings.alpha * energy - self.couplings.beta_s

    def binds(self, energy: float) -> bool:
        return self(energy) > 0


@dataclass(frozen=True)
class SpectrumLine:
    channel: Channel
    n_r: int
    branch: str
    energy: float
    q_eff: float
    admissible: bool
    principal: float
    couplings: CouplingParams
    host_kappa: int | None = None

    @property
    def kappa(self):
        return self.channel.kappa

    @property
    def gamma(self):
        return self.channel.gamma

    @property
    def l_star(self):
        return self.channel.l_star

    @property
    def decay(self):
        """λ = q̃/N"""
        return self.q_eff / self.principal

    @property
    def is_lowest(self):
        """Уровень с N = γ (κ < 0, n_r = 0)"""
        return self.channel.kappa < 0 and self.n_r == 0

    def bohr_identity_residual(self):
        return (self.energy ** 2 - 1.0) * self.principal ** 2 + self.q_eff ** 2

    def as_row(self):
        return {
            'kappa': self.kappa,
            'n_r': self.n_r,
            'branch': self.branch,
            'E': self.energy,
            'q_eff': self.q_eff,
            'admissible': self.admissible,
            'gamma': self.gamma,
            'l_star': self.l_star,
            'N': self.principal,
            'host_kappa': self.host_kappa,
        }


def effective_principal(n_r: int, channel: Channel) -> float:
    """N = n_r + l* + 1"""
    if int(n_r) != n_r or n_r < 0:
        raise InvalidInputError(f'n_r должно быть целым неотрицательным, получено {n_r}')
    return int(n_r) + channel.l_star + 1.0


def binding_condition(energy: float, c: CouplingParams) -> bool:
    """Исправленное условие связывания β_s < αE (q̃ > 0)"""
    return c.beta_s < c.alpha * energy


def uncorrected_binding_condition(c: CouplingParams) -> bool:
    """Условие β_s < α без множителя E; совпадает с исправленным только при E = 1"""
    return c.beta_s < c.alpha


def energy_branches(n_r: int, channel: Channel, c: CouplingParams) -> tuple[SpectrumLine, SpectrumLine]:
    """
    Корни E²(N²+α²) − 2αβ_s E + (β_s² − N²) = 0:

        E± = [αβ_s ± N√(N² + α² − β_s²)] / (N² + α²)

    Возвращает пару (E+, E−); у каждой линии заполнены q̃, admissible и host_kappa.
    """
    principal = effective_principal(n_r, channel)
    alpha, beta_s = c.alpha, c.beta_s
    discriminant = principal * principal + alpha * alpha - beta_s * beta_s
    if discriminant < 0:
        raise NoBoundStateError(
            f'Канал κ={channel.kappa}, n_r={n_r}: N²+α²−β_s² = {discriminant:.6g} < 0, '
            'вещественных уровней нет'
        )
    denominator = principal * principal + alpha * alpha
    root = principal * math.sqrt(discriminant)
    coulomb = EffectiveCoulomb(c)

    lines = []
    for branch, energy in ((PLUS, (alpha * beta_s + root) / denominator),
                           (MINUS, (alpha * beta_s - root) / denominator)):
        q_eff = coulomb(energy)
        line = SpectrumLine(
            channel=channel,
            n_r=int(n_r),
            branch=branch,
            energy=energy,
            q_eff=q_eff,
            admissible=abs(energy) < 1.0 and q_eff > 0,
            principal=principal,
            couplings=c,
        )
        lines.append(replace(line, host_kappa=host_kappa(line, c)))
    return lines[0], lines[1]


def _hosting_defects(line: SpectrumLine, kappa: int, c: CouplingParams):
    """Невязки условий существования нижнего состояния G, F ∝ r^γ e^{−λr} в канале κ'"""
    energy, gamma = line.energy, line.gamma
    decay = math.sqrt(max(1.0 - energy * energy, 0.0))
    upper = (gamma + kappa) * (1.0 + energy) + decay * (c.alpha + c.beta_s)
    lower = (gamma - kappa) * (1.0 - energy) - decay * (c.alpha - c.beta_s)
    return upper, lower


def host_kappa(line: SpectrumLine, c: CouplingParams) -> int | None:
    """
    Канал Дирака, в котором линия является настоящим состоянием.

    Уровни с N > γ живут в своём κ. Уровень N = γ переходит либо в κ, либо в −κ,
    либо нигде (тогда он паразитный).
    """
    if not line.admissible:
        return None
    if not line.is_lowest:
        return line.kappa
    scale = 1.0 + line.gamma + abs(c.alpha) + abs(c.beta_s)
    for candidate in (line.kappa, -line.kappa):
        upper, lower = _hosting_defects(line, candidate, c)
        if abs(upper) <= HOSTING_TOLERANCE * scale and abs(lower) <= HOSTING_TOLERANCE * scale:
            return candidate
    logger.debug('Уровень E=%.12g (κ=%d, N=γ) не принадлежит ни одному каналу', line.energy, line.kappa)
    return None


def branch_table(kappa: int, c: CouplingParams, nr_max: int) -> list[SpectrumLine]:
    """Собственные линии канала κ для n_r = 0..nr_max, обе ветви"""
    channel = channel_from_kappa(kappa, c)
    lines = []
    for n_r in range(int(nr_max) + 1):
        lines.extend(energy_branches(n_r, channel, c))
    return lines


def channel_lines(kappa: int, c: CouplingParams, nr_max: int) -> list[SpectrumLine]:
    """
    Все линии (обе ветви, n_r ≤ nr_max), которые канал κ действительно содержит:
    собственные с проверкой принадлежности и, для κ > 0, уровни N = γ канала −κ.
    Отсортированы по энергии.
    """
    hosted = [line for line in branch_table(kappa, c, nr_max) if line.host_kappa == kappa]
    if kappa > 0:
        try:
            partner = channel_from_kappa(-kappa, c)
        except SupercriticalError:
            partner = None
        if partner is not None:
            hosted.extend(line for line in energy_branches(0, partner, c) if line.host_kappa == kappa)
    return sorted(hosted, key=lambda line: line.energy)


def sommerfeld_reference(n_r: int, kappa: int, alpha: float) -> float:
    """Спектр Дирака–Кулона: E = [1 + α²/(ñ + γ₀)²]^{−1/2}, ñ = n_r (κ<0) или n_r + 1 (κ>0)"""
    channel = channel_from_kappa(kappa, CouplingParams(alpha=alpha, beta_s=0.0))
    shifted = n_r if kappa < 0 else n_r + 1
    principal = shifted + channel.gamma
    return 1.0 / math.sqrt(1.0 + alpha * alpha / (principal * principal))


def _require_admissible(line: SpectrumLine):
    if not line.admissible:
        raise InvalidInputError(
            f'Линия κ={line.kappa}, n_r={line.n_r}, ветвь {line.branch} недопустима '
            f'(E={line.energy:.6g}, q̃={line.q_eff:.6g})'
        )


def analytic_radial_R(line: SpectrumLine, r):
    """
    R(r) = C ρ^{l*} e^{−ρ/2} L_{n_r}^{(2l*+1)}(ρ), ρ = 2λr, нормировка ∫R² r² dr = 1.

    C² = (2λ)³ n_r! / (2N Γ(n_r + 2l* + 2)).

    При l* < 0 (κ < 0, α > |β_s|) R расходится в нуле, и сетка должна лежать в r > 0.
    """
    _require_admissible(line)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise InvalidInputError('Радиус должен быть конечным и неотрицательным')
    if line.l_star < 0 and np.any(r == 0):
        raise InvalidInputError(
            f'При l*={line.l_star:.6g} < 0 функция R расходится в r = 0; сетка должна начинаться с r > 0'
        )
    decay = line.decay
    l_star, n_r = line.l_star, line.n_r
    log_norm = 0.5 * (
        3.0 * math.log(2.0 * decay)
        + ln_gamma(n_r + 1.0)
        - math.log(2.0 * line.principal)
        - ln_gamma(n_r + 2.0 * l_star + 2.0)
    )
    rho = 2.0 * decay * r
    laguerre = generalized_laguerre(LaguerreParams(n_r=n_r, nu=2.0 * l_star + 1.0, x=rho))
    return math.exp(log_norm) * rho ** l_star * np.exp(-0.5 * rho) * laguerre


def radial_equation_residual(line: SpectrumLine, r_min: float = 0.5, r_max: float | None = None,
                             step: float = 1e-3) -> float:
    """
    Относительная невязка уравнения для u = rR:

        −u''/2 + [l*(l*+1)/(2r²) − q̃/r] u = (E² − 1)/2 · u

    Вторая производная по пятиточечному шаблону на равномерной сетке.
    """
    _require_admissible(line)
    if r_max is None:
        r_max = r_min + 40.0 / line.decay
    grid = check_grid(np.arange(r_min, r_max, step))
    u = grid * analytic_radial_R(line, grid)
    second = (-u[4:] + 16.0 * u[3:-1] - 30.0 * u[2:-2] + 16.0 * u[1:-3] - u[:-4]) / (12.0 * step * step)
    inner = grid[2:-2]
    u_inner = u[2:-2]
    potential = line.channel.l_star_quadratic / (2.0 * inner * inner) - line.q_eff / inner
    eigen = 0.5 * (line.energy ** 2 - 1.0)
    residual = -0.5 * second + (potential - eigen) * u_inner
    scale = np.max(0.5 * np.abs(second) + np.abs(potential * u_inner) + np.abs(eigen * u_inner))
    return float(np.max(np.abs(residual)) / scale)
