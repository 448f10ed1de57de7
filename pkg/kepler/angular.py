"""
Матричная алгебра Дирака и спинорные сферические гармоники.

Стандартное представление: β = diag(I, −I), α_k = offdiag(σ_k, σ_k),
Σ_k = diag(σ_k, σ_k). Вспомогательные β′ = offdiag(I, I), β″ = offdiag(−I, I).
Фаза Кондона–Шортли (как в scipy.special).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

try:
    from scipy.special import sph_harm_y
except ImportError:  # scipy < 1.15
    sph_harm_y = None
    from scipy.special import sph_harm

from .exceptions import DiracKeplerError, DimensionMismatchError, InvalidInputError, SupercriticalError
from .params import CouplingParams, l_from_kappa

logger = logging.getLogger(__name__)

ArrayC = NDArray[np.complex128]

# Опорное направление для матриц, зависящих от n = r/r
REFERENCE_THETA = 1.0
REFERENCE_PHI = 0.5

CLOSURE_TOLERANCE = 1e-12

_I2 = np.eye(2, dtype=np.complex128)
_Z2 = np.zeros((2, 2), dtype=np.complex128)


def pauli_matrices() -> tuple[ArrayC, ArrayC, ArrayC]:
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    sz = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return sx, sy, sz


def beta() -> ArrayC:
    return np.block([[_I2, _Z2], [_Z2, -_I2]])


def beta_prime() -> ArrayC:
    return np.block([[_Z2, _I2], [_I2, _Z2]])


def beta_double_prime() -> ArrayC:
    return np.block([[_Z2, -_I2], [_I2, _Z2]])


def big_sigma() -> tuple[ArrayC, ArrayC, ArrayC]:
    """Исправленная 4×4 Σ: блочно-диагональная из матриц Паули"""
    return tuple(np.block([[s, _Z2], [_Z2, s]]) for s in pauli_matrices())


def dirac_alpha() -> tuple[ArrayC, ArrayC, ArrayC]:
    return tuple(np.block([[_Z2, s], [s, _Z2]]) for s in pauli_matrices())


def unit_vector(theta: float, phi: float) -> NDArray:
    return np.array([
        math.sin(theta) * math.cos(phi),
        math.sin(theta) * math.sin(phi),
        math.cos(theta),
    ])


def sigma_dot_n(theta: float, phi: float) -> ArrayC:
    """σ·n для n = (sin θ cos φ, sin θ sin φ, cos θ)"""
    n = unit_vector(theta, phi)
    return sum(nk * sk for nk, sk in zip(n, pauli_matrices()))


def big_sigma_dot_n(theta: float, phi: float) -> ArrayC:
    n = unit_vector(theta, phi)
    return sum(nk * sk for nk, sk in zip(n, big_sigma()))


# Спинорные сферические гармоники

@dataclass(frozen=True)
class TwoSpinorSample:
    """Значение Ω_{κ m}(θ, φ)"""
    theta: float
    phi: float
    components: ArrayC = field(compare=False)


def _ylm(l, m, theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if abs(m) > l:
        return np.zeros(np.broadcast(theta, phi).shape, dtype=np.complex128)
    if sph_harm_y is not None:
        return np.asarray(sph_harm_y(l, m, theta, phi), dtype=np.complex128)
    return np.asarray(sph_harm(m, l, phi, theta), dtype=np.complex128)


def _check_mj(kappa, m_j):
    j = abs(kappa) - 0.5
    if abs(m_j) > j + 1e-12 or abs((m_j - 0.5) - round(m_j - 0.5)) > 1e-12:
        raise InvalidInputError(f'm_j={m_j} недопустимо для κ={kappa} (|m_j| ≤ {j}, полуцелое)')
    return j


def clebsch_gordan_components(kappa: int, m_j: float) -> dict[tuple[int, int], float]:
    """
    Коэффициенты Клебша–Гордана Ω_{κ m} = Σ c |l, m_l⟩ ⊗ |m_s⟩.

    Ключи: (m_l, 2m_s), нулевые по правилам отбора компоненты опущены.
    """
    l, _ = l_from_kappa(kappa)
    j = _check_mj(kappa, m_j)
    m_up = int(round(m_j - 0.5))
    m_down = int(round(m_j + 0.5))
    if kappa < 0:
        c_up = math.sqrt(max(j + m_j, 0.0) / (2.0 * j))
        c_down = math.sqrt(max(j - m_j, 0.0) / (2.0 * j))
    else:
        c_up = -math.sqrt(max(j - m_j + 1.0, 0.0) / (2.0 * (j + 1.0)))
        c_down = math.sqrt(max(j + m_j + 1.0, 0.0) / (2.0 * (j + 1.0)))

    components = {}
    if abs(m_up) <= l and c_up != 0.0:
        components[(m_up, 1)] = c_up
    if abs(m_down) <= l and c_down != 0.0:
        components[(m_down, -1)] = c_down
    return components


def spinor_harmonic_values(kappa: int, m_j: float, theta, phi) -> ArrayC:
    """Ω_{κ m}(θ, φ) на массивах углов, форма (2, ...)"""
    l, _ = l_from_kappa(kappa)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast(theta, phi).shape
    spinor = np.zeros((2,) + shape, dtype=np.complex128)
    for (m_l, two_ms), coeff in clebsch_gordan_components(kappa, m_j).items():
        row = 0 if two_ms == 1 else 1
        spinor[row] = spinor[row] + coeff * _ylm(l, m_l, theta, phi)
    return spinor


def spinor_spherical_harmonic(kappa: int, m_j: float, theta: float, phi: float) -> TwoSpinorSample:
    """Спинорная сферическая гармоника Ω_{κ m_j} в точке (θ, φ)"""
    values = spinor_harmonic_values(kappa, m_j, float(theta), float(phi))
    return TwoSpinorSample(theta=float(theta), phi=float(phi), components=values.reshape(2))


def harmonic_norm(kappa: int, m_j: float, n_theta: int = 48, n_phi: int = 96) -> float:
    """∫|Ω|² dΩ квадратурой Гаусса–Лежандра по cos θ и равномерной по φ"""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)[:, None]
    phi = (2.0 * np.pi * np.arange(n_phi) / n_phi)[None, :]
    values = spinor_harmonic_values(kappa, m_j, theta, phi)
    density = np.sum(np.abs(values) ** 2, axis=0)
    return float(np.sum(w[:, None] * density) * 2.0 * np.pi / n_phi)


def sigma_identity_residual(kappa: int, m_j: float, theta: float, phi: float) -> float:
    """|(σ·n)Ω_κ + Ω_{−κ}|"""
    omega = spinor_spherical_harmonic(kappa, m_j, theta, phi).components
    partner = spinor_spherical_harmonic(-kappa, m_j, theta, phi).components
    return float(np.linalg.norm(sigma_dot_n(theta, phi) @ omega + partner))


# Оператор K̂ = β(Σ·L + ħ) через лестничные операторы

def _sigma_dot_l(components, l):
    result = {}

    def add(key, value):
        result[key] = result.get(key, 0.0) + value

    for (m_l, two_ms), coeff in components.items():
        # σ_z L_z
        add((m_l, two_ms), two_ms * m_l * coeff)
        if two_ms == -1 and m_l - 1 >= -l:
            # s₊L₋
            add((m_l - 1, 1), math.sqrt(l * (l + 1) - m_l * (m_l - 1)) * coeff)
        if two_ms == 1 and m_l + 1 <= l:
            # s₋L₊
            add((m_l + 1, -1), math.sqrt(l * (l + 1) - m_l * (m_l + 1)) * coeff)
    return result


def spin_orbit_eigenvalue(kappa: int, m_j: float) -> float:
    """Собственное значение σ·L + 1 на Ω_{κ m_j} (должно быть −κ)"""
    l, _ = l_from_kappa(kappa)
    components = clebsch_gordan_components(kappa, m_j)
    image = _sigma_dot_l(components, l)
    for key, coeff in components.items():
        image[key] = image.get(key, 0.0) + coeff

    keys = sorted(set(components) | set(image))
    source = np.array([components.get(k, 0.0) for k in keys])
    target = np.array([image.get(k, 0.0) for k in keys])
    eigenvalue = float(source @ target / (source @ source))
    if np.linalg.norm(target - eigenvalue * source) > CLOSURE_TOLERANCE * max(1.0, abs(eigenvalue)):
        raise DiracKeplerError(f'Ω_κ={kappa}, m_j={m_j} не является собственной функцией σ·L')
    return eigenvalue


def k_operator_eigencheck(kappa: int, m_j: float) -> float:
    """
    Собственное значение K̂ = β(Σ·L + 1) на четырёхспиноре (Ω_κ, 0).

    Верхний блок даёт (σ·L + 1)Ω_κ, нижний −(σ·L + 1)Ω_{−κ} на (0, Ω_{−κ});
    оба должны совпасть и равняться −κ.
    """
    upper = spin_orbit_eigenvalue(kappa, m_j)
    lower = -spin_orbit_eigenvalue(-kappa, m_j)
    if abs(upper - lower) > CLOSURE_TOLERANCE * max(1.0, abs(upper)):
        raise DiracKeplerError(f'Верхний и нижний блоки K̂ расходятся: {upper} и {lower}')
    return upper


# Оператор Λ̂ на инвариантном подпространстве

@dataclass(frozen=True)
class AngularBlock:
    """2×2 матрица Λ̂ на span{(Ω_κ, 0), (0, Ω_{−κ})}"""
    kappa: int
    couplings: CouplingParams
    matrix: ArrayC = field(compare=False)
    closure_residual: float = field(default=0.0, compare=False)

    @property
    def is_hermitian(self):
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=1e-14))


def coupling_operator(c: CouplingParams, theta: float = REFERENCE_THETA, phi: float = REFERENCE_PHI) -> ArrayC:
    """i Σ·n (β_s β″ + α β′) с исправленной 4×4 Σ"""
    return 1j * big_sigma_dot_n(theta, phi) @ (c.beta_s * beta_double_prime() + c.alpha * beta_prime())


def _project(operator: ArrayC, basis: list[ArrayC]) -> tuple[ArrayC, float]:
    """Коэффициенты operator·b_j в базисе basis и невязка замкнутости"""
    columns = np.column_stack(basis)
    images = operator @ columns
    coeffs, *_ = np.linalg.lstsq(columns, images, rcond=None)
    residual = float(np.linalg.norm(columns @ coeffs - images))
    return coeffs, residual


def _four_spinor_basis(kappa, m_j, theta, phi, lower_phase=1.0):
    omega = spinor_spherical_harmonic(kappa, m_j, theta, phi).components
    partner = spinor_spherical_harmonic(-kappa, m_j, theta, phi).components
    upper = np.concatenate([omega, np.zeros(2, dtype=np.complex128)])
    lower = np.concatenate([np.zeros(2, dtype=np.complex128), lower_phase * partner])
    return [upper, lower]


def lambda_block(kappa: int, c: CouplingParams, m_j: float = 0.5) -> AngularBlock:
    """
    Λ̂ = −(σ·L + 1) + iσ·n(β_s β″ + α β′) на инвариантном подпространстве канала κ.

    Диагональ берётся из лестничной алгебры, связь проекцией 4×4 оператора
    на базис из гармоник в опорном направлении.
    """
    l_from_kappa(kappa)
    diagonal = np.diag([
        -spin_orbit_eigenvalue(kappa, m_j),
        -spin_orbit_eigenvalue(-kappa, m_j),
    ]).astype(np.complex128)
    basis = _four_spinor_basis(kappa, m_j, REFERENCE_THETA, REFERENCE_PHI)
    coupling, residual = _project(coupling_operator(c), basis)
    if residual > 1e-10:
        logger.warning('Подпространство κ=%s не замкнуто под Λ̂: невязка %.3e', kappa, residual)
    return AngularBlock(kappa=int(kappa), couplings=c, matrix=diagonal + coupling, closure_residual=residual)


def lambda_quadratic_eigs(block: AngularBlock) -> tuple[float, float]:
    """Собственные значения Λ̂(Λ̂ + 1): (γ(γ+1), γ(γ−1))"""
    c = block.couplings
    if not c.is_subcritical(block.kappa):
        raise SupercriticalError(block.kappa, c.alpha, c.beta_s)
    quadratic = block.matrix @ block.matrix + block.matrix
    eigenvalues = np.linalg.eigvals(quadratic)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if np.max(np.abs(eigenvalues.imag)) > 1e-9 * scale:
        raise SupercriticalError(block.kappa, c.alpha, c.beta_s)
    larger, smaller = sorted(eigenvalues.real, reverse=True)
    return float(larger), float(smaller)


def lambda_eigenvectors(block: AngularBlock) -> list[tuple[complex, ArrayC]]:
    """Собственные векторы Λ̂: коэффициенты при (Ω_κ, 0) и (0, Ω_{−κ})"""
    eigenvalues, vectors = np.linalg.eig(block.matrix)
    pairs = []
    for k in np.argsort(eigenvalues.real):
        vector = vectors[:, k] / np.linalg.norm(vectors[:, k])
        # фаза: первая ненулевая компонента вещественна и положительна
        pivot = vector[np.argmax(np.abs(vector) > 1e-14)]
        vector = vector * (abs(pivot) / pivot)
        pairs.append((complex(eigenvalues[k]), vector))
    return pairs


def radial_coupling_matrix(kappa: int, c: CouplingParams, m_j: float = 0.5) -> tuple[NDArray, float]:
    """
    Угловая связь iΣ·n(β_s β″ + α β′) в радиальном базисе (G, F),
    где ψ = (G Ω_κ, iF Ω_{−κ})/r. Ожидается [[0, α−β_s], [−(α+β_s), 0]].
    """
    basis = _four_spinor_basis(kappa, m_j, REFERENCE_THETA, REFERENCE_PHI, lower_phase=1j)
    coeffs, residual = _project(coupling_operator(c), basis)
    if np.max(np.abs(coeffs.imag)) > 1e-10:
        raise DiracKeplerError('Радиальная проекция связи оказалась комплексной')
    return coeffs.real.copy(), residual


# Центробежный член 1/r² в уравнении для ψ̄

BLOCK_NAMES = ('upper_left', 'upper_right', 'lower_left', 'lower_right')


@dataclass(frozen=True)
class BarrierReport:
    """Нормы Фробениуса 2×2 блоков матрицы при 1/r²"""
    couplings: CouplingParams
    block_norms: dict = field(compare=False)
    mixes: bool = False

    @property
    def off_diagonal(self):
        return self.block_norms['upper_right'], self.block_norms['lower_left']


def barrier_matrix(c: CouplingParams, theta: float = REFERENCE_THETA, phi: float = REFERENCE_PHI,
                   corrected: bool = True) -> ArrayC:
    """M = iΣ·n(β_s β″ + α β′) + (β_s² − α²)·I"""
    if corrected:
        sigma_n = big_sigma_dot_n(theta, phi)
    else:
        sigma_n = sigma_dot_n(theta, phi)
    mixing = c.beta_s * beta_double_prime() + c.alpha * beta_prime()
    try:
        coupling = 1j * sigma_n @ mixing
    except ValueError as exc:
        raise DimensionMismatchError(
            f'σ·n размера {sigma_n.shape} нельзя умножить на β-матрицы размера {mixing.shape}: {exc}'
        ) from exc
    return coupling + (c.beta_s ** 2 - c.alpha ** 2) * np.eye(4)


def barrier_block_structure(c: CouplingParams, tolerance: float = 1e-14) -> BarrierReport:
    """Смешивает ли центробежный член верхние и нижние компоненты ψ̄"""
    m = barrier_matrix(c)
    blocks = {
        'upper_left': m[:2, :2],
        'upper_right': m[:2, 2:],
        'lower_left': m[2:, :2],
        'lower_right': m[2:, 2:],
    }
    norms = {name: float(np.linalg.norm(blocks[name])) for name in BLOCK_NAMES}
    mixes = norms['upper_right'] > tolerance or norms['lower_left'] > tolerance
    return BarrierReport(couplings=c, block_norms=norms, mixes=mixes)


def uncorrected_sigma_note(c: CouplingParams) -> str:
    """Попытка построить член с 2×2 σ вместо 4×4 Σ"""
    try:
        barrier_matrix(c, corrected=False)
    except DimensionMismatchError as exc:
        return f'2×2 σ несовместима с 4×4 β′, β″: {exc}'
    return '2×2 σ неожиданно прошла проверку размерности'