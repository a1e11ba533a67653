"""Resonance index, total resonance index, Birman-Schwinger count and the spectral shift function."""
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg

from resonance_lab.errors import (
    BirmanSchwingerSetting, CrossingAtEndpoint, EndpointResonance, NotConverged, PreconditionViolated,
)
from resonance_lab.operator_space import MatrixOperator, as_array, resolvent_array, resonance_points_at
from resonance_lab.settings import SETTINGS, RlFloatSetting, RlIntegerSetting
from resonance_lab.utils import norm


log = logging.getLogger(__name__)

with SETTINGS.section('flow') as S:
    Y_START = S.register('y_start', RlFloatSetting, default=0.1, positive=True)
    Y_COUNT = S.register('y_count', RlIntegerSetting, default=21, minimum=3)
    STABLE_TAIL = S.register(
        'stable_tail', RlIntegerSetting, default=3, minimum=1,
        description='Trailing y values over which the half-plane counts must agree',
    )
    CLUSTER_FRACTION = S.register(
        'cluster_fraction', RlFloatSetting, default=0.3, positive=True, maximum=0.5,
        description='Cluster radius around −1/r as a fraction of the distance to the other limit points',
    )
    LIMIT_TOLERANCE = S.register('limit_tolerance', RlFloatSetting, default=1e-6, positive=True)
    REAL_TOLERANCE = S.register('real_tolerance', RlFloatSetting, default=1e-8, positive=True)
    ENDPOINT_TOLERANCE = S.register('endpoint_tolerance', RlFloatSetting, default=1e-8, positive=True)
    STEPS = S.register('steps', RlIntegerSetting, default=200, minimum=1)
    BISECTIONS = S.register('bisections', RlIntegerSetting, default=50, minimum=0)
    BS_TOLERANCE = S.register('bs_tolerance', RlFloatSetting, default=1e-10, positive=True)


def default_y_sequence() -> list[float]:
    return [Y_START.value * 2.0 ** (-k) for k in range(Y_COUNT.value)]


def _hermitian(a: MatrixOperator | np.ndarray, name: str) -> np.ndarray:
    op = a if isinstance(a, MatrixOperator) else MatrixOperator.of(a)
    if not op.hermitian:
        raise PreconditionViolated(f'{name} must be self-adjoint')
    return op.entries


def half_plane_counts(
    lam: float,
    r_lambda: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    y_sequence: Sequence[float] | None = None,
) -> list[tuple[int, int]]:
    """(N₊, N₋) for every y: eigenvalues of R_{λ+iy}(H0)V near −1/r_λ in each half-plane."""
    h0 = as_array(h0)
    v = as_array(v)
    if y_sequence is None:
        y_sequence = default_y_sequence()
    if r_lambda == 0:
        raise PreconditionViolated('Zero is never a resonance point off the spectrum of H0')

    target = -1.0 / r_lambda
    limits = scipy.linalg.eigvals(resolvent_array(h0, lam) @ v)
    near = np.abs(limits - target) <= LIMIT_TOLERANCE.value * max(1.0, abs(target))
    if not np.any(near):
        return [(0, 0) for _ in y_sequence]

    others = limits[~near]
    radius = CLUSTER_FRACTION.value * (float(np.min(np.abs(others - target))) if len(others) else max(1.0, abs(target)))

    history = []
    for y in y_sequence:
        mu = scipy.linalg.eigvals(resolvent_array(h0, lam + 1j * y) @ v)
        members = mu[np.abs(mu - target) < radius]
        history.append((int(np.sum(members.imag > 0)), int(np.sum(members.imag < 0))))
    return history


def resonance_index(
    lam: float,
    r_lambda: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    y_sequence: Sequence[float] | None = None,
) -> int:
    """N₊ − N₋ once the half-plane counts settle over the tail of `y_sequence`."""
    history = half_plane_counts(lam, r_lambda, h0, v, y_sequence)
    tail = history[-STABLE_TAIL.value:]
    if len(set(tail)) != 1:
        raise NotConverged(history)
    n_plus, n_minus = tail[-1]
    log.debug('Resonance index at λ=%s, r=%s: N+=%d, N-=%d', lam, r_lambda, n_plus, n_minus)
    return n_plus - n_minus


def real_resonance_points(
    lam: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    interval: tuple[float, float],
) -> list[float]:
    """Real resonance points r ∈ [a, b] of λ, i.e. λ ∈ σ(H0 + rV)."""
    a, b = interval
    points = resonance_points_at(lam, MatrixOperator.of(as_array(h0)), MatrixOperator.of(as_array(v)))
    result = []
    for point in points:
        s = point.s
        if abs(s.imag) > REAL_TOLERANCE.value * (1.0 + abs(s)):
            continue
        for endpoint in (a, b):
            if abs(s.real - endpoint) <= ENDPOINT_TOLERANCE.value * (1.0 + abs(s)):
                raise EndpointResonance(s)
        if a < s.real < b:
            result.append(s.real)
    return sorted(result)


def total_resonance_index(
    lam: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    interval: tuple[float, float] = (0.0, 1.0),
) -> int:
    return sum(
        resonance_index(lam, r, h0, v)
        for r in real_resonance_points(lam, h0, v, interval)
    )


@dataclass(frozen=True)
class Crossing:
    r: float
    sign: int


def _count_below(h: np.ndarray, lam: float, r: float | None = None) -> int:
    values = scipy.linalg.eigvalsh(h)
    if r is not None and np.any(np.abs(values - lam) <= ENDPOINT_TOLERANCE.value * max(1.0, abs(lam))):
        raise CrossingAtEndpoint(r)
    return int(np.sum(values < lam))


def flow_crossings(
    lam: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    interval: tuple[float, float] = (0.0, 1.0),
    steps: int | None = None,
) -> list[Crossing]:
    """Signed crossings of λ by eigenvalues of H0 + rV as r marches across the interval.

    Each crossing is located by bisection; +1 is an upward crossing.
    """
    h0 = _hermitian(h0, 'H0')
    v = _hermitian(v, 'V')
    if steps is None:
        steps = STEPS.value
    a, b = interval

    def below(r: float) -> int:
        return int(np.sum(scipy.linalg.eigvalsh(h0 + r * v) < lam))

    grid = np.linspace(a, b, steps + 1)
    counts = [_count_below(h0 + a * v, lam, a)]
    counts += [below(r) for r in grid[1:-1]]
    counts.append(_count_below(h0 + b * v, lam, b))

    crossings = []
    for left, right, n_left, n_right in zip(grid[:-1], grid[1:], counts[:-1], counts[1:]):
        if n_left == n_right:
            continue
        lo, hi = float(left), float(right)
        for _ in range(BISECTIONS.value):
            middle = 0.5 * (lo + hi)
            if below(middle) == n_left:
                lo = middle
            else:
                hi = middle
        crossings.append(Crossing(0.5 * (lo + hi), n_left - n_right))
        log.debug('Eigenvalue crosses λ=%s at r=%.12f (%+d)', lam, crossings[-1].r, n_left - n_right)
    return crossings


def spectral_flow_oracle(
    lam: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    interval: tuple[float, float] = (0.0, 1.0),
    steps: int | None = None,
) -> int:
    return sum(c.sign for c in flow_crossings(lam, h0, v, interval, steps))


def birman_schwinger_count(
    lam: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
) -> int:
    """#{eigenvalues of R_λ(H0)V below −1} for V ≤ 0 and λ below the spectrum of H0."""
    h0 = _hermitian(h0, 'H0')
    v = _hermitian(v, 'V')
    n = h0.shape[0]
    v_values = scipy.linalg.eigvalsh(v)
    if v_values[-1] > BS_TOLERANCE.value * max(norm(v), 1.0):
        raise BirmanSchwingerSetting(f'V has a positive eigenvalue {v_values[-1]:.3e}')
    if lam >= scipy.linalg.eigvalsh(h0)[0]:
        raise BirmanSchwingerSetting(f'λ={lam} is not below the spectrum of H0')

    # R_λ(H0)V is similar to L⁻¹VL⁻ᴴ with H0 − λ = LLᴴ
    lower = scipy.linalg.cholesky(h0 - lam * np.eye(n), lower=True)
    half = scipy.linalg.solve_triangular(lower, v, lower=True)
    sandwich = scipy.linalg.solve_triangular(lower, half.conj().T, lower=True).conj().T
    values = scipy.linalg.eigvalsh(0.5 * (sandwich + sandwich.conj().T))
    if np.any(np.abs(values + 1.0) <= BS_TOLERANCE.value ** 0.5):
        raise BirmanSchwingerSetting(f'λ={lam} is an eigenvalue of H0 + V')
    return int(np.sum(values < -1.0))


def counting_difference(lam: float, h_start: np.ndarray, h_end: np.ndarray) -> int:
    """N_{H_start}(λ) − N_{H_end}(λ) with N_H(λ) = #{eigenvalues ≤ λ}."""
    return int(np.sum(scipy.linalg.eigvalsh(h_start) <= lam)) - int(np.sum(scipy.linalg.eigvalsh(h_end) <= lam))


@dataclass(frozen=True)
class SsfCalibration:
    sign: int
    trace_side: float
    integral_side: float
    center: float
    width: float

    @property
    def residual(self) -> float:
        return abs(self.trace_side - self.sign * self.integral_side)


def calibrate_ssf_sign(h_start: np.ndarray, h_end: np.ndarray) -> SsfCalibration:
    """Sign σ with Tr f(H_end) − Tr f(H_start) = σ∫f′(λ)(N_{H_start}(λ) − N_{H_end}(λ))dλ on Gaussian bumps f."""
    start_values = scipy.linalg.eigvalsh(h_start)
    end_values = scipy.linalg.eigvalsh(h_end)
    breakpoints = np.concatenate([start_values, end_values])
    spread = max(float(np.ptp(breakpoints)), 1.0)

    calibration = None
    for center in np.linspace(breakpoints.min(), breakpoints.max(), 7):
        width = 0.5 * spread

        def f(x: float | np.ndarray) -> float | np.ndarray:
            return np.exp(-((x - center) / width) ** 2)

        def integrand(x: float) -> float:
            derivative = -2.0 * (x - center) / width ** 2 * f(x)
            return derivative * counting_difference(x, h_start, h_end)

        trace_side = float(np.sum(f(end_values)) - np.sum(f(start_values)))
        integral_side, _error = scipy.integrate.quad(
            integrand,
            breakpoints.min() - 1.0, breakpoints.max() + 1.0,
            points=sorted(set(breakpoints.tolist())),
            limit=200,
        )
        if abs(integral_side) > 1e-6:
            sign = 1 if trace_side * integral_side > 0 else -1
            calibration = SsfCalibration(sign, trace_side, float(integral_side), float(center), width)
            break

    if calibration is None:
        calibration = SsfCalibration(1, 0.0, 0.0, float(breakpoints.mean()), 0.5 * spread)
    log.debug('Spectral shift sign calibrated to %+d (residual %.3e)', calibration.sign, calibration.residual)
    return calibration


@dataclass(frozen=True)
class FlowReport:
    lam: float
    interval: tuple[float, float]
    real_resonance_points: list[tuple[float, int]]
    total_index: int
    ssf_value: int
    oracle_value: int
    flow_value: int
    bs_count: int | None = None
    calibration: SsfCalibration | None = field(default=None, compare=False)

    @property
    def agree(self) -> bool:
        values = {self.total_index, self.ssf_value, self.oracle_value, self.flow_value}
        if self.bs_count is not None:
            values.add(-self.bs_count)
        return len(values) == 1


def ssf_report(
    lam: float,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    interval: tuple[float, float] = (0.0, 1.0),
) -> FlowReport:
    """ξ(λ; H_b, H_a) as the total resonance index, next to its counting and flow oracles."""
    h0 = _hermitian(h0, 'H0')
    v = _hermitian(v, 'V')
    a, b = interval
    h_start = h0 + a * v
    h_end = h0 + b * v
    _count_below(h_start, lam, a)
    _count_below(h_end, lam, b)

    points = [(r, resonance_index(lam, r, h0, v)) for r in real_resonance_points(lam, h0, v, interval)]
    total = sum(index for _r, index in points)
    calibration = calibrate_ssf_sign(h_start, h_end)
    oracle = calibration.sign * counting_difference(lam, h_start, h_end)

    bs_count = None
    if (
        a == 0.0 and b == 1.0
        and scipy.linalg.eigvalsh(v)[-1] <= BS_TOLERANCE.value * max(norm(v), 1.0)
        and lam < scipy.linalg.eigvalsh(h0)[0]
    ):
        bs_count = birman_schwinger_count(lam, h0, v)

    report = FlowReport(
        lam=float(lam),
        interval=(float(a), float(b)),
        real_resonance_points=points,
        total_index=total,
        # every limiting resonance point is real for matrices, so the integral term vanishes
        ssf_value=total,
        oracle_value=oracle,
        flow_value=spectral_flow_oracle(lam, h0, v, interval),
        bs_count=bs_count,
        calibration=calibration,
    )
    if not report.agree:
        log.warning('Spectral shift at λ=%s disagrees: %s', lam, report)
    return report


def lambda_grid(h0: np.ndarray, v: np.ndarray, count: int, interval: tuple[float, float] = (0.0, 1.0)) -> list[float]:
    """Values of λ spread over the spectra of H_a and H_b, kept off both spectra."""
    a, b = interval
    values = np.concatenate([scipy.linalg.eigvalsh(h0 + a * v), scipy.linalg.eigvalsh(h0 + b * v)])
    lo, hi = float(values.min()) - 1.0, float(values.max()) + 1.0
    grid = []
    for lam in np.linspace(lo, hi, count):
        gap = float(np.min(np.abs(values - lam)))
        if gap < 1e-3 * max(1.0, abs(lam)):
            lam += 2e-3 * max(1.0, abs(lam))
        grid.append(float(lam))
    return grid
