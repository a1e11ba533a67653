"""Scenario commands: instance generation, module pipelines and their JSON reports."""
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from resonance_lab.eigenpath import (
    ConjugatePath, Eigenpath, assumption_check, branching_report, chain_residuals,
    conjugate_paths, monodromy_cycles, path_order, trace_eigenpaths,
)
from resonance_lab.errors import AssertionFailed, FormatError, PreconditionViolated, ResonanceError
from resonance_lab.formats.instance import (
    Instance, InstanceKind, generate_instance, load_instance, save_instance,
)
from resonance_lab.formats.reports import (
    filtration_to_dict, hankel_to_dict, series_to_dict, write_curve_csv,
    write_flow_csv, write_report, write_trajectory_csv,
)
from resonance_lab.laurent import (
    ResonanceOperators, adjoint_symmetry_residual, conjugate_series, laurent_coefficients,
    pairing_residual, pole_order, resonance_operators, verify_laurent_identities,
)
from resonance_lab.operator_space import MatrixOperator, spectral_data
from resonance_lab.projection_decomposition import (
    beta_alpha, cycle_projections, projection_report, schmidt_reconstruction,
)
from resonance_lab.resonance_structure import (
    JordanData, depth, jordan_structure, semisimplicity_check, structure_report,
    upsilon_filtration,
)
from resonance_lab.settings import SETTINGS, RlBooleanSetting, RlFloatSetting, RlIntegerSetting, RlSettingError
from resonance_lab.spectral_flow import FlowReport, lambda_grid, ssf_report
from resonance_lab.tangency import (
    lax_tangency_check, resonant_curve, tangency_order, verify_tangency_theorems,
)
from resonance_lab.tasks import TaskPool
from resonance_lab.utils import norm


log = logging.getLogger(__name__)

with SETTINGS.section('scenario') as S:
    TOLERANCE = S.register(
        'tolerance', RlFloatSetting, default=1e-7, positive=True,
        description='Tolerance for report checks that carry no tolerance of their own',
    )
    SWEEP_COUNT = S.register('sweep_count', RlIntegerSetting, default=200, minimum=1)
    DIMENSION = S.register('dimension', RlIntegerSetting, default=4, minimum=1)
    CALIBRATION_TOLERANCE = S.register('calibration_tolerance', RlFloatSetting, default=1e-6, positive=True)
    LAMBDA_COUNT = S.register('lambda_count', RlIntegerSetting, default=9, minimum=1)
    PLANTED = S.register(
        'planted', RlBooleanSetting, default=True,
        description='Rotate sweep instances through planted higher-order and complex-coupling points',
    )
    SEPARATION = S.register(
        'separation', RlFloatSetting, default=0.1, positive=True,
        description='Least distance from a sweep point z0 to the rest of the spectrum',
    )
    THIRD_ORDER_FLOOR = S.register('third_order_floor', RlFloatSetting, default=0.05, positive=True)
    PLANT_ATTEMPTS = S.register('plant_attempts', RlIntegerSetting, default=100, minimum=1)

SETTINGS.bind_environment('RESONANCE_LAB_PLANTED', 'scenario/planted')


EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_PRECONDITION = 2


class ScenarioCommand(enum.StrEnum):
    ANALYZE = 'analyze'
    VERIFY = 'verify'
    FLOW = 'flow'
    TANGENCY = 'tangency'
    SWEEP = 'sweep'
    GEN = 'gen'


@dataclass(frozen=True)
class Scenario:
    command: ScenarioCommand
    instance_path: str | None = None
    z0: complex | None = None
    s0: complex = 0j
    lam: float | None = None
    interval: tuple[float, float] = (0.0, 1.0)
    radius: float | None = None
    nodes: int | None = None
    tol: float | None = None
    seed: int = 0
    output_path: str | None = None
    csv_path: str | None = None
    n: int | None = None
    kind: InstanceKind = InstanceKind.HERMITIAN_PAIR
    count: int | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise PreconditionViolated(f'Tolerance must be positive, got {self.tol}')
        if self.radius is not None and not self.radius > 0:
            raise PreconditionViolated(f'Radius must be positive, got {self.radius}')
        if self.nodes is not None and self.nodes < 16:
            raise PreconditionViolated(f'At least 16 nodes are required, got {self.nodes}')
        if self.n is not None and self.n < 1:
            raise PreconditionViolated(f'Instance dimension must be positive, got {self.n}')
        if self.count is not None and self.count < 1:
            raise PreconditionViolated(f'Count must be positive, got {self.count}')
        if not self.interval[0] < self.interval[1]:
            raise PreconditionViolated(f'Empty interval {self.interval}')

    @property
    def tolerance(self) -> float:
        return self.tol if self.tol is not None else TOLERANCE.value


class CheckList:
    """Named pass/fail checks with their residuals; skipped checks keep a zero residual."""

    def __init__(self):
        self.checks: dict[str, bool] = {}
        self.residuals: dict[str, float] = {}
        self.skipped: list[str] = []

    def residual(self, name: str, value: float, tolerance: float):
        self.residuals[name] = float(value)
        self.checks[name] = bool(value <= tolerance)

    def flag(self, name: str, passed: bool, residual: float = 0.0):
        self.residuals[name] = float(residual)
        self.checks[name] = bool(passed)

    def skip(self, *names: str):
        for name in names:
            self.residuals.setdefault(name, 0.0)
            self.skipped.append(name)

    @property
    def failures(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]

    def to_dict(self) -> dict:
        return {
            'checks': dict(self.checks),
            'residuals': dict(self.residuals),
            'skipped': sorted(self.skipped),
            'failures': self.failures,
        }


_PATH_KEYS = ('paths/analyticity', 'paths/pairing', 'paths/antiholomorphy', 'paths/rank_bound')
_THEOREM_KEYS = (
    'theorem/cycles_blocks_orders', 'theorem/depth_order', 'theorem/nilpotent_chain',
    'theorem/equation_chain', 'projection/idempotent', 'projection/orthogonality',
    'projection/sum', 'projection/cycle_checks', 'hankel/pattern', 'hankel/cross',
    'hankel/inverse', 'hankel/reconstruction',
)
_SIMPLE_KEYS = (
    'theorem/branching_criteria_agree', 'theorem/derivative_formula',
    'tangency/orders_agree', 'tangency/chain', 'tangency/equation',
)


def _require_z0(scenario: Scenario) -> complex:
    if scenario.z0 is None:
        raise PreconditionViolated(f'Command {scenario.command} needs --z0')
    return scenario.z0


def _require_instance(scenario: Scenario) -> Instance:
    if scenario.instance_path is None:
        raise PreconditionViolated(f'Command {scenario.command} needs --instance')
    return load_instance(scenario.instance_path)


@dataclass
class _Analysis:
    z0: complex
    n0: np.ndarray
    w: np.ndarray
    report: dict = field(default_factory=dict)
    ops: ResonanceOperators | None = None
    jordan: JordanData | None = None
    paths: list[Eigenpath] | None = None
    conjugates: list[ConjugatePath] | None = None
    orders: list[int] | None = None


def _analyze(scenario: Scenario, instance: Instance, checks: CheckList) -> _Analysis:
    z0 = _require_z0(scenario)
    n0 = instance.base(scenario.s0).entries
    w = instance.direction.entries
    tol = scenario.tolerance
    analysis = _Analysis(z0, n0, w)
    report = analysis.report

    series = laurent_coefficients(z0, n0, w, radius=scenario.radius, nodes=scenario.nodes)
    d = pole_order(series, w)
    identities = verify_laurent_identities(series, w, scenario.tol)
    for name, value in identities.residuals.items():
        checks.residual(f'laurent/{name}', value, identities.tolerance)
    checks.flag('laurent/rank_bound', not series.exceeds_rank_bound)
    conjugate = conjugate_series(series, n0, w)
    checks.residual('laurent/adjoint_symmetry', adjoint_symmetry_residual(series, conjugate), tol)
    checks.residual('laurent/pairing', pairing_residual(series, conjugate, w), tol)
    report['series'] = series_to_dict(series)
    report['pole_order'] = d

    ops = resonance_operators(series, w)
    filtration = upsilon_filtration(z0, n0, w)
    jordan = jordan_structure(ops, filtration)
    structure = structure_report(n0, w, series, ops, filtration)
    checks.residual('structure/image_k0', structure.image_k0_angle, structure.tolerance)
    checks.residual('structure/upsilon', structure.upsilon_angle, structure.tolerance)
    checks.residual('structure/eigenspace', structure.eigenspace_angle, structure.tolerance)
    checks.residual('structure/nilpotent_step', structure.nilpotent_step_residual, structure.tolerance)
    checks.flag('structure/conjugate_dims', structure.conjugate_dims_equal)
    checks.flag('structure/order_matches_pole', structure.order_matches_pole)
    checks.residual('structure/jordan_chains', jordan.chain_residual(ops.A), tol)
    report['filtration'] = filtration_to_dict(filtration, jordan)
    report['operators'] = {'P': ops.P, 'A': ops.A}
    analysis.ops = ops
    analysis.jordan = jordan

    semisimple = semisimplicity_check(z0, n0)
    checks.flag('semisimplicity/consistent', semisimple.consistent)
    report['semisimplicity'] = {
        'semisimple': semisimple.semisimple,
        'gram_invertible': semisimple.gram_invertible,
        'gram_smallest_singular_value': semisimple.gram_smallest_singular_value,
        'nilpotent_norm': norm(semisimple.D),
    }

    assumption = assumption_check(z0, n0, w)
    report['assumption'] = {
        'passed': assumption.passed,
        'no_branching': assumption.no_branching,
        'semisimple': assumption.semisimple,
        'gram_invertible': assumption.gram_invertible,
        'gram_condition': assumption.gram_condition,
        'diagnostics': list(assumption.diagnostics),
    }
    if not assumption.passed:
        log.info('Generating eigenvectors do not span the eigenspace at %s; skipping eigenpaths', z0)
        checks.skip(*_PATH_KEYS)
        return analysis

    paths = trace_eigenpaths(z0, n0, w)
    conjugates = conjugate_paths(paths)
    orders = [path_order(p, c) for p, c in zip(paths, conjugates)]
    checks.residual('paths/analyticity', max(p.analyticity_residual for p in paths), tol)
    checks.residual('paths/pairing', max(c.pairing_residual for c in conjugates), tol)
    checks.residual('paths/antiholomorphy', max(c.antiholomorphy_residual for c in conjugates), tol)
    checks.flag('paths/rank_bound', max(orders) <= series.rank_bound)
    report['paths'] = [
        {
            'branch_id': p.branch_id,
            'order': k,
            'gauge': p.gauge,
            'multiplicity': p.multiplicity,
            'z_taylor': p.z_taylor,
            'radius': p.radius,
        }
        for p, k in zip(paths, orders)
    ]
    if scenario.csv_path is not None:
        write_trajectory_csv(paths, scenario.csv_path)

    analysis.paths = paths
    analysis.conjugates = conjugates
    analysis.orders = orders
    return analysis


def _verify_structure(analysis: _Analysis, checks: CheckList, tol: float):
    z0, n0, w, ops = analysis.z0, analysis.n0, analysis.w, analysis.ops
    paths, conjugates, orders = analysis.paths, analysis.conjugates, analysis.orders

    cycles = monodromy_cycles(z0, n0, w)
    checks.flag('theorem/cycles_blocks_orders', cycles.matches(analysis.jordan.block_sizes, orders))
    depths = [depth(p.phi_taylor[0], ops) for p in paths]
    checks.flag('theorem/depth_order', all(dp == k - 1 for dp, k in zip(depths, orders)))

    nilpotent = 0.0
    equation = 0.0
    for p, k in zip(paths, orders):
        residuals = chain_residuals(p, ops, k)
        nilpotent = max(nilpotent, residuals['nilpotent_chain'])
        equation = max(equation, residuals['equation_chain'])
    checks.residual('theorem/nilpotent_chain', nilpotent, tol)
    checks.residual('theorem/equation_chain', equation, tol)

    projections = cycle_projections(z0, n0, w, ops=ops, paths=paths)
    summary = projection_report(projections, ops)
    checks.residual('projection/idempotent', summary.idempotent, summary.tolerance)
    checks.residual('projection/orthogonality', summary.orthogonality, summary.tolerance)
    checks.residual('projection/sum', summary.sum_residual, summary.tolerance)
    checks.residual(
        'projection/cycle_checks',
        max((abs(x) for p in projections for x in p.checks.values()), default=0.0),
        math.sqrt(summary.tolerance),
    )

    pair = beta_alpha(paths, conjugates, w, orders)
    reconstruction = schmidt_reconstruction(pair, paths, conjugates, w)
    checks.residual('hankel/pattern', pair.hankel_residual, tol)
    checks.residual('hankel/cross', pair.cross_residual, tol)
    checks.residual('hankel/inverse', pair.inverse_residual, tol)
    checks.residual('hankel/reconstruction', norm(reconstruction - ops.P) / max(norm(ops.P), 1.0), tol)

    analysis.report['cycles'] = {
        'periods': cycles.periods,
        'permutation': cycles.monodromy_permutation,
        'points': cycles.points,
    }
    analysis.report['depths'] = depths
    analysis.report['projections'] = [
        {'tau': p.tau, 'period': p.period, 'rank': p.rank, 'checks': p.checks}
        for p in projections
    ]
    analysis.report['hankel'] = hankel_to_dict(pair)


def _is_simple(z0: complex, n0: np.ndarray) -> bool:
    cluster = spectral_data(MatrixOperator.of(n0)).cluster_at(z0)
    return cluster is not None and cluster.algebraic == 1 and cluster.geometric == 1


def _verify_simple(analysis: _Analysis, checks: CheckList, tol: float):
    z0, n0, w = analysis.z0, analysis.n0, analysis.w

    branching = branching_report(z0, 0.0, n0, w)
    checks.flag('theorem/branching_criteria_agree', branching.agree)
    checks.residual('theorem/derivative_formula', branching.derivative_formula_residual, tol)
    analysis.report['branching'] = {
        'criteria': branching.criteria,
        'order': branching.order,
        'derivative': branching.derivative,
        'pairing': branching.pairing,
        'cycle_periods': branching.monodromy.periods if branching.monodromy else [],
    }

    theorems = verify_tangency_theorems(z0, n0, w)
    checks.flag('tangency/orders_agree', theorems.orders_agree)
    checks.residual('tangency/chain', theorems.chain_residual, theorems.tolerance)
    checks.residual('tangency/equation', theorems.equation_residual, theorems.tolerance)
    analysis.report['tangency'] = {
        'tangency_order': theorems.tangency_order,
        'depth': theorems.depth,
        'path_order': theorems.path_order,
        's_derivative': theorems.s_derivative,
    }


def _run_analyze(scenario: Scenario, checks: CheckList) -> dict:
    analysis = _analyze(scenario, _require_instance(scenario), checks)
    return analysis.report


def _run_verify(scenario: Scenario, checks: CheckList) -> dict:
    analysis = _analyze(scenario, _require_instance(scenario), checks)
    tol = scenario.tolerance

    if analysis.paths is not None:
        _verify_structure(analysis, checks, tol)
    else:
        checks.skip(*_THEOREM_KEYS)

    if _is_simple(analysis.z0, analysis.n0):
        _verify_simple(analysis, checks, tol)
    else:
        checks.skip(*_SIMPLE_KEYS)
    return analysis.report


def _flow_checks(report: FlowReport, checks: CheckList, prefix: str = 'flow'):
    checks.flag(f'{prefix}/total_equals_oracle', report.total_index == report.oracle_value,
                abs(report.total_index - report.oracle_value))
    checks.flag(f'{prefix}/ssf_equals_counting', report.ssf_value == report.oracle_value,
                abs(report.ssf_value - report.oracle_value))
    checks.flag(f'{prefix}/spectral_flow', report.flow_value == report.total_index,
                abs(report.flow_value - report.total_index))
    if report.bs_count is not None:
        checks.flag(f'{prefix}/birman_schwinger', report.ssf_value == -report.bs_count,
                    abs(report.ssf_value + report.bs_count))
    else:
        checks.skip(f'{prefix}/birman_schwinger')
    calibration = report.calibration.residual if report.calibration is not None else 0.0
    checks.residual(f'{prefix}/ssf_calibration', calibration, CALIBRATION_TOLERANCE.value)


def _flow_to_dict(report: FlowReport) -> dict:
    return {
        'lambda': report.lam,
        'interval': list(report.interval),
        'real_resonance_points': [
            {'r': r, 'index': index} for r, index in report.real_resonance_points
        ],
        'total_index': report.total_index,
        'ssf_value': report.ssf_value,
        'oracle_value': report.oracle_value,
        'flow_value': report.flow_value,
        'bs_count': report.bs_count,
    }


def _run_flow(scenario: Scenario, checks: CheckList) -> dict:
    instance = _require_instance(scenario)
    h0 = instance.h0.entries
    v = instance.v.entries

    if scenario.lam is not None:
        report = ssf_report(scenario.lam, h0, v, scenario.interval)
        _flow_checks(report, checks)
        if scenario.csv_path is not None:
            write_flow_csv([report], scenario.csv_path)
        return _flow_to_dict(report)

    grid = lambda_grid(h0, v, scenario.count or LAMBDA_COUNT.value, scenario.interval)
    reports = TaskPool().map(
        'flow', lambda lam: ssf_report(lam, h0, v, scenario.interval), grid)
    for k, report in enumerate(reports):
        _flow_checks(report, checks, f'flow/{k}')
    if scenario.csv_path is not None:
        write_flow_csv(reports, scenario.csv_path)
    return {'grid': [_flow_to_dict(r) for r in reports]}


def _run_tangency(scenario: Scenario, checks: CheckList) -> dict:
    instance = _require_instance(scenario)
    z0 = _require_z0(scenario)
    n0 = instance.base(scenario.s0).entries
    w = instance.direction.entries
    tol = scenario.tolerance

    curve = resonant_curve(z0, n0, w, radius=scenario.radius, nodes=scenario.nodes)
    order = tangency_order(curve)
    checks.residual('tangency/curve_residual', curve.residual, tol)
    if scenario.csv_path is not None:
        write_curve_csv(curve, scenario.csv_path)

    theorems = verify_tangency_theorems(z0, n0, w)
    checks.flag('tangency/orders_agree', theorems.orders_agree)
    checks.residual('tangency/chain', theorems.chain_residual, theorems.tolerance)
    checks.residual('tangency/equation', theorems.equation_residual, theorems.tolerance)

    report = {
        'tangency_order': order.tangency_order,
        'standard': order.standard_flag,
        's_coefficients': order.s_coefficients,
        'depth': theorems.depth,
        'path_order': theorems.path_order,
        'radius': curve.radius,
    }

    try:
        lax = lax_tangency_check(n0, w)
    except PreconditionViolated as e:
        log.info('Skipping the Lax flow check: %s', e)
        checks.skip('lax/pairing', 'lax/drift', 'lax/oracle')
    else:
        checks.residual('lax/pairing', lax.pairing_residual, lax.tolerance)
        checks.residual('lax/drift', lax.drift, SETTINGS.get('tangency/drift_tolerance'))
        checks.residual('lax/oracle', lax.oracle_residual, SETTINGS.get('tangency/drift_tolerance'))
        report['lax'] = {'drift': lax.drift, 'time': lax.time, 'pairings': lax.pairings}
    return report


def _sweep_lambda(h0: np.ndarray, v: np.ndarray) -> float:
    """Midpoint of the two middle values of the joint spectrum of H0 and H0 + V."""
    values = np.sort(np.concatenate([scipy.linalg.eigvalsh(h0), scipy.linalg.eigvalsh(h0 + v)]))
    middle = len(values) // 2
    return float(0.5 * (values[middle - 1] + values[middle]))


class SweepKind(enum.StrEnum):
    GENERIC = 'generic'
    BRANCHING = 'branching'
    COMPLEX_COUPLING = 'complex-coupling'
    THIRD_ORDER = 'third-order'


@dataclass(frozen=True, eq=False)
class SweepPoint:
    kind: SweepKind
    h0: np.ndarray
    v: np.ndarray
    z0: complex
    s0: complex
    expected_order: int

    @property
    def n0(self) -> np.ndarray:
        return self.h0 + self.s0 * self.v


def _separated(values: np.ndarray, index: int) -> bool:
    others = np.delete(values, index)
    return len(others) == 0 or float(np.min(np.abs(others - values[index]))) >= SEPARATION.value


def _plant(kind: SweepKind, h0: np.ndarray, v: np.ndarray, rng: np.random.Generator) -> SweepPoint | None:
    values, vectors = scipy.linalg.eigh(h0)
    match kind:
        case SweepKind.GENERIC:
            if not _separated(values, 0):
                return None
            return SweepPoint(kind, h0, v, complex(values[0]), 0j, 1)

        case SweepKind.BRANCHING:
            if not _separated(values, 0):
                return None
            u = vectors[:, 0]
            v = v - np.vdot(u, v @ u).real * np.outer(u, u.conj())
            return SweepPoint(kind, h0, v, complex(values[0]), 0j, 2)

        case SweepKind.COMPLEX_COUPLING:
            s0 = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.1, 0.5))
            eigenvalues = scipy.linalg.eigvals(h0 + s0 * v)
            i = int(np.argmin(eigenvalues.real))
            if not _separated(eigenvalues, i):
                return None
            return SweepPoint(kind, h0, v, complex(eigenvalues[i]), s0, 1)

        case SweepKind.THIRD_ORDER:
            j = len(values) // 2
            if not _separated(values, j):
                return None
            # in the eigenbasis z(s) = λ_j + s·b_jj + s²·Σ|b_kj|²/d_k + s³·Σ b_jk b_kl b_lj/(d_k d_l) + …
            b = vectors.conj().T @ v @ vectors
            b[j, j] = 0.0
            d = values[j] - values
            weights = np.abs(b[:, j]) ** 2
            below = float(np.sum(weights[:j] / d[:j]))
            above = -float(np.sum(weights[j + 1:] / d[j + 1:]))
            if below <= 0.0 or above <= 0.0:
                return None
            factor = math.sqrt(above / below)
            b[:j, j] *= factor
            b[j, :j] *= factor

            scaled = np.delete(b[:, j], j) / np.delete(d, j)
            third = complex(scaled.conj() @ np.delete(np.delete(b, j, axis=0), j, axis=1) @ scaled)
            if abs(third) < THIRD_ORDER_FLOOR.value * norm(b) ** 3 / max(norm(h0), 1.0) ** 2:
                return None
            return SweepPoint(kind, h0, vectors @ b @ vectors.conj().T, complex(values[j]), 0j, 3)


def sweep_point(seed: int, n: int) -> SweepPoint:
    """The pair generated for `seed` and the point (z0, s0) the sweep examines on it.

    With planting on, seeds rotate through the kinds: the lowest eigenvalue of H0, the same
    eigenvalue after V loses its diagonal coupling to it (order 2), the leftmost eigenvalue of
    H0 + s0V at a complex s0, and a middle eigenvalue whose first two derivatives along V cancel
    (order 3). Draws are repeated until the eigenvalue is well separated from the rest.
    """
    kinds = list(SweepKind) if PLANTED.value else [SweepKind.GENERIC]
    kind = kinds[seed % len(kinds)]
    if kind == SweepKind.THIRD_ORDER and n < 3:
        kind = SweepKind.BRANCHING
    if kind == SweepKind.BRANCHING and n < 2:
        kind = SweepKind.GENERIC

    rng = np.random.default_rng(seed)
    for _attempt in range(PLANT_ATTEMPTS.value):
        instance = generate_instance(n, int(rng.integers(2**32)), InstanceKind.HERMITIAN_PAIR)
        point = _plant(kind, instance.h0.entries, instance.v.entries, rng)
        if point is not None:
            return point
    raise PreconditionViolated(f'No separated {kind} point for seed {seed} in dimension {n}')


_SWEEP_PROPERTIES = ('laurent', 'order', 'theorem', 'triple', 'flow', 'tangency')


@dataclass
class SweepResult:
    seed: int
    kind: SweepKind = SweepKind.GENERIC
    s0: complex = 0j
    properties: dict[str, bool] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)
    flow: FlowReport | None = None

    def to_dict(self) -> dict:
        doc = {'seed': self.seed, 'kind': str(self.kind), 's0': self.s0, **self.properties, 'errors': dict(self.errors)}
        if self.flow is not None:
            doc['flow_values'] = _flow_to_dict(self.flow)
        return doc


def sweep_instance(seed: int, n: int) -> SweepResult:
    """Every property of the sweep on one generated instance, each recorded as passed or failed."""
    result = SweepResult(seed)
    try:
        point = sweep_point(seed, n)
    except ResonanceError as e:
        log.warning('Seed %d: %s', seed, e)
        for name in _SWEEP_PROPERTIES:
            result.properties[name] = False
            result.errors[name] = str(e)
        return result

    result.kind = point.kind
    result.s0 = point.s0
    h0, v, z0, s0 = point.h0, point.v, point.z0, point.s0
    n0 = point.n0

    def laurent() -> bool:
        series = laurent_coefficients(z0, n0, v)
        return verify_laurent_identities(series, v).passed

    def order() -> bool:
        return laurent_coefficients(z0, n0, v).pole_order == point.expected_order

    def theorem() -> bool:
        return branching_report(z0, s0, h0, v).agree

    def triple() -> bool:
        # only instances whose generating eigenvectors span the eigenspace count
        if not assumption_check(z0, n0, v).passed:
            return True
        series = laurent_coefficients(z0, n0, v)
        ops = resonance_operators(series, v)
        jordan = jordan_structure(ops, upsilon_filtration(z0, n0, v))
        paths = trace_eigenpaths(z0, n0, v)
        conjugates = conjugate_paths(paths)
        orders = [path_order(p, c) for p, c in zip(paths, conjugates)]
        depths_match = all(depth(p.phi_taylor[0], ops) == k - 1 for p, k in zip(paths, orders))
        return monodromy_cycles(z0, h0, v, s0=s0).matches(jordan.block_sizes, orders) and depths_match

    def flow() -> bool:
        result.flow = ssf_report(_sweep_lambda(h0, v), h0, v)
        return result.flow.agree

    def tangency() -> bool:
        return verify_tangency_theorems(z0, n0, v).orders_agree

    for name, check in zip(_SWEEP_PROPERTIES, (laurent, order, theorem, triple, flow, tangency)):
        try:
            result.properties[name] = bool(check())
        except ResonanceError as e:
            log.warning('Seed %d (%s), %s: %s', seed, point.kind, name, e)
            result.properties[name] = False
            result.errors[name] = str(e)
    return result


def _run_sweep(scenario: Scenario, checks: CheckList) -> dict:
    count = scenario.count or SWEEP_COUNT.value
    n = scenario.n or DIMENSION.value
    seeds = [scenario.seed + k for k in range(count)]

    results = TaskPool().map('sweep', lambda seed: sweep_instance(seed, n), seeds)
    for name in _SWEEP_PROPERTIES:
        failed = [r.seed for r in results if not r.properties[name]]
        checks.flag(f'sweep/{name}', not failed, len(failed))

    if scenario.csv_path is not None:
        write_flow_csv([r.flow for r in results if r.flow is not None], scenario.csv_path)
    return {
        'dimension': n,
        'seeds': seeds,
        'instances': [r.to_dict() for r in results],
        'kinds': {str(kind): sum(1 for r in results if r.kind == kind) for kind in SweepKind},
        'passed_counts': {
            name: sum(1 for r in results if r.properties[name])
            for name in _SWEEP_PROPERTIES
        },
    }


def _run_gen(scenario: Scenario) -> int:
    n = scenario.n or DIMENSION.value
    instance = generate_instance(n, scenario.seed, scenario.kind)
    save_instance(instance, scenario.output_path)
    if scenario.output_path is not None:
        log.info('Wrote %s instance of dimension %d to %s', scenario.kind, n, scenario.output_path)
    return EXIT_OK


_PIPELINES = {
    ScenarioCommand.ANALYZE: _run_analyze,
    ScenarioCommand.VERIFY: _run_verify,
    ScenarioCommand.FLOW: _run_flow,
    ScenarioCommand.TANGENCY: _run_tangency,
    ScenarioCommand.SWEEP: _run_sweep,
}


def _error_report(scenario: Scenario, error: Exception) -> dict:
    return {
        'command': str(scenario.command),
        'error': {'type': type(error).__name__, 'message': str(error)},
    }


def run_scenario(scenario: Scenario) -> int:
    """Runs the command's pipeline, writes its report and returns the exit status."""
    if scenario.command == ScenarioCommand.GEN:
        return _run_gen(scenario)

    checks = CheckList()
    try:
        pipeline = _PIPELINES[scenario.command]
        report = pipeline(scenario, checks)
    except (PreconditionViolated, FormatError, RlSettingError) as e:
        log.error('%s: %s', scenario.command, e)
        if scenario.output_path is not None:
            write_report(_error_report(scenario, e), scenario.output_path)
        return EXIT_PRECONDITION
    except AssertionFailed as e:
        log.error('%s: %s', scenario.command, e)
        if scenario.output_path is not None:
            write_report({**_error_report(scenario, e), **checks.to_dict()}, scenario.output_path)
        return EXIT_ASSERTION

    write_report({'command': str(scenario.command), **report, **checks.to_dict()}, scenario.output_path)
    for name in checks.failures:
        log.error('Check failed: %s (residual %.3e)', name, checks.residuals[name])
    return EXIT_ASSERTION if checks.failures else EXIT_OK
