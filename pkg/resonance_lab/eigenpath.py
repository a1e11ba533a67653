"""Analytic eigenpaths of N0 + vW through z0, their conjugates, orders and monodromy."""
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from resonance_lab.errors import (
    AssumptionViolated, BranchingDetected, CriteriaDisagree, GroupNotIsolated,
    MatchingAmbiguity, NotAnEigenvalue, NotSimple, TrackingCollision,
)
from resonance_lab.laurent import (
    ResonanceOperators, default_radius, laurent_coefficients, resonance_operators,
)
from resonance_lab.operator_space import (
    MatrixOperator, as_array, is_eigenvalue, resonance_points_at, shift_singular_value,
    spectral_data,
)
from resonance_lab.resonance_structure import depth, semisimplicity_check
from resonance_lab.settings import SETTINGS, RlFloatSetting, RlIntegerSetting
from resonance_lab.utils import (
    circle_nodes, cluster_values, identity, match_values, min_pairwise_distance,
    negative_coefficient_residual, norm, null_space, numerical_rank, permutation_cycles,
    taylor_coefficients,
)


log = logging.getLogger(__name__)

with SETTINGS.section('eigenpath') as S:
    NODES = S.register('nodes', RlIntegerSetting, default=64, minimum=16)
    DERIVATIVES = S.register(
        'derivatives', RlIntegerSetting, default=0, minimum=0,
        description='Taylor coefficients kept per path; 0 means rank(W) + 2',
    )
    RADIUS_FRACTION = S.register(
        'radius_fraction', RlFloatSetting, default=0.25, positive=True, maximum=1.0,
        description='Default radius as a fraction of the spectral gap around z0, over ‖W‖',
    )
    GROUP_TOLERANCE = S.register('group_tolerance', RlFloatSetting, default=1e-3, positive=True)
    MAX_REFINEMENT = S.register(
        'max_refinement', RlIntegerSetting, default=10, minimum=0,
        description='Number of step halvings before tracking gives up',
    )
    SEPARATION_FACTOR = S.register('separation_factor', RlFloatSetting, default=3.0, positive=True)
    ORDER_TOLERANCE = S.register('order_tolerance', RlFloatSetting, default=1e-6, positive=True)
    CHAIN_TOLERANCE = S.register('chain_tolerance', RlFloatSetting, default=1e-6, positive=True)
    GRAM_CONDITION = S.register('gram_condition', RlFloatSetting, default=1e8, positive=True)
    PAIRING_TOLERANCE = S.register('pairing_tolerance', RlFloatSetting, default=1e-8, positive=True)
    ANALYTICITY_TOLERANCE = S.register('analyticity_tolerance', RlFloatSetting, default=1e-6, positive=True)
    LOOP_FRACTION = S.register(
        'loop_fraction', RlFloatSetting, default=0.05, positive=True, maximum=0.5,
        description='Default monodromy loop radius as a fraction of the spectral gap around z0',
    )
    LOOP_STEPS = S.register('loop_steps', RlIntegerSetting, default=64, minimum=8)


@dataclass(frozen=True, eq=False)
class Eigenpath:
    branch_id: int
    z0: complex
    n0: np.ndarray
    w: np.ndarray
    radius: float
    nodes: np.ndarray
    z_samples: np.ndarray
    phi_samples: np.ndarray
    z_taylor: np.ndarray
    phi_taylor: np.ndarray
    multiplicity: int
    gauge: str
    gram_condition: float
    analyticity_residual: float
    eigen_residual: float
    cluster: int
    column: int
    cluster_left: np.ndarray = field(repr=False)

    @property
    def z_derivatives(self) -> np.ndarray:
        return np.array([math.factorial(j) * c for j, c in enumerate(self.z_taylor)])

    @property
    def phi_derivatives(self) -> np.ndarray:
        return np.array([math.factorial(j) * c for j, c in enumerate(self.phi_taylor)])

    @property
    def samples(self) -> list[tuple[complex, complex, np.ndarray]]:
        """(v, z(v), φ(v)) at v = 0 followed by the circle nodes."""
        return [(0j, complex(self.z_taylor[0]), self.phi_taylor[0])] + [
            (complex(v), complex(z), phi)
            for v, z, phi in zip(self.nodes, self.z_samples, self.phi_samples)
        ]


@dataclass(frozen=True, eq=False)
class ConjugatePath:
    branch_id: int
    nodes: np.ndarray
    z_samples: np.ndarray
    phi_star_samples: np.ndarray
    psi_taylor: np.ndarray
    pairing_residual: float
    cross_pairing: float
    antiholomorphy_residual: float

    @property
    def phi_star_taylor(self) -> np.ndarray:
        """Coefficients of φ*(v) as a power series in v̄."""
        return self.psi_taylor.conj()

    @property
    def phi_star_derivatives(self) -> np.ndarray:
        return np.array([math.factorial(j) * c for j, c in enumerate(self.phi_star_taylor)])


@dataclass(frozen=True, eq=False)
class CycleDecomposition:
    cycles: list[list[int]]
    monodromy_permutation: list[int]
    points: np.ndarray
    tracks: np.ndarray
    loop_nodes: np.ndarray

    @property
    def periods(self) -> list[int]:
        return [len(c) for c in self.cycles]

    @property
    def trivial(self) -> bool:
        return all(p == 1 for p in self.periods)

    def matches(self, block_sizes: list[int], orders: list[int]) -> bool:
        """Cycle periods, Jordan block sizes and path orders agree as multisets."""
        return sorted(self.periods) == sorted(block_sizes) == sorted(orders)


def _advance(
    sample: Callable[[float], np.ndarray],
    theta_from: float,
    theta_to: float,
    previous: np.ndarray,
    level: int,
    error: Callable[[float, float], Exception],
) -> np.ndarray:
    current = sample(theta_to)
    if len(current) == len(previous):
        current = current[match_values(previous, current)]
        movement = float(np.max(np.abs(current - previous))) if len(current) else 0.0
        if min_pairwise_distance(current) > SEPARATION_FACTOR.value * movement:
            return current

    if level >= MAX_REFINEMENT.value:
        raise error(theta_to, min_pairwise_distance(current))

    middle = 0.5 * (theta_from + theta_to)
    halfway = _advance(sample, theta_from, middle, previous, level + 1, error)
    log.debug('Refined tracking step at angle %.6f (level %d)', middle, level + 1)
    return _advance(sample, middle, theta_to, halfway, level + 1, error)


def _track_loop(
    sample: Callable[[float], np.ndarray],
    steps: int,
    error: Callable[[float, float], Exception],
) -> tuple[np.ndarray, list[int]]:
    """Values continued once around the loop and the permutation they close up with.

    Row k of the track holds the values at angle 2πk/steps in the order of
    row 0; the permutation maps each start index to the index it ends on.
    """
    start = sample(0.0)
    track = [start]
    current = start
    for k in range(1, steps + 1):
        current = _advance(sample, 2 * math.pi * (k - 1) / steps, 2 * math.pi * k / steps, current, 0, error)
        track.append(current)

    closing = match_values(current, start)
    return np.array(track[:-1]), [int(i) for i in closing]


def _spectral_gap(eigenvalues: np.ndarray, z0: complex, scale: float) -> tuple[int, float]:
    distances = np.abs(eigenvalues - z0)
    group = distances <= GROUP_TOLERANCE.value * scale
    others = distances[~group]
    return int(np.sum(group)), (float(np.min(others)) if len(others) else math.inf)


def _group_at(z0: complex, n0: np.ndarray, w: np.ndarray, v: complex, p: int) -> np.ndarray:
    values = scipy.linalg.eigvals(n0 + v * w)
    order = np.argsort(np.abs(values - z0))
    inside = np.abs(values[order[:p]] - z0)
    if p < len(values) and np.abs(values[order[p]] - z0) <= 2 * np.max(inside):
        raise GroupNotIsolated(z0, v)
    return values[order[:p]]


def _cluster_centers(values: np.ndarray, tolerance: float) -> tuple[np.ndarray, list[int]]:
    groups = cluster_values(values, tolerance)
    return np.array([np.mean(values[g]) for g in groups]), [len(g) for g in groups]


def _gauge(basis: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """basis·(reference^H basis)⁻¹, the representative normalized against `reference`."""
    return basis @ np.linalg.solve(reference.conj().T @ basis, identity(basis.shape[1]))


def _unit_columns(a: np.ndarray) -> np.ndarray:
    return a / np.maximum(np.linalg.norm(a, axis=0), np.finfo(float).tiny)


def _gram_condition(left: np.ndarray, right: np.ndarray) -> float:
    gram = _unit_columns(left).T @ _unit_columns(right)
    values = scipy.linalg.svdvals(gram)
    if values[-1] == 0.0:
        return math.inf
    return float(max(values[0], 1.0) / values[-1])


def trace_eigenpaths(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    radius: float | None = None,
    nodes: int | None = None,
) -> list[Eigenpath]:
    """Eigenvalues of N0 + vW near z0 continued around |v| = radius with their eigenvectors.

    Paths are gauge-fixed by ⟨φ*(0), φ(v)⟩ = 1 when the generating
    eigenvectors pair with their conjugates, otherwise by pinning the
    largest components of φ(0) to one.
    """
    n0 = as_array(n0)
    w = as_array(w)
    n = n0.shape[0]
    scale = max(norm(n0), 1.0)
    if not is_eigenvalue(n0, z0):
        raise NotAnEigenvalue(z0, shift_singular_value(n0, z0)[0])

    p, gap = _spectral_gap(scipy.linalg.eigvals(n0), z0, scale)
    if radius is None:
        radius = RADIUS_FRACTION.value * min(gap, scale) / norm(w)
    if nodes is None:
        nodes = NODES.value
    count = DERIVATIVES.value or numerical_rank(w) + 2

    coincide = SETTINGS.get('general/cluster_tolerance') * scale

    def centers_at(theta: float) -> np.ndarray:
        values = _group_at(z0, n0, w, radius * np.exp(1j * theta), p)
        return _cluster_centers(values, coincide)[0]

    def mismatch(theta: float, distance: float) -> Exception:
        return MatchingAmbiguity(complex(radius * np.exp(1j * theta)), distance)

    track, closing = _track_loop(centers_at, nodes, mismatch)
    if closing != list(range(len(closing))):
        raise BranchingDetected(closing)

    points = circle_nodes(radius, nodes)
    cluster_count = track.shape[1]
    z_samples = track.T
    right: list[list[np.ndarray]] = [[] for _ in range(cluster_count)]
    left: list[list[np.ndarray]] = [[] for _ in range(cluster_count)]
    sizes = [0] * cluster_count
    for k, v in enumerate(points):
        values = _group_at(z0, n0, w, v, p)
        centers, counts = _cluster_centers(values, coincide)
        order = match_values(track[k], centers)
        for c in range(cluster_count):
            if sizes[c] and sizes[c] != counts[order[c]]:
                raise MatchingAmbiguity(complex(v), abs(centers[order[c]] - track[k][c]))
            sizes[c] = counts[order[c]]
            shifted = n0 + v * w - track[k][c] * identity(n)
            right[c].append(null_space(shifted, scale))
            left[c].append(null_space(shifted.T, scale))

    for c in range(cluster_count):
        dims = {u.shape[1] for u in right[c]} | {u.shape[1] for u in left[c]}
        if len(dims) != 1 or 0 in dims:
            raise MatchingAmbiguity(complex(points[0]), 0.0)

    # first pass: pin against the basis at the first node
    right_pinned = [np.array([_gauge(u, right[c][0]) for u in right[c]]) for c in range(cluster_count)]
    left_pinned = [np.array([_gauge(u, left[c][0]) for u in left[c]]) for c in range(cluster_count)]
    right_origin = np.hstack([np.mean(r, axis=0) for r in right_pinned])
    left_origin = np.hstack([np.mean(l, axis=0) for l in left_pinned])

    condition = _gram_condition(left_origin, right_origin)
    widths = [r.shape[2] for r in right_pinned]
    offsets = np.cumsum([0] + widths)
    if condition < GRAM_CONDITION.value:
        gauge = 'conjugate'
        gram = left_origin.T @ right_origin
        star = left_origin.conj() @ np.linalg.inv(gram).conj().T
        references = [star[:, offsets[c]:offsets[c + 1]] for c in range(cluster_count)]
    else:
        gauge = 'pinned'
        references = []
        for c in range(cluster_count):
            block = right_origin[:, offsets[c]:offsets[c + 1]]
            _q, _r, pivots = scipy.linalg.qr(block.T, pivoting=True)
            references.append(identity(n)[:, pivots[:widths[c]]])
        log.warning('Generating eigenvectors at %s do not pair (condition %.3e); pinning components', z0, condition)

    paths = []
    for c in range(cluster_count):
        phi = np.array([_gauge(u, references[c]) for u in right[c]])
        z_taylor = taylor_coefficients(z_samples[c], points, 0.0, count)
        analyticity = negative_coefficient_residual(z_samples[c], points, 0.0)
        for column in range(widths[c]):
            samples = phi[:, :, column]
            phi_taylor = taylor_coefficients(samples, points, 0.0, count)
            residual = max(
                norm((n0 + v * w - z * identity(n)) @ x) / (scale * norm(x))
                for v, z, x in zip(points, z_samples[c], samples)
            )
            residual = max(residual, norm((n0 - z_taylor[0] * identity(n)) @ phi_taylor[0]) / (scale * norm(phi_taylor[0])))
            paths.append(Eigenpath(
                branch_id=len(paths),
                z0=complex(z0),
                n0=n0,
                w=w,
                radius=float(radius),
                nodes=points,
                z_samples=z_samples[c],
                phi_samples=samples,
                z_taylor=z_taylor,
                phi_taylor=phi_taylor,
                multiplicity=sizes[c] // widths[c],
                gauge=gauge,
                gram_condition=condition,
                analyticity_residual=max(analyticity, negative_coefficient_residual(samples, points, 0.0)),
                eigen_residual=residual,
                cluster=c,
                column=column,
                cluster_left=left_pinned[c],
            ))

    for path in paths:
        if path.analyticity_residual > ANALYTICITY_TOLERANCE.value:
            log.warning('Path %d at %s fails the analyticity test (%.3e)', path.branch_id, z0, path.analyticity_residual)
    log.debug('Traced %d paths at %s, radius %.3e, gauge %s', len(paths), z0, radius, gauge)
    return paths


def conjugate_paths(paths: list[Eigenpath], tol: float | None = None) -> list[ConjugatePath]:
    """φ*(v) for every path, normalized so that ⟨φ*_μ(v), φ_τ(v)⟩ = δ_{μτ} within a cluster."""
    if tol is None:
        tol = PAIRING_TOLERANCE.value
    if not paths:
        return []

    right_origin = np.array([p.phi_taylor[0] for p in paths]).T
    left_origin = np.array([np.mean(p.cluster_left, axis=0)[:, p.column] for p in paths]).T
    condition = _gram_condition(left_origin, right_origin)
    if condition >= GRAM_CONDITION.value:
        raise AssumptionViolated(condition)

    nodes = paths[0].nodes
    psi_samples: dict[int, np.ndarray] = {}
    for cluster in sorted({p.cluster for p in paths}):
        members = sorted((p for p in paths if p.cluster == cluster), key=lambda p: p.column)
        right = np.stack([p.phi_samples for p in members], axis=2)
        left = members[0].cluster_left
        psi = np.array([
            l @ np.linalg.inv(r.T @ l)
            for r, l in zip(right, left)
        ])
        for p in members:
            psi_samples[p.branch_id] = psi[:, :, p.column]

    all_right = np.stack([p.phi_samples for p in paths], axis=2)
    all_psi = np.stack([psi_samples[p.branch_id] for p in paths], axis=2)
    pairings = np.einsum('kni,knj->kij', all_psi, all_right)
    deviation = np.abs(pairings - np.eye(len(paths)))
    off_diagonal = deviation * (1 - np.eye(len(paths)))

    conjugates = []
    for i, p in enumerate(paths):
        psi = psi_samples[p.branch_id]
        conjugates.append(ConjugatePath(
            branch_id=p.branch_id,
            nodes=nodes,
            z_samples=p.z_samples.conj(),
            phi_star_samples=psi.conj(),
            psi_taylor=taylor_coefficients(psi, nodes, 0.0, len(p.phi_taylor)),
            pairing_residual=float(max(np.max(deviation[:, i, :]), np.max(deviation[:, :, i]))),
            cross_pairing=float(max(np.max(off_diagonal[:, i, :]), np.max(off_diagonal[:, :, i]))),
            antiholomorphy_residual=negative_coefficient_residual(psi, nodes, 0.0),
        ))
        if conjugates[-1].pairing_residual > tol:
            log.warning('Conjugate of path %d pairs with residual %.3e', p.branch_id, conjugates[-1].pairing_residual)
    return conjugates


def _derivative_order(path: Eigenpath, tol: float) -> int:
    floor = max(tol * path.radius * norm(path.w), 1e3 * np.finfo(float).eps * max(abs(path.z0), 1.0))
    for j in range(1, len(path.z_taylor)):
        if abs(path.z_taylor[j]) * path.radius ** j > floor:
            return j
    return 0


def _orthogonality_order(coefficients: np.ndarray, w: np.ndarray, kernel: np.ndarray, radius: float, tol: float) -> int:
    """1 + the first j with Wc_j not orthogonal to `kernel`; 0 if there is none."""
    size = max(norm(c) * radius ** j for j, c in enumerate(coefficients)) * norm(w)
    for j, c in enumerate(coefficients[:-1]):
        if norm(kernel.conj().T @ (w @ c)) * radius ** j > tol * size:
            return j + 1
    return 0


def order_criteria(path: Eigenpath, conj: ConjugatePath, tol: float | None = None) -> dict[str, int]:
    """Path order from z⁽ʲ⁾(0), from Wφ⁽ʲ⁾(0) ⊥ ker(N0* − z̄0) and from Wφ*⁽ʲ⁾(0) ⊥ ker(N0 − z0)."""
    if tol is None:
        tol = ORDER_TOLERANCE.value
    n = path.n0.shape[0]
    scale = max(norm(path.n0), 1.0)
    shifted = path.n0 - path.z0 * identity(n)
    return {
        'derivative': _derivative_order(path, tol),
        'orthogonality': _orthogonality_order(
            path.phi_taylor, path.w, null_space(shifted.conj().T, scale), path.radius, tol),
        'conjugate': _orthogonality_order(
            conj.phi_star_taylor, path.w, null_space(shifted, scale), path.radius, tol),
    }


def path_order(path: Eigenpath, conj: ConjugatePath, tol: float | None = None) -> int:
    orders = order_criteria(path, conj, tol)
    if len(set(orders.values())) != 1:
        raise CriteriaDisagree(orders)
    k = orders['derivative']
    bound = numerical_rank(path.w)
    if k > bound:
        log.warning('Path %d has order %d above rank(W) = %d', path.branch_id, k, bound)
    return k


def chain_residuals(path: Eigenpath, ops: ResonanceOperators, order: int) -> dict[str, float]:
    """Largest relative ‖𝐀φ_j − φ_{j−1}‖ and ‖(N0 − z0)φ_j + Wφ_{j−1}‖ for 1 ≤ j < order.

    φ_j are Taylor coefficients, so the derivative form carries the factor j.
    """
    n = path.n0.shape[0]
    shifted = path.n0 - path.z0 * identity(n)
    nilpotent = 0.0
    equation = 0.0
    c = path.phi_taylor
    for j in range(1, min(order, len(c))):
        size = max(norm(c[j - 1]), norm(ops.A) * norm(c[j]), np.finfo(float).tiny)
        nilpotent = max(nilpotent, norm(ops.A @ c[j] - c[j - 1]) / size)
        size = max(norm(shifted) * norm(c[j]), norm(path.w) * norm(c[j - 1]), np.finfo(float).tiny)
        equation = max(equation, norm(shifted @ c[j] + path.w @ c[j - 1]) / size)
    return {'nilpotent_chain': nilpotent, 'equation_chain': equation}


@dataclass(frozen=True)
class BranchingReport:
    criteria: dict[str, bool]
    order: int
    derivative: complex
    pairing: complex
    derivative_formula_residual: float
    monodromy: CycleDecomposition | None = field(default=None, compare=False)

    @property
    def agree(self) -> bool:
        return len(set(self.criteria.values())) == 1

    @property
    def branching(self) -> bool:
        return self.criteria['order']


def branching_report(
    z0: complex,
    s0: complex,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    tol: float | None = None,
) -> BranchingReport:
    """The seven equivalent criteria for z0 being a branching point of the inverse function, evaluated separately."""
    if tol is None:
        tol = ORDER_TOLERANCE.value
    h0 = as_array(h0)
    v = as_array(v)
    n0 = h0 + s0 * v
    n = n0.shape[0]

    cluster = spectral_data(MatrixOperator.of(n0)).cluster_at(z0)
    if cluster is None:
        raise NotAnEigenvalue(z0, shift_singular_value(n0, z0)[0])
    if cluster.algebraic != 1 or cluster.geometric != 1:
        raise NotSimple(z0, max(cluster.algebraic, cluster.geometric))

    [path] = trace_eigenpaths(z0, n0, v)
    [conj] = conjugate_paths([path])
    series = laurent_coefficients(z0, n0, v)
    ops = resonance_operators(series, v)

    phi = path.phi_taylor[0]
    phi_prime = path.phi_taylor[1]
    phi_star = conj.phi_star_taylor[0]
    v_norm = norm(v)
    shifted = n0 - z0 * identity(n)

    order = path_order(path, conj, tol)
    pairing = complex(np.vdot(phi_star, v @ phi))
    derivative = complex(path.z_taylor[1])

    solution, _residues, _rank, _sv = scipy.linalg.lstsq(shifted, -(v @ phi), cond=1e-10)
    solvability = norm(shifted @ solution + v @ phi) / (v_norm * norm(phi))

    chain = norm(ops.A @ phi_prime - phi) / norm(phi)
    monodromy = monodromy_cycles(z0, h0, v, s0=s0)

    criteria = {
        'order': order >= 2,
        'pairing': abs(pairing) <= tol * v_norm,
        'derivative': abs(derivative) <= tol * v_norm,
        'solvable': solvability <= tol,
        'depth': depth(phi, ops) >= 1,
        'chain': chain <= CHAIN_TOLERANCE.value,
        'monodromy': not monodromy.trivial,
    }
    report = BranchingReport(
        criteria=criteria,
        order=order,
        derivative=derivative,
        pairing=pairing,
        derivative_formula_residual=abs(derivative - pairing) / v_norm,
        monodromy=monodromy,
    )
    if not report.agree:
        log.warning('Branching criteria at %s disagree: %s', z0, criteria)
    return report


def monodromy_cycles(
    z0: complex,
    h0: MatrixOperator | np.ndarray,
    v: MatrixOperator | np.ndarray,
    loop_radius: float | None = None,
    steps: int | None = None,
    s0: complex = 0.0,
    group_radius: float | None = None,
) -> CycleDecomposition:
    """Permutation of the resonance points near s0 after z runs once around |z − z0| = loop_radius."""
    h0_op = MatrixOperator.of(as_array(h0))
    v_op = MatrixOperator.of(as_array(v))
    n0 = h0_op.entries + s0 * v_op.entries
    scale = max(norm(n0), 1.0)

    if loop_radius is None:
        _p, gap = _spectral_gap(scipy.linalg.eigvals(n0), z0, scale)
        loop_radius = LOOP_FRACTION.value * min(gap, scale)
    if steps is None:
        steps = LOOP_STEPS.value
    if group_radius is None:
        group_radius = default_radius(z0, n0, v_op.entries)

    def points_at(theta: float) -> np.ndarray:
        z = z0 + loop_radius * np.exp(1j * theta)
        values = np.array([p.s for p in resonance_points_at(z, h0_op, v_op, merge=False)])
        return values[np.abs(values - s0) < group_radius] if len(values) else values

    def collision(theta: float, distance: float) -> Exception:
        return TrackingCollision(complex(z0 + loop_radius * np.exp(1j * theta)), distance)

    tracks, permutation = _track_loop(points_at, steps, collision)
    start = tracks[0]
    order = sorted(range(len(start)), key=lambda i: (abs(start[i] - s0), np.angle(start[i] - s0)))
    rank = {old: new for new, old in enumerate(order)}
    canonical = [0] * len(order)
    for old, target in enumerate(permutation):
        canonical[rank[old]] = rank[target]

    cycles = permutation_cycles(canonical)
    log.debug('Monodromy at %s around s0=%s: cycles %s', z0, s0, cycles)
    return CycleDecomposition(
        cycles=cycles,
        monodromy_permutation=canonical,
        points=start[order],
        tracks=tracks[:, order],
        loop_nodes=circle_nodes(loop_radius, steps, z0),
    )


@dataclass(frozen=True)
class AssumptionReport:
    no_branching: bool
    semisimple: bool
    gram_invertible: bool
    gram_condition: float
    diagnostics: list[str]

    @property
    def passed(self) -> bool:
        return self.no_branching and self.semisimple and self.gram_invertible


def assumption_check(
    z0: complex,
    n0: MatrixOperator | np.ndarray,
    w: MatrixOperator | np.ndarray,
    radius: float | None = None,
    tol: float | None = None,
) -> AssumptionReport:
    """Whether the generating eigenvectors at z0 span the eigenspace, clause by clause."""
    n0 = as_array(n0)
    w = as_array(w)
    diagnostics = []

    no_branching = True
    condition = math.inf
    try:
        paths = trace_eigenpaths(z0, n0, w, radius)
        condition = paths[0].gram_condition
    except BranchingDetected as e:
        no_branching = False
        diagnostics.append(str(e))

    semisimple = semisimplicity_check(z0, n0, tol=tol).semisimple
    if not semisimple:
        diagnostics.append(f'{z0} is not a semisimple eigenvalue of N0')

    gram_invertible = condition < GRAM_CONDITION.value
    if no_branching and not gram_invertible:
        diagnostics.append(f'Gram matrix of generating eigenvectors has condition {condition:.3e}')

    return AssumptionReport(no_branching, semisimple, gram_invertible, condition, diagnostics)
