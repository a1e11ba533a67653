from collections.abc import Sequence


class ResonanceError(Exception):
    pass


class PreconditionViolated(ResonanceError):
    pass


class AssertionFailed(ResonanceError):
    pass


class FormatError(ResonanceError):
    pass


class InstanceFormatError(FormatError):
    def __init__(self, location: str | None, message: str):
        super().__init__('Error at %s: %s' % (location or '<instance>', message))
        self.location: str | None = location


class ValueFormatError(FormatError):
    def __init__(self, text: str, message: str):
        super().__init__(f'Invalid value {text!r}: {message}')
        self.text: str = text


class SingularShift(PreconditionViolated):
    def __init__(self, z: complex, smallest_singular_value: float):
        super().__init__(
            f'Shift {z} lies in the spectrum '
            f'(smallest singular value {smallest_singular_value:.3e})'
        )
        self.z: complex = z
        self.smallest_singular_value: float = smallest_singular_value


class NotAnEigenvalue(PreconditionViolated):
    def __init__(self, z0: complex, smallest_singular_value: float):
        super().__init__(
            f'{z0} is not an eigenvalue '
            f'(smallest singular value {smallest_singular_value:.3e})'
        )
        self.z0: complex = z0
        self.smallest_singular_value: float = smallest_singular_value


class AmbiguousClustering(PreconditionViolated):
    def __init__(self, first: complex, second: complex, tolerance: float):
        super().__init__(
            f'Eigenvalue clusters {first} and {second} are closer than '
            f'twice the cluster tolerance {tolerance}'
        )
        self.first: complex = first
        self.second: complex = second
        self.tolerance: float = tolerance


class ZeroDirection(PreconditionViolated):
    def __init__(self):
        super().__init__('Perturbation direction is zero')


class ContourTooLarge(PreconditionViolated):
    def __init__(self, radius: float, nearest: complex):
        super().__init__(
            f'Contour radius {radius} encloses another resonance point {nearest}'
        )
        self.radius: float = radius
        self.nearest: complex = nearest


class ContourHitsSpectrum(PreconditionViolated):
    def __init__(self, radius: float, eigenvalue: complex):
        super().__init__(
            f'Contour of radius {radius} does not separate eigenvalue {eigenvalue}'
        )
        self.radius: float = radius
        self.eigenvalue: complex = eigenvalue


class ProbeAtResonance(PreconditionViolated):
    def __init__(self, v: complex):
        super().__init__(f'Probe {v} is a resonance point')
        self.v: complex = v


class NotResonanceVector(PreconditionViolated):
    def __init__(self, residual: float):
        super().__init__(f'Vector is not in the resonance space (residual {residual:.3e})')
        self.residual: float = residual


class NotSimple(PreconditionViolated):
    def __init__(self, z0: complex, multiplicity: int):
        super().__init__(f'Eigenvalue {z0} has multiplicity {multiplicity}')
        self.z0: complex = z0
        self.multiplicity: int = multiplicity


class GroupNotIsolated(PreconditionViolated):
    def __init__(self, z0: complex, v: complex):
        super().__init__(f'Eigenvalue group of {z0} is not isolated at v={v}')
        self.z0: complex = z0
        self.v: complex = v


class BranchingDetected(PreconditionViolated):
    def __init__(self, permutation: Sequence[int]):
        super().__init__(
            f'Eigenvalue branches do not return after one loop: {list(permutation)}'
        )
        self.permutation: list[int] = list(permutation)


class AssumptionViolated(PreconditionViolated):
    def __init__(self, condition: float):
        super().__init__(
            f'Generating eigenvectors do not pair with conjugates (condition {condition:.3e})'
        )
        self.condition: float = condition


class ResonantDirection(PreconditionViolated):
    def __init__(self, z0: complex):
        super().__init__(f'Direction keeps {z0} in the spectrum along the whole line')
        self.z0: complex = z0


class EndpointResonance(PreconditionViolated):
    def __init__(self, s: complex):
        super().__init__(f'Interval endpoint is a resonance point: {s}')
        self.s: complex = s


class CrossingAtEndpoint(PreconditionViolated):
    def __init__(self, r: float):
        super().__init__(f'Eigenvalue crosses at the interval endpoint r={r}')
        self.r: float = r


class BirmanSchwingerSetting(PreconditionViolated):
    def __init__(self, message: str):
        super().__init__(f'Birman-Schwinger setting violated: {message}')


class QuadratureDivergence(AssertionFailed):
    def __init__(self, nodes: int, change: float):
        super().__init__(f'Quadrature did not settle at {nodes} nodes (change {change:.3e})')
        self.nodes: int = nodes
        self.change: float = change


class ThresholdAmbiguous(AssertionFailed):
    def __init__(self, norms: Sequence[float], threshold: float):
        super().__init__(
            f'Coefficient norms {list(norms)} are within a factor 10 of the cut {threshold:.3e}'
        )
        self.norms: list[float] = list(norms)
        self.threshold: float = threshold


class RankDecisionAmbiguous(AssertionFailed):
    def __init__(self, singular_values: Sequence[float], cut: float):
        super().__init__(
            f'Singular values {list(singular_values)} have no gap around {cut:.3e}'
        )
        self.singular_values: list[float] = list(singular_values)
        self.cut: float = cut


class PoleOrderMismatch(AssertionFailed):
    def __init__(self, resolvent_order: int, product_order: int):
        super().__init__(
            f'Pole order of R(v) is {resolvent_order} but of R(v)W is {product_order}'
        )
        self.resolvent_order: int = resolvent_order
        self.product_order: int = product_order


class FiltrationProbeMismatch(AssertionFailed):
    def __init__(self, k: int, angle: float):
        super().__init__(f'Resonance space of order {k} depends on the probe (angle {angle:.3e})')
        self.k: int = k
        self.angle: float = angle


class MatchingAmbiguity(AssertionFailed):
    def __init__(self, v: complex, distance: float):
        super().__init__(f'Eigenvalue branches cannot be matched at v={v} (gap {distance:.3e})')
        self.v: complex = v
        self.distance: float = distance


class TrackingCollision(AssertionFailed):
    def __init__(self, z: complex, distance: float):
        super().__init__(f'Resonance points collide at z={z} (gap {distance:.3e})')
        self.z: complex = z
        self.distance: float = distance


class CriteriaDisagree(AssertionFailed):
    def __init__(self, orders: dict[str, int]):
        super().__init__(f'Order criteria disagree: {orders}')
        self.orders: dict[str, int] = orders


class ExtrapolationUnstable(AssertionFailed):
    def __init__(self, difference: float):
        super().__init__(f'Cycle projection extrapolation is unstable (difference {difference:.3e})')
        self.difference: float = difference


class SingularBeta(AssertionFailed):
    def __init__(self, tau: int, condition: float):
        super().__init__(f'Pairing block {tau} is singular (condition {condition:.3e})')
        self.tau: int = tau
        self.condition: float = condition


class NotConverged(AssertionFailed):
    def __init__(self, history: Sequence[tuple[int, int]]):
        super().__init__(f'Half-plane counts did not settle: {list(history)}')
        self.history: list[tuple[int, int]] = list(history)


class NewtonDiverged(AssertionFailed):
    def __init__(self, v: complex, residual: float):
        super().__init__(f'Newton iteration diverged at v={v} (residual {residual:.3e})')
        self.v: complex = v
        self.residual: float = residual


class MultiplicityCollision(AssertionFailed):
    def __init__(self, v: complex, distance: float):
        super().__init__(f'Second eigenvalue entered the Newton basin at v={v} (gap {distance:.3e})')
        self.v: complex = v
        self.distance: float = distance


class FlowIntegrationFailed(AssertionFailed):
    def __init__(self, time: float, message: str):
        super().__init__(f'Lax flow integration stopped before t={time}: {message}')
        self.time: float = time
