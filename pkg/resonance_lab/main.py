import argparse
import logging
import sys
from collections.abc import Callable, Sequence

from resonance_lab.errors import PreconditionViolated, ValueFormatError
from resonance_lab.formats.instance import InstanceKind
from resonance_lab.formats.values import parse_complex, parse_interval, parse_real
from resonance_lab.scenarios import EXIT_PRECONDITION, Scenario, ScenarioCommand, run_scenario
from resonance_lab.settings import SETTINGS, RlSettingError


log = logging.getLogger(__name__)


def _value_type[T](parse: Callable[[str], T]) -> Callable[[str], T]:
    def convert(text: str) -> T:
        try:
            return parse(text)
        except ValueFormatError as e:
            raise argparse.ArgumentTypeError(str(e))
    convert.__name__ = parse.__name__.removeprefix('parse_')
    return convert


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='resonance-lab',
        description='Coupling resonance structure of finite-dimensional operator pairs',
    )
    parser.add_argument('command', type=ScenarioCommand, choices=list(ScenarioCommand))
    parser.add_argument('--instance', metavar='PATH', help='instance JSON file')
    parser.add_argument('--z0', metavar='RE,IM', type=_value_type(parse_complex))
    parser.add_argument('--s0', metavar='RE,IM', type=_value_type(parse_complex), default=0j,
                        help='base coupling, N0 = H0 + s0 V')
    parser.add_argument('--lambda', dest='lam', metavar='X', type=_value_type(parse_real))
    parser.add_argument('--interval', metavar='A,B', type=_value_type(parse_interval), default=(0.0, 1.0))
    parser.add_argument('--radius', metavar='R', type=_value_type(parse_real))
    parser.add_argument('--nodes', metavar='N', type=int)
    parser.add_argument('--tol', metavar='T', type=_value_type(parse_real))
    parser.add_argument('--seed', metavar='S', type=int, default=0)
    parser.add_argument('--out', metavar='PATH', help='report file, stdout when omitted')
    parser.add_argument('--csv', metavar='PATH', help='trajectory, curve or flow values as CSV')
    parser.add_argument('-n', '--dimension', dest='n', metavar='N', type=int)
    parser.add_argument('--kind', type=InstanceKind, choices=list(InstanceKind),
                        default=InstanceKind.HERMITIAN_PAIR)
    parser.add_argument('--count', metavar='K', type=int, help='sweep instances or flow grid size')
    parser.add_argument('-v', '--verbose', action='store_true')
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )

    try:
        SETTINGS.apply_environment()
        scenario = Scenario(
            command=args.command,
            instance_path=args.instance,
            z0=args.z0,
            s0=args.s0,
            lam=args.lam,
            interval=args.interval,
            radius=args.radius,
            nodes=args.nodes,
            tol=args.tol,
            seed=args.seed,
            output_path=args.out,
            csv_path=args.csv,
            n=args.n,
            kind=args.kind,
            count=args.count,
        )
    except (RlSettingError, PreconditionViolated) as e:
        log.error('%s', e)
        return EXIT_PRECONDITION

    return run_scenario(scenario)


if __name__ == '__main__':
    sys.exit(main())
