import pyparsing as pp
import pyparsing.exceptions

from resonance_lab.errors import ValueFormatError


L = pp.Literal

decimal = pp.Regex(
    r'[+-]?(([0-9]+(\.[0-9]*)?)|(\.[0-9]+))([eE][+-]?[0-9]+)?'
).set_parse_action(lambda result: float(result[0]))

separator = pp.Suppress(L(','))

complex_value = (
    decimal('re') + pp.Optional(separator + decimal('im'))
)

interval_value = decimal('a') + separator + decimal('b')


def _parse(grammar: pp.ParserElement, text: str) -> pp.ParseResults:
    try:
        return grammar.parse_string(text.strip(), parse_all=True)
    except pyparsing.exceptions.ParseException as e:
        raise ValueFormatError(text, 'column %d: %s' % (e.column, e.msg))


def parse_complex(text: str) -> complex:
    """`RE,IM` or a bare real number."""
    result = _parse(complex_value, text)
    return complex(result['re'], result.get('im', 0.0))


def parse_interval(text: str) -> tuple[float, float]:
    result = _parse(interval_value, text)
    a, b = result['a'], result['b']
    if not a < b:
        raise ValueFormatError(text, 'interval start must be below its end')
    return a, b


def parse_real(text: str) -> float:
    return _parse(decimal, text)[0]
