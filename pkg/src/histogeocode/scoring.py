"""Metric vector computation and the customizable scoring expression.

Six per-candidate distances feed a user-supplied arithmetic expression;
lower scores are better (every metric is a distance).  The default
expression weights good string similarity heavily while keeping the other
dimensions in play:

    100*w_d + 0.1*t_d + 10*n_d + 0.1*s_p + 0.01*s_d + 0.001*g_d

Metrics:
  w_d  trigram string distance, [0, 1]
  t_d  temporal distance between fuzzy periods, year*degree
  b_d  building-number distance (n_d is an accepted alias)
  s_p  positional accuracy of the candidate, meters
  s_d  level-of-detail distance against the target scale range, meters
  g_d  planar distance to the query's location hint, meters

Optional inputs that are missing (no query date, no number on one side, no
hint) contribute 0 and are flagged, so expressions stay total and callers
can still tell what was actually compared.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import geometry as geom
from . import text as textmod
from .fuzzy_time import temporal_distance

if TYPE_CHECKING:  # pragma: no cover
    from .gazetteer import GazetteerRegistry, GeoHistoricalObject
    from .geocoder import GeocodeQuery

METRIC_NAMES = ("w_d", "t_d", "b_d", "s_p", "s_d", "g_d")
ALIASES = {"n_d": "b_d"}

DEFAULT_SCORING = "100*w_d+0.1*t_d+10*n_d+0.1*s_p + 0.01*s_d+0.001*g_d"
DEFAULT_SCALE_RANGE = (0.0, 200.0)


class ExpressionError(ValueError):
    """Parse-time failure; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvaluationError(ValueError):
    """Domain failure while evaluating (division by zero, ln of <= 0...)."""


@dataclass(frozen=True)
class MetricVector:
    w_d: float
    t_d: float
    b_d: float
    s_p: float
    s_d: float
    g_d: float
    t_d_available: bool = True
    number_compared: bool = True
    g_d_available: bool = True

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


# ----------------------------------------------------------------------
# expression language

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)(?P<exp>[eE][+-]?\d+)?|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),]))"
)

_FUNCTIONS = {
    "least": (2, min),
    "greatest": (2, max),
    "pow": (2, None),
    "abs": (1, abs),
    "sqrt": (1, None),
    "ln": (1, None),
    "exp": (1, None),
}


def _tokenize(source: str):
    pos = 0
    tokens = []
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            rest = source[pos:].strip()
            if not rest:
                break
            raise ExpressionError(f"unexpected character {rest[0]!r}", pos)
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num") + (m.group("exp") or "")), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.next()
        if kind != "op" or value != op:
            raise ExpressionError(f"expected {op!r}", pos)

    def parse(self):
        node = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExpressionError("trailing input", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                node = ("bin", value, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.next()
                node = ("bin", value, node, self.unary())
            else:
                return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.next()
            return ("neg", self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.next()
        if kind == "num":
            return ("num", value)
        if kind == "ident":
            nkind, nvalue, _ = self.peek()
            if nkind == "op" and nvalue == "(":
                if value not in _FUNCTIONS:
                    raise ExpressionError(f"unknown function {value!r}", pos)
                self.next()
                args = [self.expr()]
                while True:
                    k, v, _ = self.peek()
                    if k == "op" and v == ",":
                        self.next()
                        args.append(self.expr())
                    else:
                        break
                self.expect_op(")")
                arity = _FUNCTIONS[value][0]
                if len(args) != arity:
                    raise ExpressionError(
                        f"{value} takes {arity} argument(s), got {len(args)}", pos
                    )
                return ("call", value, tuple(args))
            name = ALIASES.get(value, value)
            if name not in METRIC_NAMES:
                raise ExpressionError(f"unknown identifier {value!r}", pos)
            return ("var", name)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError("expected a value", pos)


def _eval(node, env: dict[str, float]) -> float:
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return env[node[1]]
    if op == "neg":
        return -_eval(node[1], env)
    if op == "bin":
        left = _eval(node[2], env)
        right = _eval(node[3], env)
        sym = node[1]
        if sym == "+":
            return left + right
        if sym == "-":
            return left - right
        if sym == "*":
            return left * right
        if right == 0.0:
            raise EvaluationError("division by zero")
        return left / right
    name, args = node[1], [_eval(a, env) for a in node[2]]
    if name == "least":
        return min(args)
    if name == "greatest":
        return max(args)
    if name == "abs":
        return abs(args[0])
    if name == "sqrt":
        if args[0] < 0:
            raise EvaluationError(f"sqrt of negative value {args[0]}")
        return math.sqrt(args[0])
    if name == "ln":
        if args[0] <= 0:
            raise EvaluationError(f"ln of nonpositive value {args[0]}")
        return math.log(args[0])
    if name == "exp":
        try:
            return math.exp(args[0])
        except OverflowError:
            raise EvaluationError("exp overflow") from None
    # pow
    try:
        result = math.pow(args[0], args[1])
    except (ValueError, OverflowError) as e:
        raise EvaluationError(f"pow domain error: {e}") from None
    return result


def _unparse(node) -> str:
    op = node[0]
    if op == "num":
        return repr(node[1])
    if op == "var":
        return node[1]
    if op == "neg":
        return f"(-{_unparse(node[1])})"
    if op == "bin":
        return f"({_unparse(node[2])} {node[1]} {_unparse(node[3])})"
    return f"{node[1]}({', '.join(_unparse(a) for a in node[2])})"


@dataclass(frozen=True)
class ScoringExpression:
    source: str
    ast: tuple

    def evaluate(self, metrics: MetricVector) -> float:
        env = {name: getattr(metrics, name) for name in METRIC_NAMES}
        return float(_eval(self.ast, env))

    def unparse(self) -> str:
        return _unparse(self.ast)


def parse_expression(source: str) -> ScoringExpression:
    if not source or not source.strip():
        raise ExpressionError("empty expression", 0)
    return ScoringExpression(source, _Parser(source).parse())


DEFAULT_EXPRESSION = parse_expression(DEFAULT_SCORING)


def evaluate(expression: ScoringExpression, metrics: MetricVector) -> float:
    return expression.evaluate(metrics)


# ----------------------------------------------------------------------
# metrics

def scale_distance(
    g,
    precision: float,
    scale_low: float,
    scale_high: float,
    zero_inside_range: bool = False,
) -> float:
    """Distance between the candidate's spatial scale and the target range.

    The geometry is buffered by its positional precision; the scale measure
    is sqrt of the buffered area, compared against both range ends:
    least(|sqrt(area) - low|, |sqrt(area) - high|).  The literal formula is
    positive even inside the range; ``zero_inside_range`` gates the
    alternative reading.
    """
    if scale_low > scale_high:
        raise ValueError(f"invalid scale range ({scale_low}, {scale_high})")
    if precision < 0:
        raise ValueError("precision must be >= 0")
    measure = geom.sqrt_buffered_area(g, precision)
    return _scale_distance_from_measure(measure, scale_low, scale_high, zero_inside_range)


def _scale_distance_from_measure(measure, scale_low, scale_high, zero_inside_range=False):
    if zero_inside_range and scale_low <= measure <= scale_high:
        return 0.0
    return min(abs(measure - scale_low), abs(measure - scale_high))


def compute_metrics(
    query: "GeocodeQuery",
    candidate: "GeoHistoricalObject",
    registry: "GazetteerRegistry",
    w_d: float | None = None,
    sqrt_buffered_area: float | None = None,
    zero_inside_range: bool = False,
) -> MetricVector:
    """Assemble the six-metric vector for one (query, candidate) pair.

    ``w_d`` and ``sqrt_buffered_area`` may be passed in when the caller
    already has them (the candidate index computes w_d; the registry caches
    the buffered-area measure at insert); recomputing yields identical
    values.
    """
    normalized = query.normalized(registry)
    if w_d is None:
        w_d = textmod.string_distance(normalized.normalized, candidate.normalized_name)

    if query.period is not None:
        t_d = temporal_distance(query.period, registry.effective_period(candidate))
        t_d_available = True
    else:
        t_d, t_d_available = 0.0, False

    candidate_number = registry.building_number(candidate.id)
    if normalized.building_number is not None and candidate_number is not None:
        b_d = textmod.building_number_distance(normalized.building_number, candidate_number)
        number_compared = True
    else:
        b_d, number_compared = 0.0, False

    s_p = registry.effective_accuracy(candidate)

    scale_low, scale_high = query.scale_range if query.scale_range is not None else DEFAULT_SCALE_RANGE
    if sqrt_buffered_area is None:
        sqrt_buffered_area = geom.sqrt_buffered_area(candidate.geometry, s_p)
    s_d = _scale_distance_from_measure(sqrt_buffered_area, scale_low, scale_high, zero_inside_range)

    if query.hint_geometry is not None:
        g_d = geom.distance(query.hint_geometry, candidate.geometry)
        g_d_available = True
    else:
        g_d, g_d_available = 0.0, False

    return MetricVector(
        w_d=w_d,
        t_d=t_d,
        b_d=b_d,
        s_p=s_p,
        s_d=s_d,
        g_d=g_d,
        t_d_available=t_d_available,
        number_compared=number_compared,
        g_d_available=g_d_available,
    )
