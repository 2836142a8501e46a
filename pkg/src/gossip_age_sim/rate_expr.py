"""Tiny grammar for n-dependent CTMC rates.

    expr  := coeff | base | coeff '*' base
    base  := 'n' | 'sqrt(n)' | 'cbrt(n)' | 'log(n)' | 'n^' rational
    coeff := positive decimal

``log`` is the natural logarithm. A rational exponent is either a decimal
("n^0.5") or a parenthesized fraction ("n^(1/3)").
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass

from .errors import ConfigurationError

_COEFF_RE = re.compile(r"\d+(?:\.\d+)?")
_EXP_RE = re.compile(r"(?:\((\d+)\s*/\s*(\d+)\)|(\d+(?:\.\d+)?))")


@dataclass(frozen=True)
class RateExpr:
    """Parsed rate expression; evaluate with ``at(n)``.

    With ``reciprocal`` set, ``at(n)`` returns 1/value: the expression then
    describes a mean holding time rather than a rate (used by the scenario
    presets, whose rate classes are named after the dwell-time growth).
    """

    text: str
    coeff: float
    # exponent of n, or None for log(n)
    exponent: float | None
    is_log: bool = False
    reciprocal: bool = False

    def at(self, n: int) -> float:
        if n < 1:
            raise ConfigurationError(f"rate expression evaluated at invalid n={n}")
        if self.is_log:
            value = self.coeff * math.log(n)
        elif self.exponent is None or self.exponent == 0.0:
            value = self.coeff
        else:
            value = self.coeff * n ** self.exponent
        if not (value > 0 and math.isfinite(value)):
            raise ConfigurationError(
                f"rate expression {self.text!r} is non-positive at n={n} (value {value})"
            )
        return 1.0 / value if self.reciprocal else value

    def __str__(self) -> str:
        return self.text


def _err(text: str, pos: int, msg: str) -> ConfigurationError:
    return ConfigurationError(f"rate expression {text!r}: {msg} at position {pos}")


def _parse_base(text: str, pos: int) -> tuple[float | None, bool, int]:
    """Parse a base term starting at ``pos``; returns (exponent, is_log, end)."""
    rest = text[pos:]
    for literal, result in (
        ("sqrt(n)", (0.5, False)),
        ("cbrt(n)", (1.0 / 3.0, False)),
        ("log(n)", (None, True)),
    ):
        if rest.startswith(literal):
            exp, is_log = result
            return (exp if exp is not None else None), is_log, pos + len(literal)
    if rest.startswith("n^"):
        m = _EXP_RE.match(text, pos + 2)
        if not m:
            raise _err(text, pos + 2, "expected a rational exponent after 'n^'")
        if m.group(3) is not None:
            exp = float(m.group(3))
        else:
            num, den = int(m.group(1)), int(m.group(2))
            if den == 0:
                raise _err(text, pos + 2, "zero denominator in exponent")
            exp = num / den
        return exp, False, m.end()
    if rest.startswith("n"):
        return 1.0, False, pos + 1
    raise _err(text, pos, f"expected 'n', 'sqrt(n)', 'cbrt(n)', 'log(n)' or 'n^', found {rest!r}")


def parse_rate_expr(text: str) -> RateExpr:
    """Parse ``text`` per the module grammar; raise ConfigurationError otherwise."""
    s = text.strip()
    if not s:
        raise ConfigurationError("rate expression is empty")
    pos = 0
    coeff = 1.0
    m = _COEFF_RE.match(s, pos)
    if m:
        coeff = float(m.group(0))
        pos = m.end()
        if pos == len(s):
            if coeff <= 0:
                raise _err(text, 0, f"coefficient must be positive, got {coeff}")
            return RateExpr(text=s, coeff=coeff, exponent=0.0)
        if s[pos] != "*":
            raise _err(text, pos, f"expected '*' after coefficient, found {s[pos]!r}")
        pos += 1
    exponent, is_log, pos = _parse_base(s, pos)
    if pos != len(s):
        raise _err(text, pos, f"trailing input {s[pos:]!r}")
    if coeff <= 0:
        raise _err(text, 0, f"coefficient must be positive, got {coeff}")
    return RateExpr(text=s, coeff=coeff, exponent=exponent, is_log=is_log)


def parse_holding_time_expr(text: str) -> RateExpr:
    """Parse ``text`` as a mean holding time: the leave rate is its inverse."""
    return dataclasses.replace(parse_rate_expr(text), reciprocal=True)


def as_rate_expr(value: "str | float | int | RateExpr") -> RateExpr:
    """Coerce a config value to a RateExpr (numbers become constants)."""
    if isinstance(value, RateExpr):
        return value
    if isinstance(value, (int, float)):
        if value <= 0:
            raise ConfigurationError(f"constant rate must be positive, got {value}")
        return RateExpr(text=repr(float(value)), coeff=float(value), exponent=0.0)
    return parse_rate_expr(value)
