"""The on-disk formula format: one key = "value" pair per line.

    # comments start with '#'
    name = "e_cf2"
    b0 = "3"
    a = "-n"
    b = "n + 3"

`name`, `b0`, `a` and `b` are required exactly once; `b0`, `a`, `b` hold DSL
expressions.  Zero or more `prefix = "a_i, b_i"` lines give explicit exact
rational terms for the leading indices 1, 2, ... in order; the tail
expressions take over afterwards.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from . import expr as ex
from .engine import FormulaSpec

_PAIR_LINE = re.compile(r"^(\w+)\s*=\s*\"(.*)\"\s*$")
_REQUIRED = ("name", "b0", "a", "b")


class FormulaFileError(Exception):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


def parse_formula_text(text: str) -> FormulaSpec:
    values: dict[str, str] = {}
    lines_seen: dict[str, int] = {}
    prefix_raw: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _PAIR_LINE.match(line)
        if not m:
            raise FormulaFileError(
                'expected key = "value" (with double quotes)', lineno
            )
        key, value = m.group(1), m.group(2)
        if key == "prefix":
            prefix_raw.append((lineno, value))
            continue
        if key not in _REQUIRED:
            raise FormulaFileError(f"unknown key {key!r}", lineno)
        if key in values:
            raise FormulaFileError(f"duplicate key {key!r}", lineno)
        values[key] = value
        lines_seen[key] = lineno
    for key in _REQUIRED:
        if key not in values:
            raise FormulaFileError(f"missing required key {key!r}")

    def parse_expr(key: str) -> ex.Expr:
        try:
            return ex.parse(values[key])
        except ex.ParseError as exc:
            raise FormulaFileError(f"bad {key!r} expression: {exc}", lines_seen[key]) from exc

    prefix = []
    for lineno, value in prefix_raw:
        parts = value.split(",")
        if len(parts) != 2:
            raise FormulaFileError(
                f'prefix must be "a_i, b_i", got {value!r}', lineno
            )
        try:
            pair = (Fraction(parts[0].strip()), Fraction(parts[1].strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormulaFileError(f"bad prefix rational: {exc}", lineno) from exc
        prefix.append(pair)

    return FormulaSpec(
        name=values["name"],
        b0=parse_expr("b0"),
        a_tail=parse_expr("a"),
        b_tail=parse_expr("b"),
        prefix=tuple(prefix),
    )


def parse_formula_file(path: str | Path) -> FormulaSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormulaFileError(f"cannot read formula file {path}: {exc}") from exc
    return parse_formula_text(text)


def render_formula_text(spec: FormulaSpec) -> str:
    lines = [
        f'name = "{spec.name}"',
        f'b0 = "{ex.render(spec.b0)}"',
    ]
    for a, b in spec.prefix:
        lines.append(f'prefix = "{a}, {b}"')
    lines.append(f'a = "{ex.render(spec.a_tail)}"')
    lines.append(f'b = "{ex.render(spec.b_tail)}"')
    return "\n".join(lines) + "\n"
