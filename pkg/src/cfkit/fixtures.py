"""Bundled formula fixtures.

Three continued fractions with limit e ship with the package:

  e_cf1    2 + 1/(1 + 1/(2 + 2/(3 + 3/(4 + ...))))   leading term as prefix,
           tail a(n) = n - 1, b(n) = n for n >= 2
  e_cf1t   the rescaled presentation of the same fraction: a(n) = 1/n, b(n) = 1
  e_cf2    3 + -1/(4 + -2/(5 + -3/(6 + ...))): a(n) = -n, b(n) = n + 3
"""

from __future__ import annotations

from importlib import resources

from .engine import FormulaSpec
from .formula_file import parse_formula_text

FIXTURE_NAMES = ("e_cf1", "e_cf1t", "e_cf2")


def fixture_text(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    data = resources.files("cfkit").joinpath(f"data/formulas/{name}.cf")
    return data.read_text(encoding="utf-8")


def load_fixture(name: str) -> FormulaSpec:
    return parse_formula_text(fixture_text(name))
