"""Shared helpers: seeded random generators for expressions and specs."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from cfkit import FormulaSpec
from cfkit import expr as ex

VAR_NAMES = ("n", "k", "i", "m", "x")


def gen_expr(rng: random.Random, depth: int) -> ex.Expr:
    """Random AST over the full node grammar, at most `depth` levels deep."""
    if depth <= 0:
        if rng.random() < 0.5:
            return ex.Integer(rng.randint(0, 12))
        return ex.Variable(rng.choice(VAR_NAMES))
    kind = rng.choice(
        ("int", "var", "neg", "add", "sub", "mul", "div", "pow", "fact", "binom", "sum")
    )
    sub = lambda: gen_expr(rng, depth - 1)  # noqa: E731
    match kind:
        case "int":
            return ex.Integer(rng.randint(0, 12))
        case "var":
            return ex.Variable(rng.choice(VAR_NAMES))
        case "neg":
            return ex.Negate(sub())
        case "add":
            return ex.Add(sub(), sub())
        case "sub":
            return ex.Sub(sub(), sub())
        case "mul":
            return ex.Mul(sub(), sub())
        case "div":
            return ex.Div(sub(), sub())
        case "pow":
            return ex.Pow(sub(), sub())
        case "fact":
            return ex.Factorial(sub())
        case "binom":
            return ex.Binomial(sub(), sub())
        case _:
            return ex.BoundedSum(rng.choice(VAR_NAMES), sub(), sub(), sub())


def gen_value_safe_expr(rng: random.Random, depth: int) -> ex.Expr:
    """Random AST kept evaluation-friendly.

    Exponents, factorial/binomial arguments and sum bounds are small literal
    leaves, so evaluating at small bindings cannot blow up.  (gen_expr has no
    such limits and is only meant for parse/render round-trips.)
    """
    if depth <= 0:
        if rng.random() < 0.5:
            return ex.Integer(rng.randint(0, 9))
        return ex.Variable(rng.choice(VAR_NAMES))
    small = lambda lo, hi: ex.Integer(rng.randint(lo, hi))  # noqa: E731
    sub = lambda: gen_value_safe_expr(rng, depth - 1)  # noqa: E731
    kind = rng.choice(("int", "var", "neg", "add", "sub", "mul", "div", "pow", "fact", "binom", "sum"))
    match kind:
        case "int":
            return small(0, 9)
        case "var":
            return ex.Variable(rng.choice(VAR_NAMES))
        case "neg":
            return ex.Negate(sub())
        case "add":
            return ex.Add(sub(), sub())
        case "sub":
            return ex.Sub(sub(), sub())
        case "mul":
            return ex.Mul(sub(), sub())
        case "div":
            return ex.Div(sub(), sub())
        case "pow":
            exponent = small(0, 4) if rng.random() < 0.7 else ex.Negate(small(1, 3))
            return ex.Pow(sub(), exponent)
        case "fact":
            return ex.Factorial(small(0, 8))
        case "binom":
            return ex.Binomial(small(0, 8), rng.choice((small(0, 8), ex.Variable("k"))))
        case _:
            return ex.BoundedSum("j", small(0, 2), small(0, 5), sub())


def _nonzero_fraction(rng: random.Random, lo: int = 1, hi: int = 3) -> Fraction:
    value = Fraction(rng.randint(lo, hi), rng.randint(1, 3))
    return -value if rng.random() < 0.5 else value


def gen_positive_spec(rng: random.Random, prefix_len: int | None = None) -> FormulaSpec:
    """Random spec with strictly positive terms.

    Positive a_n and b_n keep every intermediate denominator of the nested
    evaluation positive, so the oracle is defined at every depth.
    """
    n = ex.Variable("n")
    a_choices = [
        ex.Integer(rng.randint(1, 4)),
        ex.Add(n, ex.Integer(rng.randint(0, 3))),
        ex.Div(ex.Integer(rng.randint(1, 4)), n),
        ex.Mul(ex.Integer(rng.randint(1, 3)), n),
    ]
    b_choices = [
        ex.Integer(rng.randint(1, 4)),
        ex.Add(n, ex.Integer(rng.randint(0, 3))),
        n,
        ex.Div(ex.Integer(rng.randint(1, 3)), n),
    ]
    if prefix_len is None:
        prefix_len = rng.randint(0, 2)
    prefix = tuple(
        (abs(_nonzero_fraction(rng)), Fraction(rng.randint(1, 4), rng.randint(1, 2)))
        for _ in range(prefix_len)
    )
    return FormulaSpec(
        name=f"random_{rng.randint(0, 10**6)}",
        b0=ex.Integer(rng.randint(0, 5)),
        a_tail=rng.choice(a_choices),
        b_tail=rng.choice(b_choices),
        prefix=prefix,
    )


def gen_mixed_spec(rng: random.Random) -> FormulaSpec:
    """Random spec whose terms may be negative (denominators may vanish)."""
    base = gen_positive_spec(rng)
    a_tail = ex.Negate(base.a_tail) if rng.random() < 0.5 else base.a_tail
    b_tail = ex.Negate(base.b_tail) if rng.random() < 0.5 else base.b_tail
    prefix = tuple(
        (_nonzero_fraction(rng), Fraction(rng.randint(-2, 2)))
        for _ in range(rng.randint(0, 2))
    )
    return FormulaSpec(base.name, base.b0, a_tail, b_tail, prefix)


def replace_integer_node(expr: ex.Expr, index: int, new_value: int) -> ex.Expr:
    """Rebuild the tree with the index-th Integer leaf (preorder) replaced.

    Negative replacements become Negate(Integer(-v)) so the tree stays valid.
    """
    counter = {"seen": 0}

    def make(value: int) -> ex.Expr:
        return ex.Integer(value) if value >= 0 else ex.Negate(ex.Integer(-value))

    def go(e: ex.Expr) -> ex.Expr:
        match e:
            case ex.Integer():
                if counter["seen"] == index:
                    counter["seen"] += 1
                    return make(new_value)
                counter["seen"] += 1
                return e
            case ex.Variable():
                return e
            case ex.Negate(child=c):
                return ex.Negate(go(c))
            case ex.Add(left=l, right=r):
                return ex.Add(go(l), go(r))
            case ex.Sub(left=l, right=r):
                return ex.Sub(go(l), go(r))
            case ex.Mul(left=l, right=r):
                return ex.Mul(go(l), go(r))
            case ex.Div(left=l, right=r):
                return ex.Div(go(l), go(r))
            case ex.Pow(base=b, exponent=p):
                return ex.Pow(go(b), go(p))
            case ex.Factorial(child=c):
                return ex.Factorial(go(c))
            case ex.Binomial(top=t, bottom=b):
                return ex.Binomial(go(t), go(b))
            case ex.BoundedSum(var=v, lower=lo, upper=hi, body=body):
                return ex.BoundedSum(v, go(lo), go(hi), go(body))
        raise TypeError(f"not an Expr node: {e!r}")

    return go(expr)


def count_integer_nodes(expr: ex.Expr) -> int:
    return sum(1 for node in ex.walk(expr) if isinstance(node, ex.Integer))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
