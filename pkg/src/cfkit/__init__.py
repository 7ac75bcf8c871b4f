"""cfkit: exact-arithmetic toolkit for generalized continued fractions.

Define a fraction b0 + a1/(b1 + a2/(b2 + ...)) by expressions for its terms,
compute exact convergents, rescale between equivalent presentations, check
closed-form hypotheses for the recurrence sequences over large exact ranges,
estimate limits, and recognize them as Möbius forms of e.
"""

from .engine import (
    Convergent,
    FormulaSpec,
    LimitEstimate,
    LimitVerdict,
    Side,
    SpecValidationError,
    TermEvaluationError,
    convergents,
    convergents_from_terms,
    estimate_limit,
    nested_eval_oracle,
)
from .expr import EvalError, Expr, ParseError, evaluate, free_vars, parse, render
from .fixtures import FIXTURE_NAMES, load_fixture
from .formula_file import FormulaFileError, parse_formula_file, parse_formula_text, render_formula_text
from .recognize import (
    ConstantExpr,
    Interval,
    RecognitionError,
    e_high_precision,
    mobius_value,
    parse_constant_expr,
    rational_reconstruct,
    recognize,
)
from .seqid import (
    NonIntegerTermError,
    SequenceMatch,
    SequenceSnapshot,
    bundled_snapshot,
    extract_integer_sequence,
    ingest_stripped_file,
    lookup_local,
    online_query_string,
)
from .transform import (
    ScalingError,
    apply_scaling_expr,
    apply_scaling_table,
    unitize_partial_numerators,
)
from .verify import (
    ClosedFormHypothesis,
    LimitCheck,
    LimitCheckOutcome,
    VerificationReport,
    VerifyVerdict,
    check_closed_form,
    check_footnote_equivalence,
    check_limit_against_target,
    vn_simplification_check,
)

__version__ = "0.1.0"

__all__ = [
    "ClosedFormHypothesis",
    "ConstantExpr",
    "Convergent",
    "EvalError",
    "Expr",
    "FIXTURE_NAMES",
    "FormulaFileError",
    "FormulaSpec",
    "Interval",
    "LimitCheck",
    "LimitCheckOutcome",
    "LimitEstimate",
    "LimitVerdict",
    "NonIntegerTermError",
    "ParseError",
    "RecognitionError",
    "ScalingError",
    "SequenceMatch",
    "SequenceSnapshot",
    "Side",
    "SpecValidationError",
    "TermEvaluationError",
    "VerificationReport",
    "VerifyVerdict",
    "apply_scaling_expr",
    "apply_scaling_table",
    "bundled_snapshot",
    "check_closed_form",
    "check_footnote_equivalence",
    "check_limit_against_target",
    "convergents",
    "convergents_from_terms",
    "e_high_precision",
    "estimate_limit",
    "evaluate",
    "extract_integer_sequence",
    "free_vars",
    "ingest_stripped_file",
    "load_fixture",
    "lookup_local",
    "mobius_value",
    "nested_eval_oracle",
    "online_query_string",
    "parse",
    "parse_constant_expr",
    "parse_formula_file",
    "parse_formula_text",
    "rational_reconstruct",
    "recognize",
    "render",
    "render_formula_text",
    "unitize_partial_numerators",
    "vn_simplification_check",
]
